#include "rtlic/cfg.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <deque>
#include <map>

using namespace rtlic;
using namespace rtlic::test;

namespace {

std::vector<std::string> labels(const CfgSet &cs, const std::vector<BlockId> &ids) {
    std::vector<std::string> out;
    for (BlockId id : ids) {
        out.push_back(cs.block(id).label);
    }
    return out;
}

// reference reverse-BFS on an explicit adjacency list, independent of the
// CfgSet query helpers
std::vector<BlockId> reference_bfs(const CfgSet &cs, BlockId start) {
    const Cfg &cfg = cs.cfg_of(start);
    std::map<BlockId, std::vector<BlockId>> rev;
    for (const auto &e : cfg.intra) {
        rev[e.to].push_back(e.from);
    }
    for (auto &[k, v] : rev) {
        std::sort(v.begin(), v.end());
    }
    std::vector<BlockId> order;
    std::set<BlockId> seen{start};
    std::deque<BlockId> queue{start};
    while (!queue.empty()) {
        BlockId cur = queue.front();
        queue.pop_front();
        order.push_back(cur);
        for (BlockId p : rev[cur]) {
            if (seen.insert(p).second) {
                if (p == cfg.entry) {
                    continue;
                }
                queue.push_back(p);
            }
        }
    }
    return order;
}

} // namespace

TEST_CASE("ram CFG set: three CFGs with the documented block labels") {
    ElaboratedDesign d = golden_ram();
    CfgSet cs = build_cfg_set(d);
    REQUIRE(cs.cfgs.size() == 3);

    // write process B1..B4, read process B5..B8, check process B9..B16
    CHECK(cs.find_label("B1") != nullptr);
    CHECK(cs.block(cs.id_of("B3")).process == 1);
    CHECK(cs.block(cs.id_of("B8")).process == 2);
    CHECK(cs.block(cs.id_of("B15")).process == 3);
    CHECK(cs.find_label("B16") != nullptr);
    CHECK(cs.find_label("B17") == nullptr);

    // B3 holds the memory write, B8 the read, B15 the display
    CHECK(cs.block(cs.id_of("B3")).defs.count("mem") == 1);
    CHECK(cs.block(cs.id_of("B8")).defs.count("r_data") == 1);
    REQUIRE(cs.block(cs.id_of("B15")).stmts.size() == 1);
    CHECK(cs.block(cs.id_of("B15")).stmts[0]->kind == StmtKind::Display);

    // each entry guards r_en; branch nodes carry one true and one false edge
    for (const auto &cfg : cs.cfgs) {
        const Block &entry = cs.block(cfg.entry);
        REQUIRE(entry.guard.has_value());
        int true_edges = 0, false_edges = 0;
        for (const auto &e : cfg.intra) {
            if (e.from == cfg.entry && e.polarity == EdgePolarity::True) {
                ++true_edges;
            }
            if (e.from == cfg.entry && e.polarity == EdgePolarity::False) {
                ++false_edges;
            }
        }
        CHECK(true_edges == 1);
        CHECK(false_edges == 1);
    }
}

TEST_CASE("ram inter-edges are exactly (B3,B8,mem) and (B8,B13,r_data)") {
    ElaboratedDesign d = golden_ram();
    CfgSet cs = build_cfg_set(d);
    REQUIRE(cs.inter.size() == 2);
    CHECK(cs.inter[0].def_block == cs.id_of("B3"));
    CHECK(cs.inter[0].use_block == cs.id_of("B8"));
    CHECK(cs.inter[0].signal == "mem");
    CHECK(cs.inter[1].def_block == cs.id_of("B8"));
    CHECK(cs.inter[1].use_block == cs.id_of("B13"));
    CHECK(cs.inter[1].signal == "r_data");
}

TEST_CASE("straight-line single process has one CFG and no inter-edges") {
    ElaboratedDesign d = design_from("module m(input clk, input [3:0] a, output reg [3:0] q);\n"
                                     "always @(posedge clk) begin\n q <= a;\nend\nendmodule\n");
    CfgSet cs = build_cfg_set(d);
    CHECK(cs.cfgs.size() == 1);
    CHECK(cs.inter.empty());
    CHECK(cs.cfgs[0].nodes.size() == 1); // just the entry
}

TEST_CASE("find_assignment_blocks matches the worked example") {
    ElaboratedDesign d = golden_ram();
    CfgSet cs = build_cfg_set(d);
    CHECK(labels(cs, find_assignment_blocks(cs, "r_data")) == std::vector<std::string>{"B8"});
    CHECK(labels(cs, find_assignment_blocks(cs, "mem")) == std::vector<std::string>{"B3"});
    CHECK(find_assignment_blocks(cs, "w_data").empty()); // primary input
    CHECK_THROWS_WITH_AS(find_assignment_blocks(cs, "nope"),
                         doctest::Contains("unknown signal"), Error);
}

TEST_CASE("intra BFS follows predecessors and stops before the entry") {
    ElaboratedDesign d = golden_ram();
    CfgSet cs = build_cfg_set(d);

    CHECK(labels(cs, intra_bfs(cs, cs.id_of("B15"))) ==
          std::vector<std::string>{"B15", "B13", "B12", "B9"});
    CHECK(labels(cs, intra_bfs(cs, cs.id_of("B3"))) == std::vector<std::string>{"B3", "B2"});
    CHECK(labels(cs, intra_bfs(cs, cs.id_of("E1"))) == std::vector<std::string>{"E1"});
}

TEST_CASE("distance map: reverse BFS over intra and inter edges") {
    ElaboratedDesign d = golden_ram();
    CfgSet cs = build_cfg_set(d);
    DistanceMap dm = compute_distance(cs, cs.id_of("B15"));

    CHECK(dm[cs.id_of("B15")] == 0);
    CHECK(dm[cs.id_of("B13")] == 1);
    CHECK(dm[cs.id_of("B12")] == 2);
    CHECK(dm[cs.id_of("B9")] == 3);
    CHECK(dm[cs.id_of("E3")] == 4);
    // one inter-edge hop from B13 brings the read block within reach
    CHECK(dm[cs.id_of("B8")] == dm[cs.id_of("B13")] + 1);
    CHECK(dm[cs.id_of("B3")] == dm[cs.id_of("B8")] + 1);
    // blocks with no path to the target stay unreachable
    CHECK(dm[cs.id_of("B16")] == kUnreachable);
    CHECK(dm[cs.id_of("B11")] == kUnreachable);
}

TEST_CASE("isolated process is unreachable from a foreign target") {
    ElaboratedDesign d = design_from(
        "module m(input clk, input a, input b, output reg q, output reg p);\n"
        "always @(posedge clk) begin\n if (a) begin\n  q <= 1'b1;\n end\nend\n"
        "always @(posedge clk) begin\n if (b) begin\n  p <= 1'b1;\n end\nend\nendmodule\n");
    CfgSet cs = build_cfg_set(d);
    DistanceMap dm = compute_distance(cs, cs.cfgs[0].entry);
    for (BlockId id : cs.cfgs[1].nodes) {
        CHECK(dm[id] == kUnreachable);
    }
}

TEST_CASE("edge consistency and BFS oracle on random designs") {
    std::mt19937_64 rng(21);
    for (int round = 0; round < 60; ++round) {
        std::string text = random_design_text(rng);
        CAPTURE(text);
        ElaboratedDesign d = design_from(text);
        CfgSet cs = build_cfg_set(d);

        for (const auto &cfg : cs.cfgs) {
            std::set<BlockId> nodes(cfg.nodes.begin(), cfg.nodes.end());
            for (const auto &e : cfg.intra) {
                CHECK(nodes.count(e.from) == 1);
                CHECK(nodes.count(e.to) == 1);
                if (e.polarity != EdgePolarity::Always) {
                    CHECK(cs.block(e.from).guard.has_value());
                }
            }
            // every node reachable from the entry
            std::set<BlockId> seen{cfg.entry};
            std::deque<BlockId> queue{cfg.entry};
            while (!queue.empty()) {
                BlockId cur = queue.front();
                queue.pop_front();
                for (BlockId s : cs.intra_succs(cur)) {
                    if (seen.insert(s).second) {
                        queue.push_back(s);
                    }
                }
            }
            CHECK(seen.size() == cfg.nodes.size());

            for (BlockId b : cfg.nodes) {
                CHECK(intra_bfs(cs, b) == reference_bfs(cs, b));
            }
        }

        // distance triangle over reverse edges: dist(pred) <= dist(succ) + 1
        for (const auto &cfg : cs.cfgs) {
            for (BlockId target : cfg.nodes) {
                DistanceMap dm = compute_distance(cs, target);
                for (const auto &c2 : cs.cfgs) {
                    for (const auto &e : c2.intra) {
                        if (dm[e.to] != kUnreachable) {
                            CHECK(dm[e.from] <= dm[e.to] + 1);
                        }
                    }
                }
            }
        }

        // inter-edge soundness against the def/use sets
        for (const auto &e : cs.inter) {
            CHECK(cs.block(e.def_block).defs.count(e.signal) == 1);
            CHECK(cs.block(e.use_block).uses.count(e.signal) == 1);
            CHECK(cs.block(e.def_block).process != cs.block(e.use_block).process);
        }
    }
}

TEST_CASE("DOT export shows polarity styles and inter-edges") {
    ElaboratedDesign d = golden_ram();
    CfgSet cs = build_cfg_set(d);
    std::string dot = to_dot(cs);
    CHECK(dot.find("subgraph cluster_p1") != std::string::npos);
    CHECK(dot.find("subgraph cluster_p3") != std::string::npos);
    CHECK(dot.find("style=solid") != std::string::npos);
    CHECK(dot.find("style=dashed") != std::string::npos);
    CHECK(dot.find("B3 -> B8 [color=red, constraint=false, label=\"mem\"]") != std::string::npos);
    CHECK(dot.find("B8 -> B13 [color=red, constraint=false, label=\"r_data\"]") !=
          std::string::npos);
}
