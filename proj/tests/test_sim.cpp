#include "rtlic/sim.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>

using namespace rtlic;
using namespace rtlic::test;

namespace {

TestSet vectors(const ElaboratedDesign &d,
                std::vector<std::map<std::string, uint64_t>> per_cycle) {
    std::vector<TestVector> vs;
    for (size_t i = 0; i < per_cycle.size(); ++i) {
        TestVector v;
        v.cycle = static_cast<int>(i) + 1;
        v.assignments = std::move(per_cycle[i]);
        vs.push_back(std::move(v));
    }
    return TestSet::normalized(d, std::move(vs));
}

bool ran(const SimulationTrace &tr, const CfgSet &cs, const std::string &label, int cycle) {
    return tr.block_executed(cs.id_of(label), cycle);
}

} // namespace

TEST_CASE("write cycle executes B2 and B3 and lands in memory") {
    ElaboratedDesign d = golden_ram();
    CfgSet cs = build_cfg_set(d);
    Simulator sim(d, cs);

    TestSet t = vectors(d, {{{"r_en", 0}, {"w_en", 1}, {"addr", 5}, {"w_data", 0xAB}}});
    SimulationTrace tr = sim.run(t, 1);

    CHECK(ran(tr, cs, "B2", 1));
    CHECK(ran(tr, cs, "B3", 1));
    CHECK_FALSE(ran(tr, cs, "B1", 1));
    CHECK_FALSE(ran(tr, cs, "B8", 1));
    CHECK(tr.final_mems.at("mem")[5] == 0xAB);
}

TEST_CASE("write then read transfers the stored word") {
    ElaboratedDesign d = golden_ram();
    CfgSet cs = build_cfg_set(d);
    Simulator sim(d, cs);

    TestSet t = vectors(d, {{{"r_en", 0}, {"w_en", 1}, {"addr", 5}, {"w_data", 0xAB}},
                            {{"r_en", 1}, {"w_en", 0}, {"addr", 5}}});
    SimulationTrace tr = sim.run(t, 2);
    CHECK(ran(tr, cs, "B8", 2));
    CHECK(tr.final_regs.at("r_data") == 0xAB);
    // addr 5 is not the checked address, so the display block stays silent
    CHECK_FALSE(ran(tr, cs, "B15", 1));
    CHECK_FALSE(ran(tr, cs, "B15", 2));
}

TEST_CASE("write then read at the checked address fires the marker post-edge") {
    ElaboratedDesign d = golden_ram();
    CfgSet cs = build_cfg_set(d);
    Simulator sim(d, cs);

    TestSet t = vectors(d, {{{"r_en", 0}, {"w_en", 1}, {"addr", 4}, {"w_data", 0xAB}},
                            {{"r_en", 1}, {"w_en", 0}, {"addr", 4}}});
    SimulationTrace tr = sim.run(t, 2);
    CHECK(ran(tr, cs, "B9", 2));
    CHECK(ran(tr, cs, "B12", 2));
    CHECK(ran(tr, cs, "B13", 2));
    CHECK(ran(tr, cs, "B15", 2));
    CHECK(tr.activated_markers.count({"Target", 2}) == 1);
    CHECK(tr.first_marker("Target", 1) == 2);
}

TEST_CASE("all-zero inputs never reach the write, read, or target blocks") {
    ElaboratedDesign d = golden_ram();
    CfgSet cs = build_cfg_set(d);
    Simulator sim(d, cs);
    SimulationTrace tr = sim.run(TestSet{}, 3);
    for (int c = 1; c <= 3; ++c) {
        CHECK_FALSE(ran(tr, cs, "B3", c));
        CHECK_FALSE(ran(tr, cs, "B8", c));
        CHECK_FALSE(ran(tr, cs, "B15", c));
    }
    CHECK(tr.activated_markers.empty());
}

TEST_CASE("simulation is deterministic") {
    ElaboratedDesign d = golden_ram();
    CfgSet cs = build_cfg_set(d);
    Simulator sim(d, cs);
    TestSet t = TestSet::random(d, 8, 99);
    SimulationTrace a = sim.run(t, 8);
    SimulationTrace b = sim.run(t, 8);
    CHECK(a.to_log(cs) == b.to_log(cs));
    CHECK(a.final_regs == b.final_regs);
    CHECK(a.final_mems == b.final_mems);
}

TEST_CASE("nonblocking commits are order independent") {
    ElaboratedDesign d = golden_ram();
    CfgSet cs = build_cfg_set(d);
    std::mt19937_64 rng(17);
    for (int round = 0; round < 25; ++round) {
        TestSet t = TestSet::random(d, 6, rng());
        Simulator forward(d, cs);
        Simulator reversed(d, cs);
        reversed.set_process_order({2, 1, 0});
        SimulationTrace a = forward.run(t, 6);
        SimulationTrace b = reversed.run(t, 6);
        CHECK(a.final_regs == b.final_regs);
        CHECK(a.final_mems == b.final_mems);
    }
}

TEST_CASE("markers appear exactly when their block executes") {
    ElaboratedDesign d = golden_ram();
    CfgSet cs = build_cfg_set(d);
    Simulator sim(d, cs);
    std::mt19937_64 rng(71);
    for (int round = 0; round < 25; ++round) {
        TestSet t = TestSet::random(d, 8, rng());
        SimulationTrace tr = sim.run(t, 8);
        for (int c = 1; c <= 8; ++c) {
            CHECK(tr.block_executed(cs.id_of("B15"), c) ==
                  (tr.activated_markers.count({"Target", c}) == 1));
        }
    }
}

TEST_CASE("memory words only change when a defining block ran that cycle") {
    ElaboratedDesign d = golden_ram();
    CfgSet cs = build_cfg_set(d);
    Simulator sim(d, cs);
    std::mt19937_64 rng(13);
    for (int round = 0; round < 25; ++round) {
        TestSet t = TestSet::random(d, 8, rng());
        std::vector<uint64_t> prev(16, 0);
        for (int c = 1; c <= 8; ++c) {
            SimulationTrace tr = sim.run(t, c);
            const auto &now = tr.final_mems.at("mem");
            if (now != prev) {
                CHECK(tr.block_executed(cs.id_of("B3"), c));
            }
            prev = now;
        }
    }
}

TEST_CASE("missing cycles pad as all-zero inputs") {
    ElaboratedDesign d = golden_ram();
    CfgSet cs = build_cfg_set(d);
    Simulator sim(d, cs);
    TestSet t = vectors(d, {{{"r_en", 0}, {"w_en", 1}, {"addr", 2}, {"w_data", 0x7}}});
    SimulationTrace tr = sim.run(t, 4);
    CHECK(tr.final_mems.at("mem")[2] == 0x7);
    for (int c = 2; c <= 4; ++c) {
        CHECK_FALSE(ran(tr, cs, "B3", c));
    }
}

TEST_CASE("test set rejects unknown inputs, gaps, and overflow") {
    ElaboratedDesign d = golden_ram();
    {
        TestVector v;
        v.cycle = 1;
        v.assignments = {{"bogus", 1}};
        CHECK_THROWS_WITH_AS(TestSet::normalized(d, {v}), doctest::Contains("unknown input"),
                             Error);
    }
    {
        TestVector v;
        v.cycle = 2;
        CHECK_THROWS_WITH_AS(TestSet::normalized(d, {v}), doctest::Contains("contiguous"), Error);
    }
    {
        TestVector v;
        v.cycle = 1;
        v.assignments = {{"addr", 0x1F}};
        CHECK_THROWS_WITH_AS(TestSet::normalized(d, {v}), doctest::Contains("exceeds"), Error);
    }
}

TEST_CASE("test set JSON round-trip") {
    ElaboratedDesign d = golden_ram();
    std::mt19937_64 rng(3);
    for (int round = 0; round < 10; ++round) {
        TestSet t = TestSet::random(d, 5, rng());
        TestSet back = TestSet::from_json(t.to_json(), d);
        REQUIRE(back.cycles() == t.cycles());
        for (int c = 1; c <= 5; ++c) {
            for (const auto &name : d.input_names()) {
                CHECK(back.value(c, name) == t.value(c, name));
            }
        }
    }
    CHECK_THROWS_AS(TestSet::from_json("[{\"cycle\": 1}]", d), Error);
    CHECK_THROWS_AS(TestSet::from_json("{", d), Error);
}

TEST_CASE("combinational self-dependence is reported as a loop") {
    ElaboratedDesign d = design_from("module m(input clk, output reg q);\n"
                                     "always @(*) begin\n q = ~q;\nend\nendmodule\n");
    CfgSet cs = build_cfg_set(d);
    Simulator sim(d, cs);
    CHECK_THROWS_WITH_AS(sim.run(TestSet{}, 1), doctest::Contains("combinational loop"), Error);
}

TEST_CASE("combinational chain settles and tracks the clocked state") {
    ElaboratedDesign d = design_from(
        "module m(input clk, input [3:0] a, output reg [3:0] q, output reg [3:0] w1, output reg [3:0] w2);\n"
        "always @(posedge clk) begin\n q <= a;\nend\n"
        "always @(*) begin\n w1 = q + 4'h1;\nend\n"
        "always @(*) begin\n w2 = w1 + 4'h1;\nend\nendmodule\n");
    CfgSet cs = build_cfg_set(d);
    Simulator sim(d, cs);
    TestSet t = vectors(d, {{{"a", 3}}, {{"a", 7}}});
    SimulationTrace tr = sim.run(t, 2);
    CHECK(tr.final_regs.at("q") == 7);
    CHECK(tr.final_regs.at("w1") == 8);
    CHECK(tr.final_regs.at("w2") == 9);
}

TEST_CASE("replay_check distinguishes activating and inert tests") {
    ElaboratedDesign d = golden_ram();
    CfgSet cs = build_cfg_set(d);
    BranchTarget target = resolve_target(d, cs, TargetLocator::at_marker("Target"));

    TestSet good = vectors(d, {{{"r_en", 0}, {"w_en", 1}, {"addr", 4}, {"w_data", 0xAB}},
                               {{"r_en", 1}, {"w_en", 0}, {"addr", 4}}});
    CHECK(replay_check(d, good, target, 10));

    CHECK_FALSE(replay_check(d, TestSet{}, target, 10));

    // a write alone cannot satisfy the read comparison
    TestSet write_only = vectors(d, {{{"r_en", 0}, {"w_en", 1}, {"addr", 4}, {"w_data", 0xAB}}});
    CHECK_FALSE(replay_check(d, write_only, target, 10));
}

TEST_CASE("trace log format") {
    ElaboratedDesign d = golden_ram();
    CfgSet cs = build_cfg_set(d);
    Simulator sim(d, cs);
    TestSet t = vectors(d, {{{"r_en", 0}, {"w_en", 1}, {"addr", 4}, {"w_data", 0xAB}},
                            {{"r_en", 1}, {"w_en", 0}, {"addr", 4}}});
    std::string log = sim.run(t, 2).to_log(cs);
    CHECK(log.find("C 1\n") != std::string::npos);
    CHECK(log.find("B B3\n") != std::string::npos);
    CHECK(log.find("M Target 2\n") != std::string::npos);
}
