#include "rtlic/instrument.hpp"

#include "rtlic/printer.hpp"
#include "rtlic/sim.hpp"

#include "test_util.hpp"

#include <doctest.h>

using namespace rtlic;
using namespace rtlic::test;

namespace {

struct GoldenSetup {
    ElaboratedDesign design;
    CfgSet cs;
    BranchTarget target;
    SequenceStack ss;

    GoldenSetup() : design(golden_ram()), cs(build_cfg_set(design)) {
        target = resolve_target(design, cs, TargetLocator::at_line(36, true));
        ss = dependency_search(cs, get_signal_expression(cs, target));
    }
};

std::vector<std::pair<std::string, uint64_t>> as_pairs(const ConstraintSet &c) {
    std::vector<std::pair<std::string, uint64_t>> out;
    for (const auto &r : c.resolved) {
        out.push_back({r.signal, r.value});
    }
    return out;
}

std::set<std::string> unresolved_names(const ConstraintSet &c) {
    std::set<std::string> out;
    for (const auto &u : c.unresolved) {
        out.insert(u.signal);
    }
    return out;
}

} // namespace

TEST_CASE("target constraints for the golden block") {
    GoldenSetup g;
    ConstraintSet tc = extract_constraints(g.cs, g.cs.id_of("B15"));
    CHECK(as_pairs(tc) == std::vector<std::pair<std::string, uint64_t>>{
                              {"r_en", 1}, {"w_en", 0}, {"addr", 4}, {"r_data", 0xAB}});
    CHECK(tc.unresolved.empty());
    CHECK(tc.predicates.empty());
}

TEST_CASE("sequence constraints before resolution") {
    GoldenSetup g;

    ConstraintSet b3 = extract_constraints(g.cs, g.cs.id_of("B3"));
    CHECK(as_pairs(b3) ==
          std::vector<std::pair<std::string, uint64_t>>{{"r_en", 0}, {"w_en", 1}});
    CHECK(unresolved_names(b3) == std::set<std::string>{"mem", "addr", "w_data"});

    ConstraintSet b8 = extract_constraints(g.cs, g.cs.id_of("B8"));
    CHECK(as_pairs(b8) ==
          std::vector<std::pair<std::string, uint64_t>>{{"r_en", 1}, {"w_en", 0}});
    CHECK(unresolved_names(b8) == std::set<std::string>{"mem", "addr", "r_data"});
}

TEST_CASE("modify resolves against the target constraints") {
    GoldenSetup g;
    ConstraintSet tc = extract_constraints(g.cs, g.cs.id_of("B15"));

    // addr via intersection, w_data via the chained dependency, mem discarded
    ConstraintSet b3 = modify(tc, extract_constraints(g.cs, g.cs.id_of("B3")), g.cs);
    CHECK(as_pairs(b3) == std::vector<std::pair<std::string, uint64_t>>{
                              {"r_en", 0}, {"w_en", 1}, {"addr", 4}, {"w_data", 0xAB}});
    CHECK(b3.unresolved.empty());

    ConstraintSet b8 = modify(tc, extract_constraints(g.cs, g.cs.id_of("B8")), g.cs);
    CHECK(as_pairs(b8) == std::vector<std::pair<std::string, uint64_t>>{
                              {"r_en", 1}, {"w_en", 0}, {"addr", 4}, {"r_data", 0xAB}});
    CHECK(b8.unresolved.empty());
}

TEST_CASE("modify with nothing unresolved is the identity") {
    GoldenSetup g;
    ConstraintSet tc = extract_constraints(g.cs, g.cs.id_of("B15"));
    ConstraintSet sc;
    sc.owner = g.cs.id_of("B3");
    sc.resolved = {{"r_en", true, 0, 1}};
    ConstraintSet out = modify(tc, sc, g.cs);
    CHECK(as_pairs(out) == as_pairs(sc));
    CHECK(out.unresolved.empty());
}

TEST_CASE("modify monotonicity on every guarded ram block") {
    GoldenSetup g;
    ConstraintSet tc = extract_constraints(g.cs, g.cs.id_of("B15"));
    for (const auto &b : g.cs.blocks) {
        ConstraintSet sc = extract_constraints(g.cs, b.id);
        ConstraintSet out = modify(tc, sc, g.cs);
        CHECK(out.resolved.size() >= sc.resolved.size());
        CHECK(out.unresolved.empty());
    }
}

TEST_CASE("create_branch requires at least one constraint") {
    ConstraintSet empty;
    CHECK_THROWS_WITH_AS(create_branch(empty, "Target1"),
                         doctest::Contains("unconstrained sequence event"), Error);
    ConstraintSet one;
    one.resolved = {{"r_en", true, 0, 1}};
    SyntheticTarget st = create_branch(one, "Target1");
    CHECK(st.marker == "Target1");
    CHECK(st.constraints.resolved.size() == 1);
}

TEST_CASE("golden target queue renders the expected branches") {
    GoldenSetup g;
    TargetQueue tq = build_target_queue(g.cs, g.target, g.ss);
    REQUIRE(tq.entries.size() == 2);
    CHECK(tq.entries[0].marker == "Target1");
    CHECK(tq.entries[0].origin_block == "B3");
    CHECK(tq.entries[1].marker == "Target2");
    CHECK(tq.entries[1].origin_block == "B8");

    InstrumentedDesign inst = instrument_design(g.design, tq);
    REQUIRE(inst.design.ast.processes.size() == 4);
    CHECK(inst.design.ast.processes[3].kind == ProcessKind::Combinational);

    std::string printed = print_design(inst.design.ast);
    CHECK(printed.find("if (r_en == 1'b0 && w_en == 1'b1 && addr == 4'h4 && w_data == 8'hab)") !=
          std::string::npos);
    CHECK(printed.find("$display(\"Target1\")") != std::string::npos);
    CHECK(printed.find("if (r_en == 1'b1 && w_en == 1'b0 && addr == 4'h4 && r_data == 8'hab)") !=
          std::string::npos);
    CHECK(printed.find("$display(\"Target2\")") != std::string::npos);

    // branch-arm numbering continues across the checker process
    CHECK(inst.queue.entries[0].branch_block == "B17");
    CHECK(inst.queue.entries[1].branch_block == "B19");

    // markers: display text where present, block label otherwise
    CHECK(inst.marker_table.at("B17") == "Target1");
    CHECK(inst.marker_table.at("B19") == "Target2");
    CHECK(inst.marker_table.at("B15") == "Target");
    CHECK(inst.marker_table.at("B3") == "B3");

    // queue order equals stack order
    for (size_t i = 0; i < tq.entries.size(); ++i) {
        CHECK(inst.queue.entries[i].origin_block == g.cs.block(g.ss.blocks[i]).label);
    }

    // the checker observes but never assigns
    CfgSet inst_cs = build_cfg_set(inst.design);
    for (BlockId id : inst_cs.cfgs[3].nodes) {
        CHECK(inst_cs.block(id).defs.empty());
    }
}

TEST_CASE("empty queue instruments markers only") {
    GoldenSetup g;
    InstrumentedDesign inst = instrument_design(g.design, {});
    CHECK(inst.design.ast.processes.size() == 3);
    CHECK(inst.marker_table.at("B15") == "Target");
    CHECK(inst.marker_table.size() == build_cfg_set(g.design).blocks.size());
}

TEST_CASE("instrumentation does not disturb the original signals") {
    GoldenSetup g;
    TargetQueue tq = build_target_queue(g.cs, g.target, g.ss);
    InstrumentedDesign inst = instrument_design(g.design, tq);

    std::mt19937_64 rng(5);
    for (int round = 0; round < 100; ++round) {
        TestSet t = TestSet::random(g.design, 6, rng());
        SimulationTrace a = simulate(g.design, t, 6);
        SimulationTrace b = simulate(inst, t, 6);
        CHECK(a.final_regs == b.final_regs);
        CHECK(a.final_mems == b.final_mems);
    }
}

TEST_CASE("duplicate display markers are rejected at instrumentation") {
    ElaboratedDesign d = design_from(
        "module m(input clk, input a);\n"
        "always @(*) begin\n if (a) begin\n  $display(\"X\");\n end\nend\n"
        "always @(*) begin\n if (a) begin\n  $display(\"X\");\n end\nend\nendmodule\n");
    CHECK_THROWS_WITH_AS(instrument_design(d, {}), doctest::Contains("duplicate marker"), Error);
}
