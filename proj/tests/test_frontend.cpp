#include "rtlic/parser.hpp"
#include "rtlic/printer.hpp"
#include "rtlic/cfg.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <fstream>

using namespace rtlic;
using namespace rtlic::test;

static std::string read_file(const std::string &path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

TEST_CASE("ram module parses with the expected shape") {
    SourceDesign src = SourceDesign::from_file(data_path("ram.v"));
    Ast ast = parse_design(src);
    CHECK(ast.module_name == "ram");
    CHECK(ast.processes.size() == 3);
    CHECK(ast.memories.size() == 1);
    CHECK(ast.memories[0].name == "mem");

    int inputs = 0, output_regs = 0;
    for (const auto &p : ast.ports) {
        if (p.dir == Direction::Input) {
            ++inputs;
        } else if (p.is_reg) {
            ++output_regs;
        }
    }
    CHECK(inputs == 6);
    CHECK(output_regs == 1);

    CHECK(ast.processes[0].kind == ProcessKind::ClockedPosedge);
    CHECK(ast.processes[0].clock == "clk");
    CHECK(ast.processes[2].kind == ProcessKind::Combinational);
}

TEST_CASE("empty module parses") {
    Ast ast = parse_design(SourceDesign::from_string("module m;\nendmodule\n"));
    CHECK(ast.module_name == "m");
    CHECK(ast.processes.empty());
    CHECK(ast.ports.empty());
}

TEST_CASE("missing endmodule is a syntax error naming it") {
    std::string text = read_file(data_path("ram.v"));
    auto cut = text.rfind("endmodule");
    REQUIRE(cut != std::string::npos);
    text = text.substr(0, cut);
    CHECK_THROWS_WITH_AS(parse_design(SourceDesign::from_string(text)),
                         doctest::Contains("endmodule"), Error);
}

TEST_CASE("unsupported constructs are named in the diagnostic") {
    CHECK_THROWS_WITH_AS(
        parse_design(SourceDesign::from_string("module m;\ntask t; endtask\nendmodule\n")),
        doctest::Contains("unsupported feature: task"), Error);
    CHECK_THROWS_WITH_AS(
        parse_design(SourceDesign::from_string("module m;\ninitial begin end\nendmodule\n")),
        doctest::Contains("unsupported feature: initial"), Error);
    CHECK_THROWS_WITH_AS(parse_design(SourceDesign::from_string(
                             "module m;\nmodule n;\nendmodule\nendmodule\n")),
                         doctest::Contains("unexpected"), Error);
}

TEST_CASE("diagnostics carry file, line and column") {
    SourceDesign src = SourceDesign::from_string("module m(\n input clk,\n garbage x\n);\nendmodule\n",
                                                 "bad.v");
    try {
        parse_design(src);
        FAIL("expected a parse error");
    } catch (const Error &e) {
        CHECK(std::string(e.what()).rfind("bad.v:3:", 0) == 0);
    }
}

TEST_CASE("assignment kinds are checked per process type") {
    const char *blocking_in_clocked =
        "module m(input clk, input a, output reg q);\n"
        "always @(posedge clk) begin\n q = a;\nend\nendmodule\n";
    CHECK_THROWS_WITH_AS(parse_design(SourceDesign::from_string(blocking_in_clocked)),
                         doctest::Contains("blocking assignment in clocked"), Error);
    const char *nonblocking_in_comb =
        "module m(input clk, input a, output reg q);\n"
        "always @(*) begin\n q <= a;\nend\nendmodule\n";
    CHECK_THROWS_WITH_AS(parse_design(SourceDesign::from_string(nonblocking_in_comb)),
                         doctest::Contains("nonblocking assignment in combinational"), Error);
}

TEST_CASE("elaboration folds the memory geometry") {
    ElaboratedDesign d = golden_ram();
    const SignalInfo &mem = d.signal("mem");
    CHECK(mem.kind == SignalKind::Memory);
    CHECK(mem.depth == 16);
    CHECK(mem.width == 8);
    CHECK(d.signal("addr").width == 4);
    CHECK(d.signal("r_data").width == 8);
    CHECK(d.clock == "clk");

    // constants folded into the guard: line 36 compares against 0xAB
    bool found = false;
    for (const auto &p : d.ast.processes) {
        std::string printed = print_design(d.ast);
        found = printed.find("8'hab") != std::string::npos;
        (void)p;
        break;
    }
    CHECK(found);
}

TEST_CASE("elaboration without parameters is the identity") {
    const char *text =
        "module m(input clk, input [3:0] a, output reg [3:0] q);\n"
        "always @(posedge clk) begin\n if (a == 4'h3) begin\n  q <= a;\n end\nend\nendmodule\n";
    Ast ast = parse_design(SourceDesign::from_string(text));
    ElaboratedDesign d = elaborate(ast);
    CHECK(ast_equal(ast, d.ast));
}

TEST_CASE("missing parameter is reported by name") {
    SourceDesign src = SourceDesign::from_file(data_path("ram.v"));
    Ast ast = parse_design(src);
    CHECK_THROWS_WITH_AS(elaborate(ast, {{"DATA_W", 8}, {"ADDR", 4}, {"DATA", 1}}),
                         doctest::Contains("undefined parameter ADDR_W"), Error);
}

TEST_CASE("non-positive widths are rejected") {
    CHECK_THROWS_WITH_AS(
        design_from("module m(input clk, input [ADDR_W-1:0] a);\nendmodule\n", {{"ADDR_W", 0}}),
        doctest::Contains("non-positive width"), Error);
}

TEST_CASE("round trip: print then reparse is structurally identical") {
    SourceDesign src = SourceDesign::from_file(data_path("ram.v"));
    Ast ast = parse_design(src);
    Ast again = parse_design(SourceDesign::from_string(print_design(ast)));
    CHECK(ast_equal(ast, again));

    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        std::string text = random_design_text(rng);
        CAPTURE(text);
        Ast a = parse_design(SourceDesign::from_string(text));
        Ast b = parse_design(SourceDesign::from_string(print_design(a)));
        CHECK(ast_equal(a, b));
    }
}

TEST_CASE("elaboration is idempotent") {
    SourceDesign src = SourceDesign::from_file(data_path("ram.v"));
    Ast ast = parse_design(src);
    ElaboratedDesign once = elaborate(ast, golden_params());
    ElaboratedDesign twice = elaborate(once.ast, {});
    CHECK(ast_equal(once.ast, twice.ast));
}

TEST_CASE("every elaborated expression has a positive width and no parameters") {
    ElaboratedDesign d = golden_ram();
    std::function<void(const Expr &)> check_expr = [&](const Expr &e) {
        CHECK(e.width >= 1);
        if (e.kind == ExprKind::Ref) {
            CHECK(d.find_signal(e.name) != nullptr); // parameters are gone
        }
        if (e.lhs) check_expr(*e.lhs);
        if (e.rhs) check_expr(*e.rhs);
        if (e.tern) check_expr(*e.tern);
        if (e.index) check_expr(*e.index);
        for (const auto &p : e.parts) check_expr(*p);
    };
    std::function<void(const Stmt &)> check_stmt = [&](const Stmt &s) {
        if (s.cond) check_expr(*s.cond);
        if (s.rhs) check_expr(*s.rhs);
        if (s.lhs_index) check_expr(*s.lhs_index);
        for (const auto &c : s.stmts) check_stmt(*c);
        for (const auto &c : s.then_stmts) check_stmt(*c);
        for (const auto &c : s.else_stmts) check_stmt(*c);
    };
    for (const auto &p : d.ast.processes) {
        for (const auto &s : p.body) {
            check_stmt(*s);
        }
    }
}

TEST_CASE("resolve_target by line, containment, and marker") {
    ElaboratedDesign d = golden_ram();
    CfgSet cs = build_cfg_set(d);

    BranchTarget by_branch = resolve_target(d, cs, TargetLocator::at_line(36, true));
    CHECK(by_branch.label == "B15");
    CHECK(by_branch.process == 3);

    BranchTarget by_stmt = resolve_target(d, cs, TargetLocator::at_line(37));
    CHECK(by_stmt.label == "B15");

    BranchTarget by_marker = resolve_target(d, cs, TargetLocator::at_marker("Target"));
    CHECK(by_marker.label == "B15");

    BranchTarget false_arm = resolve_target(d, cs, TargetLocator::at_line(36, false));
    CHECK(false_arm.label == "B16");

    CHECK_THROWS_WITH_AS(resolve_target(d, cs, TargetLocator::at_line(2)),
                         doctest::Contains("no branch at line 2"), Error);
    CHECK_THROWS_WITH_AS(resolve_target(d, cs, TargetLocator::at_marker("Nope")),
                         doctest::Contains("no display marker"), Error);
}

TEST_CASE("target locator text forms") {
    TargetLocator a = TargetLocator::parse("line:36:false");
    CHECK(a.line == 36);
    CHECK_FALSE(a.polarity);
    TargetLocator b = TargetLocator::parse("marker:Target");
    CHECK(b.marker == "Target");
    CHECK_THROWS_AS(TargetLocator::parse("nonsense"), Error);
    CHECK_THROWS_AS(TargetLocator::parse("line:x"), Error);
}
