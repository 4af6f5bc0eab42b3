#include "rtlic/pipeline.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace rtlic;
using namespace rtlic::test;

namespace {

RunConfig golden_config(const std::string &out_dir) {
    RunConfig cfg;
    cfg.design_path = data_path("ram.v");
    cfg.target = "line:37";
    cfg.params = golden_params();
    cfg.unroll = 10;
    cfg.limit = 10;
    cfg.seed = 1;
    cfg.out_dir = out_dir;
    return cfg;
}

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("gen pipeline: golden run exits zero with full artifacts") {
    std::filesystem::path out = std::filesystem::temp_directory_path() / "rtlic_test_gen";
    std::filesystem::remove_all(out);
    GenOutcome outcome = run_gen(golden_config(out.string()));
    CHECK(outcome.exit_code == 0);
    CHECK(outcome.activated);
    CHECK(outcome.replay_ok);

    std::filesystem::path dir(outcome.run_dir);
    CHECK(std::filesystem::exists(dir / "report.json"));
    CHECK(std::filesystem::exists(dir / "combined_test.json"));
    CHECK(std::filesystem::exists(dir / "trace.log"));
    CHECK(std::filesystem::exists(dir / "manifest.json"));

    std::string report = slurp(dir / "report.json");
    CHECK(report.find("\"Target1\"") != std::string::npos);
    CHECK(report.find("\"Target2\"") != std::string::npos);
    CHECK(report.find("\"schema_version\": 1") != std::string::npos);
    CHECK(report.find("\"B3\"") != std::string::npos); // sequence echo

    std::string trace = slurp(dir / "trace.log");
    CHECK(trace.find("M Target ") != std::string::npos);
}

TEST_CASE("gen pipeline: baseline mode fails with a not-activated report") {
    std::filesystem::path out = std::filesystem::temp_directory_path() / "rtlic_test_base";
    std::filesystem::remove_all(out);
    RunConfig cfg = golden_config(out.string());
    cfg.mode = "baseline";
    GenOutcome outcome = run_gen(cfg);
    CHECK(outcome.exit_code != 0);
    CHECK_FALSE(outcome.activated);
    CHECK(outcome.report_json.find("\"all_solved\": false") != std::string::npos);
}

TEST_CASE("gen pipeline: frontend failures carry the stage tag") {
    RunConfig cfg = golden_config("/tmp/rtlic_test_stage");
    cfg.params.erase("ADDR_W");
    CHECK_THROWS_WITH_AS(run_gen(cfg), doctest::Contains("frontend:"), Error);

    RunConfig bad = golden_config("/tmp/rtlic_test_stage");
    bad.design_path = data_path("missing.v");
    CHECK_THROWS_WITH_AS(run_gen(bad), doctest::Contains("frontend:"), Error);
}

TEST_CASE("reproducibility: same seed gives byte-identical reports") {
    std::filesystem::path out_a = std::filesystem::temp_directory_path() / "rtlic_test_rep_a";
    std::filesystem::path out_b = std::filesystem::temp_directory_path() / "rtlic_test_rep_b";
    std::filesystem::remove_all(out_a);
    std::filesystem::remove_all(out_b);
    RunConfig a = golden_config(out_a.string());
    RunConfig b = golden_config(out_b.string());
    GenOutcome ra = run_gen(a);
    GenOutcome rb = run_gen(b);
    CHECK(ra.report_json == rb.report_json);
    CHECK(slurp(std::filesystem::path(ra.run_dir) / "combined_test.json") ==
          slurp(std::filesystem::path(rb.run_dir) / "combined_test.json"));
    // the run id depends only on the configuration
    CHECK(a.run_id() == b.run_id());
    a.seed = 2;
    CHECK(a.run_id() != b.run_id());
}

TEST_CASE("replay command validates generated and truncated files") {
    std::filesystem::path out = std::filesystem::temp_directory_path() / "rtlic_test_replay";
    std::filesystem::remove_all(out);
    GenOutcome outcome = run_gen(golden_config(out.string()));
    REQUIRE(outcome.exit_code == 0);
    std::string test_file = (std::filesystem::path(outcome.run_dir) / "combined_test.json").string();

    CHECK(run_replay(data_path("ram.v"), golden_params(), test_file, "line:37", 10) == 0);

    // an all-zero test set cannot activate the target
    std::filesystem::path zero = out / "zero.json";
    {
        std::ofstream f(zero);
        f << "[{\"cycle\": 1, \"inputs\": {}}]";
    }
    CHECK(run_replay(data_path("ram.v"), golden_params(), zero.string(), "line:37", 10) == 1);

    // a truncated file is a parse error
    std::filesystem::path broken = out / "broken.json";
    {
        std::ofstream f(broken);
        f << "[{\"cycle\": 1,";
    }
    CHECK_THROWS_WITH_AS(
        run_replay(data_path("ram.v"), golden_params(), broken.string(), "line:37", 10),
        doctest::Contains("testset:"), Error);
}

TEST_CASE("dump artifacts: seq, cfg-dot, instrumented") {
    std::string seq = dump_artifact(data_path("ram.v"), golden_params(), "seq", "line:37");
    CHECK(seq.rfind("S = <B3, B8>", 0) == 0);
    CHECK(seq.find("\"sequence\"") != std::string::npos);

    std::string dot = dump_artifact(data_path("ram.v"), golden_params(), "cfg-dot", "");
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("style=dashed") != std::string::npos);

    std::string inst = dump_artifact(data_path("ram.v"), golden_params(), "instrumented", "line:37");
    CHECK(inst.find("$display(\"Target1\")") != std::string::npos);

    CHECK_THROWS_WITH_AS(dump_artifact(data_path("ram.v"), golden_params(), "nope", ""),
                         doctest::Contains("usage:"), Error);
    CHECK_THROWS_WITH_AS(dump_artifact(data_path("ram.v"), golden_params(), "seq", ""),
                         doctest::Contains("usage:"), Error);
}

TEST_CASE("smt export writes one script per solver call plus an index") {
    std::filesystem::path out = std::filesystem::temp_directory_path() / "rtlic_test_smt";
    std::filesystem::remove_all(out);
    RunConfig cfg = golden_config(out.string());
    cfg.out_dir = out.string();
    CHECK(run_smt_export(cfg) == 0);
    CHECK(std::filesystem::exists(out / "index.json"));
    CHECK(std::filesystem::exists(out / "query_0001.smt2"));
    std::string script = slurp(out / "query_0001.smt2");
    CHECK(script.find("(check-sat)") != std::string::npos);
    CHECK(script.find("(get-model)") != std::string::npos);
    std::string index = slurp(out / "index.json");
    CHECK(index.find("\"verdict\": \"sat\"") != std::string::npos);
}

TEST_CASE("external solver specs resolve paths and honor the environment") {
    CHECK(resolve_external_solver("internal").empty());
    CHECK(resolve_external_solver("external:/usr/bin/solver") == "/usr/bin/solver");
    CHECK_THROWS_AS(resolve_external_solver("external"), Error);
    setenv("RTLIC_SOLVER", "/opt/z3", 1);
    CHECK(resolve_external_solver("external") == "/opt/z3");
    CHECK(resolve_external_solver("external:/usr/bin/solver") == "/opt/z3");
    unsetenv("RTLIC_SOLVER");
}
