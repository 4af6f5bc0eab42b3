// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "rtlic/pipeline.hpp"

#include "rtlic/parser.hpp"
#include "rtlic/printer.hpp"
#include "rtlic/sequence.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace rtlic {

namespace {

uint64_t fnv1a(const std::string &text) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

[[noreturn]] void stage_fail(const std::string &stage, const Error &e) {
    throw Error(stage + ": " + e.what());
}

struct Frontend {
    ElaboratedDesign design;
    CfgSet cfg;
    BranchTarget target;
};

Frontend load_frontend(const std::string &design_path, const std::map<std::string, int64_t> &params,
                       const std::string &target) {
    Frontend fe;
    try {
        SourceDesign src = SourceDesign::from_file(design_path);
        Ast ast = parse_design(src);
        fe.design = elaborate(ast, params);
    } catch (const Error &e) {
        stage_fail("frontend", e);
    }
    fe.cfg = build_cfg_set(fe.design);
    if (!target.empty()) {
        try {
            fe.target = resolve_target(fe.design, fe.cfg, TargetLocator::parse(target));
        } catch (const Error &e) {
            stage_fail("frontend", e);
        }
    }
    return fe;
}

nlohmann::json vector_json(const TestVector &v) {
    nlohmann::json inputs;
    for (const auto &[name, value] : v.assignments) {
        std::ostringstream hex;
        hex << "0x" << std::hex << value;
        inputs[name] = hex.str();
    }
    return {{"cycle", v.cycle}, {"inputs", inputs}};
}

nlohmann::json result_json(const RunConfig &cfg, const IncrementalResult &result,
                           const SequenceStack &ss, const CfgSet &cs, bool replay_ok) {
    nlohmann::json params;
    for (const auto &[name, value] : cfg.params) {
        params[name] = value;
    }
    nlohmann::json targets = nlohmann::json::array();
    for (const auto &t : result.targets) {
        nlohmann::json fragment = nlohmann::json::array();
        for (const auto &v : t.fragment) {
            fragment.push_back(vector_json(v));
        }
        targets.push_back({{"marker", t.marker},
                           {"block", t.block},
                           {"solved", t.solved},
                           {"iterations", t.iterations},
                           {"activation_cycle", t.activation_cycle},
                           {"next_start", t.next_start},
                           {"fragment", fragment}});
    }
    nlohmann::json combined = nlohmann::json::array();
    for (const auto &v : result.combined.vectors) {
        combined.push_back(vector_json(v));
    }
    std::vector<std::string> sequence;
    for (BlockId b : ss.blocks) {
        sequence.push_back(cs.block(b).label);
    }
    return {{"schema_version", 1},
            {"run",
             {{"design", cfg.design_path},
              {"target", cfg.target},
              {"params", params},
              {"unroll", cfg.unroll},
              {"limit", cfg.limit},
              {"seed", cfg.seed},
              {"mode", cfg.mode},
              {"solver", cfg.solver}}},
            {"sequence", sequence},
            {"targets", targets},
            {"combined", combined},
            {"all_solved", result.all_solved},
            {"final_activation", result.final_activation},
            {"solver_calls", result.solver_calls},
            {"rejected_models", result.rejected_models},
            {"replay", {{"activated", replay_ok}}}};
}

void write_file(const std::filesystem::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << content;
}

} // namespace

std::string RunConfig::canonical() const {
    std::ostringstream os;
    os << "design=" << design_path << ";target=" << target << ";params=";
    for (const auto &[name, value] : params) {
        os << name << "=" << value << ",";
    }
    os << ";unroll=" << unroll << ";limit=" << limit << ";seed=" << seed << ";mode=" << mode
       << ";solver=" << solver;
    return os.str();
}

std::string RunConfig::run_id() const {
    std::ostringstream os;
    os << std::hex << fnv1a(canonical());
    return os.str();
}

std::string resolve_external_solver(const std::string &solver_spec) {
    if (solver_spec.rfind("external:", 0) == 0) {
        std::string path = solver_spec.substr(9);
        if (const char *env = std::getenv("RTLIC_SOLVER"); env && *env) {
            return env; // the environment override wins
        }
        return path;
    }
    if (solver_spec == "external") {
        if (const char *env = std::getenv("RTLIC_SOLVER"); env && *env) {
            return env;
        }
        throw Error("--solver external needs a path (external:<path> or RTLIC_SOLVER)");
    }
    return "";
}

GenOutcome run_gen(const RunConfig &cfg) {
    if (cfg.unroll < 1 || cfg.limit < 1) {
        throw Error("config: unroll and limit must be at least 1");
    }
    if (cfg.mode != "incremental" && cfg.mode != "baseline") {
        throw Error("config: mode must be incremental or baseline");
    }

    Frontend fe = load_frontend(cfg.design_path, cfg.params, cfg.target);

    // sequence identification (skipped entirely in baseline mode)
    SequenceStack ss;
    if (cfg.mode == "incremental") {
        try {
            bool guarded = false;
            for (BlockId p : fe.cfg.intra_preds(fe.target.block)) {
                if (fe.cfg.block(p).guard) {
                    guarded = true;
                }
            }
            if (guarded) {
                SignalExpression se = get_signal_expression(fe.cfg, fe.target);
                ss = dependency_search(fe.cfg, se);
            }
        } catch (const Error &e) {
            stage_fail("sequence", e);
        }
    }

    InstrumentedDesign instrumented;
    try {
        TargetQueue tq;
        if (cfg.mode == "incremental") {
            tq = build_target_queue(fe.cfg, fe.target, ss);
        }
        instrumented = instrument_design(fe.design, tq);
    } catch (const Error &e) {
        stage_fail("instrument", e);
    }

    SearchConfig search;
    search.unroll = cfg.unroll;
    search.limit = cfg.limit;
    search.seed = cfg.seed;
    search.baseline = cfg.mode == "baseline";
    std::string external = resolve_external_solver(cfg.solver);
    if (!external.empty()) {
        search.solver = [external](const ConstraintVector &cv) {
            return solve_external(cv, external);
        };
    } else if (cfg.solver != "internal") {
        throw Error("config: solver must be internal or external[:<path>]");
    }

    IncrementalResult result;
    try {
        result = incremental_run(instrumented, fe.target, search);
    } catch (const Error &e) {
        stage_fail("concolic", e);
    }

    GenOutcome out;
    out.result = result;
    bool final_solved = !result.targets.empty() && result.targets.back().solved;
    out.activated = final_solved;
    try {
        out.replay_ok =
            final_solved && replay_check(fe.design, result.combined, fe.target, cfg.unroll);
    } catch (const Error &e) {
        stage_fail("replay", e);
    }

    try {
        std::filesystem::path run_dir = std::filesystem::path(cfg.out_dir) / cfg.run_id();
        std::filesystem::create_directories(run_dir);
        out.run_dir = run_dir.string();

        nlohmann::json report = result_json(cfg, result, ss, fe.cfg, out.replay_ok);
        out.report_json = report.dump(2) + "\n";
        write_file(run_dir / "report.json", out.report_json);
        write_file(run_dir / "combined_test.json", result.combined.to_json());

        CfgSet original_cfg = build_cfg_set(fe.design);
        Simulator sim(fe.design, original_cfg);
        SimulationTrace trace = sim.run(result.combined, cfg.unroll);
        write_file(run_dir / "trace.log", trace.to_log(original_cfg));

        nlohmann::json manifest = {
            {"run_id", cfg.run_id()},
            {"config", cfg.canonical()},
            {"files", {"report.json", "combined_test.json", "trace.log"}}};
        write_file(run_dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (const Error &e) {
        stage_fail("artifacts", e);
    }

    out.exit_code = (out.activated && out.replay_ok) ? 0 : 1;
    return out;
}

int run_replay(const std::string &design_path, const std::map<std::string, int64_t> &params,
               const std::string &test_path, const std::string &target, int unroll) {
    Frontend fe = load_frontend(design_path, params, target);
    TestSet t;
    try {
        std::ifstream in(test_path);
        if (!in) {
            throw Error("cannot open test file " + test_path);
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        t = TestSet::from_json(buf.str(), fe.design);
    } catch (const Error &e) {
        stage_fail("testset", e);
    }
    bool ok = replay_check(fe.design, t, fe.target, unroll);
    return ok ? 0 : 1;
}

std::string dump_artifact(const std::string &design_path,
                          const std::map<std::string, int64_t> &params, const std::string &what,
                          const std::string &target) {
    if (what == "cfg-dot") {
        Frontend fe = load_frontend(design_path, params, "");
        return to_dot(fe.cfg);
    }
    if (what == "seq") {
        if (target.empty()) {
            throw Error("usage: seq needs --target");
        }
        Frontend fe = load_frontend(design_path, params, target);
        SignalExpression se = get_signal_expression(fe.cfg, fe.target);
        SequenceStack ss = dependency_search(fe.cfg, se);
        nlohmann::json j;
        j["sequence"] = nlohmann::json::array();
        for (BlockId b : ss.blocks) {
            j["sequence"].push_back(fe.cfg.block(b).label);
        }
        j["target"] = fe.target.label;
        return ss.str(fe.cfg) + "\n" + j.dump(2) + "\n";
    }
    if (what == "instrumented") {
        if (target.empty()) {
            throw Error("usage: instrumented needs --target");
        }
        Frontend fe = load_frontend(design_path, params, target);
        SequenceStack ss;
        bool guarded = false;
        for (BlockId p : fe.cfg.intra_preds(fe.target.block)) {
            if (fe.cfg.block(p).guard) {
                guarded = true;
            }
        }
        if (guarded) {
            SignalExpression se = get_signal_expression(fe.cfg, fe.target);
            ss = dependency_search(fe.cfg, se);
        }
        TargetQueue tq = build_target_queue(fe.cfg, fe.target, ss);
        InstrumentedDesign instrumented = instrument_design(fe.design, tq);
        return print_design(instrumented.design.ast);
    }
    throw Error("usage: unknown dump artifact \"" + what +
                "\" (expected cfg-dot, seq, or instrumented)");
}

int run_smt_export(const RunConfig &cfg) {
    RunConfig local = cfg;
    std::filesystem::path dir(local.out_dir);
    std::filesystem::create_directories(dir);

    auto index = std::make_shared<nlohmann::json>(nlohmann::json::array());
    auto counter = std::make_shared<int>(0);

    Frontend fe = load_frontend(cfg.design_path, cfg.params, cfg.target);
    SequenceStack ss;
    bool guarded = false;
    for (BlockId p : fe.cfg.intra_preds(fe.target.block)) {
        if (fe.cfg.block(p).guard) {
            guarded = true;
        }
    }
    if (guarded && cfg.mode == "incremental") {
        SignalExpression se = get_signal_expression(fe.cfg, fe.target);
        ss = dependency_search(fe.cfg, se);
    }
    TargetQueue tq;
    if (cfg.mode == "incremental") {
        tq = build_target_queue(fe.cfg, fe.target, ss);
    }
    InstrumentedDesign instrumented = instrument_design(fe.design, tq);

    SearchConfig search;
    search.unroll = cfg.unroll;
    search.limit = cfg.limit;
    search.seed = cfg.seed;
    search.solver = [dir, index, counter](const ConstraintVector &cv) {
        SolveResult res = solve(cv);
        std::ostringstream name;
        name << "query_" << std::setw(4) << std::setfill('0') << ++*counter << ".smt2";
        write_file(dir / name.str(), emit_smtlib(cv));
        const char *verdict = res.status == SolveStatus::Sat
                                  ? "sat"
                                  : (res.status == SolveStatus::Unsat ? "unsat" : "unknown");
        index->push_back({{"file", name.str()}, {"verdict", verdict}, {"note", cv.note}});
        return res;
    };

    IncrementalResult result = incremental_run(instrumented, fe.target, search);
    write_file(dir / "index.json", index->dump(2) + "\n");
    bool final_solved = !result.targets.empty() && result.targets.back().solved;
    return final_solved ? 0 : 1;
}

} // namespace rtlic
