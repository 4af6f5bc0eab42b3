// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "rtlic/pipeline.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

std::map<std::string, int64_t> parse_params(const std::vector<std::string> &items) {
    std::map<std::string, int64_t> params;
    for (const auto &item : items) {
        auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw rtlic::Error("bad --param \"" + item + "\" (expected NAME=INT)");
        }
        try {
            params[item.substr(0, eq)] = std::stoll(item.substr(eq + 1));
        } catch (const std::exception &) {
            throw rtlic::Error("bad --param value in \"" + item + "\"");
        }
    }
    return params;
}

void print_summary(const rtlic::GenOutcome &out, double seconds) {
    std::printf("%-10s %-6s %-10s %-11s %-6s\n", "target", "block", "activated", "iterations",
                "cycle");
    for (const auto &t : out.result.targets) {
        std::printf("%-10s %-6s %-10s %-11d %-6d\n", t.marker.c_str(), t.block.c_str(),
                    t.solved ? "Yes" : "No", t.iterations, t.activation_cycle);
    }
    std::printf("replay: %s   solver calls: %llu   time: %.2fs\n",
                out.replay_ok ? "activated" : "not activated",
                static_cast<unsigned long long>(out.result.solver_calls), seconds);
    std::printf("artifacts: %s\n", out.run_dir.c_str());
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"rtlic - sequence-based incremental concolic test generation for RTL designs"};
    app.require_subcommand(1);

    std::string design, target, mode = "incremental", solver = "internal", out_dir = "out";
    std::string test_path, what, out_file;
    std::vector<std::string> params;
    int unroll = 10, limit = 10;
    uint64_t seed = 1;

    auto add_common = [&](CLI::App *cmd, bool with_target) {
        cmd->add_option("--design", design, "design file (Verilog subset)")->required();
        if (with_target) {
            cmd->add_option("--target", target, "line:<n>[:true|false] or marker:<text>");
        }
        cmd->add_option("--param", params, "parameter override NAME=INT (repeatable)");
    };

    CLI::App *gen = app.add_subcommand("gen", "generate a directed test for a branch target");
    add_common(gen, true);
    gen->get_option("--target")->required();
    gen->add_option("--unroll", unroll, "unroll cycles (n)");
    gen->add_option("--limit", limit, "solver iterations per target");
    gen->add_option("--seed", seed, "seed for the random initial test");
    gen->add_option("--mode", mode, "incremental or baseline");
    gen->add_option("--solver", solver, "internal or external[:<path>]");
    gen->add_option("--out", out_dir, "output directory");

    CLI::App *replay = app.add_subcommand("replay", "check a test set against a branch target");
    add_common(replay, true);
    replay->get_option("--target")->required();
    replay->add_option("--test", test_path, "test set JSON file")->required();
    replay->add_option("--unroll", unroll, "cycles to simulate");

    CLI::App *dump = app.add_subcommand("dump", "write cfg-dot, seq, or instrumented artifacts");
    add_common(dump, true);
    dump->add_option("--what", what, "cfg-dot | seq | instrumented")->required();
    dump->add_option("--out", out_file, "output file (default stdout)");

    CLI::App *smt = app.add_subcommand("smt", "export every solver query as SMT-LIB2");
    add_common(smt, true);
    smt->get_option("--target")->required();
    smt->add_option("--unroll", unroll, "unroll cycles (n)");
    smt->add_option("--limit", limit, "solver iterations per target");
    smt->add_option("--seed", seed, "seed for the random initial test");
    smt->add_option("--mode", mode, "incremental or baseline");
    smt->add_option("--out", out_dir, "output directory for the scripts")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            rtlic::RunConfig cfg;
            cfg.design_path = design;
            cfg.target = target;
            cfg.params = parse_params(params);
            cfg.unroll = unroll;
            cfg.limit = limit;
            cfg.seed = seed;
            cfg.mode = mode;
            cfg.solver = solver;
            cfg.out_dir = out_dir;
            auto begin = std::chrono::steady_clock::now();
            rtlic::GenOutcome out = rtlic::run_gen(cfg);
            double seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
            print_summary(out, seconds);
            if (out.exit_code != 0) {
                std::cerr << "error: concolic: target not activated within limit\n";
            }
            return out.exit_code;
        }
        if (replay->parsed()) {
            int code = rtlic::run_replay(design, parse_params(params), test_path, target, unroll);
            std::cout << (code == 0 ? "activated\n" : "not activated\n");
            return code;
        }
        if (dump->parsed()) {
            std::string artifact = rtlic::dump_artifact(design, parse_params(params), what, target);
            if (out_file.empty()) {
                std::cout << artifact;
            } else {
                std::ofstream out(out_file, std::ios::binary);
                if (!out) {
                    throw rtlic::Error("cannot write " + out_file);
                }
                out << artifact;
            }
            return 0;
        }
        if (smt->parsed()) {
            rtlic::RunConfig cfg;
            cfg.design_path = design;
            cfg.target = target;
            cfg.params = parse_params(params);
            cfg.unroll = unroll;
            cfg.limit = limit;
            cfg.seed = seed;
            cfg.mode = mode;
            cfg.out_dir = out_dir;
            return rtlic::run_smt_export(cfg);
        }
    } catch (const rtlic::Error &e) {
        std::cerr << e.what() << "\n"; // diagnostics carry their own severity

        return 2;
    }
    return 2;
}
