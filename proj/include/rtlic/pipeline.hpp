// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rtlic/concolic.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace rtlic {

struct RunConfig {
    std::string design_path;
    std::string target;                  // "line:<n>[:true|false]" or "marker:<text>"
    std::map<std::string, int64_t> params;
    int unroll = 10;
    int limit = 10;
    uint64_t seed = 1;
    std::string mode = "incremental";    // or "baseline"
    std::string solver = "internal";     // or "external[:<path>]"
    std::string out_dir = "out";

    std::string canonical() const;
    std::string run_id() const; // stable hash of the canonical form
};

struct GenOutcome {
    int exit_code = 1;
    bool activated = false;
    bool replay_ok = false;
    std::string run_dir;
    std::string report_json;
    IncrementalResult result;
};

// Full Alg.-1 pipeline: sequence identification, instrumentation,
// incremental concolic search, replay validation, artifact writing.
// Stage failures raise Error with a stage-tagged message.
GenOutcome run_gen(const RunConfig &cfg);

int run_replay(const std::string &design_path, const std::map<std::string, int64_t> &params,
               const std::string &test_path, const std::string &target, int unroll);

std::string dump_artifact(const std::string &design_path,
                          const std::map<std::string, int64_t> &params, const std::string &what,
                          const std::string &target);

// Writes one SMT-LIB2 script per solver query of a gen run into out_dir,
// plus an index of the internal verdicts.
int run_smt_export(const RunConfig &cfg);

std::string resolve_external_solver(const std::string &solver_spec); // honors RTLIC_SOLVER

} // namespace rtlic
