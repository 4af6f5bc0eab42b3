// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rtlic/cfg.hpp"
#include "rtlic/instrument.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace rtlic {

struct TestVector {
    int cycle = 0;                                // 1-based
    std::map<std::string, uint64_t> assignments;  // every non-clock input, width-masked
};

struct TestSet {
    std::vector<TestVector> vectors; // contiguous cycles 1..m

    int cycles() const { return static_cast<int>(vectors.size()); }
    uint64_t value(int cycle, const std::string &input) const; // 0 beyond the last vector

    std::string to_json() const;
    static TestSet from_json(const std::string &text, const ElaboratedDesign &d);
    // Fills missing inputs with zero, masks to declared widths, rejects
    // unknown names, duplicates, and non-contiguous cycles.
    static TestSet normalized(const ElaboratedDesign &d, std::vector<TestVector> vectors);
    static TestSet random(const ElaboratedDesign &d, int cycles, uint64_t seed);
};

enum class Phase { PreComb, Clocked, PostComb };

struct BlockEvent {
    int cycle = 0;
    Phase phase = Phase::PreComb;
    int process = 0;
    BlockId block = -1;
};

struct GuardEvent {
    int cycle = 0;
    Phase phase = Phase::PreComb;
    int process = 0;
    BlockId block = -1; // guard owner
    bool value = false;
};

struct SimulationTrace {
    int cycles = 0;
    std::vector<BlockEvent> block_events;
    std::vector<GuardEvent> guard_events;
    std::set<std::pair<std::string, int>> activated_markers; // (display text, cycle)
    std::map<std::string, uint64_t> final_regs;
    std::map<std::string, std::vector<uint64_t>> final_mems;

    std::vector<std::string> record(int cycle, const CfgSet &cs) const; // block labels, execution order
    bool block_executed(BlockId b, int cycle) const;
    int first_activation(BlockId b, int from_cycle) const; // -1 when none
    int first_marker(const std::string &marker, int from_cycle) const;

    // "C <cycle>" / "B <label>" / "M <marker> <cycle>" line format.
    std::string to_log(const CfgSet &cs) const;
};

class Simulator {
public:
    Simulator(const ElaboratedDesign &d, const CfgSet &cs);

    // Per cycle: drive inputs, settle combinational processes, clock edge with
    // atomic nonblocking commits, settle again. Missing vectors pad as all-zero
    // inputs. Throws on combinational non-convergence.
    SimulationTrace run(const TestSet &t, int cycles);

    // Test-only knob: evaluation order of the clocked processes.
    void set_process_order(std::vector<int> order) { process_order_ = std::move(order); }

private:
    const ElaboratedDesign &design_;
    const CfgSet &cfg_;
    std::vector<int> process_order_;
};

SimulationTrace simulate(const ElaboratedDesign &d, const TestSet &t, int cycles);
SimulationTrace simulate(const InstrumentedDesign &d, const TestSet &t, int cycles);

// True iff the target block executes within `cycles` on the uninstrumented design.
bool replay_check(const ElaboratedDesign &d_original, const TestSet &t, const BranchTarget &target,
                  int cycles);

} // namespace rtlic
