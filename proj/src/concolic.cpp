// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "rtlic/concolic.hpp"

#include "rtlic/unroll.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <sstream>

namespace rtlic {

std::vector<AlternateBranch> select_alternate_branches(const CfgSet &cs, const SimulationTrace &p,
                                                       const DistanceMap &ds, int start) {
    // taken polarities per (cycle, guard block), all phases merged
    std::map<std::pair<int, BlockId>, std::set<bool>> taken;
    std::map<std::pair<int, BlockId>, Phase> phase_of;
    for (const auto &ge : p.guard_events) {
        if (ge.cycle < start) {
            continue;
        }
        taken[{ge.cycle, ge.block}].insert(ge.value);
        // post-edge environments see the cycle's commits; prefer them for
        // combinational guards, pre-edge state for clocked ones
        auto key = std::make_pair(ge.cycle, ge.block);
        if (ge.phase == Phase::Clocked) {
            phase_of[key] = Phase::Clocked;
        } else if (!phase_of.count(key) || phase_of[key] != Phase::Clocked) {
            phase_of[key] = Phase::PostComb;
        }
    }

    std::vector<AlternateBranch> out;
    for (const auto &[key, polarities] : taken) {
        if (polarities.size() != 1) {
            continue; // both arms already exercised this cycle
        }
        bool value = *polarities.begin();
        const Block &owner = cs.block(key.second);
        AlternateBranch ab;
        ab.guard_block = key.second;
        ab.negated_polarity = !value;
        ab.block = value ? owner.guard->false_succ : owner.guard->true_succ;
        ab.cycle = key.first;
        ab.phase = phase_of.at(key);
        ab.distance = ds[ab.block];
        out.push_back(ab);
    }
    std::sort(out.begin(), out.end(), [](const AlternateBranch &a, const AlternateBranch &b) {
        return std::tie(a.distance, a.cycle, a.block) < std::tie(b.distance, b.cycle, b.block);
    });
    return out;
}

ConstraintVector build_constraint_vector(const ElaboratedDesign &d, const CfgSet &cs,
                                         const AlternateBranch &ab, const SimulationTrace &p,
                                         const TestSet &t) {
    BvBuilder b;
    Unroller un(d, cs, b);
    un.extend_to(ab.cycle);

    ConstraintVector cv;
    cv.pivot_cycle = ab.cycle;
    cv.inputs = un.input_vars(ab.cycle);
    {
        std::ostringstream note;
        note << "flip " << cs.block(ab.guard_block).label << " to "
             << (ab.negated_polarity ? "true" : "false") << " at cycle " << ab.cycle
             << " (opposite block " << cs.block(ab.block).label << ")";
        cv.note = note.str();
    }

    std::map<int, CyclePredicates> per_cycle;
    auto add_pred = [&](int cycle, BvRef pred) {
        auto &cp = per_cycle[cycle];
        cp.cycle = cycle;
        for (const auto &existing : cp.preds) {
            if (existing->uid == pred->uid) {
                return;
            }
        }
        cp.preds.push_back(std::move(pred));
    };

    // cycles before the pivot replay the current test exactly
    for (int c = 1; c < ab.cycle; ++c) {
        for (const auto &name : d.input_names()) {
            add_pred(c, b.eq(un.input_var(name, c),
                             b.constant(t.value(c, name), d.signal(name).width)));
        }
    }
    // executed guards of those cycles, restated in their own environments;
    // settle passes may re-evaluate a guard, so only the last (settled)
    // value per (cycle, phase, block) is asserted
    std::map<std::tuple<int, Phase, BlockId>, bool> settled;
    for (const auto &ge : p.guard_events) {
        if (ge.cycle < ab.cycle) {
            settled[{ge.cycle, ge.phase, ge.block}] = ge.value;
        }
    }
    for (const auto &[key, value] : settled) {
        auto [cycle, phase, block] = key;
        BvRef term = un.guard_term(block, cycle, phase);
        add_pred(cycle, value ? term : b.bv_not(term));
    }
    // pivot cycle: the flip's own dominating guards, then the negated pivot
    for (const auto &dg : dominating_guards(cs, ab.guard_block)) {
        BvRef term = un.guard_term(dg.owner, ab.cycle, ab.phase);
        add_pred(ab.cycle, dg.polarity ? term : b.bv_not(term));
    }
    BvRef pivot = un.guard_term(ab.guard_block, ab.cycle, ab.phase);
    add_pred(ab.cycle, ab.negated_polarity ? pivot : b.bv_not(pivot));

    for (auto &[cycle, preds] : per_cycle) {
        cv.per_cycle.push_back(std::move(preds));
    }
    return cv;
}

namespace {

TestSet test_from_model(const ElaboratedDesign &d, const Model &m, int pivot_cycle,
                        const TestSet &base, int total_cycles) {
    std::vector<TestVector> vectors;
    for (int c = 1; c <= total_cycles; ++c) {
        TestVector v;
        v.cycle = c;
        for (const auto &name : d.input_names()) {
            uint64_t value;
            if (c <= pivot_cycle) {
                auto it = m.assignments.find({name, c});
                value = it == m.assignments.end() ? 0 : it->second;
            } else {
                value = base.value(c, name);
            }
            v.assignments[name] = mask_width(value, d.signal(name).width);
        }
        vectors.push_back(std::move(v));
    }
    return TestSet::normalized(d, std::move(vectors));
}

} // namespace

ConcolicOutcome concolic(const ElaboratedDesign &d, const CfgSet &cs, BlockId target_block,
                         const TestSet &t, int start, const SearchConfig &cfg) {
    auto run_solver = [&](const ConstraintVector &cv) {
        if (cfg.solver) {
            return cfg.solver(cv);
        }
        return solve(cv);
    };

    Simulator sim(d, cs);
    ConcolicOutcome out;
    out.test = t;

    SimulationTrace path = sim.run(t, cfg.unroll);
    int activation = path.first_activation(target_block, start);
    if (activation > 0) {
        out.activation_cycle = activation;
        out.solved = true;
        return out; // already activated, no solver call needed
    }

    DistanceMap ds = compute_distance(cs, target_block);
    std::set<std::pair<BlockId, int>> attempted; // (guard block, cycle)
    TestSet working = t;

    while (out.iterations < cfg.limit) {
        std::vector<AlternateBranch> candidates = select_alternate_branches(cs, path, ds, start);
        const AlternateBranch *pick = nullptr;
        for (const auto &ab : candidates) {
            if (!attempted.count({ab.guard_block, ab.cycle})) {
                pick = &ab;
                break;
            }
        }
        if (!pick) {
            break; // search exhausted for every reachable path variant
        }
        attempted.insert({pick->guard_block, pick->cycle});

        ConstraintVector cv = build_constraint_vector(d, cs, *pick, path, working);
        ++out.iterations;
        SolveResult res = run_solver(cv);
        if (res.status != SolveStatus::Sat) {
            continue; // next-ranked candidate within the same budget
        }

        TestSet candidate_test = test_from_model(d, res.model, pick->cycle, working, cfg.unroll);
        SimulationTrace new_path = sim.run(candidate_test, cfg.unroll);

        // the model must actually drive the flipped polarity where promised
        bool flip_seen = false;
        for (const auto &ge : new_path.guard_events) {
            if (ge.block == pick->guard_block && ge.cycle == pick->cycle &&
                ge.value == pick->negated_polarity) {
                flip_seen = true;
                break;
            }
        }
        if (!flip_seen) {
            ++out.rejected_models;
            continue;
        }

        working = std::move(candidate_test);
        path = std::move(new_path);
        activation = path.first_activation(target_block, start);
        if (activation > 0) {
            out.test = working;
            out.activation_cycle = activation;
            out.solved = true;
            return out;
        }
    }
    return out; // unsolved: the input test is returned unchanged
}

IncrementalResult incremental_run(const InstrumentedDesign &d, const BranchTarget &final_target,
                                  const SearchConfig &cfg) {
    const ElaboratedDesign &design = d.design;
    CfgSet cs = build_cfg_set(design);

    IncrementalResult result;
    TestSet t = TestSet::random(design, cfg.unroll, cfg.seed);
    int start = 1;
    result.all_solved = true;

    auto run_target = [&](const std::string &marker, const std::string &label) {
        TargetOutcome outcome;
        outcome.marker = marker;
        outcome.block = label;
        ConcolicOutcome c = concolic(design, cs, cs.id_of(label), t, start, cfg);
        result.solver_calls += static_cast<uint64_t>(c.iterations);
        result.rejected_models += c.rejected_models;
        outcome.solved = c.solved;
        outcome.iterations = c.iterations;
        if (c.solved) {
            outcome.activation_cycle = c.activation_cycle;
            outcome.next_start = c.activation_cycle + 1;
            for (int cyc = start; cyc <= c.activation_cycle; ++cyc) {
                outcome.fragment.push_back(c.test.vectors[static_cast<size_t>(cyc - 1)]);
            }
            t = c.test;
            start = c.activation_cycle + 1;
        } else {
            result.all_solved = false;
        }
        result.targets.push_back(std::move(outcome));
    };

    for (const auto &entry : d.queue.entries) {
        run_target(entry.marker, entry.branch_block);
    }
    auto marker_it = d.marker_table.find(final_target.label);
    run_target(marker_it != d.marker_table.end() ? marker_it->second : final_target.label,
               final_target.label);

    result.working = t;
    if (result.all_solved && !result.targets.empty()) {
        result.final_activation = result.targets.back().activation_cycle;
        std::vector<TestVector> combined(t.vectors.begin(),
                                         t.vectors.begin() + result.final_activation);
        result.combined = TestSet::normalized(design, std::move(combined));
    } else {
        result.combined = t;
    }
    return result;
}

} // namespace rtlic
