// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "rtlic/sim.hpp"

#include "rtlic/bv.hpp"

#include <json.hpp>

#include <algorithm>
#include <random>
#include <sstream>

namespace rtlic {

uint64_t TestSet::value(int cycle, const std::string &input) const {
    if (cycle < 1 || cycle > cycles()) {
        return 0; // zero padding beyond the provided vectors
    }
    const auto &v = vectors[static_cast<size_t>(cycle - 1)].assignments;
    auto it = v.find(input);
    return it == v.end() ? 0 : it->second;
}

TestSet TestSet::normalized(const ElaboratedDesign &d, std::vector<TestVector> vectors) {
    std::sort(vectors.begin(), vectors.end(),
              [](const TestVector &a, const TestVector &b) { return a.cycle < b.cycle; });
    TestSet out;
    int expected = 1;
    for (auto &v : vectors) {
        if (v.cycle != expected) {
            throw Error("test vectors must cover contiguous cycles starting at 1 (got cycle " +
                        std::to_string(v.cycle) + ", expected " + std::to_string(expected) + ")");
        }
        ++expected;
        TestVector nv;
        nv.cycle = v.cycle;
        for (const auto &[name, value] : v.assignments) {
            const SignalInfo *sig = d.find_signal(name);
            if (!sig || sig->kind != SignalKind::Input) {
                throw Error("test vector assigns unknown input \"" + name + "\"");
            }
            if (name == d.clock) {
                continue; // the clock is implicit; one posedge per cycle
            }
            if (value != mask_width(value, sig->width)) {
                throw Error("value for input \"" + name + "\" exceeds its " +
                            std::to_string(sig->width) + "-bit width");
            }
            nv.assignments[name] = value;
        }
        for (const auto &name : d.input_names()) {
            nv.assignments.try_emplace(name, 0);
        }
        out.vectors.push_back(std::move(nv));
    }
    return out;
}

TestSet TestSet::random(const ElaboratedDesign &d, int cycles, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<TestVector> vectors;
    for (int c = 1; c <= cycles; ++c) {
        TestVector v;
        v.cycle = c;
        for (const auto &name : d.input_names()) {
            v.assignments[name] = mask_width(rng(), d.signal(name).width);
        }
        vectors.push_back(std::move(v));
    }
    return normalized(d, std::move(vectors));
}

std::string TestSet::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &v : vectors) {
        nlohmann::json inputs;
        for (const auto &[name, value] : v.assignments) {
            std::ostringstream hex;
            hex << "0x" << std::hex << value;
            inputs[name] = hex.str();
        }
        arr.push_back({{"cycle", v.cycle}, {"inputs", inputs}});
    }
    return arr.dump(2) + "\n";
}

TestSet TestSet::from_json(const std::string &text, const ElaboratedDesign &d) {
    nlohmann::json arr;
    try {
        arr = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw Error(std::string("bad test file: ") + e.what());
    }
    if (!arr.is_array()) {
        throw Error("bad test file: expected a JSON list of {cycle, inputs}");
    }
    std::vector<TestVector> vectors;
    for (const auto &item : arr) {
        if (!item.contains("cycle") || !item.contains("inputs")) {
            throw Error("bad test file: every entry needs cycle and inputs");
        }
        TestVector v;
        v.cycle = item["cycle"].get<int>();
        for (const auto &[name, val] : item["inputs"].items()) {
            uint64_t value = 0;
            if (val.is_string()) {
                value = std::strtoull(val.get<std::string>().c_str(), nullptr, 0);
            } else if (val.is_number_unsigned() || val.is_number_integer()) {
                value = val.get<uint64_t>();
            } else {
                throw Error("bad test file: input values must be hex strings or integers");
            }
            v.assignments[name] = value;
        }
        vectors.push_back(std::move(v));
    }
    return normalized(d, std::move(vectors));
}

std::vector<std::string> SimulationTrace::record(int cycle, const CfgSet &cs) const {
    std::vector<std::string> labels;
    for (const auto &e : block_events) {
        if (e.cycle == cycle) {
            labels.push_back(cs.block(e.block).label);
        }
    }
    return labels;
}

bool SimulationTrace::block_executed(BlockId b, int cycle) const {
    for (const auto &e : block_events) {
        if (e.block == b && e.cycle == cycle) {
            return true;
        }
    }
    return false;
}

int SimulationTrace::first_activation(BlockId b, int from_cycle) const {
    int best = -1;
    for (const auto &e : block_events) {
        if (e.block == b && e.cycle >= from_cycle && (best < 0 || e.cycle < best)) {
            best = e.cycle;
        }
    }
    return best;
}

int SimulationTrace::first_marker(const std::string &marker, int from_cycle) const {
    int best = -1;
    for (const auto &[text, cycle] : activated_markers) {
        if (text == marker && cycle >= from_cycle && (best < 0 || cycle < best)) {
            best = cycle;
        }
    }
    return best;
}

std::string SimulationTrace::to_log(const CfgSet &cs) const {
    std::ostringstream os;
    for (int c = 1; c <= cycles; ++c) {
        os << "C " << c << "\n";
        for (const auto &label : record(c, cs)) {
            os << "B " << label << "\n";
        }
    }
    for (const auto &[marker, cycle] : activated_markers) {
        os << "M " << marker << " " << cycle << "\n";
    }
    return os.str();
}

namespace {

struct SimState {
    std::map<std::string, uint64_t> regs;
    std::map<std::string, std::vector<uint64_t>> mems;
    std::map<std::string, uint64_t> inputs;
};

struct Runner {
    const ElaboratedDesign &d;
    const CfgSet &cs;
    SimulationTrace &trace;
    SimState &st;

    uint64_t eval(const Expr &e) {
        switch (e.kind) {
        case ExprKind::Const:
            return e.value;
        case ExprKind::Ref: {
            return read_signal(e.name);
        }
        case ExprKind::Index: {
            const SignalInfo &sig = d.signal(e.name);
            uint64_t idx = eval(*e.index);
            if (sig.kind == SignalKind::Memory) {
                const auto &words = st.mems.at(e.name);
                return idx < words.size() ? words[idx] : 0;
            }
            uint64_t v = read_signal(e.name);
            return idx < static_cast<uint64_t>(sig.width) ? ((v >> idx) & 1) : 0;
        }
        case ExprKind::Slice: {
            uint64_t v = read_signal(e.name);
            return mask_width(v >> e.lsb, e.width);
        }
        case ExprKind::Unary: {
            uint64_t v = eval(*e.lhs);
            switch (e.unary_op) {
            case UnaryOp::BitNot: return mask_width(~v, e.width);
            case UnaryOp::LogNot: return v == 0 ? 1 : 0;
            case UnaryOp::Neg: return mask_width(~v + 1, e.width);
            }
            return 0;
        }
        case ExprKind::Binary: {
            uint64_t a = eval(*e.lhs);
            uint64_t b = eval(*e.rhs);
            switch (e.binary_op) {
            case BinaryOp::Eq: return a == b;
            case BinaryOp::Ne: return a != b;
            case BinaryOp::Lt: return a < b;
            case BinaryOp::Le: return a <= b;
            case BinaryOp::Gt: return a > b;
            case BinaryOp::Ge: return a >= b;
            case BinaryOp::And: return a & b;
            case BinaryOp::Or: return a | b;
            case BinaryOp::Xor: return a ^ b;
            case BinaryOp::LogAnd: return (a != 0 && b != 0) ? 1 : 0;
            case BinaryOp::LogOr: return (a != 0 || b != 0) ? 1 : 0;
            case BinaryOp::Add: return mask_width(a + b, e.width);
            case BinaryOp::Sub: return mask_width(a - b, e.width);
            case BinaryOp::Shl:
                return b >= static_cast<uint64_t>(e.width) ? 0 : mask_width(a << b, e.width);
            case BinaryOp::Shr:
                return b >= static_cast<uint64_t>(e.width) ? 0 : (a >> b);
            case BinaryOp::Mul:
            case BinaryOp::Div:
            case BinaryOp::Pow:
                throw Error("constant-only operator reached simulation");
            }
            return 0;
        }
        case ExprKind::Ternary:
            return eval(*e.lhs) != 0 ? eval(*e.rhs) : eval(*e.tern);
        case ExprKind::Concat: {
            uint64_t v = 0;
            for (const auto &p : e.parts) {
                v = (v << p->width) | eval(*p);
            }
            return mask_width(v, e.width);
        }
        }
        return 0;
    }

    uint64_t read_signal(const std::string &name) {
        const SignalInfo &sig = d.signal(name);
        if (sig.kind == SignalKind::Input) {
            auto it = st.inputs.find(name);
            return it == st.inputs.end() ? 0 : it->second;
        }
        if (sig.kind == SignalKind::Memory) {
            throw Error("memory \"" + name + "\" read without an index");
        }
        return st.regs.at(name);
    }

    struct Commit {
        std::string signal;
        bool is_mem = false;
        uint64_t index = 0;
        uint64_t value = 0;
    };

    // Walks the process CFG from its entry, recording executed blocks and
    // guard outcomes. Nonblocking assigns collect into `commits`; blocking
    // assigns write through immediately.
    void run_process(const Cfg &cfg, int cycle, Phase phase, std::vector<Commit> *commits) {
        BlockId cur = cfg.entry;
        while (cur >= 0) {
            const Block &b = cs.block(cur);
            trace.block_events.push_back({cycle, phase, cfg.process_id, cur});
            for (const Stmt *s : b.stmts) {
                exec_stmt(*s, cycle, commits);
            }
            if (b.guard) {
                bool taken = eval(*b.guard->cond) != 0;
                trace.guard_events.push_back({cycle, phase, cfg.process_id, cur, taken});
                cur = taken ? b.guard->true_succ : b.guard->false_succ;
            } else {
                BlockId next = -1;
                for (const auto &e : cfg.intra) {
                    if (e.from == cur && e.polarity == EdgePolarity::Always) {
                        next = e.to;
                        break;
                    }
                }
                cur = next;
            }
        }
    }

    void exec_stmt(const Stmt &s, int cycle, std::vector<Commit> *commits) {
        switch (s.kind) {
        case StmtKind::Display:
            trace.activated_markers.insert({s.text, cycle});
            return;
        case StmtKind::AssignNb: {
            Commit c;
            c.signal = s.lhs_name;
            if (s.lhs_index) {
                c.is_mem = true;
                c.index = eval(*s.lhs_index);
            }
            c.value = mask_width(eval(*s.rhs), d.signal(s.lhs_name).width);
            commits->push_back(std::move(c));
            return;
        }
        case StmtKind::AssignB: {
            uint64_t v = mask_width(eval(*s.rhs), d.signal(s.lhs_name).width);
            st.regs[s.lhs_name] = v;
            return;
        }
        default:
            return;
        }
    }
};

} // namespace

Simulator::Simulator(const ElaboratedDesign &d, const CfgSet &cs) : design_(d), cfg_(cs) {
    for (size_t i = 0; i < d.ast.processes.size(); ++i) {
        process_order_.push_back(static_cast<int>(i));
    }
}

SimulationTrace Simulator::run(const TestSet &t, int cycles) {
    if (cycles < 1) {
        throw Error("simulation needs at least one cycle");
    }
    SimulationTrace trace;
    trace.cycles = cycles;

    SimState st;
    for (const auto &sig : design_.signals) {
        if (sig.kind == SignalKind::Memory) {
            st.mems[sig.name] = std::vector<uint64_t>(sig.depth, 0);
        } else if (sig.kind != SignalKind::Input) {
            st.regs[sig.name] = 0; // registers and outputs reset to zero
        }
    }

    Runner runner{design_, cfg_, trace, st};

    const int comb_count = static_cast<int>(std::count_if(
        design_.ast.processes.begin(), design_.ast.processes.end(),
        [](const Process &p) { return p.kind == ProcessKind::Combinational; }));
    const int settle_bound = 2 * comb_count + 2;

    auto settle = [&](int cycle, Phase phase) {
        if (comb_count == 0) {
            return;
        }
        for (int pass = 0;; ++pass) {
            if (pass >= settle_bound) {
                throw Error(design_.ast.file, {},
                            "combinational loop: no fixpoint after " +
                                std::to_string(settle_bound) + " passes (cycle " +
                                std::to_string(cycle) + ")");
            }
            std::map<std::string, uint64_t> before = st.regs;
            for (int idx : process_order_) {
                const Process &p = design_.ast.processes[static_cast<size_t>(idx)];
                if (p.kind != ProcessKind::Combinational) {
                    continue;
                }
                runner.run_process(cfg_.cfgs[static_cast<size_t>(idx)], cycle, phase, nullptr);
            }
            if (st.regs == before) {
                break;
            }
        }
    };

    for (int cycle = 1; cycle <= cycles; ++cycle) {
        // (a) drive inputs
        st.inputs.clear();
        for (const auto &name : design_.input_names()) {
            st.inputs[name] = mask_width(t.value(cycle, name), design_.signal(name).width);
        }
        // (b) settle combinational logic against pre-edge state
        settle(cycle, Phase::PreComb);
        // (c) clock edge: evaluate against pre-edge state, commit atomically
        std::vector<Runner::Commit> commits;
        for (int idx : process_order_) {
            const Process &p = design_.ast.processes[static_cast<size_t>(idx)];
            if (p.kind != ProcessKind::ClockedPosedge) {
                continue;
            }
            runner.run_process(cfg_.cfgs[static_cast<size_t>(idx)], cycle, Phase::Clocked,
                               &commits);
        }
        for (const auto &c : commits) {
            if (c.is_mem) {
                auto &words = st.mems.at(c.signal);
                if (c.index < words.size()) {
                    words[c.index] = c.value;
                }
            } else {
                st.regs[c.signal] = c.value;
            }
        }
        // (d) settle again so checkers observe the post-edge state
        settle(cycle, Phase::PostComb);
    }

    trace.final_regs = st.regs;
    trace.final_mems = st.mems;
    return trace;
}

SimulationTrace simulate(const ElaboratedDesign &d, const TestSet &t, int cycles) {
    CfgSet cs = build_cfg_set(d);
    Simulator sim(d, cs);
    return sim.run(t, cycles);
}

SimulationTrace simulate(const InstrumentedDesign &d, const TestSet &t, int cycles) {
    return simulate(d.design, t, cycles);
}

bool replay_check(const ElaboratedDesign &d_original, const TestSet &t, const BranchTarget &target,
                  int cycles) {
    CfgSet cs = build_cfg_set(d_original);
    Simulator sim(d_original, cs);
    SimulationTrace trace = sim.run(t, cycles);
    BlockId block = cs.id_of(target.label);
    return trace.first_activation(block, 1) > 0;
}

} // namespace rtlic
