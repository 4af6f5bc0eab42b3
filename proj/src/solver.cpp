// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "rtlic/solver.hpp"

#include "rtlic/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <regex>
#include <set>
#include <sstream>
#include <unistd.h>

namespace rtlic {

std::vector<BvRef> ConstraintVector::all_preds() const {
    std::vector<BvRef> out;
    for (const auto &cp : per_cycle) {
        for (const auto &p : cp.preds) {
            out.push_back(p);
        }
    }
    return out;
}

BvEnv Model::env() const {
    BvEnv e;
    e.values = assignments;
    return e;
}

bool check_model(const ConstraintVector &cv, const Model &m) {
    BvEnv env = m.env();
    for (const auto &p : cv.all_preds()) {
        if (bv_eval(p, env) == 0) {
            return false;
        }
    }
    return true;
}

namespace {

// ---------------------------------------------------------------------------
// CDCL SAT core. Literals are var*2 + sign; var 0 is the constant-true var.
// Decision heuristic: bumped activity, ties to the lowest variable index,
// default polarity false, no restarts.
// ---------------------------------------------------------------------------

using Lit = int;

inline Lit mk_lit(int var, bool neg) { return var * 2 + (neg ? 1 : 0); }
inline int lit_var(Lit l) { return l >> 1; }
inline bool lit_neg(Lit l) { return l & 1; }
inline Lit lit_flip(Lit l) { return l ^ 1; }

enum class LBool : int8_t { False = 0, True = 1, Undef = 2 };

class SatSolver {
public:
    explicit SatSolver(const SolverLimits &limits) : limits_(limits) {
        new_var(); // var 0 = constant true
        add_clause({mk_lit(0, false)});
    }

    int new_var() {
        int v = static_cast<int>(assign_.size());
        assign_.push_back(LBool::Undef);
        level_.push_back(-1);
        reason_.push_back(-1);
        activity_.push_back(0.0);
        watches_.emplace_back();
        watches_.emplace_back();
        return v;
    }

    Lit true_lit() const { return mk_lit(0, false); }
    Lit false_lit() const { return mk_lit(0, true); }

    void add_clause(std::vector<Lit> lits) {
        std::sort(lits.begin(), lits.end());
        lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
        for (size_t i = 0; i + 1 < lits.size(); ++i) {
            if (lit_var(lits[i]) == lit_var(lits[i + 1])) {
                return; // tautology x | ~x
            }
        }
        if (lits.empty()) {
            contradiction_ = true;
            return;
        }
        if (lits.size() == 1) {
            pending_units_.push_back(lits[0]);
            return;
        }
        attach(std::move(lits));
    }

    SolveStatus solve() {
        if (contradiction_) {
            return SolveStatus::Unsat;
        }
        for (Lit u : pending_units_) {
            if (value(u) == LBool::False) {
                return SolveStatus::Unsat;
            }
            if (value(u) == LBool::Undef) {
                enqueue(u, -1);
            }
        }
        pending_units_.clear();
        if (propagate() != -1) {
            return SolveStatus::Unsat;
        }
        while (true) {
            if (propagations_ > limits_.max_propagations || conflicts_ > limits_.max_conflicts) {
                return SolveStatus::Unknown;
            }
            int next = pick_branch();
            if (next < 0) {
                return SolveStatus::Sat;
            }
            ++decision_level_;
            trail_lim_.push_back(static_cast<int>(trail_.size()));
            enqueue(mk_lit(next, true), -1); // default polarity false
            while (true) {
                int confl = propagate();
                if (confl == -1) {
                    break;
                }
                ++conflicts_;
                if (decision_level_ == 0) {
                    return SolveStatus::Unsat;
                }
                std::vector<Lit> learned;
                int back_level = analyze(confl, learned);
                backtrack(back_level);
                if (learned.size() == 1) {
                    enqueue(learned[0], -1);
                } else {
                    int ci = attach(learned);
                    enqueue(learned[0], ci);
                }
                decay_activities();
            }
        }
    }

    bool model_value(int var) const { return assign_[static_cast<size_t>(var)] == LBool::True; }

    uint64_t conflicts() const { return conflicts_; }
    uint64_t propagations() const { return propagations_; }

private:
    LBool value(Lit l) const {
        LBool v = assign_[static_cast<size_t>(lit_var(l))];
        if (v == LBool::Undef) {
            return LBool::Undef;
        }
        bool b = (v == LBool::True) != lit_neg(l);
        return b ? LBool::True : LBool::False;
    }

    int attach(std::vector<Lit> lits) {
        int ci = static_cast<int>(clauses_.size());
        watches_[static_cast<size_t>(lit_flip(lits[0]))].push_back(ci);
        watches_[static_cast<size_t>(lit_flip(lits[1]))].push_back(ci);
        clauses_.push_back(std::move(lits));
        return ci;
    }

    void enqueue(Lit l, int reason) {
        int v = lit_var(l);
        assign_[static_cast<size_t>(v)] = lit_neg(l) ? LBool::False : LBool::True;
        level_[static_cast<size_t>(v)] = decision_level_;
        reason_[static_cast<size_t>(v)] = reason;
        trail_.push_back(l);
    }

    // returns the index of a conflicting clause, or -1
    int propagate() {
        while (qhead_ < trail_.size()) {
            Lit p = trail_[qhead_++];
            ++propagations_;
            auto &watch_list = watches_[static_cast<size_t>(p)];
            size_t keep = 0;
            for (size_t wi = 0; wi < watch_list.size(); ++wi) {
                int ci = watch_list[wi];
                auto &c = clauses_[static_cast<size_t>(ci)];
                Lit false_lit = lit_flip(p);
                if (c[0] == false_lit) {
                    std::swap(c[0], c[1]);
                }
                if (value(c[0]) == LBool::True) {
                    watch_list[keep++] = ci;
                    continue;
                }
                bool moved = false;
                for (size_t k = 2; k < c.size(); ++k) {
                    if (value(c[k]) != LBool::False) {
                        std::swap(c[1], c[k]);
                        watches_[static_cast<size_t>(lit_flip(c[1]))].push_back(ci);
                        moved = true;
                        break;
                    }
                }
                if (moved) {
                    continue;
                }
                watch_list[keep++] = ci;
                if (value(c[0]) == LBool::False) {
                    for (size_t rest = wi + 1; rest < watch_list.size(); ++rest) {
                        watch_list[keep++] = watch_list[rest];
                    }
                    watch_list.resize(keep);
                    return ci;
                }
                enqueue(c[0], ci);
            }
            watch_list.resize(keep);
        }
        return -1;
    }

    void bump(int var) {
        activity_[static_cast<size_t>(var)] += activity_inc_;
        if (activity_[static_cast<size_t>(var)] > 1e100) {
            for (auto &a : activity_) {
                a *= 1e-100;
            }
            activity_inc_ *= 1e-100;
        }
    }

    void decay_activities() { activity_inc_ /= 0.95; }

    int analyze(int confl, std::vector<Lit> &learned) {
        learned.push_back(0); // placeholder for the asserting literal
        std::vector<bool> seen(assign_.size(), false);
        int counter = 0;
        Lit p = -1;
        size_t index = trail_.size();
        int ci = confl;
        do {
            const auto &c = clauses_[static_cast<size_t>(ci)];
            for (size_t i = (p == -1 ? 0 : 1); i < c.size(); ++i) {
                Lit q = c[i];
                int v = lit_var(q);
                if (!seen[static_cast<size_t>(v)] && level_[static_cast<size_t>(v)] > 0) {
                    seen[static_cast<size_t>(v)] = true;
                    bump(v);
                    if (level_[static_cast<size_t>(v)] >= decision_level_) {
                        ++counter;
                    } else {
                        learned.push_back(q);
                    }
                }
            }
            while (!seen[static_cast<size_t>(lit_var(trail_[index - 1]))]) {
                --index;
            }
            --index;
            p = trail_[index];
            seen[static_cast<size_t>(lit_var(p))] = false;
            --counter;
            ci = reason_[static_cast<size_t>(lit_var(p))];
        } while (counter > 0);
        learned[0] = lit_flip(p);

        int back = 0;
        if (learned.size() > 1) {
            size_t max_i = 1;
            for (size_t i = 2; i < learned.size(); ++i) {
                if (level_[static_cast<size_t>(lit_var(learned[i]))] >
                    level_[static_cast<size_t>(lit_var(learned[max_i]))]) {
                    max_i = i;
                }
            }
            std::swap(learned[1], learned[max_i]);
            back = level_[static_cast<size_t>(lit_var(learned[1]))];
        }
        return back;
    }

    void backtrack(int to_level) {
        while (decision_level_ > to_level) {
            int lim = trail_lim_.back();
            trail_lim_.pop_back();
            while (static_cast<int>(trail_.size()) > lim) {
                int v = lit_var(trail_.back());
                assign_[static_cast<size_t>(v)] = LBool::Undef;
                reason_[static_cast<size_t>(v)] = -1;
                level_[static_cast<size_t>(v)] = -1;
                trail_.pop_back();
            }
            --decision_level_;
        }
        qhead_ = trail_.size();
    }

    int pick_branch() {
        int best = -1;
        double best_act = -1.0;
        for (size_t v = 1; v < assign_.size(); ++v) {
            if (assign_[v] != LBool::Undef) {
                continue;
            }
            if (activity_[v] > best_act) {
                best_act = activity_[v];
                best = static_cast<int>(v);
            }
        }
        return best;
    }

    SolverLimits limits_;
    std::vector<std::vector<Lit>> clauses_;
    std::vector<std::vector<int>> watches_; // per literal
    std::vector<LBool> assign_;
    std::vector<int> level_;
    std::vector<int> reason_;
    std::vector<double> activity_;
    std::vector<Lit> trail_;
    std::vector<int> trail_lim_;
    std::vector<Lit> pending_units_;
    size_t qhead_ = 0;
    int decision_level_ = 0;
    double activity_inc_ = 1.0;
    bool contradiction_ = false;
    uint64_t conflicts_ = 0;
    uint64_t propagations_ = 0;
};

// ---------------------------------------------------------------------------
// Bit blasting. Vector terms become literal vectors (LSB first); array terms
// become word matrices via eager scalarization.
// ---------------------------------------------------------------------------

class BitBlaster {
public:
    BitBlaster(SatSolver &sat, const SolverLimits &limits) : sat_(sat), limits_(limits) {}

    std::vector<Lit> blast(const BvRef &t) {
        auto it = cache_.find(t->uid);
        if (it != cache_.end()) {
            return it->second;
        }
        std::vector<Lit> bits = compute(t);
        assert(static_cast<int>(bits.size()) == t->width);
        cache_[t->uid] = bits;
        return bits;
    }

    std::vector<Lit> var_bits(const std::string &name, int cycle, int width) {
        auto key = std::make_pair(name, cycle);
        auto it = vars_.find(key);
        if (it != vars_.end()) {
            return it->second;
        }
        std::vector<Lit> bits;
        for (int i = 0; i < width; ++i) {
            bits.push_back(mk_lit(sat_.new_var(), false));
        }
        vars_[key] = bits;
        return bits;
    }

    const std::map<std::pair<std::string, int>, std::vector<Lit>> &vars() const { return vars_; }

    void assert_true(const BvRef &pred) {
        std::vector<Lit> bits = blast(pred);
        Lit l = bits.size() == 1 ? bits[0] : or_reduce_nonzero(bits);
        sat_.add_clause({l});
    }

private:
    Lit tf(bool b) { return b ? sat_.true_lit() : sat_.false_lit(); }

    Lit fresh() { return mk_lit(sat_.new_var(), false); }

    Lit g_and(Lit a, Lit b) {
        if (a == sat_.false_lit() || b == sat_.false_lit()) {
            return sat_.false_lit();
        }
        if (a == sat_.true_lit()) {
            return b;
        }
        if (b == sat_.true_lit()) {
            return a;
        }
        if (a == b) {
            return a;
        }
        if (a == lit_flip(b)) {
            return sat_.false_lit();
        }
        Lit c = fresh();
        sat_.add_clause({lit_flip(a), lit_flip(b), c});
        sat_.add_clause({a, lit_flip(c)});
        sat_.add_clause({b, lit_flip(c)});
        return c;
    }

    Lit g_or(Lit a, Lit b) { return lit_flip(g_and(lit_flip(a), lit_flip(b))); }

    Lit g_xor(Lit a, Lit b) {
        if (a == sat_.false_lit()) {
            return b;
        }
        if (b == sat_.false_lit()) {
            return a;
        }
        if (a == sat_.true_lit()) {
            return lit_flip(b);
        }
        if (b == sat_.true_lit()) {
            return lit_flip(a);
        }
        if (a == b) {
            return sat_.false_lit();
        }
        if (a == lit_flip(b)) {
            return sat_.true_lit();
        }
        Lit c = fresh();
        sat_.add_clause({lit_flip(a), lit_flip(b), lit_flip(c)});
        sat_.add_clause({a, b, lit_flip(c)});
        sat_.add_clause({a, lit_flip(b), c});
        sat_.add_clause({lit_flip(a), b, c});
        return c;
    }

    Lit g_mux(Lit s, Lit a, Lit b) { // s ? a : b
        if (s == sat_.true_lit()) {
            return a;
        }
        if (s == sat_.false_lit()) {
            return b;
        }
        if (a == b) {
            return a;
        }
        return g_or(g_and(s, a), g_and(lit_flip(s), b));
    }

    Lit or_reduce_nonzero(const std::vector<Lit> &bits) {
        Lit acc = sat_.false_lit();
        for (Lit b : bits) {
            acc = g_or(acc, b);
        }
        return acc;
    }

    Lit eq_reduce(const std::vector<Lit> &a, const std::vector<Lit> &b) {
        Lit acc = sat_.true_lit();
        for (size_t i = 0; i < a.size(); ++i) {
            acc = g_and(acc, lit_flip(g_xor(a[i], b[i])));
        }
        return acc;
    }

    Lit ult_reduce(const std::vector<Lit> &a, const std::vector<Lit> &b) {
        Lit lt = sat_.false_lit();
        for (size_t i = 0; i < a.size(); ++i) { // LSB to MSB
            Lit less_here = g_and(lit_flip(a[i]), b[i]);
            Lit eq_here = lit_flip(g_xor(a[i], b[i]));
            lt = g_or(less_here, g_and(eq_here, lt));
        }
        return lt;
    }

    std::vector<Lit> adder(const std::vector<Lit> &a, const std::vector<Lit> &b, Lit carry) {
        std::vector<Lit> sum(a.size());
        for (size_t i = 0; i < a.size(); ++i) {
            Lit axb = g_xor(a[i], b[i]);
            sum[i] = g_xor(axb, carry);
            carry = g_or(g_and(a[i], b[i]), g_and(axb, carry));
        }
        return sum;
    }

    std::vector<Lit> const_bits(uint64_t value, int width) {
        std::vector<Lit> bits;
        for (int i = 0; i < width; ++i) {
            bits.push_back(tf((value >> i) & 1));
        }
        return bits;
    }

    std::vector<Lit> mux_vec(Lit s, const std::vector<Lit> &a, const std::vector<Lit> &b) {
        std::vector<Lit> out(a.size());
        for (size_t i = 0; i < a.size(); ++i) {
            out[i] = g_mux(s, a[i], b[i]);
        }
        return out;
    }

    std::vector<Lit> shift_var(const std::vector<Lit> &a, const std::vector<Lit> &sh, bool left) {
        int w = static_cast<int>(a.size());
        int stages = 0;
        while ((1 << stages) < w) {
            ++stages;
        }
        std::vector<Lit> cur = a;
        for (int k = 0; k < stages; ++k) {
            int amount = 1 << k;
            std::vector<Lit> shifted(cur.size(), sat_.false_lit());
            for (int i = 0; i < w; ++i) {
                int from = left ? i - amount : i + amount;
                if (from >= 0 && from < w) {
                    shifted[static_cast<size_t>(i)] = cur[static_cast<size_t>(from)];
                }
            }
            Lit sel = k < static_cast<int>(sh.size()) ? sh[static_cast<size_t>(k)]
                                                      : sat_.false_lit();
            cur = mux_vec(sel, shifted, cur);
        }
        // any shift-amount bit at or above the stage count zeroes the result
        Lit overflow = sat_.false_lit();
        for (size_t k = static_cast<size_t>(stages); k < sh.size(); ++k) {
            overflow = g_or(overflow, sh[k]);
        }
        return mux_vec(overflow, const_bits(0, w), cur);
    }

    using WordMatrix = std::vector<std::vector<Lit>>; // [word][bit]

    const WordMatrix &blast_mem(const BvRef &t) {
        auto it = mem_cache_.find(t->uid);
        if (it != mem_cache_.end()) {
            return it->second;
        }
        if (t->addr_width > limits_.max_scalarized_addr_width) {
            throw Error("memory address width " + std::to_string(t->addr_width) +
                        " exceeds the scalarization bound; use the SMT-LIB export instead");
        }
        WordMatrix words;
        size_t count = size_t(1) << t->addr_width;
        switch (t->op) {
        case BvOp::MemZero:
            words.assign(count, const_bits(0, t->width));
            break;
        case BvOp::MemStore: {
            WordMatrix base = blast_mem(t->args[0]);
            std::vector<Lit> addr = blast(t->args[1]);
            std::vector<Lit> data = blast(t->args[2]);
            words = std::move(base);
            for (size_t k = 0; k < count; ++k) {
                Lit hit = eq_reduce(addr, const_bits(k, t->addr_width));
                words[k] = mux_vec(hit, data, words[k]);
            }
            break;
        }
        case BvOp::Ite: {
            Lit c = blast(t->args[0])[0];
            WordMatrix a = blast_mem(t->args[1]);
            WordMatrix b = blast_mem(t->args[2]);
            words.resize(count);
            for (size_t k = 0; k < count; ++k) {
                words[k] = mux_vec(c, a[k], b[k]);
            }
            break;
        }
        default:
            throw Error("expected an array term in bit blasting");
        }
        mem_cache_[t->uid] = std::move(words);
        return mem_cache_[t->uid];
    }

    std::vector<Lit> compute(const BvRef &t) {
        switch (t->op) {
        case BvOp::Var:
            return var_bits(t->name, t->cycle, t->width);
        case BvOp::Const:
            return const_bits(t->value, t->width);
        case BvOp::Not: {
            std::vector<Lit> a = blast(t->args[0]);
            for (auto &b : a) {
                b = lit_flip(b);
            }
            return a;
        }
        case BvOp::Neg: {
            std::vector<Lit> a = blast(t->args[0]);
            for (auto &b : a) {
                b = lit_flip(b);
            }
            return adder(a, const_bits(0, t->width), sat_.true_lit());
        }
        case BvOp::Eq:
            return {eq_reduce(blast(t->args[0]), blast(t->args[1]))};
        case BvOp::Ne:
            return {lit_flip(eq_reduce(blast(t->args[0]), blast(t->args[1])))};
        case BvOp::Ult:
            return {ult_reduce(blast(t->args[0]), blast(t->args[1]))};
        case BvOp::Ule:
            return {lit_flip(ult_reduce(blast(t->args[1]), blast(t->args[0])))};
        case BvOp::And: {
            std::vector<Lit> a = blast(t->args[0]);
            std::vector<Lit> b = blast(t->args[1]);
            std::vector<Lit> out(a.size());
            for (size_t i = 0; i < a.size(); ++i) {
                out[i] = g_and(a[i], b[i]);
            }
            return out;
        }
        case BvOp::Or: {
            std::vector<Lit> a = blast(t->args[0]);
            std::vector<Lit> b = blast(t->args[1]);
            std::vector<Lit> out(a.size());
            for (size_t i = 0; i < a.size(); ++i) {
                out[i] = g_or(a[i], b[i]);
            }
            return out;
        }
        case BvOp::Xor: {
            std::vector<Lit> a = blast(t->args[0]);
            std::vector<Lit> b = blast(t->args[1]);
            std::vector<Lit> out(a.size());
            for (size_t i = 0; i < a.size(); ++i) {
                out[i] = g_xor(a[i], b[i]);
            }
            return out;
        }
        case BvOp::Add:
            return adder(blast(t->args[0]), blast(t->args[1]), sat_.false_lit());
        case BvOp::Sub: {
            std::vector<Lit> b = blast(t->args[1]);
            for (auto &x : b) {
                x = lit_flip(x);
            }
            return adder(blast(t->args[0]), b, sat_.true_lit());
        }
        case BvOp::Shl:
            return shift_var(blast(t->args[0]), blast(t->args[1]), true);
        case BvOp::Shr:
            return shift_var(blast(t->args[0]), blast(t->args[1]), false);
        case BvOp::Ite: {
            if (t->args[1]->is_array()) {
                throw Error("array ite blasted as vector");
            }
            Lit c = blast(t->args[0])[0];
            return mux_vec(c, blast(t->args[1]), blast(t->args[2]));
        }
        case BvOp::Concat: {
            std::vector<Lit> out;
            for (auto it = t->args.rbegin(); it != t->args.rend(); ++it) {
                std::vector<Lit> part = blast(*it);
                out.insert(out.end(), part.begin(), part.end());
            }
            return out;
        }
        case BvOp::Extract: {
            std::vector<Lit> a = blast(t->args[0]);
            return {a.begin() + t->lo, a.begin() + t->hi + 1};
        }
        case BvOp::ZeroExt: {
            std::vector<Lit> a = blast(t->args[0]);
            while (static_cast<int>(a.size()) < t->width) {
                a.push_back(sat_.false_lit());
            }
            return a;
        }
        case BvOp::MemSelect: {
            const WordMatrix &words = blast_mem(t->args[0]);
            std::vector<Lit> addr = blast(t->args[1]);
            std::vector<Lit> out = words[0];
            for (size_t k = 1; k < words.size(); ++k) {
                Lit hit = eq_reduce(addr, const_bits(k, t->args[0]->addr_width));
                out = mux_vec(hit, words[k], out);
            }
            return out;
        }
        case BvOp::MemZero:
        case BvOp::MemStore:
            throw Error("array term blasted as vector");
        }
        return {};
    }

    SatSolver &sat_;
    const SolverLimits &limits_;
    std::map<size_t, std::vector<Lit>> cache_;
    std::map<size_t, WordMatrix> mem_cache_;
    std::map<std::pair<std::string, int>, std::vector<Lit>> vars_;
};

} // namespace

SolveResult solve(const ConstraintVector &cv, const SolverLimits &limits) {
    SatSolver sat(limits);
    BitBlaster blaster(sat, limits);
    for (const auto &p : cv.all_preds()) {
        blaster.assert_true(p);
    }
    // model totality: every declared input owns bits even when unconstrained
    for (const auto &iv : cv.inputs) {
        blaster.var_bits(iv.name, iv.cycle, iv.width);
    }

    SolveResult res;
    res.status = sat.solve();
    res.conflicts = sat.conflicts();
    res.propagations = sat.propagations();
    if (res.status != SolveStatus::Sat) {
        return res;
    }
    for (const auto &[key, bits] : blaster.vars()) {
        uint64_t v = 0;
        for (size_t i = 0; i < bits.size(); ++i) {
            bool bit = sat.model_value(lit_var(bits[i]));
            if (lit_neg(bits[i])) {
                bit = !bit;
            }
            if (bit) {
                v |= (1ull << i);
            }
        }
        res.model.assignments[key] = v;
    }
    return res;
}

// ---------------------------------------------------------------------------
// SMT-LIB2 emission
// ---------------------------------------------------------------------------

namespace {

struct SmtPrinter {
    std::ostringstream defs;
    std::map<size_t, std::string> named;
    std::map<size_t, int> refcount;
    int aux_counter = 0;
    bool has_arrays = false;

    void count_refs(const BvRef &t) {
        if (refcount.count(t->uid)) {
            ++refcount[t->uid];
            return;
        }
        refcount[t->uid] = 1;
        if (t->is_array()) {
            has_arrays = true;
        }
        for (const auto &a : t->args) {
            count_refs(a);
        }
    }

    static std::string bv_literal(uint64_t value, int width) {
        std::ostringstream os;
        if (width % 4 == 0) {
            os << "#x";
            for (int nibble = width / 4 - 1; nibble >= 0; --nibble) {
                os << "0123456789abcdef"[(value >> (nibble * 4)) & 0xF];
            }
        } else {
            os << "#b";
            for (int i = width - 1; i >= 0; --i) {
                os << ((value >> i) & 1);
            }
        }
        return os.str();
    }

    static std::string sort_of(const BvRef &t) {
        if (t->is_array()) {
            return "(Array (_ BitVec " + std::to_string(t->addr_width) + ") (_ BitVec " +
                   std::to_string(t->width) + "))";
        }
        return "(_ BitVec " + std::to_string(t->width) + ")";
    }

    std::string render(const BvRef &t) {
        auto it = named.find(t->uid);
        if (it != named.end()) {
            return it->second;
        }
        std::string text = render_raw(t);
        // name multiply-referenced non-leaf nodes to keep scripts compact
        if (refcount[t->uid] > 1 && !t->args.empty()) {
            std::string name = "aux" + std::to_string(++aux_counter);
            defs << "(define-fun " << name << " () " << sort_of(t) << " " << text << ")\n";
            named[t->uid] = name;
            return name;
        }
        return text;
    }

    std::string bool_of(const BvRef &t) { // 1-bit term as a Bool expression
        return "(= " + render(t) + " #b1)";
    }

    std::string render_raw(const BvRef &t) {
        auto bin = [&](const char *op) {
            return std::string("(") + op + " " + render(t->args[0]) + " " + render(t->args[1]) +
                   ")";
        };
        switch (t->op) {
        case BvOp::Var:
            return t->name + "__c" + std::to_string(t->cycle);
        case BvOp::Const:
            return bv_literal(t->value, t->width);
        case BvOp::Not:
            return "(bvnot " + render(t->args[0]) + ")";
        case BvOp::Neg:
            return "(bvneg " + render(t->args[0]) + ")";
        case BvOp::Eq:
            return "(ite (= " + render(t->args[0]) + " " + render(t->args[1]) + ") #b1 #b0)";
        case BvOp::Ne:
            return "(ite (distinct " + render(t->args[0]) + " " + render(t->args[1]) +
                   ") #b1 #b0)";
        case BvOp::Ult:
            return "(ite (bvult " + render(t->args[0]) + " " + render(t->args[1]) + ") #b1 #b0)";
        case BvOp::Ule:
            return "(ite (bvule " + render(t->args[0]) + " " + render(t->args[1]) + ") #b1 #b0)";
        case BvOp::And:
            return bin("bvand");
        case BvOp::Or:
            return bin("bvor");
        case BvOp::Xor:
            return bin("bvxor");
        case BvOp::Add:
            return bin("bvadd");
        case BvOp::Sub:
            return bin("bvsub");
        case BvOp::Shl:
            return "(bvshl " + render(t->args[0]) + " " + shift_amount(t) + ")";
        case BvOp::Shr:
            return "(bvlshr " + render(t->args[0]) + " " + shift_amount(t) + ")";
        case BvOp::Ite:
            return "(ite " + bool_of(t->args[0]) + " " + render(t->args[1]) + " " +
                   render(t->args[2]) + ")";
        case BvOp::Concat: {
            std::string out = "(concat";
            for (const auto &a : t->args) {
                out += " " + render(a);
            }
            return out + ")";
        }
        case BvOp::Extract:
            return "((_ extract " + std::to_string(t->hi) + " " + std::to_string(t->lo) + ") " +
                   render(t->args[0]) + ")";
        case BvOp::ZeroExt:
            return "((_ zero_extend " + std::to_string(t->width - t->args[0]->width) + ") " +
                   render(t->args[0]) + ")";
        case BvOp::MemZero:
            // declared separately with per-word zero asserts
            return named.at(t->uid);
        case BvOp::MemStore:
            return "(store " + render(t->args[0]) + " " + render(t->args[1]) + " " +
                   render(t->args[2]) + ")";
        case BvOp::MemSelect:
            return "(select " + render(t->args[0]) + " " + render(t->args[1]) + ")";
        }
        return "";
    }

    std::string shift_amount(const BvRef &t) {
        // SMT-LIB requires equal widths for shift operands
        const BvRef &sh = t->args[1];
        if (sh->width == t->width) {
            return render(sh);
        }
        if (sh->width < t->width) {
            return "((_ zero_extend " + std::to_string(t->width - sh->width) + ") " + render(sh) +
                   ")";
        }
        return "((_ extract " + std::to_string(t->width - 1) + " 0) " + render(sh) + ")";
    }
};

// Rewrites array terms into per-word ite chains (for QF_BV output and the
// scalarization differential check).
struct Scalarizer {
    BvBuilder &b;
    std::map<size_t, std::vector<BvRef>> words_cache;
    std::map<size_t, BvRef> term_cache;

    std::vector<BvRef> words(const BvRef &t) {
        auto it = words_cache.find(t->uid);
        if (it != words_cache.end()) {
            return it->second;
        }
        std::vector<BvRef> out;
        size_t count = size_t(1) << t->addr_width;
        switch (t->op) {
        case BvOp::MemZero:
            out.assign(count, b.constant(0, t->width));
            break;
        case BvOp::MemStore: {
            std::vector<BvRef> base = words(t->args[0]);
            BvRef addr = rewrite(t->args[1]);
            BvRef data = rewrite(t->args[2]);
            out = std::move(base);
            for (size_t k = 0; k < count; ++k) {
                out[k] = b.ite(b.eq(addr, b.constant(k, t->addr_width)), data, out[k]);
            }
            break;
        }
        case BvOp::Ite: {
            BvRef c = rewrite(t->args[0]);
            std::vector<BvRef> x = words(t->args[1]);
            std::vector<BvRef> y = words(t->args[2]);
            for (size_t k = 0; k < count; ++k) {
                out.push_back(b.ite(c, x[k], y[k]));
            }
            break;
        }
        default:
            throw Error("expected an array term in scalarization");
        }
        words_cache[t->uid] = out;
        return out;
    }

    BvRef rewrite(const BvRef &t) {
        auto it = term_cache.find(t->uid);
        if (it != term_cache.end()) {
            return it->second;
        }
        BvRef out;
        if (t->op == BvOp::MemSelect) {
            std::vector<BvRef> ws = words(t->args[0]);
            BvRef addr = rewrite(t->args[1]);
            out = ws[0];
            for (size_t k = 1; k < ws.size(); ++k) {
                out = b.ite(b.eq(addr, b.constant(k, t->args[0]->addr_width)), ws[k], out);
            }
        } else if (t->op == BvOp::Var) {
            out = b.var(t->name, t->cycle, t->width);
        } else if (t->op == BvOp::Const) {
            out = b.constant(t->value, t->width);
        } else {
            std::vector<BvRef> args;
            for (const auto &a : t->args) {
                args.push_back(rewrite(a));
            }
            switch (t->op) {
            case BvOp::Not: out = b.bv_not(args[0]); break;
            case BvOp::Neg: out = b.neg(args[0]); break;
            case BvOp::Eq: out = b.eq(args[0], args[1]); break;
            case BvOp::Ne: out = b.ne(args[0], args[1]); break;
            case BvOp::Ult: out = b.ult(args[0], args[1]); break;
            case BvOp::Ule: out = b.ule(args[0], args[1]); break;
            case BvOp::And: out = b.bv_and(args[0], args[1]); break;
            case BvOp::Or: out = b.bv_or(args[0], args[1]); break;
            case BvOp::Xor: out = b.bv_xor(args[0], args[1]); break;
            case BvOp::Add: out = b.add(args[0], args[1]); break;
            case BvOp::Sub: out = b.sub(args[0], args[1]); break;
            case BvOp::Shl: out = b.shl(args[0], args[1]); break;
            case BvOp::Shr: out = b.shr(args[0], args[1]); break;
            case BvOp::Ite: out = b.ite(args[0], args[1], args[2]); break;
            case BvOp::Concat: out = b.concat(args); break;
            case BvOp::Extract: out = b.extract(args[0], t->hi, t->lo); break;
            case BvOp::ZeroExt: out = b.zero_ext(args[0], t->width); break;
            default: throw Error("unexpected term in scalarization");
            }
        }
        term_cache[t->uid] = out;
        return out;
    }
};

void collect_mem_zeros(const BvRef &t, std::map<size_t, BvRef> &out, std::set<size_t> &seen) {
    if (seen.count(t->uid)) {
        return;
    }
    seen.insert(t->uid);
    if (t->op == BvOp::MemZero) {
        out[t->uid] = t;
    }
    for (const auto &a : t->args) {
        collect_mem_zeros(a, out, seen);
    }
}

} // namespace

ConstraintVector scalarize(const ConstraintVector &cv, BvBuilder &b) {
    Scalarizer sc{b, {}, {}};
    ConstraintVector out;
    out.pivot_cycle = cv.pivot_cycle;
    out.inputs = cv.inputs;
    out.note = cv.note;
    for (const auto &cp : cv.per_cycle) {
        CyclePredicates ncp;
        ncp.cycle = cp.cycle;
        for (const auto &p : cp.preds) {
            ncp.preds.push_back(sc.rewrite(p));
        }
        out.per_cycle.push_back(std::move(ncp));
    }
    return out;
}

std::string emit_smtlib(const ConstraintVector &cv, const SmtOptions &opts) {
    BvBuilder scratch;
    const ConstraintVector *source = &cv;
    ConstraintVector scalarized;
    if (opts.scalarize) {
        scalarized = scalarize(cv, scratch);
        source = &scalarized;
    }

    SmtPrinter pr;
    for (const auto &p : source->all_preds()) {
        pr.count_refs(p);
    }

    std::ostringstream os;
    os << "; " << (source->note.empty() ? "constraint vector" : source->note) << "\n";
    os << "(set-logic " << (pr.has_arrays ? "QF_ABV" : "QF_BV") << ")\n";

    // input declarations
    std::set<std::pair<std::string, int>> declared;
    for (const auto &iv : source->inputs) {
        if (declared.insert({iv.name, iv.cycle}).second) {
            os << "(declare-const " << iv.name << "__c" << iv.cycle << " (_ BitVec " << iv.width
               << "))\n";
        }
    }
    // any vars appearing in predicates but not listed as inputs
    {
        std::set<size_t> seen;
        std::function<void(const BvRef &)> walk = [&](const BvRef &t) {
            if (!seen.insert(t->uid).second) {
                return;
            }
            if (t->op == BvOp::Var && declared.insert({t->name, t->cycle}).second) {
                os << "(declare-const " << t->name << "__c" << t->cycle << " (_ BitVec " << t->width
                   << "))\n";
            }
            for (const auto &a : t->args) {
                walk(a);
            }
        };
        for (const auto &p : source->all_preds()) {
            walk(p);
        }
    }

    // zero-initialized arrays, one declaration plus per-word asserts
    std::map<size_t, BvRef> zeros;
    {
        std::set<size_t> seen;
        for (const auto &p : source->all_preds()) {
            collect_mem_zeros(p, zeros, seen);
        }
    }
    int mem_counter = 0;
    std::ostringstream zero_asserts;
    for (const auto &[uid, t] : zeros) {
        std::string name = "memzero" + std::to_string(mem_counter++);
        pr.named[uid] = name;
        os << "(declare-const " << name << " " << SmtPrinter::sort_of(t) << ")\n";
        for (uint64_t k = 0; k < (uint64_t(1) << t->addr_width); ++k) {
            zero_asserts << "(assert (= (select " << name << " "
                         << SmtPrinter::bv_literal(k, t->addr_width) << ") "
                         << SmtPrinter::bv_literal(0, t->width) << "))\n";
        }
    }

    std::ostringstream asserts;
    asserts << zero_asserts.str();
    for (const auto &cp : source->per_cycle) {
        if (!cp.preds.empty()) {
            asserts << "; cycle " << cp.cycle << "\n";
        }
        for (const auto &p : cp.preds) {
            asserts << "(assert " << pr.bool_of(p) << ")\n";
        }
    }
    os << pr.defs.str();
    os << asserts.str();
    os << "(check-sat)\n(get-model)\n";
    return os.str();
}

SolveResult solve_external(const ConstraintVector &cv, const std::string &solver_path) {
    SolveResult res;
    res.status = SolveStatus::Unknown;

    std::string script = emit_smtlib(cv);
    char tmpl[] = "/tmp/rtlic_query_XXXXXX";
    int fd = mkstemp(tmpl);
    if (fd < 0) {
        return res;
    }
    std::string path(tmpl);
    {
        std::ofstream out(path);
        out << script;
    }
    close(fd);

    std::string cmd = solver_path + " " + path + " 2>/dev/null";
    FILE *pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        std::remove(path.c_str());
        return res;
    }
    std::string output;
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof(buf), pipe)) {
        output.append(buf, n);
    }
    pclose(pipe);
    std::remove(path.c_str());

    std::istringstream lines(output);
    std::string line;
    while (std::getline(lines, line)) {
        if (line == "sat") {
            res.status = SolveStatus::Sat;
            break;
        }
        if (line == "unsat") {
            res.status = SolveStatus::Unsat;
            break;
        }
        if (line == "unknown") {
            return res;
        }
    }
    if (res.status != SolveStatus::Sat) {
        return res;
    }

    // (define-fun name () (_ BitVec w) #xVAL) — tolerate arbitrary line breaks
    static const std::regex def_re(
        R"(\(define-fun\s+(\w+)\s+\(\)\s+\(_\s+BitVec\s+\d+\s*\)\s+(#x[0-9a-fA-F]+|#b[01]+)\s*\))");
    for (auto it = std::sregex_iterator(output.begin(), output.end(), def_re);
         it != std::sregex_iterator(); ++it) {
        std::string name = (*it)[1];
        std::string value_text = (*it)[2];
        auto sep = name.rfind("__c");
        if (sep == std::string::npos) {
            continue;
        }
        std::string base = name.substr(0, sep);
        int cycle = 0;
        try {
            cycle = std::stoi(name.substr(sep + 3));
        } catch (const std::exception &) {
            continue;
        }
        uint64_t value = 0;
        if (value_text.rfind("#x", 0) == 0) {
            value = std::strtoull(value_text.c_str() + 2, nullptr, 16);
        } else {
            value = std::strtoull(value_text.c_str() + 2, nullptr, 2);
        }
        res.model.assignments[{base, cycle}] = value;
    }
    for (const auto &iv : cv.inputs) {
        res.model.assignments.try_emplace({iv.name, iv.cycle}, 0);
    }
    // some solvers omit don't-care constants; re-check before trusting
    if (!check_model(cv, res.model)) {
        res.status = SolveStatus::Unknown;
    }
    return res;
}

} // namespace rtlic
