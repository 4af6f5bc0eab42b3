// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "rtlic/bv.hpp"

#include "rtlic/diagnostics.hpp"

#include <algorithm>
#include <sstream>

namespace rtlic {

uint64_t mask_width(uint64_t v, int width) {
    if (width >= 64) {
        return v;
    }
    return v & ((1ull << width) - 1);
}

uint64_t BvEnv::get(const std::string &name, int cycle) const {
    auto it = values.find({name, cycle});
    return it == values.end() ? 0 : it->second;
}

BvRef BvBuilder::intern(BvTerm t) {
    std::ostringstream key;
    key << static_cast<int>(t.op) << "|" << t.width << "|" << t.addr_width << "|" << t.value << "|"
        << t.name << "|" << t.cycle << "|" << t.hi << "|" << t.lo;
    for (const auto &a : t.args) {
        key << "|" << a->uid;
    }
    auto it = cache_.find(key.str());
    if (it != cache_.end()) {
        return it->second;
    }
    t.uid = nodes_.size() + 1;
    auto ref = std::make_shared<const BvTerm>(std::move(t));
    nodes_.push_back(ref);
    cache_[key.str()] = ref;
    return ref;
}

BvRef BvBuilder::var(const std::string &name, int cycle, int width) {
    BvTerm t;
    t.op = BvOp::Var;
    t.name = name;
    t.cycle = cycle;
    t.width = width;
    return intern(std::move(t));
}

BvRef BvBuilder::constant(uint64_t value, int width) {
    BvTerm t;
    t.op = BvOp::Const;
    t.value = mask_width(value, width);
    t.width = width;
    return intern(std::move(t));
}

std::pair<BvRef, BvRef> BvBuilder::equalize(BvRef a, BvRef b) {
    int w = std::max(a->width, b->width);
    return {zero_ext(a, w), zero_ext(b, w)};
}

BvRef BvBuilder::zero_ext(BvRef a, int width) {
    if (a->width == width) {
        return a;
    }
    if (a->width > width) {
        return extract(a, width - 1, 0);
    }
    if (a->op == BvOp::Const) {
        return constant(a->value, width);
    }
    BvTerm t;
    t.op = BvOp::ZeroExt;
    t.width = width;
    t.args = {a};
    return intern(std::move(t));
}

BvRef BvBuilder::extract(BvRef a, int hi, int lo) {
    if (lo == 0 && hi == a->width - 1) {
        return a;
    }
    if (a->op == BvOp::Const) {
        return constant(a->value >> lo, hi - lo + 1);
    }
    BvTerm t;
    t.op = BvOp::Extract;
    t.width = hi - lo + 1;
    t.hi = hi;
    t.lo = lo;
    t.args = {a};
    return intern(std::move(t));
}

BvRef BvBuilder::bv_not(BvRef a) {
    if (a->op == BvOp::Const) {
        return constant(~a->value, a->width);
    }
    BvTerm t;
    t.op = BvOp::Not;
    t.width = a->width;
    t.args = {a};
    return intern(std::move(t));
}

BvRef BvBuilder::neg(BvRef a) {
    if (a->op == BvOp::Const) {
        return constant(~a->value + 1, a->width);
    }
    BvTerm t;
    t.op = BvOp::Neg;
    t.width = a->width;
    t.args = {a};
    return intern(std::move(t));
}

BvRef BvBuilder::truthy(BvRef a) {
    if (a->width == 1) {
        return a;
    }
    return ne(a, constant(0, a->width));
}

BvRef BvBuilder::log_not(BvRef a) { return eq(truthy(a), constant(0, 1)); }

#define RTLIC_BIN(OP, NAME, FOLD)                                                                  \
    BvRef BvBuilder::NAME(BvRef a, BvRef b) {                                                      \
        auto [x, y] = equalize(a, b);                                                              \
        if (x->op == BvOp::Const && y->op == BvOp::Const) {                                        \
            return FOLD;                                                                           \
        }                                                                                          \
        BvTerm t;                                                                                  \
        t.op = BvOp::OP;                                                                           \
        t.width = x->width;                                                                        \
        t.args = {x, y};                                                                           \
        return intern(std::move(t));                                                               \
    }

RTLIC_BIN(And, bv_and, constant(x->value & y->value, x->width))
RTLIC_BIN(Or, bv_or, constant(x->value | y->value, x->width))
RTLIC_BIN(Xor, bv_xor, constant(x->value ^ y->value, x->width))
RTLIC_BIN(Add, add, constant(x->value + y->value, x->width))
RTLIC_BIN(Sub, sub, constant(x->value - y->value, x->width))
#undef RTLIC_BIN

BvRef BvBuilder::eq(BvRef a, BvRef b) {
    auto [x, y] = equalize(a, b);
    if (x->op == BvOp::Const && y->op == BvOp::Const) {
        return constant(x->value == y->value ? 1 : 0, 1);
    }
    if (x->uid == y->uid) {
        return constant(1, 1);
    }
    BvTerm t;
    t.op = BvOp::Eq;
    t.width = 1;
    t.args = {x, y};
    return intern(std::move(t));
}

BvRef BvBuilder::ne(BvRef a, BvRef b) {
    auto [x, y] = equalize(a, b);
    if (x->op == BvOp::Const && y->op == BvOp::Const) {
        return constant(x->value != y->value ? 1 : 0, 1);
    }
    BvTerm t;
    t.op = BvOp::Ne;
    t.width = 1;
    t.args = {x, y};
    return intern(std::move(t));
}

BvRef BvBuilder::ult(BvRef a, BvRef b) {
    auto [x, y] = equalize(a, b);
    if (x->op == BvOp::Const && y->op == BvOp::Const) {
        return constant(x->value < y->value ? 1 : 0, 1);
    }
    BvTerm t;
    t.op = BvOp::Ult;
    t.width = 1;
    t.args = {x, y};
    return intern(std::move(t));
}

BvRef BvBuilder::ule(BvRef a, BvRef b) {
    auto [x, y] = equalize(a, b);
    if (x->op == BvOp::Const && y->op == BvOp::Const) {
        return constant(x->value <= y->value ? 1 : 0, 1);
    }
    BvTerm t;
    t.op = BvOp::Ule;
    t.width = 1;
    t.args = {x, y};
    return intern(std::move(t));
}

BvRef BvBuilder::log_and(BvRef a, BvRef b) { return bv_and(truthy(a), truthy(b)); }
BvRef BvBuilder::log_or(BvRef a, BvRef b) { return bv_or(truthy(a), truthy(b)); }

BvRef BvBuilder::shl(BvRef a, BvRef b) {
    if (b->op == BvOp::Const) {
        if (b->value >= static_cast<uint64_t>(a->width)) {
            return constant(0, a->width);
        }
        if (a->op == BvOp::Const) {
            return constant(a->value << b->value, a->width);
        }
    }
    BvTerm t;
    t.op = BvOp::Shl;
    t.width = a->width;
    t.args = {a, b};
    return intern(std::move(t));
}

BvRef BvBuilder::shr(BvRef a, BvRef b) {
    if (b->op == BvOp::Const) {
        if (b->value >= static_cast<uint64_t>(a->width)) {
            return constant(0, a->width);
        }
        if (a->op == BvOp::Const) {
            return constant(a->value >> b->value, a->width);
        }
    }
    BvTerm t;
    t.op = BvOp::Shr;
    t.width = a->width;
    t.args = {a, b};
    return intern(std::move(t));
}

BvRef BvBuilder::ite(BvRef c, BvRef a, BvRef b) {
    c = truthy(c);
    auto [x, y] = equalize(a, b);
    if (c->op == BvOp::Const) {
        return c->value ? x : y;
    }
    if (x->uid == y->uid) {
        return x;
    }
    BvTerm t;
    t.op = BvOp::Ite;
    t.width = x->width;
    t.addr_width = x->addr_width;
    t.args = {c, x, y};
    return intern(std::move(t));
}

BvRef BvBuilder::concat(std::vector<BvRef> parts) {
    if (parts.size() == 1) {
        return parts[0];
    }
    int width = 0;
    for (const auto &p : parts) {
        width += p->width;
    }
    BvTerm t;
    t.op = BvOp::Concat;
    t.width = width;
    t.args = std::move(parts);
    return intern(std::move(t));
}

BvRef BvBuilder::mem_zero(int addr_width, int width) {
    BvTerm t;
    t.op = BvOp::MemZero;
    t.width = width;
    t.addr_width = addr_width;
    return intern(std::move(t));
}

BvRef BvBuilder::mem_store(BvRef mem, BvRef addr, BvRef data) {
    BvTerm t;
    t.op = BvOp::MemStore;
    t.width = mem->width;
    t.addr_width = mem->addr_width;
    t.args = {mem, zero_ext(addr, mem->addr_width), zero_ext(data, mem->width)};
    return intern(std::move(t));
}

BvRef BvBuilder::mem_select(BvRef mem, BvRef addr) {
    BvTerm t;
    t.op = BvOp::MemSelect;
    t.width = mem->width;
    t.args = {mem, zero_ext(addr, mem->addr_width)};
    return intern(std::move(t));
}

namespace {

struct Evaluator {
    const BvEnv &env;
    std::map<size_t, uint64_t> memo;
    std::map<size_t, std::map<uint64_t, uint64_t>> mem_memo;

    uint64_t eval(const BvRef &t) {
        auto it = memo.find(t->uid);
        if (it != memo.end()) {
            return it->second;
        }
        uint64_t v = compute(t);
        memo[t->uid] = v;
        return v;
    }

    const std::map<uint64_t, uint64_t> &eval_mem(const BvRef &t) {
        auto it = mem_memo.find(t->uid);
        if (it != mem_memo.end()) {
            return it->second;
        }
        std::map<uint64_t, uint64_t> words;
        switch (t->op) {
        case BvOp::MemZero:
            break;
        case BvOp::MemStore: {
            words = eval_mem(t->args[0]);
            uint64_t addr = eval(t->args[1]);
            words[addr] = eval(t->args[2]);
            break;
        }
        case BvOp::Ite:
            words = eval(t->args[0]) ? eval_mem(t->args[1]) : eval_mem(t->args[2]);
            break;
        default:
            throw Error("expected an array term");
        }
        mem_memo[t->uid] = std::move(words);
        return mem_memo[t->uid];
    }

    uint64_t compute(const BvRef &t) {
        switch (t->op) {
        case BvOp::Var:
            return mask_width(env.get(t->name, t->cycle), t->width);
        case BvOp::Const:
            return t->value;
        case BvOp::Not:
            return mask_width(~eval(t->args[0]), t->width);
        case BvOp::Neg:
            return mask_width(~eval(t->args[0]) + 1, t->width);
        case BvOp::Eq:
            return eval(t->args[0]) == eval(t->args[1]);
        case BvOp::Ne:
            return eval(t->args[0]) != eval(t->args[1]);
        case BvOp::Ult:
            return eval(t->args[0]) < eval(t->args[1]);
        case BvOp::Ule:
            return eval(t->args[0]) <= eval(t->args[1]);
        case BvOp::And:
            return eval(t->args[0]) & eval(t->args[1]);
        case BvOp::Or:
            return eval(t->args[0]) | eval(t->args[1]);
        case BvOp::Xor:
            return eval(t->args[0]) ^ eval(t->args[1]);
        case BvOp::Add:
            return mask_width(eval(t->args[0]) + eval(t->args[1]), t->width);
        case BvOp::Sub:
            return mask_width(eval(t->args[0]) - eval(t->args[1]), t->width);
        case BvOp::Shl: {
            uint64_t sh = eval(t->args[1]);
            if (sh >= static_cast<uint64_t>(t->width)) {
                return 0;
            }
            return mask_width(eval(t->args[0]) << sh, t->width);
        }
        case BvOp::Shr: {
            uint64_t sh = eval(t->args[1]);
            if (sh >= static_cast<uint64_t>(t->width)) {
                return 0;
            }
            return eval(t->args[0]) >> sh;
        }
        case BvOp::Ite:
            if (t->args[1]->is_array()) {
                throw Error("array ite evaluated as vector");
            }
            return eval(t->args[0]) ? eval(t->args[1]) : eval(t->args[2]);
        case BvOp::Concat: {
            uint64_t v = 0;
            for (const auto &p : t->args) {
                v = (v << p->width) | eval(p);
            }
            return mask_width(v, t->width);
        }
        case BvOp::Extract:
            return mask_width(eval(t->args[0]) >> t->lo, t->width);
        case BvOp::ZeroExt:
            return eval(t->args[0]);
        case BvOp::MemSelect: {
            const auto &words = eval_mem(t->args[0]);
            uint64_t addr = eval(t->args[1]);
            auto it = words.find(addr);
            return it == words.end() ? 0 : it->second;
        }
        case BvOp::MemZero:
        case BvOp::MemStore:
            throw Error("array term evaluated as vector");
        }
        return 0;
    }
};

} // namespace

uint64_t bv_eval(const BvRef &t, const BvEnv &env) {
    Evaluator ev{env, {}, {}};
    return ev.eval(t);
}

} // namespace rtlic
