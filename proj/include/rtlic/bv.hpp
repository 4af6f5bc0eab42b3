// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace rtlic {

enum class BvOp {
    Var,   // cycle-indexed input; name "<signal>__c<cycle>"
    Const,
    Not,   // bitwise
    Neg,
    Eq,
    Ne,
    Ult,
    Ule,
    And,
    Or,
    Xor,
    Add,
    Sub,
    Shl,
    Shr,   // logical
    Ite,
    Concat,
    Extract,   // [hi:lo]
    ZeroExt,
    MemZero,   // all-zero array, addr_width x width words
    MemStore,
    MemSelect,
};

struct BvTerm;
using BvRef = std::shared_ptr<const BvTerm>;

// Immutable, hash-consed term. width is the bit width for vector terms; for
// array-sorted terms (MemZero/MemStore) width is the word width and
// addr_width the index width.
struct BvTerm {
    BvOp op = BvOp::Const;
    int width = 1;
    int addr_width = 0;
    uint64_t value = 0;      // Const
    std::string name;        // Var (base name)
    int cycle = 0;           // Var
    int hi = 0, lo = 0;      // Extract
    std::vector<BvRef> args;
    size_t uid = 0;

    bool is_array() const { return op == BvOp::MemZero || op == BvOp::MemStore; }
};

// Builder with structural hashing; widths follow the frontend rules
// (operands zero-extended to a common width, comparisons 1 bit).
class BvBuilder {
public:
    BvRef var(const std::string &name, int cycle, int width);
    BvRef constant(uint64_t value, int width);
    BvRef bool_const(bool b) { return constant(b ? 1 : 0, 1); }

    BvRef bv_not(BvRef a);
    BvRef neg(BvRef a);
    BvRef log_not(BvRef a); // !a over truthiness
    BvRef eq(BvRef a, BvRef b);
    BvRef ne(BvRef a, BvRef b);
    BvRef ult(BvRef a, BvRef b);
    BvRef ule(BvRef a, BvRef b);
    BvRef bv_and(BvRef a, BvRef b);
    BvRef bv_or(BvRef a, BvRef b);
    BvRef bv_xor(BvRef a, BvRef b);
    BvRef log_and(BvRef a, BvRef b);
    BvRef log_or(BvRef a, BvRef b);
    BvRef add(BvRef a, BvRef b);
    BvRef sub(BvRef a, BvRef b);
    BvRef shl(BvRef a, BvRef b);
    BvRef shr(BvRef a, BvRef b);
    BvRef ite(BvRef c, BvRef a, BvRef b);
    BvRef concat(std::vector<BvRef> parts); // parts[0] = most significant
    BvRef extract(BvRef a, int hi, int lo);
    BvRef zero_ext(BvRef a, int width);
    BvRef truthy(BvRef a); // a != 0, 1 bit

    BvRef mem_zero(int addr_width, int width);
    BvRef mem_store(BvRef mem, BvRef addr, BvRef data);
    BvRef mem_select(BvRef mem, BvRef addr);

    size_t node_count() const { return nodes_.size(); }

private:
    BvRef intern(BvTerm t);
    std::pair<BvRef, BvRef> equalize(BvRef a, BvRef b);

    std::unordered_map<std::string, BvRef> cache_;
    std::vector<BvRef> nodes_;
};

// Concrete evaluation environment: (name, cycle) -> value for Vars; array
// terms evaluate structurally. Missing variables read as zero.
struct BvEnv {
    std::map<std::pair<std::string, int>, uint64_t> values;

    uint64_t get(const std::string &name, int cycle) const;
};

uint64_t bv_eval(const BvRef &t, const BvEnv &env);

uint64_t mask_width(uint64_t v, int width);

} // namespace rtlic
