// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rtlic/diagnostics.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace rtlic {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class UnaryOp { BitNot, LogNot, Neg };

enum class BinaryOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Xor,
    LogAnd,
    LogOr,
    Add,
    Sub,
    Shl,
    Shr,
    Mul, // constant contexts only
    Div, // constant contexts only
    Pow, // constant contexts only
};

enum class ExprKind {
    Const,   // value/width; width -1 while unsized
    Ref,     // signal or parameter name (parameters folded by elaboration)
    Index,   // base[index] - memory word or dynamic bit select
    Slice,   // base[msb:lsb], constant bounds
    Unary,
    Binary,
    Ternary, // cond ? a : b
    Concat,  // {a, b, ...}
};

struct Expr {
    ExprKind kind = ExprKind::Const;
    uint64_t value = 0;    // Const
    std::string name;      // Ref, Index, Slice base
    UnaryOp unary_op = UnaryOp::BitNot;
    BinaryOp binary_op = BinaryOp::Eq;
    ExprPtr lhs, rhs, tern; // operands: Unary uses lhs; Ternary uses lhs(cond), rhs(then), tern(else)
    std::vector<ExprPtr> parts; // Concat
    ExprPtr index;              // Index
    int msb = 0, lsb = 0;       // Slice (post-fold)
    ExprPtr msb_expr, lsb_expr; // Slice bounds before folding
    int width = -1;             // resolved bit width; -1 until elaboration (or sized consts)
    SourcePos pos;

    ExprPtr clone() const;
};

ExprPtr make_const(uint64_t value, int width, SourcePos pos = {});
ExprPtr make_ref(std::string name, SourcePos pos = {});

bool expr_equal(const Expr &a, const Expr &b);

enum class StmtKind { Block, If, AssignNb, AssignB, Display };

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
    StmtKind kind = StmtKind::Block;
    std::vector<StmtPtr> stmts;                 // Block
    ExprPtr cond;                               // If
    std::vector<StmtPtr> then_stmts, else_stmts;
    std::string lhs_name;                       // assigns
    ExprPtr lhs_index;                          // non-null for mem[expr] targets
    ExprPtr rhs;
    std::string text;                           // Display marker text
    SourceSpan span;

    StmtPtr clone() const;
};

bool stmt_equal(const Stmt &a, const Stmt &b);

enum class Direction { Input, Output };

struct PortDecl {
    std::string name;
    Direction dir = Direction::Input;
    bool is_reg = false; // "output reg"
    ExprPtr msb, lsb;    // null for 1-bit scalars
    int width = 1;       // resolved by elaboration
    SourcePos pos;
};

struct RegDecl {
    std::string name;
    ExprPtr msb, lsb;
    int width = 1;
    SourcePos pos;
};

struct MemDecl {
    std::string name;
    ExprPtr msb, lsb;         // word range
    ExprPtr depth_msb, depth_lsb;
    int width = 1;            // word width after elaboration
    uint64_t depth = 0;       // number of words after elaboration
    SourcePos pos;
};

struct ParamDecl {
    std::string name;
    ExprPtr value;
    SourcePos pos;
};

enum class ProcessKind { ClockedPosedge, Combinational };

struct Process {
    int id = 0; // 1-based, source order
    ProcessKind kind = ProcessKind::Combinational;
    std::string clock; // ClockedPosedge only
    std::vector<StmtPtr> body;
    SourceSpan span;
};

// A single flattened module. Identifier uniqueness across ports, regs,
// memories and params is enforced by the parser.
struct Ast {
    std::string module_name;
    std::vector<ParamDecl> params;
    std::vector<PortDecl> ports;
    std::vector<RegDecl> regs;
    std::vector<MemDecl> memories;
    std::vector<Process> processes;
    std::string file;

    Ast clone() const;
};

bool ast_equal(const Ast &a, const Ast &b);

} // namespace rtlic
