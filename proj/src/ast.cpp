// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "rtlic/ast.hpp"

namespace rtlic {

ExprPtr make_const(uint64_t value, int width, SourcePos pos) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Const;
    e->value = value;
    e->width = width;
    e->pos = pos;
    return e;
}

ExprPtr make_ref(std::string name, SourcePos pos) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Ref;
    e->name = std::move(name);
    e->pos = pos;
    return e;
}

static ExprPtr clone_maybe(const ExprPtr &e) { return e ? e->clone() : nullptr; }

ExprPtr Expr::clone() const {
    auto c = std::make_unique<Expr>();
    c->kind = kind;
    c->value = value;
    c->name = name;
    c->unary_op = unary_op;
    c->binary_op = binary_op;
    c->lhs = clone_maybe(lhs);
    c->rhs = clone_maybe(rhs);
    c->tern = clone_maybe(tern);
    for (const auto &p : parts) {
        c->parts.push_back(p->clone());
    }
    c->index = clone_maybe(index);
    c->msb = msb;
    c->lsb = lsb;
    c->msb_expr = clone_maybe(msb_expr);
    c->lsb_expr = clone_maybe(lsb_expr);
    c->width = width;
    c->pos = pos;
    return c;
}

static bool expr_equal_ptr(const ExprPtr &a, const ExprPtr &b) {
    if (!a || !b) {
        return !a && !b;
    }
    return expr_equal(*a, *b);
}

bool expr_equal(const Expr &a, const Expr &b) {
    if (a.kind != b.kind) {
        return false;
    }
    switch (a.kind) {
    case ExprKind::Const:
        return a.value == b.value && a.width == b.width;
    case ExprKind::Ref:
        return a.name == b.name;
    case ExprKind::Index:
        return a.name == b.name && expr_equal_ptr(a.index, b.index);
    case ExprKind::Slice:
        return a.name == b.name && a.msb == b.msb && a.lsb == b.lsb &&
               expr_equal_ptr(a.msb_expr, b.msb_expr) && expr_equal_ptr(a.lsb_expr, b.lsb_expr);
    case ExprKind::Unary:
        return a.unary_op == b.unary_op && expr_equal_ptr(a.lhs, b.lhs);
    case ExprKind::Binary:
        return a.binary_op == b.binary_op && expr_equal_ptr(a.lhs, b.lhs) &&
               expr_equal_ptr(a.rhs, b.rhs);
    case ExprKind::Ternary:
        return expr_equal_ptr(a.lhs, b.lhs) && expr_equal_ptr(a.rhs, b.rhs) &&
               expr_equal_ptr(a.tern, b.tern);
    case ExprKind::Concat: {
        if (a.parts.size() != b.parts.size()) {
            return false;
        }
        for (size_t i = 0; i < a.parts.size(); ++i) {
            if (!expr_equal(*a.parts[i], *b.parts[i])) {
                return false;
            }
        }
        return true;
    }
    }
    return false;
}

StmtPtr Stmt::clone() const {
    auto c = std::make_unique<Stmt>();
    c->kind = kind;
    for (const auto &s : stmts) {
        c->stmts.push_back(s->clone());
    }
    c->cond = cond ? cond->clone() : nullptr;
    for (const auto &s : then_stmts) {
        c->then_stmts.push_back(s->clone());
    }
    for (const auto &s : else_stmts) {
        c->else_stmts.push_back(s->clone());
    }
    c->lhs_name = lhs_name;
    c->lhs_index = lhs_index ? lhs_index->clone() : nullptr;
    c->rhs = rhs ? rhs->clone() : nullptr;
    c->text = text;
    c->span = span;
    return c;
}

static bool stmt_list_equal(const std::vector<StmtPtr> &a, const std::vector<StmtPtr> &b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (size_t i = 0; i < a.size(); ++i) {
        if (!stmt_equal(*a[i], *b[i])) {
            return false;
        }
    }
    return true;
}

bool stmt_equal(const Stmt &a, const Stmt &b) {
    if (a.kind != b.kind) {
        return false;
    }
    switch (a.kind) {
    case StmtKind::Block:
        return stmt_list_equal(a.stmts, b.stmts);
    case StmtKind::If:
        return expr_equal(*a.cond, *b.cond) && stmt_list_equal(a.then_stmts, b.then_stmts) &&
               stmt_list_equal(a.else_stmts, b.else_stmts);
    case StmtKind::AssignNb:
    case StmtKind::AssignB: {
        if (a.lhs_name != b.lhs_name) {
            return false;
        }
        if (static_cast<bool>(a.lhs_index) != static_cast<bool>(b.lhs_index)) {
            return false;
        }
        if (a.lhs_index && !expr_equal(*a.lhs_index, *b.lhs_index)) {
            return false;
        }
        return expr_equal(*a.rhs, *b.rhs);
    }
    case StmtKind::Display:
        return a.text == b.text;
    }
    return false;
}

Ast Ast::clone() const {
    Ast c;
    c.module_name = module_name;
    c.file = file;
    for (const auto &p : params) {
        c.params.push_back({p.name, p.value ? p.value->clone() : nullptr, p.pos});
    }
    for (const auto &p : ports) {
        PortDecl d;
        d.name = p.name;
        d.dir = p.dir;
        d.is_reg = p.is_reg;
        d.msb = p.msb ? p.msb->clone() : nullptr;
        d.lsb = p.lsb ? p.lsb->clone() : nullptr;
        d.width = p.width;
        d.pos = p.pos;
        c.ports.push_back(std::move(d));
    }
    for (const auto &r : regs) {
        RegDecl d;
        d.name = r.name;
        d.msb = r.msb ? r.msb->clone() : nullptr;
        d.lsb = r.lsb ? r.lsb->clone() : nullptr;
        d.width = r.width;
        d.pos = r.pos;
        c.regs.push_back(std::move(d));
    }
    for (const auto &m : memories) {
        MemDecl d;
        d.name = m.name;
        d.msb = m.msb ? m.msb->clone() : nullptr;
        d.lsb = m.lsb ? m.lsb->clone() : nullptr;
        d.depth_msb = m.depth_msb ? m.depth_msb->clone() : nullptr;
        d.depth_lsb = m.depth_lsb ? m.depth_lsb->clone() : nullptr;
        d.width = m.width;
        d.depth = m.depth;
        d.pos = m.pos;
        c.memories.push_back(std::move(d));
    }
    for (const auto &p : processes) {
        Process q;
        q.id = p.id;
        q.kind = p.kind;
        q.clock = p.clock;
        q.span = p.span;
        for (const auto &s : p.body) {
            q.body.push_back(s->clone());
        }
        c.processes.push_back(std::move(q));
    }
    return c;
}

static bool expr_equal_opt(const ExprPtr &a, const ExprPtr &b) {
    if (!a || !b) {
        return !a && !b;
    }
    return expr_equal(*a, *b);
}

bool ast_equal(const Ast &a, const Ast &b) {
    if (a.module_name != b.module_name || a.params.size() != b.params.size() ||
        a.ports.size() != b.ports.size() || a.regs.size() != b.regs.size() ||
        a.memories.size() != b.memories.size() || a.processes.size() != b.processes.size()) {
        return false;
    }
    for (size_t i = 0; i < a.params.size(); ++i) {
        if (a.params[i].name != b.params[i].name ||
            !expr_equal_opt(a.params[i].value, b.params[i].value)) {
            return false;
        }
    }
    for (size_t i = 0; i < a.ports.size(); ++i) {
        const auto &x = a.ports[i];
        const auto &y = b.ports[i];
        if (x.name != y.name || x.dir != y.dir || x.is_reg != y.is_reg ||
            !expr_equal_opt(x.msb, y.msb) || !expr_equal_opt(x.lsb, y.lsb)) {
            return false;
        }
    }
    for (size_t i = 0; i < a.regs.size(); ++i) {
        if (a.regs[i].name != b.regs[i].name || !expr_equal_opt(a.regs[i].msb, b.regs[i].msb) ||
            !expr_equal_opt(a.regs[i].lsb, b.regs[i].lsb)) {
            return false;
        }
    }
    for (size_t i = 0; i < a.memories.size(); ++i) {
        const auto &x = a.memories[i];
        const auto &y = b.memories[i];
        if (x.name != y.name || !expr_equal_opt(x.msb, y.msb) || !expr_equal_opt(x.lsb, y.lsb) ||
            !expr_equal_opt(x.depth_msb, y.depth_msb) || !expr_equal_opt(x.depth_lsb, y.depth_lsb)) {
            return false;
        }
    }
    for (size_t i = 0; i < a.processes.size(); ++i) {
        const auto &x = a.processes[i];
        const auto &y = b.processes[i];
        if (x.kind != y.kind || x.clock != y.clock || x.body.size() != y.body.size()) {
            return false;
        }
        for (size_t j = 0; j < x.body.size(); ++j) {
            if (!stmt_equal(*x.body[j], *y.body[j])) {
                return false;
            }
        }
    }
    return true;
}

} // namespace rtlic
