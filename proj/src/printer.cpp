// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "rtlic/printer.hpp"

#include <sstream>

namespace rtlic {

namespace {

int op_level(const Expr &e) {
    if (e.kind == ExprKind::Ternary) {
        return 0;
    }
    if (e.kind == ExprKind::Unary) {
        return 11;
    }
    if (e.kind != ExprKind::Binary) {
        return 12;
    }
    switch (e.binary_op) {
    case BinaryOp::LogOr: return 1;
    case BinaryOp::LogAnd: return 2;
    case BinaryOp::Or: return 3;
    case BinaryOp::Xor: return 4;
    case BinaryOp::And: return 5;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 6;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 7;
    case BinaryOp::Shl:
    case BinaryOp::Shr: return 8;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 9;
    case BinaryOp::Mul:
    case BinaryOp::Div: return 10;
    case BinaryOp::Pow: return 11;
    }
    return 12;
}

const char *op_text(BinaryOp op) {
    switch (op) {
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "&";
    case BinaryOp::Or: return "|";
    case BinaryOp::Xor: return "^";
    case BinaryOp::LogAnd: return "&&";
    case BinaryOp::LogOr: return "||";
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Shl: return "<<";
    case BinaryOp::Shr: return ">>";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Pow: return "**";
    }
    return "?";
}

void print_expr_prec(const Expr &e, int parent_level, std::ostream &os) {
    int level = op_level(e);
    bool paren = level < parent_level;
    if (paren) {
        os << "(";
    }
    switch (e.kind) {
    case ExprKind::Const:
        if (e.width > 0) {
            if (e.width == 1) {
                os << "1'b" << (e.value & 1);
            } else {
                os << e.width << "'h" << std::hex << e.value << std::dec;
            }
        } else {
            os << e.value;
        }
        break;
    case ExprKind::Ref:
        os << e.name;
        break;
    case ExprKind::Index:
        os << e.name << "[";
        print_expr_prec(*e.index, 0, os);
        os << "]";
        break;
    case ExprKind::Slice:
        os << e.name << "[";
        if (e.msb_expr) {
            print_expr_prec(*e.msb_expr, 0, os);
        } else {
            os << e.msb;
        }
        os << ":";
        if (e.lsb_expr) {
            print_expr_prec(*e.lsb_expr, 0, os);
        } else {
            os << e.lsb;
        }
        os << "]";
        break;
    case ExprKind::Unary:
        switch (e.unary_op) {
        case UnaryOp::BitNot: os << "~"; break;
        case UnaryOp::LogNot: os << "!"; break;
        case UnaryOp::Neg: os << "-"; break;
        }
        print_expr_prec(*e.lhs, level + 1, os);
        break;
    case ExprKind::Binary:
        print_expr_prec(*e.lhs, level, os);
        os << " " << op_text(e.binary_op) << " ";
        print_expr_prec(*e.rhs, level + 1, os);
        break;
    case ExprKind::Ternary:
        print_expr_prec(*e.lhs, 1, os);
        os << " ? ";
        print_expr_prec(*e.rhs, 1, os);
        os << " : ";
        print_expr_prec(*e.tern, 0, os);
        break;
    case ExprKind::Concat: {
        os << "{";
        bool first = true;
        for (const auto &p : e.parts) {
            if (!first) {
                os << ", ";
            }
            first = false;
            print_expr_prec(*p, 0, os);
        }
        os << "}";
        break;
    }
    }
    if (paren) {
        os << ")";
    }
}

void indent_to(std::ostream &os, int indent) {
    for (int i = 0; i < indent; ++i) {
        os << "  ";
    }
}

void print_stmt_list(const std::vector<StmtPtr> &stmts, int indent, std::ostream &os);

void print_stmt_impl(const Stmt &s, int indent, std::ostream &os) {
    switch (s.kind) {
    case StmtKind::Block:
        indent_to(os, indent);
        os << "begin\n";
        print_stmt_list(s.stmts, indent + 1, os);
        indent_to(os, indent);
        os << "end\n";
        break;
    case StmtKind::If:
        indent_to(os, indent);
        os << "if (";
        print_expr_prec(*s.cond, 0, os);
        os << ") begin\n";
        print_stmt_list(s.then_stmts, indent + 1, os);
        indent_to(os, indent);
        os << "end\n";
        if (!s.else_stmts.empty()) {
            indent_to(os, indent);
            os << "else begin\n";
            print_stmt_list(s.else_stmts, indent + 1, os);
            indent_to(os, indent);
            os << "end\n";
        }
        break;
    case StmtKind::AssignNb:
    case StmtKind::AssignB:
        indent_to(os, indent);
        os << s.lhs_name;
        if (s.lhs_index) {
            os << "[";
            print_expr_prec(*s.lhs_index, 0, os);
            os << "]";
        }
        os << (s.kind == StmtKind::AssignNb ? " <= " : " = ");
        print_expr_prec(*s.rhs, 0, os);
        os << ";\n";
        break;
    case StmtKind::Display:
        indent_to(os, indent);
        os << "$display(\"" << s.text << "\");\n";
        break;
    }
}

void print_stmt_list(const std::vector<StmtPtr> &stmts, int indent, std::ostream &os) {
    for (const auto &s : stmts) {
        print_stmt_impl(*s, indent, os);
    }
}

void print_width(const ExprPtr &msb, const ExprPtr &lsb, int width, std::ostream &os) {
    if (msb && lsb) {
        os << "[";
        print_expr_prec(*msb, 0, os);
        os << ":";
        print_expr_prec(*lsb, 0, os);
        os << "] ";
    } else if (width > 1) {
        os << "[" << (width - 1) << ":0] ";
    }
}

} // namespace

std::string print_expr(const Expr &e) {
    std::ostringstream os;
    print_expr_prec(e, 0, os);
    return os.str();
}

std::string print_stmt(const Stmt &s, int indent) {
    std::ostringstream os;
    print_stmt_impl(s, indent, os);
    return os.str();
}

std::string print_design(const Ast &ast) {
    std::ostringstream os;
    os << "module " << ast.module_name;
    if (!ast.ports.empty()) {
        os << "(\n";
        for (size_t i = 0; i < ast.ports.size(); ++i) {
            const auto &p = ast.ports[i];
            os << "  " << (p.dir == Direction::Input ? "input " : "output ");
            if (p.is_reg) {
                os << "reg ";
            }
            print_width(p.msb, p.lsb, p.width, os);
            os << p.name;
            os << (i + 1 < ast.ports.size() ? ",\n" : "\n");
        }
        os << ")";
    }
    os << ";\n";
    for (const auto &p : ast.params) {
        os << "parameter " << p.name << " = ";
        print_expr_prec(*p.value, 0, os);
        os << ";\n";
    }
    for (const auto &r : ast.regs) {
        os << "reg ";
        print_width(r.msb, r.lsb, r.width, os);
        os << r.name << ";\n";
    }
    for (const auto &m : ast.memories) {
        os << "reg ";
        print_width(m.msb, m.lsb, m.width, os);
        os << m.name << " ";
        if (m.depth_msb && m.depth_lsb) {
            os << "[";
            print_expr_prec(*m.depth_msb, 0, os);
            os << ":";
            print_expr_prec(*m.depth_lsb, 0, os);
            os << "]";
        } else {
            os << "[" << (m.depth > 0 ? m.depth - 1 : 0) << ":0]";
        }
        os << ";\n";
    }
    for (const auto &p : ast.processes) {
        os << "always @(";
        if (p.kind == ProcessKind::ClockedPosedge) {
            os << "posedge " << p.clock;
        } else {
            os << "*";
        }
        os << ") begin\n";
        print_stmt_list(p.body, 1, os);
        os << "end\n";
    }
    os << "endmodule\n";
    return os.str();
}

} // namespace rtlic
