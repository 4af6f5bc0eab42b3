// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "rtlic/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <map>
#include <set>

namespace rtlic {

namespace {

enum class Tok {
    End,
    Id,
    SysId,  // $display and friends
    Number,
    String,
    Punct,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    uint64_t value = 0;
    int width = -1; // sized literals only
    SourcePos pos;
};

const std::set<std::string> kUnsupported = {
    "initial", "assign",  "wire",   "task",    "function", "fork",    "join",
    "case",    "casez",   "casex",  "for",     "while",    "repeat",  "forever",
    "generate", "genvar", "integer", "real",   "negedge",  "wait",    "deassign",
    "force",   "release", "specify", "primitive", "table",  "defparam",
};

class Lexer {
public:
    explicit Lexer(const SourceDesign &src) : src_(src) {}

    Token next() {
        skip_trivia();
        Token t;
        t.pos = src_.pos_at(off_);
        if (off_ >= text().size()) {
            t.kind = Tok::End;
            return t;
        }
        char c = text()[off_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            t.kind = Tok::Id;
            t.text = take_word();
            return t;
        }
        if (c == '$') {
            ++off_;
            t.kind = Tok::SysId;
            t.text = "$" + take_word();
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            return lex_number(t);
        }
        if (c == '\'') {
            // based literal without a width prefix, e.g. 'b0
            return lex_based(t, /*width=*/-1);
        }
        if (c == '"') {
            ++off_;
            t.kind = Tok::String;
            while (off_ < text().size() && text()[off_] != '"') {
                t.text += text()[off_++];
            }
            if (off_ >= text().size()) {
                throw Error(src_.path, t.pos, "unterminated string");
            }
            ++off_;
            return t;
        }
        t.kind = Tok::Punct;
        t.text = take_punct();
        return t;
    }

private:
    const std::string &text() const { return src_.source; }

    void skip_trivia() {
        while (off_ < text().size()) {
            char c = text()[off_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++off_;
            } else if (c == '/' && off_ + 1 < text().size() && text()[off_ + 1] == '/') {
                while (off_ < text().size() && text()[off_] != '\n') {
                    ++off_;
                }
            } else if (c == '/' && off_ + 1 < text().size() && text()[off_ + 1] == '*') {
                size_t start = off_;
                off_ += 2;
                while (off_ + 1 < text().size() &&
                       !(text()[off_] == '*' && text()[off_ + 1] == '/')) {
                    ++off_;
                }
                if (off_ + 1 >= text().size()) {
                    throw Error(src_.path, src_.pos_at(start), "unterminated block comment");
                }
                off_ += 2;
            } else {
                break;
            }
        }
    }

    std::string take_word() {
        std::string w;
        while (off_ < text().size()) {
            char c = text()[off_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                w += c;
                ++off_;
            } else {
                break;
            }
        }
        return w;
    }

    Token lex_number(Token t) {
        std::string digits;
        while (off_ < text().size() &&
               (std::isdigit(static_cast<unsigned char>(text()[off_])) || text()[off_] == '_')) {
            if (text()[off_] != '_') {
                digits += text()[off_];
            }
            ++off_;
        }
        if (off_ < text().size() && text()[off_] == '\'') {
            int width = static_cast<int>(std::strtoull(digits.c_str(), nullptr, 10));
            return lex_based(t, width);
        }
        t.kind = Tok::Number;
        t.value = std::strtoull(digits.c_str(), nullptr, 10);
        t.width = -1;
        t.text = digits;
        return t;
    }

    Token lex_based(Token t, int width) {
        ++off_; // consume '
        if (off_ >= text().size()) {
            throw Error(src_.path, t.pos, "truncated based literal");
        }
        char base = static_cast<char>(std::tolower(static_cast<unsigned char>(text()[off_++])));
        int radix = 0;
        switch (base) {
        case 'b': radix = 2; break;
        case 'd': radix = 10; break;
        case 'h': radix = 16; break;
        case 'o': radix = 8; break;
        default:
            throw Error(src_.path, t.pos, std::string("unknown literal base '") + base + "'");
        }
        std::string digits;
        while (off_ < text().size()) {
            char c = text()[off_];
            if (c == '_') {
                ++off_;
                continue;
            }
            if (std::isxdigit(static_cast<unsigned char>(c))) {
                digits += c;
                ++off_;
            } else {
                break;
            }
        }
        if (digits.empty()) {
            throw Error(src_.path, t.pos, "based literal without digits");
        }
        t.kind = Tok::Number;
        t.value = std::strtoull(digits.c_str(), nullptr, radix);
        t.width = width;
        t.text = digits;
        return t;
    }

    std::string take_punct() {
        static const char *two[] = {"==", "!=", "<=", ">=", "&&", "||", "<<", ">>", "**"};
        for (const char *op : two) {
            if (text().compare(off_, 2, op) == 0) {
                off_ += 2;
                return op;
            }
        }
        std::string s(1, text()[off_]);
        ++off_;
        return s;
    }

    const SourceDesign &src_;
    size_t off_ = 0;
};

class Parser {
public:
    explicit Parser(const SourceDesign &src) : src_(src), lex_(src) { advance(); }

    Ast parse() {
        Ast ast;
        ast.file = src_.path;
        expect_id("module");
        ast.module_name = expect_identifier("module name");
        if (accept_punct("#")) {
            expect_punct("(");
            parse_param_list(ast);
            expect_punct(")");
        }
        if (accept_punct("(")) {
            if (!peek_punct(")")) {
                parse_port_list(ast);
            }
            expect_punct(")");
        }
        expect_punct(";");
        while (!peek_id("endmodule")) {
            if (cur_.kind == Tok::End) {
                throw Error(src_.path, cur_.pos, "unexpected end of input, expected \"endmodule\"");
            }
            parse_item(ast);
        }
        advance(); // endmodule
        if (cur_.kind != Tok::End) {
            if (peek_id("module")) {
                throw Error(src_.path, cur_.pos,
                            "unsupported feature: multiple modules (designs must be flattened)");
            }
            throw Error(src_.path, cur_.pos, "trailing input after endmodule");
        }
        check_identifier_uniqueness(ast);
        check_assignment_kinds(ast);
        return ast;
    }

private:
    void advance() { cur_ = lex_.next(); }

    bool peek_id(const std::string &word) const { return cur_.kind == Tok::Id && cur_.text == word; }
    bool peek_punct(const std::string &p) const {
        return cur_.kind == Tok::Punct && cur_.text == p;
    }

    bool accept_id(const std::string &word) {
        if (peek_id(word)) {
            advance();
            return true;
        }
        return false;
    }

    bool accept_punct(const std::string &p) {
        if (peek_punct(p)) {
            advance();
            return true;
        }
        return false;
    }

    void expect_id(const std::string &word) {
        if (!accept_id(word)) {
            throw Error(src_.path, cur_.pos,
                        "expected \"" + word + "\", found \"" + describe(cur_) + "\"");
        }
    }

    void expect_punct(const std::string &p) {
        if (!accept_punct(p)) {
            throw Error(src_.path, cur_.pos,
                        "expected \"" + p + "\", found \"" + describe(cur_) + "\"");
        }
    }

    std::string expect_identifier(const std::string &what) {
        if (cur_.kind != Tok::Id) {
            throw Error(src_.path, cur_.pos, "expected " + what);
        }
        if (kUnsupported.count(cur_.text)) {
            throw Error(src_.path, cur_.pos, "unsupported feature: " + cur_.text);
        }
        std::string name = cur_.text;
        advance();
        return name;
    }

    static std::string describe(const Token &t) {
        switch (t.kind) {
        case Tok::End: return "end of input";
        case Tok::String: return "\"" + t.text + "\"";
        default: return t.text;
        }
    }

    void parse_param_list(Ast &ast) {
        do {
            expect_id("parameter");
            ParamDecl p;
            p.pos = cur_.pos;
            p.name = expect_identifier("parameter name");
            expect_punct("=");
            p.value = parse_expr();
            ast.params.push_back(std::move(p));
        } while (accept_punct(","));
    }

    void parse_range(ExprPtr &msb, ExprPtr &lsb) {
        expect_punct("[");
        msb = parse_expr();
        expect_punct(":");
        lsb = parse_expr();
        expect_punct("]");
    }

    void parse_port_list(Ast &ast) {
        Direction dir = Direction::Input;
        bool is_reg = false;
        ExprPtr msb, lsb;
        bool have_dir = false;
        while (true) {
            if (peek_id("input") || peek_id("output")) {
                dir = peek_id("input") ? Direction::Input : Direction::Output;
                advance();
                is_reg = accept_id("reg");
                msb.reset();
                lsb.reset();
                if (peek_punct("[")) {
                    parse_range(msb, lsb);
                }
                have_dir = true;
            }
            if (!have_dir) {
                throw Error(src_.path, cur_.pos, "expected input or output in port list");
            }
            PortDecl p;
            p.pos = cur_.pos;
            p.name = expect_identifier("port name");
            p.dir = dir;
            p.is_reg = is_reg;
            p.msb = msb ? msb->clone() : nullptr;
            p.lsb = lsb ? lsb->clone() : nullptr;
            ast.ports.push_back(std::move(p));
            if (!accept_punct(",")) {
                break;
            }
        }
    }

    void parse_item(Ast &ast) {
        if (cur_.kind == Tok::Id && kUnsupported.count(cur_.text)) {
            throw Error(src_.path, cur_.pos, "unsupported feature: " + cur_.text);
        }
        if (accept_id("parameter")) {
            ParamDecl p;
            p.pos = cur_.pos;
            p.name = expect_identifier("parameter name");
            expect_punct("=");
            p.value = parse_expr();
            expect_punct(";");
            ast.params.push_back(std::move(p));
            return;
        }
        if (accept_id("reg")) {
            ExprPtr msb, lsb;
            if (peek_punct("[")) {
                parse_range(msb, lsb);
            }
            while (true) {
                SourcePos pos = cur_.pos;
                std::string name = expect_identifier("reg name");
                if (peek_punct("[")) {
                    MemDecl m;
                    m.pos = pos;
                    m.name = name;
                    m.msb = msb ? msb->clone() : nullptr;
                    m.lsb = lsb ? lsb->clone() : nullptr;
                    parse_range(m.depth_msb, m.depth_lsb);
                    ast.memories.push_back(std::move(m));
                } else {
                    RegDecl r;
                    r.pos = pos;
                    r.name = name;
                    r.msb = msb ? msb->clone() : nullptr;
                    r.lsb = lsb ? lsb->clone() : nullptr;
                    ast.regs.push_back(std::move(r));
                }
                if (!accept_punct(",")) {
                    break;
                }
            }
            expect_punct(";");
            return;
        }
        if (accept_id("always")) {
            Process p;
            p.id = static_cast<int>(ast.processes.size()) + 1;
            p.span.line_begin = cur_.pos.line;
            expect_punct("@");
            expect_punct("(");
            if (accept_id("posedge")) {
                p.kind = ProcessKind::ClockedPosedge;
                p.clock = expect_identifier("clock signal");
            } else if (accept_punct("*")) {
                p.kind = ProcessKind::Combinational;
            } else {
                throw Error(src_.path, cur_.pos,
                            "unsupported sensitivity list (expected posedge <clk> or *)");
            }
            expect_punct(")");
            StmtPtr body = parse_stmt();
            p.span.line_end = body->span.line_end;
            p.body = flatten(std::move(body));
            ast.processes.push_back(std::move(p));
            return;
        }
        throw Error(src_.path, cur_.pos,
                    "unexpected \"" + describe(cur_) + "\" at module level");
    }

    // begin/end groups become plain statement lists
    static std::vector<StmtPtr> flatten(StmtPtr s) {
        std::vector<StmtPtr> out;
        if (s->kind == StmtKind::Block) {
            out = std::move(s->stmts);
        } else {
            out.push_back(std::move(s));
        }
        return out;
    }

    StmtPtr parse_stmt() {
        SourcePos pos = cur_.pos;
        if (cur_.kind == Tok::Id && kUnsupported.count(cur_.text)) {
            throw Error(src_.path, cur_.pos, "unsupported feature: " + cur_.text);
        }
        if (accept_id("begin")) {
            auto s = std::make_unique<Stmt>();
            s->kind = StmtKind::Block;
            s->span.line_begin = pos.line;
            while (!peek_id("end")) {
                if (cur_.kind == Tok::End) {
                    throw Error(src_.path, cur_.pos, "unbalanced begin/end, expected \"end\"");
                }
                s->stmts.push_back(parse_stmt());
            }
            s->span.line_end = cur_.pos.line;
            advance(); // end
            return s;
        }
        if (accept_id("if")) {
            auto s = std::make_unique<Stmt>();
            s->kind = StmtKind::If;
            s->span.line_begin = pos.line;
            expect_punct("(");
            s->cond = parse_expr();
            expect_punct(")");
            StmtPtr then_branch = parse_stmt();
            s->span.line_end = then_branch->span.line_end;
            s->then_stmts = flatten(std::move(then_branch));
            if (accept_id("else")) {
                StmtPtr else_branch = parse_stmt();
                s->span.line_end = else_branch->span.line_end;
                s->else_stmts = flatten(std::move(else_branch));
            }
            return s;
        }
        if (cur_.kind == Tok::SysId) {
            if (cur_.text != "$display") {
                throw Error(src_.path, cur_.pos, "unsupported feature: " + cur_.text);
            }
            advance();
            auto s = std::make_unique<Stmt>();
            s->kind = StmtKind::Display;
            s->span = {pos.line, pos.line};
            expect_punct("(");
            if (cur_.kind != Tok::String) {
                throw Error(src_.path, cur_.pos, "$display expects a string literal");
            }
            s->text = cur_.text;
            advance();
            expect_punct(")");
            accept_punct(";"); // tolerated missing in the wild
            return s;
        }
        if (cur_.kind == Tok::Id) {
            auto s = std::make_unique<Stmt>();
            s->span = {pos.line, pos.line};
            s->lhs_name = expect_identifier("assignment target");
            if (accept_punct("[")) {
                s->lhs_index = parse_expr();
                expect_punct("]");
            }
            if (accept_punct("<=")) {
                s->kind = StmtKind::AssignNb;
            } else if (accept_punct("=")) {
                s->kind = StmtKind::AssignB;
            } else {
                throw Error(src_.path, cur_.pos, "expected <= or = in assignment");
            }
            s->rhs = parse_expr();
            expect_punct(";");
            return s;
        }
        throw Error(src_.path, cur_.pos, "unexpected \"" + describe(cur_) + "\" in statement");
    }

    // precedence climbing; level 0 is ?:
    ExprPtr parse_expr() { return parse_ternary(); }

    ExprPtr parse_ternary() {
        ExprPtr cond = parse_binary(0);
        if (accept_punct("?")) {
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Ternary;
            e->pos = cond->pos;
            e->lhs = std::move(cond);
            e->rhs = parse_ternary();
            expect_punct(":");
            e->tern = parse_ternary();
            return e;
        }
        return cond;
    }

    struct OpLevel {
        const char *tok;
        BinaryOp op;
    };

    static const std::vector<std::vector<OpLevel>> &levels() {
        static const std::vector<std::vector<OpLevel>> table = {
            {{"||", BinaryOp::LogOr}},
            {{"&&", BinaryOp::LogAnd}},
            {{"|", BinaryOp::Or}},
            {{"^", BinaryOp::Xor}},
            {{"&", BinaryOp::And}},
            {{"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne}},
            {{"<", BinaryOp::Lt}, {"<=", BinaryOp::Le}, {">", BinaryOp::Gt}, {">=", BinaryOp::Ge}},
            {{"<<", BinaryOp::Shl}, {">>", BinaryOp::Shr}},
            {{"+", BinaryOp::Add}, {"-", BinaryOp::Sub}},
            {{"*", BinaryOp::Mul}, {"/", BinaryOp::Div}},
        };
        return table;
    }

    ExprPtr parse_binary(size_t level) {
        if (level >= levels().size()) {
            return parse_unary();
        }
        ExprPtr lhs = parse_binary(level + 1);
        while (cur_.kind == Tok::Punct) {
            const OpLevel *matched = nullptr;
            for (const auto &cand : levels()[level]) {
                if (cur_.text == cand.tok) {
                    matched = &cand;
                    break;
                }
            }
            if (!matched) {
                break;
            }
            SourcePos pos = cur_.pos;
            advance();
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Binary;
            e->binary_op = matched->op;
            e->pos = pos;
            e->lhs = std::move(lhs);
            e->rhs = parse_binary(level + 1);
            lhs = std::move(e);
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        SourcePos pos = cur_.pos;
        if (accept_punct("~")) {
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Unary;
            e->unary_op = UnaryOp::BitNot;
            e->pos = pos;
            e->lhs = parse_unary();
            return e;
        }
        if (accept_punct("!")) {
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Unary;
            e->unary_op = UnaryOp::LogNot;
            e->pos = pos;
            e->lhs = parse_unary();
            return e;
        }
        if (accept_punct("-")) {
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Unary;
            e->unary_op = UnaryOp::Neg;
            e->pos = pos;
            e->lhs = parse_unary();
            return e;
        }
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_primary();
        if (peek_punct("**")) {
            SourcePos pos = cur_.pos;
            advance();
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Binary;
            e->binary_op = BinaryOp::Pow;
            e->pos = pos;
            e->lhs = std::move(base);
            e->rhs = parse_unary(); // right associative
            return e;
        }
        return base;
    }

    ExprPtr parse_primary() {
        SourcePos pos = cur_.pos;
        if (cur_.kind == Tok::Number) {
            auto e = make_const(cur_.value, cur_.width, pos);
            advance();
            return e;
        }
        if (accept_punct("(")) {
            ExprPtr e = parse_expr();
            expect_punct(")");
            return e;
        }
        if (accept_punct("{")) {
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Concat;
            e->pos = pos;
            do {
                e->parts.push_back(parse_expr());
            } while (accept_punct(","));
            expect_punct("}");
            return e;
        }
        if (cur_.kind == Tok::Id) {
            std::string name = expect_identifier("expression");
            if (accept_punct("[")) {
                ExprPtr first = parse_expr();
                if (accept_punct(":")) {
                    auto e = std::make_unique<Expr>();
                    e->kind = ExprKind::Slice;
                    e->name = name;
                    e->pos = pos;
                    e->msb_expr = std::move(first);
                    e->lsb_expr = parse_expr();
                    expect_punct("]");
                    return e;
                }
                auto e = std::make_unique<Expr>();
                e->kind = ExprKind::Index;
                e->name = name;
                e->pos = pos;
                e->index = std::move(first);
                expect_punct("]");
                return e;
            }
            return make_ref(name, pos);
        }
        throw Error(src_.path, pos, "unexpected \"" + describe(cur_) + "\" in expression");
    }

    void check_identifier_uniqueness(const Ast &ast) {
        std::map<std::string, SourcePos> seen;
        auto add = [&](const std::string &name, SourcePos pos) {
            auto [it, inserted] = seen.insert({name, pos});
            if (!inserted) {
                throw Error(src_.path, pos, "duplicate identifier \"" + name + "\"");
            }
        };
        for (const auto &p : ast.params) {
            add(p.name, p.pos);
        }
        for (const auto &p : ast.ports) {
            add(p.name, p.pos);
        }
        for (const auto &r : ast.regs) {
            add(r.name, r.pos);
        }
        for (const auto &m : ast.memories) {
            add(m.name, m.pos);
        }
    }

    void check_kind(const std::vector<StmtPtr> &stmts, bool clocked) {
        for (const auto &s : stmts) {
            switch (s->kind) {
            case StmtKind::AssignNb:
                if (!clocked) {
                    throw Error(src_.path, {s->span.line_begin, 1},
                                "nonblocking assignment in combinational process");
                }
                break;
            case StmtKind::AssignB:
                if (clocked) {
                    throw Error(src_.path, {s->span.line_begin, 1},
                                "blocking assignment in clocked process");
                }
                break;
            case StmtKind::If:
                check_kind(s->then_stmts, clocked);
                check_kind(s->else_stmts, clocked);
                break;
            case StmtKind::Block:
                check_kind(s->stmts, clocked);
                break;
            case StmtKind::Display:
                break;
            }
        }
    }

    void check_assignment_kinds(const Ast &ast) {
        for (const auto &p : ast.processes) {
            check_kind(p.body, p.kind == ProcessKind::ClockedPosedge);
        }
    }

    const SourceDesign &src_;
    Lexer lex_;
    Token cur_;
};

} // namespace

Ast parse_design(const SourceDesign &src) {
    if (src.source.empty()) {
        throw Error(src.path, {}, "empty design");
    }
    Parser p(src);
    return p.parse();
}

} // namespace rtlic
