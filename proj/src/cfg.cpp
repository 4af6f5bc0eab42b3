// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "rtlic/cfg.hpp"

#include "rtlic/printer.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace rtlic {

namespace {

void collect_signals(const Expr &e, const ElaboratedDesign &d, std::set<std::string> &out) {
    switch (e.kind) {
    case ExprKind::Ref:
    case ExprKind::Index:
    case ExprKind::Slice:
        if (!e.name.empty() && d.find_signal(e.name)) {
            out.insert(e.name);
        }
        if (e.index) {
            collect_signals(*e.index, d, out);
        }
        break;
    case ExprKind::Unary:
        collect_signals(*e.lhs, d, out);
        break;
    case ExprKind::Binary:
        collect_signals(*e.lhs, d, out);
        collect_signals(*e.rhs, d, out);
        break;
    case ExprKind::Ternary:
        collect_signals(*e.lhs, d, out);
        collect_signals(*e.rhs, d, out);
        collect_signals(*e.tern, d, out);
        break;
    case ExprKind::Concat:
        for (const auto &p : e.parts) {
            collect_signals(*p, d, out);
        }
        break;
    case ExprKind::Const:
        break;
    }
}

// Splices bare begin/end groups into their surrounding statement list.
void inline_blocks(const std::vector<StmtPtr> &in, std::vector<const Stmt *> &out) {
    for (const auto &s : in) {
        if (s->kind == StmtKind::Block) {
            inline_blocks(s->stmts, out);
        } else {
            out.push_back(s.get());
        }
    }
}

struct Builder {
    const ElaboratedDesign &d;
    CfgSet cs;
    int branch_counter = 0; // "B<k>" ids, shared across processes
    int join_counter = 0;

    BlockId new_block(int process, const std::string &label) {
        Block b;
        b.id = static_cast<BlockId>(cs.blocks.size());
        b.process = process;
        b.label = label;
        cs.blocks.push_back(std::move(b));
        return cs.blocks.back().id;
    }

    struct WorkItem {
        BlockId owner;
        std::vector<const Stmt *> stmts;
        BlockId cont; // -1 when the list falls off the end of the process
    };

    void build_process(const Process &p) {
        Cfg cfg;
        cfg.process_id = p.id;
        BlockId entry = new_block(p.id, "E" + std::to_string(p.id));
        cfg.entry = entry;
        cs.blocks[entry].span = p.span;

        std::deque<WorkItem> queue;
        WorkItem first;
        first.owner = entry;
        inline_blocks(p.body, first.stmts);
        first.cont = -1;
        queue.push_back(std::move(first));

        size_t first_block = static_cast<size_t>(entry);

        while (!queue.empty()) {
            WorkItem item = std::move(queue.front());
            queue.pop_front();
            Block *owner = &cs.blocks[item.owner];
            bool branched = false;
            for (size_t i = 0; i < item.stmts.size(); ++i) {
                const Stmt *s = item.stmts[i];
                if (s->kind == StmtKind::If) {
                    BlockId then_id = new_block(p.id, "B" + std::to_string(++branch_counter));
                    BlockId else_id = new_block(p.id, "B" + std::to_string(++branch_counter));
                    owner = &cs.blocks[item.owner]; // re-resolve after growth
                    owner->guard = Guard{s->cond.get(), then_id, else_id};
                    if (owner->span.line_begin == 0) {
                        owner->span = s->span;
                    }
                    cs.blocks[then_id].span = s->span;
                    cs.blocks[else_id].span = s->span;
                    cfg.intra.push_back({item.owner, then_id, EdgePolarity::True});
                    cfg.intra.push_back({item.owner, else_id, EdgePolarity::False});

                    std::vector<const Stmt *> rest(item.stmts.begin() +
                                                       static_cast<long>(i) + 1,
                                                   item.stmts.end());
                    BlockId cont = item.cont;
                    if (!rest.empty()) {
                        BlockId join = new_block(p.id, "J" + std::to_string(++join_counter));
                        WorkItem join_item;
                        join_item.owner = join;
                        join_item.stmts = std::move(rest);
                        join_item.cont = item.cont;
                        cont = join;
                        // branch arms first, then the continuation
                        WorkItem then_item{then_id, {}, cont};
                        inline_blocks(s->then_stmts, then_item.stmts);
                        WorkItem else_item{else_id, {}, cont};
                        inline_blocks(s->else_stmts, else_item.stmts);
                        queue.push_back(std::move(then_item));
                        queue.push_back(std::move(else_item));
                        queue.push_back(std::move(join_item));
                    } else {
                        WorkItem then_item{then_id, {}, cont};
                        inline_blocks(s->then_stmts, then_item.stmts);
                        WorkItem else_item{else_id, {}, cont};
                        inline_blocks(s->else_stmts, else_item.stmts);
                        queue.push_back(std::move(then_item));
                        queue.push_back(std::move(else_item));
                    }
                    branched = true;
                    break;
                }
                owner->stmts.push_back(s);
                if (owner->span.line_begin == 0) {
                    owner->span = s->span;
                } else {
                    owner->span.line_end = std::max(owner->span.line_end, s->span.line_end);
                }
            }
            if (!branched && item.cont >= 0) {
                cfg.intra.push_back({item.owner, item.cont, EdgePolarity::Always});
            }
        }

        for (size_t i = first_block; i < cs.blocks.size(); ++i) {
            cfg.nodes.push_back(static_cast<BlockId>(i));
        }
        cs.cfgs.push_back(std::move(cfg));
    }

    void compute_def_use() {
        for (auto &b : cs.blocks) {
            for (const Stmt *s : b.stmts) {
                if (s->kind == StmtKind::AssignNb || s->kind == StmtKind::AssignB) {
                    b.defs.insert(s->lhs_name);
                    if (s->lhs_index) {
                        collect_signals(*s->lhs_index, d, b.uses);
                    }
                    collect_signals(*s->rhs, d, b.uses);
                }
            }
            if (b.guard) {
                collect_signals(*b.guard->cond, d, b.uses);
            }
        }
    }

    void compute_inter_edges() {
        for (const auto &def_b : cs.blocks) {
            if (def_b.defs.empty()) {
                continue;
            }
            for (const auto &use_b : cs.blocks) {
                if (def_b.process == use_b.process) {
                    continue;
                }
                for (const auto &sig : def_b.defs) {
                    if (use_b.uses.count(sig)) {
                        cs.inter.push_back({def_b.id, use_b.id, sig});
                    }
                }
            }
        }
        std::sort(cs.inter.begin(), cs.inter.end());
    }
};

} // namespace

const Block *CfgSet::find_label(const std::string &label) const {
    auto it = label_index.find(label);
    return it == label_index.end() ? nullptr : &blocks[static_cast<size_t>(it->second)];
}

BlockId CfgSet::id_of(const std::string &label) const {
    const Block *b = find_label(label);
    if (!b) {
        throw Error("unknown block label \"" + label + "\"");
    }
    return b->id;
}

const Cfg &CfgSet::cfg_of(BlockId id) const {
    int pid = block(id).process;
    for (const auto &c : cfgs) {
        if (c.process_id == pid) {
            return c;
        }
    }
    throw Error("block without a process CFG");
}

std::vector<BlockId> CfgSet::intra_preds(BlockId id) const {
    std::vector<BlockId> out;
    for (const auto &c : cfgs) {
        for (const auto &e : c.intra) {
            if (e.to == id) {
                out.push_back(e.from);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<BlockId> CfgSet::intra_succs(BlockId id) const {
    std::vector<BlockId> out;
    for (const auto &c : cfgs) {
        for (const auto &e : c.intra) {
            if (e.from == id) {
                out.push_back(e.to);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

CfgSet build_cfg_set(const ElaboratedDesign &d) {
    Builder builder{d, {}, 0, 0};
    builder.cs.design = &d;
    for (const auto &p : d.ast.processes) {
        builder.build_process(p);
    }
    builder.compute_def_use();
    builder.compute_inter_edges();
    for (const auto &b : builder.cs.blocks) {
        builder.cs.label_index[b.label] = b.id;
    }
    return std::move(builder.cs);
}

std::vector<BlockId> find_assignment_blocks(const CfgSet &cs, const std::string &sig) {
    if (!cs.design || !cs.design->find_signal(sig)) {
        throw Error("unknown signal \"" + sig + "\"");
    }
    struct Keyed {
        int process;
        int line;
        BlockId id;
    };
    std::vector<Keyed> keyed;
    for (const auto &b : cs.blocks) {
        if (!b.defs.count(sig)) {
            continue;
        }
        int line = b.span.line_begin;
        for (const Stmt *s : b.stmts) {
            if ((s->kind == StmtKind::AssignNb || s->kind == StmtKind::AssignB) &&
                s->lhs_name == sig) {
                line = s->span.line_begin;
                break;
            }
        }
        keyed.push_back({b.process, line, b.id});
    }
    std::sort(keyed.begin(), keyed.end(), [](const Keyed &a, const Keyed &b) {
        return std::tie(a.process, a.line, a.id) < std::tie(b.process, b.line, b.id);
    });
    std::vector<BlockId> out;
    for (const auto &k : keyed) {
        out.push_back(k.id);
    }
    return out;
}

std::vector<BlockId> intra_bfs(const CfgSet &cs, BlockId b) {
    const Cfg &cfg = cs.cfg_of(b);
    std::vector<BlockId> order;
    std::vector<bool> seen(cs.blocks.size(), false);
    std::deque<BlockId> queue{b};
    seen[static_cast<size_t>(b)] = true;
    while (!queue.empty()) {
        BlockId cur = queue.front();
        queue.pop_front();
        order.push_back(cur);
        for (BlockId p : cs.intra_preds(cur)) {
            if (seen[static_cast<size_t>(p)]) {
                continue;
            }
            seen[static_cast<size_t>(p)] = true;
            if (p == cfg.entry) {
                continue; // the entry terminates the walk and stays implicit
            }
            queue.push_back(p);
        }
    }
    return order;
}

DistanceMap compute_distance(const CfgSet &cs, BlockId target) {
    DistanceMap dm;
    dm.target = target;
    dm.dist.assign(cs.blocks.size(), kUnreachable);
    dm.dist[static_cast<size_t>(target)] = 0;
    std::deque<BlockId> queue{target};
    while (!queue.empty()) {
        BlockId cur = queue.front();
        queue.pop_front();
        uint32_t dist = dm.dist[static_cast<size_t>(cur)];
        std::vector<BlockId> preds = cs.intra_preds(cur);
        for (const auto &e : cs.inter) {
            if (e.use_block == cur) {
                preds.push_back(e.def_block);
            }
        }
        std::sort(preds.begin(), preds.end());
        for (BlockId p : preds) {
            if (dm.dist[static_cast<size_t>(p)] != kUnreachable) {
                continue;
            }
            dm.dist[static_cast<size_t>(p)] = dist + 1;
            queue.push_back(p);
        }
    }
    return dm;
}

TargetLocator TargetLocator::at_line(int line, bool polarity) {
    TargetLocator l;
    l.kind = Kind::Line;
    l.line = line;
    l.polarity = polarity;
    return l;
}

TargetLocator TargetLocator::at_marker(std::string text) {
    TargetLocator l;
    l.kind = Kind::Marker;
    l.marker = std::move(text);
    return l;
}

TargetLocator TargetLocator::parse(const std::string &text) {
    if (text.rfind("line:", 0) == 0) {
        std::string rest = text.substr(5);
        bool polarity = true;
        auto colon = rest.find(':');
        if (colon != std::string::npos) {
            std::string pol = rest.substr(colon + 1);
            rest = rest.substr(0, colon);
            if (pol == "true") {
                polarity = true;
            } else if (pol == "false") {
                polarity = false;
            } else {
                throw Error("bad target polarity \"" + pol + "\" (expected true or false)");
            }
        }
        try {
            return at_line(std::stoi(rest), polarity);
        } catch (const std::exception &) {
            throw Error("bad target line \"" + rest + "\"");
        }
    }
    if (text.rfind("marker:", 0) == 0) {
        return at_marker(text.substr(7));
    }
    throw Error("bad target locator \"" + text + "\" (expected line:<n>[:true|false] or marker:<text>)");
}

std::string TargetLocator::str() const {
    if (kind == Kind::Marker) {
        return "marker:" + marker;
    }
    return "line:" + std::to_string(line) + (polarity ? ":true" : ":false");
}

BranchTarget resolve_target(const ElaboratedDesign &d, const CfgSet &cs, const TargetLocator &loc) {
    auto make = [&](BlockId id) {
        BranchTarget t;
        t.block = id;
        t.process = cs.block(id).process;
        t.label = cs.block(id).label;
        return t;
    };

    if (loc.kind == TargetLocator::Kind::Marker) {
        std::vector<BlockId> hits;
        for (const auto &b : cs.blocks) {
            for (const Stmt *s : b.stmts) {
                if (s->kind == StmtKind::Display && s->text == loc.marker) {
                    hits.push_back(b.id);
                }
            }
        }
        if (hits.empty()) {
            throw Error(d.ast.file, {}, "no display marker \"" + loc.marker + "\"");
        }
        if (hits.size() > 1) {
            std::string candidates;
            for (BlockId id : hits) {
                candidates += (candidates.empty() ? "" : ", ") + cs.block(id).label;
            }
            throw Error(d.ast.file, {},
                        "ambiguous marker \"" + loc.marker + "\" (candidates: " + candidates + ")");
        }
        return make(hits[0]);
    }

    // a branch statement at this line wins; otherwise the innermost block
    // holding a statement on the line
    std::vector<const Block *> guard_hits;
    for (const auto &b : cs.blocks) {
        if (b.guard && b.guard->cond->pos.line == loc.line) {
            guard_hits.push_back(&b);
        }
    }
    if (guard_hits.size() > 1) {
        throw Error(d.ast.file, {loc.line, 1}, "ambiguous branch at line " + std::to_string(loc.line));
    }
    if (guard_hits.size() == 1) {
        const Guard &g = *guard_hits[0]->guard;
        return make(loc.polarity ? g.true_succ : g.false_succ);
    }
    for (const auto &b : cs.blocks) {
        for (const Stmt *s : b.stmts) {
            if (s->span.line_begin <= loc.line && loc.line <= s->span.line_end) {
                return make(b.id);
            }
        }
    }
    throw Error(d.ast.file, {loc.line, 1}, "no branch at line " + std::to_string(loc.line));
}

BranchTarget resolve_target(const ElaboratedDesign &d, const TargetLocator &loc) {
    CfgSet cs = build_cfg_set(d);
    return resolve_target(d, cs, loc);
}

std::string to_dot(const CfgSet &cs) {
    std::ostringstream os;
    os << "digraph cfgset {\n  node [shape=box];\n";
    for (const auto &cfg : cs.cfgs) {
        os << "  subgraph cluster_p" << cfg.process_id << " {\n";
        os << "    label=\"CFG" << cfg.process_id << "\";\n";
        for (BlockId id : cfg.nodes) {
            const Block &b = cs.block(id);
            os << "    " << b.label << " [label=\"" << b.label;
            if (b.guard) {
                os << "\\n" << print_expr(*b.guard->cond);
            }
            for (const Stmt *s : b.stmts) {
                if (s->kind == StmtKind::Display) {
                    os << "\\n$display(" << s->text << ")";
                }
            }
            os << "\"];\n";
        }
        for (const auto &e : cfg.intra) {
            os << "    " << cs.block(e.from).label << " -> " << cs.block(e.to).label;
            switch (e.polarity) {
            case EdgePolarity::True: os << " [style=solid];\n"; break;
            case EdgePolarity::False: os << " [style=dashed];\n"; break;
            case EdgePolarity::Always: os << " [style=solid, arrowhead=empty];\n"; break;
            }
        }
        os << "  }\n";
    }
    for (const auto &e : cs.inter) {
        os << "  " << cs.block(e.def_block).label << " -> " << cs.block(e.use_block).label
           << " [color=red, constraint=false, label=\"" << e.signal << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace rtlic
