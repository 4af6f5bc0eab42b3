// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rtlic/elaborate.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace rtlic {

using BlockId = int; // index into CfgSet::blocks

enum class EdgePolarity { True, False, Always };

struct Guard {
    const Expr *cond = nullptr;
    BlockId true_succ = -1;
    BlockId false_succ = -1;
};

// One basic block. Branch-arm blocks are labeled "B<k>" with a single
// numbering that runs across all processes in source order; process entry
// blocks are "E<pid>" and join blocks "J<k>" (they carry no branch-arm
// number of their own).
struct Block {
    BlockId id = -1;
    int process = 0; // 1-based process id
    std::string label;
    std::vector<const Stmt *> stmts; // assigns and displays, program order
    std::optional<Guard> guard;      // set when the block ends in a branch
    std::set<std::string> defs;
    std::set<std::string> uses;
    SourceSpan span;
};

struct IntraEdge {
    BlockId from = -1;
    BlockId to = -1;
    EdgePolarity polarity = EdgePolarity::Always;
};

struct Cfg {
    int process_id = 0;
    BlockId entry = -1;
    std::vector<BlockId> nodes;
    std::vector<IntraEdge> intra;
};

struct InterEdge {
    BlockId def_block = -1;
    BlockId use_block = -1;
    std::string signal;

    auto operator<=>(const InterEdge &) const = default;
};

struct CfgSet {
    const ElaboratedDesign *design = nullptr; // must outlive the graph (blocks hold Stmt pointers)
    std::vector<Block> blocks;
    std::vector<Cfg> cfgs;
    std::vector<InterEdge> inter;
    std::map<std::string, BlockId> label_index;

    const Block &block(BlockId id) const { return blocks.at(static_cast<size_t>(id)); }
    const Block *find_label(const std::string &label) const;
    BlockId id_of(const std::string &label) const; // throws on unknown label
    const Cfg &cfg_of(BlockId id) const;

    // Intra predecessors/successors in ascending block-id order.
    std::vector<BlockId> intra_preds(BlockId id) const;
    std::vector<BlockId> intra_succs(BlockId id) const;
};

CfgSet build_cfg_set(const ElaboratedDesign &d);

// Blocks defining `sig`, ordered by (process id, source order).
// Empty for primary inputs and never-assigned signals; throws on unknown names.
std::vector<BlockId> find_assignment_blocks(const CfgSet &cs, const std::string &sig);

// Reverse-edge BFS from `b` within its process. The process entry block is
// not part of the result unless `b` itself is the entry.
std::vector<BlockId> intra_bfs(const CfgSet &cs, BlockId b);

constexpr uint32_t kUnreachable = std::numeric_limits<uint32_t>::max();

struct DistanceMap {
    BlockId target = -1;
    std::vector<uint32_t> dist; // indexed by BlockId; kUnreachable when no path

    uint32_t operator[](BlockId id) const { return dist.at(static_cast<size_t>(id)); }
};

// Reverse BFS over intra-edges and inter-edges, both weight 1, so blocks of
// other processes feeding the target receive finite distances.
DistanceMap compute_distance(const CfgSet &cs, BlockId target);

// Locator for the branch outcome to activate: either a source line (a branch
// statement line, or a line inside the wanted block) or a display-marker text.
struct TargetLocator {
    enum class Kind { Line, Marker } kind = Kind::Line;
    int line = 0;
    bool polarity = true;
    std::string marker;

    static TargetLocator at_line(int line, bool polarity = true);
    static TargetLocator at_marker(std::string text);
    static TargetLocator parse(const std::string &text); // "line:<n>[:true|false]" | "marker:<text>"
    std::string str() const;
};

struct BranchTarget {
    BlockId block = -1;
    int process = 0;
    std::string label;
};

BranchTarget resolve_target(const ElaboratedDesign &d, const CfgSet &cs, const TargetLocator &loc);
BranchTarget resolve_target(const ElaboratedDesign &d, const TargetLocator &loc);

// Graphviz rendering: solid intra-edges for true polarity, dashed for false,
// colored edges for def-use inter-edges.
std::string to_dot(const CfgSet &cs);

} // namespace rtlic
