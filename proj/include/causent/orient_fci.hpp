#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "causent/graph.hpp"
#include "causent/orient_pc.hpp"
#include "causent/skeleton.hpp"

namespace causent {

// FCI collider detection with circle marks: only arrowheads are placed, the
// far endpoints stay as they are.
//   (i)  X^p_t *-o X^r_t o-* X^q_t unshielded with X^r_t not in
//        Sepset(p<->q) puts arrowheads at X^r_t from both sides.
//   (ii) X^q_{t-} *-> X^q_t o-* X^p_t unshielded with X^q_t not in
//        Sepset(q->p) puts an arrowhead at X^q_t from X^p_t.
inline ExtendedSummaryGraph fci_colliders(ExtendedSummaryGraph g, const SepsetTable& sepsets) {
    const int d = g.num_series();
    const ExtendedSummaryGraph snap = g;
    auto circle_at = [&](SliceNode node, SliceNode other) {
        auto m = snap.marks(node, other);
        return m && m->first == Mark::Circle;
    };
    for (int r = 0; r < d; ++r) {
        for (int p = 0; p < d; ++p) {
            if (p == r || !circle_at(present(r), present(p))) continue;
            for (int q = p + 1; q < d; ++q) {
                if (q == r || q == p || !circle_at(present(r), present(q))) continue;
                if (snap.adjacent(present(p), present(q))) continue;
                const auto* sep = sepsets.find_instantaneous(p, q);
                if (!sep || SepsetTable::contains(*sep, {r, Slice::Present})) continue;
                g.set_mark_at(present(r), present(p), Mark::Arrow);
                g.set_mark_at(present(r), present(q), Mark::Arrow);
            }
        }
    }
    for (int q = 0; q < d; ++q) {
        if (!snap.adjacent(past(q), present(q)) ||
            !snap.has_arrow_at(present(q), past(q)))
            continue;
        for (int p = 0; p < d; ++p) {
            if (p == q || !circle_at(present(q), present(p))) continue;
            if (snap.adjacent(past(q), present(p))) continue;
            const auto* sep = sepsets.find_lagged(q, p);
            if (!sep || SepsetTable::contains(*sep, {q, Slice::Present})) continue;
            g.set_mark_at(present(q), present(p), Mark::Arrow);
        }
    }
    return g;
}

// Possible-Dsep of an edge (A, B): nodes V reachable from A or B along a
// path whose interior vertices are all colliders on the path and ancestors
// of A or B (each node is its own ancestor). Direct neighbors always
// qualify: a single-edge path has no interior.
inline std::vector<SliceNode> possible_dsep(const ExtendedSummaryGraph& g, SliceNode a,
                                            SliceNode b) {
    std::set<SliceNode> anc{a, b};
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& e : g.edges()) {
            SliceNode from, to;
            if (e.mark_a == Mark::Tail && e.mark_b == Mark::Arrow) {
                from = e.a;
                to = e.b;
            } else if (e.mark_b == Mark::Tail && e.mark_a == Mark::Arrow) {
                from = e.b;
                to = e.a;
            } else {
                continue;
            }
            if (anc.count(to) && !anc.count(from) && anc.insert(from).second) grew = true;
        }
    }

    const int depth_cap = 2 * g.num_series();
    std::set<SliceNode> found;
    std::set<std::pair<SliceNode, SliceNode>> visited;  // (node, previous)
    struct Item {
        SliceNode node, prev;
        int depth;
    };
    std::vector<Item> stack;
    for (SliceNode start : {a, b}) {
        for (SliceNode nb : g.neighbors(start)) {
            if (nb == a || nb == b) continue;
            found.insert(nb);
            if (anc.count(nb) && visited.insert({nb, start}).second)
                stack.push_back({nb, start, 1});
        }
    }
    while (!stack.empty()) {
        Item cur = stack.back();
        stack.pop_back();
        if (cur.depth >= depth_cap) continue;
        if (!g.has_arrow_at(cur.node, cur.prev)) continue;  // collider needs both arrows
        for (SliceNode nb : g.neighbors(cur.node)) {
            if (nb == cur.prev || nb == a || nb == b) continue;
            if (!g.has_arrow_at(cur.node, nb)) continue;
            found.insert(nb);
            if (anc.count(nb) && visited.insert({nb, cur.node}).second)
                stack.push_back({nb, cur.node, cur.depth + 1});
        }
    }
    return {found.begin(), found.end()};
}

namespace detail {

inline bool circle_at(const ExtendedSummaryGraph& g, SliceNode node, SliceNode other) {
    auto m = g.marks(node, other);
    return m && m->first == Mark::Circle;
}
inline bool tail_at(const ExtendedSummaryGraph& g, SliceNode node, SliceNode other) {
    auto m = g.marks(node, other);
    return m && m->first == Mark::Tail;
}

struct MarkChange {
    SliceNode at, other;
    Mark mark;
    const char* rule;
};

// Only circle endpoints are rewritten; demanding a different mark where a
// tail or arrow already sits is a conflict, logged and skipped.
inline bool apply_mark(ExtendedSummaryGraph& g, const MarkChange& c,
                       std::set<OrientationConflict>& conflicts) {
    auto m = g.marks(c.at, c.other);
    if (!m) return false;
    if (m->first == c.mark) return false;
    if (m->first != Mark::Circle) {
        conflicts.insert({c.at, c.other, c.rule});
        return false;
    }
    g.set_mark_at(c.at, c.other, c.mark);
    return true;
}

// Potentially directed step u -> v: no arrowhead at u, no tail at v.
inline bool pd_step(const ExtendedSummaryGraph& g, SliceNode u, SliceNode v) {
    auto m = g.marks(u, v);
    return m && m->first != Mark::Arrow && m->second != Mark::Tail;
}

// Second vertices of uncovered potentially directed paths from `from` to
// `to` with at least two edges (the direct edge does not count).
// `second_nonadjacent` additionally requires the second vertex to be
// non-adjacent to `to`.
inline std::set<SliceNode> uncovered_pd_seconds(const ExtendedSummaryGraph& g, SliceNode from,
                                                SliceNode to, bool second_nonadjacent) {
    std::set<SliceNode> seconds;
    std::vector<std::vector<SliceNode>> stack;
    for (SliceNode nb : g.neighbors(from)) {
        if (nb == to || !pd_step(g, from, nb)) continue;
        if (second_nonadjacent && g.adjacent(nb, to)) continue;
        stack.push_back({from, nb});
    }
    const std::size_t cap = 2 * static_cast<std::size_t>(g.num_series());
    while (!stack.empty()) {
        std::vector<SliceNode> path = std::move(stack.back());
        stack.pop_back();
        SliceNode cur = path.back();
        for (SliceNode nb : g.neighbors(cur)) {
            if (std::find(path.begin(), path.end(), nb) != path.end()) continue;
            if (!pd_step(g, cur, nb)) continue;
            if (g.adjacent(path[path.size() - 2], nb)) continue;  // uncovered triple
            if (nb == to) {
                seconds.insert(path[1]);
                continue;
            }
            if (path.size() < cap) {
                auto next = path;
                next.push_back(nb);
                stack.push_back(std::move(next));
            }
        }
    }
    return seconds;
}

// Discriminating paths <D, ..., A, B, C> for B: every vertex between D and B
// is a collider on the path and a parent of C, D is not adjacent to C. For
// each one found: B in Sepset(D, C) orients B -> C, otherwise A <-> B <-> C.
inline void discriminating_proposals(const ExtendedSummaryGraph& g, const SepsetTable& sepsets,
                                     SliceNode b, SliceNode c, int depth_cap,
                                     std::vector<MarkChange>& out) {
    struct State {
        SliceNode head, prev;
        SliceNode first;  // the vertex adjacent to B on the path
        int edges;        // edge count of <head, ..., B, C>
    };
    std::vector<State> stack;
    for (SliceNode a : g.neighbors(b)) {
        if (a == c || a == b) continue;
        if (!g.has_arrow_at(a, b)) continue;   // collider at A needs this arrow
        if (!g.is_directed(a, c)) continue;    // A must be a parent of C
        for (SliceNode w : g.neighbors(a)) {
            if (w == b || w == c) continue;
            if (!g.has_arrow_at(a, w)) continue;  // completes the collider at A
            stack.push_back({w, a, a, 3});
        }
    }
    std::set<std::pair<SliceNode, SliceNode>> visited;
    while (!stack.empty()) {
        State s = stack.back();
        stack.pop_back();
        if (!g.adjacent(s.head, c)) {
            // discriminating path found with D = head
            const std::vector<Conditioner>* sep =
                s.head.is_past() ? sepsets.find_lagged(s.head.series, c.series)
                                 : sepsets.find_instantaneous(s.head.series, c.series);
            if (sep && SepsetTable::contains(*sep, {b.series, Slice::Present})) {
                out.push_back({b, c, Mark::Tail, "FCI-R4"});
                out.push_back({c, b, Mark::Arrow, "FCI-R4"});
            } else {
                out.push_back({s.first, b, Mark::Arrow, "FCI-R4"});
                out.push_back({b, s.first, Mark::Arrow, "FCI-R4"});
                out.push_back({b, c, Mark::Arrow, "FCI-R4"});
                out.push_back({c, b, Mark::Arrow, "FCI-R4"});
            }
            continue;
        }
        if (s.edges >= depth_cap) continue;
        // head is interior: collider on the path and a parent of C
        if (!g.has_arrow_at(s.head, s.prev)) continue;
        if (!g.is_directed(s.head, c)) continue;
        if (!visited.insert({s.head, s.prev}).second) continue;
        for (SliceNode w : g.neighbors(s.head)) {
            if (w == s.prev || w == b || w == c) continue;
            if (!g.has_arrow_at(s.head, w)) continue;
            stack.push_back({w, s.head, s.first, s.edges + 1});
        }
    }
}

inline bool r10_fires(const ExtendedSummaryGraph& g, SliceNode a, SliceNode c) {
    const int d = g.num_series();
    std::vector<SliceNode> parents;
    for (int i = 0; i < d; ++i) {
        SliceNode node = present(i);
        if (node != a && node != c && g.is_directed(node, c)) parents.push_back(node);
    }
    for (std::size_t i = 0; i < parents.size(); ++i) {
        for (std::size_t j = 0; j < parents.size(); ++j) {
            if (i == j) continue;
            SliceNode bnode = parents[i], dnode = parents[j];
            std::set<SliceNode> m1 = uncovered_pd_seconds(g, a, bnode, false);
            if (bnode != c && pd_step(g, a, bnode) && g.adjacent(a, bnode)) m1.insert(bnode);
            std::set<SliceNode> m2 = uncovered_pd_seconds(g, a, dnode, false);
            if (dnode != c && pd_step(g, a, dnode) && g.adjacent(a, dnode)) m2.insert(dnode);
            for (SliceNode m : m1)
                for (SliceNode n : m2)
                    if (m != n && !g.adjacent(m, n)) return true;
        }
    }
    return false;
}

}  // namespace detail

struct FciRulesResult {
    ExtendedSummaryGraph graph;
    std::vector<OrientationConflict> conflicts;
};

// Zhang-style orientation rules R1-R4 plus the tail rules R8-R10 (the
// selection-bias rules R5-R7 are out of scope here), applied to fixpoint
// over frozen per-round snapshots; see docs/orientation-rules.md for the
// normative statements. R1 only fires where the collider phase could have
// looked: the trigger parent is a present node or the self past parent of
// the middle node; a lagged cross parent never licenses a tail.
inline FciRulesResult apply_fci_rules(ExtendedSummaryGraph g, const SepsetTable& sepsets,
                                      const std::vector<int>& rule_order = {1, 2, 3, 4, 8, 9,
                                                                            10}) {
    std::set<OrientationConflict> conflicts;
    const int d = g.num_series();
    std::vector<SliceNode> present_nodes;
    for (int i = 0; i < d; ++i) present_nodes.push_back(present(i));

    bool changed = true;
    while (changed) {
        changed = false;
        const ExtendedSummaryGraph snap = g;
        const auto nodes = snap.nodes();
        std::vector<detail::MarkChange> batch;

        for (int rule : rule_order) {
            switch (rule) {
                case 1:
                    // R1: A *-> B o-* C, A,C non-adjacent => B -> C.
                    for (SliceNode b : present_nodes) {
                        for (SliceNode a : nodes) {
                            if (a == b || !snap.adjacent(a, b)) continue;
                            if (!snap.has_arrow_at(b, a)) continue;
                            if (a.is_past() && a.series != b.series) continue;
                            for (SliceNode c : present_nodes) {
                                if (c == a || c == b || snap.adjacent(a, c)) continue;
                                if (!detail::circle_at(snap, b, c)) continue;
                                batch.push_back({b, c, Mark::Tail, "FCI-R1"});
                                batch.push_back({c, b, Mark::Arrow, "FCI-R1"});
                            }
                        }
                    }
                    break;
                case 2:
                    // R2: A -> B *-> C or A *-> B -> C, A *-o C => A *-> C.
                    for (SliceNode a : nodes) {
                        for (SliceNode c : present_nodes) {
                            if (a == c || !snap.adjacent(a, c)) continue;
                            if (!detail::circle_at(snap, c, a)) continue;
                            for (SliceNode b : present_nodes) {
                                if (b == a || b == c) continue;
                                bool chain1 = snap.is_directed(a, b) &&
                                              snap.adjacent(b, c) && snap.has_arrow_at(c, b);
                                bool chain2 = snap.adjacent(a, b) && snap.has_arrow_at(b, a) &&
                                              snap.is_directed(b, c);
                                if (chain1 || chain2) {
                                    batch.push_back({c, a, Mark::Arrow, "FCI-R2"});
                                    break;
                                }
                            }
                        }
                    }
                    break;
                case 3:
                    // R3: A *-> B <-* C, A *-o D o-* C, A,C non-adjacent,
                    // D *-o B => D *-> B.
                    for (SliceNode b : present_nodes) {
                        for (SliceNode dd : present_nodes) {
                            if (dd == b || !snap.adjacent(b, dd)) continue;
                            if (!detail::circle_at(snap, b, dd)) continue;
                            bool fire = false;
                            for (std::size_t ai = 0; ai < nodes.size() && !fire; ++ai) {
                                SliceNode a = nodes[ai];
                                if (a == b || a == dd) continue;
                                if (!snap.adjacent(a, b) || !snap.has_arrow_at(b, a)) continue;
                                if (!snap.adjacent(a, dd) || !detail::circle_at(snap, dd, a))
                                    continue;
                                for (SliceNode c : nodes) {
                                    if (c == a || c == b || c == dd) continue;
                                    if (!snap.adjacent(c, b) || !snap.has_arrow_at(b, c))
                                        continue;
                                    if (!snap.adjacent(c, dd) ||
                                        !detail::circle_at(snap, dd, c))
                                        continue;
                                    if (snap.adjacent(a, c)) continue;
                                    fire = true;
                                    break;
                                }
                            }
                            if (fire) batch.push_back({b, dd, Mark::Arrow, "FCI-R3"});
                        }
                    }
                    break;
                case 4:
                    for (SliceNode b : present_nodes) {
                        for (SliceNode c : present_nodes) {
                            if (b == c || !snap.adjacent(b, c)) continue;
                            if (!detail::circle_at(snap, b, c)) continue;
                            detail::discriminating_proposals(snap, sepsets, b, c,
                                                             d + 2, batch);
                        }
                    }
                    break;
                case 8:
                    // R8: A -> B -> C or A -o B -> C, A o-> C => A -> C.
                    for (SliceNode a : present_nodes) {
                        for (SliceNode c : present_nodes) {
                            if (a == c || !snap.adjacent(a, c)) continue;
                            if (!detail::circle_at(snap, a, c) || !snap.has_arrow_at(c, a))
                                continue;
                            for (SliceNode b : present_nodes) {
                                if (b == a || b == c || !snap.adjacent(a, b)) continue;
                                bool leg1 = snap.is_directed(a, b) ||
                                            (detail::tail_at(snap, a, b) &&
                                             detail::circle_at(snap, b, a));
                                if (leg1 && snap.is_directed(b, c)) {
                                    batch.push_back({a, c, Mark::Tail, "FCI-R8"});
                                    break;
                                }
                            }
                        }
                    }
                    break;
                case 9:
                    // R9: A o-> C with an uncovered pd path whose second
                    // vertex is non-adjacent to C => A -> C.
                    for (SliceNode a : present_nodes) {
                        for (SliceNode c : present_nodes) {
                            if (a == c || !snap.adjacent(a, c)) continue;
                            if (!detail::circle_at(snap, a, c) || !snap.has_arrow_at(c, a))
                                continue;
                            if (!detail::uncovered_pd_seconds(snap, a, c, true).empty())
                                batch.push_back({a, c, Mark::Tail, "FCI-R9"});
                        }
                    }
                    break;
                case 10:
                    for (SliceNode a : present_nodes) {
                        for (SliceNode c : present_nodes) {
                            if (a == c || !snap.adjacent(a, c)) continue;
                            if (!detail::circle_at(snap, a, c) || !snap.has_arrow_at(c, a))
                                continue;
                            if (detail::r10_fires(snap, a, c))
                                batch.push_back({a, c, Mark::Tail, "FCI-R10"});
                        }
                    }
                    break;
                default:
                    throw InvalidArgumentError("unknown FCI rule id");
            }
        }

        for (const auto& change : batch)
            changed |= detail::apply_mark(g, change, conflicts);
    }
    return {std::move(g), {conflicts.begin(), conflicts.end()}};
}

namespace detail {

inline ExtendedSummaryGraph reset_to_circles(ExtendedSummaryGraph g) {
    for (const auto& e : g.edges()) {
        if (e.a.is_past())
            g.set_marks(e.a, e.b, Mark::Tail, Mark::Circle);
        else if (e.b.is_past())
            g.set_marks(e.b, e.a, Mark::Tail, Mark::Circle);
        else
            g.set_marks(e.a, e.b, Mark::Circle, Mark::Circle);
    }
    return g;
}

}  // namespace detail

struct FcigceResult {
    ExtendedSummaryGraph graph;
    SepsetTable sepsets;
    TestLog log;
    std::vector<OrientationConflict> conflicts;
};

// FCIGCE: skeleton, temporal orientation, collider detection, Possible-Dsep
// pruning (same level-wise strategy as the skeleton, sepsets overwrite), a
// mark reset, collider re-detection against the updated sepsets, and the
// orientation rules to fixpoint.
inline FcigceResult fcigce_with(CITester& tester, const SkeletonOptions& opts = {}) {
    SkeletonResult sk = build_skeleton(tester, opts);
    ExtendedSummaryGraph g = orient_temporal(std::move(sk.graph));
    g = fci_colliders(std::move(g), sk.sepsets);

    detail::prune_levels(g, sk.sepsets, sk.log, tester, sk.scores, opts.max_level,
                         [](const ExtendedSummaryGraph& snapshot,
                            const ExtendedSummaryGraph::Edge& e) {
                             return possible_dsep(snapshot, e.a, e.b);
                         });

    g = orient_temporal(detail::reset_to_circles(std::move(g)));
    g = fci_colliders(std::move(g), sk.sepsets);
    FciRulesResult rules = apply_fci_rules(std::move(g), sk.sepsets);
    return {std::move(rules.graph), std::move(sk.sepsets), std::move(sk.log),
            std::move(rules.conflicts)};
}

inline FcigceResult fcigce(const TimeSeriesDataset& ds, const EstimatorConfig& cfg) {
    PermutationCITester tester(ds, cfg);
    SkeletonOptions opts;
    opts.max_level = cfg.max_level;
    opts.names = ds.names();
    return fcigce_with(tester, opts);
}

}  // namespace causent
