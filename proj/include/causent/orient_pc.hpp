#pragma once

#include <set>
#include <string>
#include <vector>

#include "causent/graph.hpp"
#include "causent/skeleton.hpp"

namespace causent {

// Temporal priority: every surviving lagged edge points from the past slice
// into the present slice. Instantaneous edges are untouched.
inline ExtendedSummaryGraph orient_temporal(ExtendedSummaryGraph g) {
    for (const auto& e : g.edges()) {
        if (e.a.is_past())
            g.set_marks(e.a, e.b, Mark::Tail, Mark::Arrow);
        else if (e.b.is_past())
            g.set_marks(e.b, e.a, Mark::Tail, Mark::Arrow);
    }
    return g;
}

struct OrientationConflict {
    SliceNode from, to;
    std::string rule;

    friend auto operator<=>(const OrientationConflict&, const OrientationConflict&) = default;
};

struct PcRulesResult {
    ExtendedSummaryGraph graph;
    std::vector<OrientationConflict> conflicts;
};

namespace detail {

struct DirectProposal {
    SliceNode from, to;
    const char* rule;
};

inline bool undirected(const ExtendedSummaryGraph& g, SliceNode a, SliceNode b) {
    auto m = g.marks(a, b);
    return m && m->first == Mark::Circle && m->second == Mark::Circle;
}

// Orient from -> to. No-op when already so; a partially or oppositely
// oriented edge is a conflict, which is logged and left alone.
inline bool apply_direct(ExtendedSummaryGraph& g, const DirectProposal& p,
                         std::set<OrientationConflict>& conflicts) {
    auto m = g.marks(p.from, p.to);
    if (!m) return false;
    if (m->first == Mark::Tail && m->second == Mark::Arrow) return false;
    if (m->first == Mark::Circle && m->second == Mark::Circle) {
        g.set_marks(p.from, p.to, Mark::Tail, Mark::Arrow);
        return true;
    }
    conflicts.insert({p.from, p.to, p.rule});
    return false;
}

}  // namespace detail

// Orientation rules applied to fixpoint on a temporally oriented skeleton.
// Each sweep evaluates the rules on a frozen snapshot, in order: collider
// detection among present nodes, collider detection against a self past
// parent, propagation (present and lagged triggers), the directed-path rule
// and the two-path rule. Arrow marks only ever grow. When one sweep demands
// both directions of the same edge the demands cancel: the edge keeps its
// Circle marks and the conflict is recorded.
inline PcRulesResult apply_pc_rules(ExtendedSummaryGraph g, const SepsetTable& sepsets) {
    const int d = g.num_series();
    std::set<OrientationConflict> conflicts;

    bool changed = true;
    while (changed) {
        changed = false;
        const ExtendedSummaryGraph snap = g;
        std::vector<detail::DirectProposal> proposals;

        // Rule 1(i): X^p_t - X^r_t - X^q_t unshielded, X^r_t not in
        // Sepset(p<->q)  =>  collider at X^r_t.
        for (int r = 0; r < d; ++r) {
            for (int p = 0; p < d; ++p) {
                if (p == r || !snap.adjacent(present(p), present(r))) continue;
                for (int q = p + 1; q < d; ++q) {
                    if (q == r || q == p || !snap.adjacent(present(r), present(q))) continue;
                    if (snap.adjacent(present(p), present(q))) continue;
                    const auto* sep = sepsets.find_instantaneous(p, q);
                    if (!sep || SepsetTable::contains(*sep, {r, Slice::Present})) continue;
                    proposals.push_back({present(p), present(r), "PC-R1i"});
                    proposals.push_back({present(q), present(r), "PC-R1i"});
                }
            }
        }

        // Rule 1(ii): X^q_{t-} -> X^q_t - X^p_t unshielded, X^q_t not in
        // Sepset(q -> p)  =>  X^q_t <- X^p_t.
        for (int q = 0; q < d; ++q) {
            if (!snap.is_directed(past(q), present(q))) continue;
            for (int p = 0; p < d; ++p) {
                if (p == q || !snap.adjacent(present(q), present(p))) continue;
                if (snap.adjacent(past(q), present(p))) continue;
                const auto* sep = sepsets.find_lagged(q, p);
                if (!sep || SepsetTable::contains(*sep, {q, Slice::Present})) continue;
                proposals.push_back({present(p), present(q), "PC-R1ii"});
            }
        }

        // Rule 2: a -> X^r_t - X^q_t unshielded with X^r_t in the separating
        // set of (a's series, q)  =>  X^r_t -> X^q_t. The trigger parent a is
        // a present or a past node.
        for (int r = 0; r < d; ++r) {
            for (int q = 0; q < d; ++q) {
                if (q == r || !detail::undirected(snap, present(r), present(q))) continue;
                bool fire = false;
                for (int p = 0; p < d && !fire; ++p) {
                    if (p == r || p == q) continue;
                    if (snap.adjacent(present(p), present(r)) &&
                        snap.is_directed(present(p), present(r)) &&
                        !snap.adjacent(present(p), present(q))) {
                        const auto* sep = sepsets.find_instantaneous(p, q);
                        if (sep && SepsetTable::contains(*sep, {r, Slice::Present})) fire = true;
                    }
                }
                for (int p = 0; p < d && !fire; ++p) {
                    if (p == q) continue;  // p == r allowed: the self past parent
                    if (snap.adjacent(past(p), present(r)) &&
                        !snap.adjacent(past(p), present(q))) {
                        const auto* sep = sepsets.find_lagged(p, q);
                        if (sep && SepsetTable::contains(*sep, {r, Slice::Present})) fire = true;
                    }
                }
                if (fire) proposals.push_back({present(r), present(q), "PC-R2"});
            }
        }

        // Rule 3: directed path X^p_t ~> X^q_t plus edge X^p_t - X^q_t.
        for (int p = 0; p < d; ++p) {
            for (int q = 0; q < d; ++q) {
                if (p == q || !detail::undirected(snap, present(p), present(q))) continue;
                if (snap.has_directed_path(present(p), present(q)))
                    proposals.push_back({present(p), present(q), "PC-R3"});
            }
        }

        // Rule 4: X^p_t - X^r_t -> X^q_t and X^p_t - X^s_t -> X^q_t (r != s)
        // with p, q adjacent  =>  X^p_t -> X^q_t.
        for (int p = 0; p < d; ++p) {
            for (int q = 0; q < d; ++q) {
                if (p == q || !detail::undirected(snap, present(p), present(q))) continue;
                int routes = 0;
                for (int r = 0; r < d; ++r) {
                    if (r == p || r == q) continue;
                    if (detail::undirected(snap, present(p), present(r)) &&
                        snap.is_directed(present(r), present(q)))
                        ++routes;
                }
                if (routes >= 2) proposals.push_back({present(p), present(q), "PC-R4"});
            }
        }

        // batch application: contradictory within-sweep demands cancel out
        std::map<std::pair<SliceNode, SliceNode>, std::pair<bool, bool>> demanded;
        for (const auto& prop : proposals) {
            auto key = std::minmax(prop.from, prop.to);
            auto& d = demanded[key];
            (prop.from == key.first ? d.first : d.second) = true;
        }
        for (const auto& prop : proposals) {
            auto key = std::minmax(prop.from, prop.to);
            const auto& d = demanded[key];
            if (d.first && d.second) {
                conflicts.insert({prop.from, prop.to, prop.rule});
                continue;
            }
            changed |= detail::apply_direct(g, prop, conflicts);
        }
    }

    return {std::move(g), {conflicts.begin(), conflicts.end()}};
}

struct PcgceResult {
    ExtendedSummaryGraph graph;
    SepsetTable sepsets;
    TestLog log;
    std::vector<OrientationConflict> conflicts;
    bool acyclic = true;
};

// Full PCGCE pipeline: skeleton, temporal orientation, PC rules.
inline PcgceResult pcgce_with(CITester& tester, const SkeletonOptions& opts = {}) {
    SkeletonResult sk = build_skeleton(tester, opts);
    ExtendedSummaryGraph g = orient_temporal(std::move(sk.graph));
    PcRulesResult rules = apply_pc_rules(std::move(g), sk.sepsets);
    PcgceResult res{std::move(rules.graph), std::move(sk.sepsets), std::move(sk.log),
                    std::move(rules.conflicts), true};
    res.acyclic = res.graph.directed_subgraph_acyclic();
    if (!res.acyclic)
        res.conflicts.push_back({present(0), present(0), "acyclicity"});
    return res;
}

inline PcgceResult pcgce(const TimeSeriesDataset& ds, const EstimatorConfig& cfg) {
    PermutationCITester tester(ds, cfg);
    SkeletonOptions opts;
    opts.max_level = cfg.max_level;
    opts.names = ds.names();
    return pcgce_with(tester, opts);
}

}  // namespace causent
