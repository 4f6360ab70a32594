#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "causent/ci_test.hpp"
#include "causent/graph.hpp"

namespace causent {

struct TestLogEntry {
    TestKind kind = TestKind::Lagged;
    int cause = 0;
    int effect = 0;
    int level = 0;
    std::vector<Conditioner> conditioners;
    double statistic = 0.0;
    double p_value = 1.0;
    bool removed = false;
};

struct TestLog {
    std::vector<TestLogEntry> entries;
    std::size_t total_tests = 0;
    int max_level_reached = 0;

    void to_csv(std::ostream& out, const std::vector<std::string>& names) const {
        auto series = [&](int i) {
            return i < static_cast<int>(names.size()) ? names[i] : "X" + std::to_string(i + 1);
        };
        out << "edge,level,conditioning_set,statistic,p_value,decision\n";
        out.precision(12);
        for (const auto& e : entries) {
            if (e.kind == TestKind::Lagged)
                out << series(e.cause) << "_past->" << series(e.effect);
            else
                out << series(e.cause) << "--" << series(e.effect);
            out << ',' << e.level << ',';
            for (std::size_t i = 0; i < e.conditioners.size(); ++i) {
                const auto& c = e.conditioners[i];
                out << (i ? ";" : "") << series(c.first)
                    << (c.second == Slice::Past ? "_past" : "");
            }
            out << ',' << e.statistic << ',' << e.p_value << ','
                << (e.removed ? "removed" : "kept") << '\n';
        }
    }
};

struct SkeletonOptions {
    int max_level = -1;  // negative: unlimited
    std::vector<std::string> names;
};

// Level-0 dependence scores, kept for ranking conditioning candidates at
// higher levels.
struct ScoreTable {
    int d = 0;
    std::vector<double> lagged;                     // cause * d + effect
    std::map<std::pair<int, int>, double> instant;  // unordered pair

    double versus_effect(const SliceNode& node, int effect) const {
        if (node.slice == Slice::Past) return lagged[node.series * d + effect];
        auto it = instant.find(std::minmax(node.series, effect));
        return it == instant.end() ? 0.0 : it->second;
    }
};

struct SkeletonResult {
    ExtendedSummaryGraph graph;
    SepsetTable sepsets;
    TestLog log;
    ScoreTable scores;
};

namespace detail {

struct EdgeRoles {
    TestKind kind;
    int cause, effect;
    SliceNode a, b;
};

// For instantaneous edges the "effect" side used by the surrogate scheme and
// the candidate ranking is the series with the larger tester key, which is
// stable under column reordering.
inline EdgeRoles edge_roles(const ExtendedSummaryGraph::Edge& e, const CITester& tester) {
    if (e.a.is_past() || e.b.is_past()) {
        SliceNode p = e.a.is_past() ? e.a : e.b;
        SliceNode q = e.a.is_past() ? e.b : e.a;
        return {TestKind::Lagged, p.series, q.series, p, q};
    }
    int cause = e.a.series, effect = e.b.series;
    if (tester.series_key(cause) > tester.series_key(effect)) std::swap(cause, effect);
    return {TestKind::Instantaneous, cause, effect, present(cause), present(effect)};
}

inline void record_removal(ExtendedSummaryGraph& g, SepsetTable& sepsets, const EdgeRoles& r,
                           std::vector<Conditioner> sepset) {
    g.remove_edge(r.a, r.b);
    if (r.kind == TestKind::Lagged)
        sepsets.set_lagged(r.cause, r.effect, std::move(sepset));
    else
        sepsets.set_instantaneous(r.cause, r.effect, std::move(sepset));
}

// Conditioning candidates ranked by their level-0 dependence on the effect
// side of the tested edge, strongest first.
inline std::vector<SliceNode> rank_candidates(std::vector<SliceNode> cands,
                                              const ScoreTable& scores, int effect,
                                              const CITester& tester) {
    std::stable_sort(cands.begin(), cands.end(), [&](const SliceNode& x, const SliceNode& y) {
        double sx = scores.versus_effect(x, effect);
        double sy = scores.versus_effect(y, effect);
        if (sx != sy) return sx > sy;
        auto kx = tester.series_key(x.series), ky = tester.series_key(y.series);
        if (kx != ky) return kx < ky;
        if (x.series != y.series) return x.series < y.series;
        return x.slice < y.slice;
    });
    return cands;
}

// Runs conditioning levels 1, 2, ... with PC-stable batching: candidate sets
// come from the graph as it stood at the level start and removals apply only
// once the level completes. Per edge, subsets are tried in rank order and the
// first separating one wins.
inline void prune_levels(
    ExtendedSummaryGraph& g, SepsetTable& sepsets, TestLog& log, CITester& tester,
    const ScoreTable& scores, int max_level,
    const std::function<std::vector<SliceNode>(const ExtendedSummaryGraph&,
                                               const ExtendedSummaryGraph::Edge&)>& candidates) {
    for (int level = 1; max_level < 0 || level <= max_level; ++level) {
        const ExtendedSummaryGraph snapshot = g;
        bool any_candidates = false;
        std::vector<std::pair<EdgeRoles, std::vector<Conditioner>>> removals;

        for (const auto& edge : snapshot.edges()) {
            EdgeRoles roles = edge_roles(edge, tester);
            std::vector<SliceNode> cands = candidates(snapshot, edge);
            std::erase_if(cands, [&](const SliceNode& n) { return n == edge.a || n == edge.b; });
            std::sort(cands.begin(), cands.end());
            cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
            if (cands.size() < static_cast<std::size_t>(level)) continue;
            any_candidates = true;
            cands = rank_candidates(std::move(cands), scores, roles.effect, tester);

            // lexicographic combinations over rank positions
            std::vector<std::size_t> pick(level);
            for (int i = 0; i < level; ++i) pick[i] = i;
            bool done = false;
            while (!done) {
                std::vector<Conditioner> conds;
                conds.reserve(level);
                for (std::size_t idx : pick) conds.push_back(to_conditioner(cands[idx]));
                CITestResult r = tester.test({roles.kind, roles.cause, roles.effect, conds});
                log.entries.push_back({roles.kind, roles.cause, roles.effect, level, conds,
                                       r.statistic, r.p_value, r.independent});
                ++log.total_tests;
                log.max_level_reached = std::max(log.max_level_reached, level);
                if (r.independent) {
                    removals.emplace_back(roles, std::move(conds));
                    break;
                }
                // advance combination
                int pos = level - 1;
                while (pos >= 0 && pick[pos] == cands.size() - (level - pos)) --pos;
                if (pos < 0) {
                    done = true;
                } else {
                    ++pick[pos];
                    for (int j = pos + 1; j < level; ++j) pick[j] = pick[j - 1] + 1;
                }
            }
        }

        for (auto& [roles, sepset] : removals)
            record_removal(g, sepsets, roles, std::move(sepset));
        if (!any_candidates) break;
    }
}

}  // namespace detail

// PC-stable skeleton construction over the extended summary graph. Level 0
// tests every lagged pair with the plain greedy causation entropy and every
// present pair with mutual information; higher levels condition on subsets of
// the current neighbors of either endpoint, batched per level so the outcome
// does not depend on series order.
inline SkeletonResult build_skeleton(CITester& tester, const SkeletonOptions& opts = {}) {
    const int d = tester.num_series();
    if (d < 1) throw InvalidArgumentError("skeleton: need at least one series");
    SkeletonResult res{ExtendedSummaryGraph::full(d, opts.names), {}, {}, {}};
    res.scores.d = d;
    res.scores.lagged.assign(static_cast<std::size_t>(d) * d, 0.0);

    std::vector<std::pair<detail::EdgeRoles, std::vector<Conditioner>>> removals;
    auto level0 = [&](detail::EdgeRoles roles) {
        CITestResult r = tester.test({roles.kind, roles.cause, roles.effect, {}});
        res.log.entries.push_back(
            {roles.kind, roles.cause, roles.effect, 0, {}, r.statistic, r.p_value, r.independent});
        ++res.log.total_tests;
        if (roles.kind == TestKind::Lagged)
            res.scores.lagged[roles.cause * d + roles.effect] = r.statistic;
        else
            res.scores.instant[std::minmax(roles.cause, roles.effect)] = r.statistic;
        if (r.independent) removals.emplace_back(roles, std::vector<Conditioner>{});
    };

    for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q)
            level0({TestKind::Lagged, p, q, past(p), present(q)});
    for (const auto& e : res.graph.edges()) {
        if (!e.a.is_past() && !e.b.is_past()) level0(detail::edge_roles(e, tester));
    }
    for (auto& [roles, sepset] : removals)
        detail::record_removal(res.graph, res.sepsets, roles, std::move(sepset));

    detail::prune_levels(res.graph, res.sepsets, res.log, tester, res.scores, opts.max_level,
                         [](const ExtendedSummaryGraph& snapshot,
                            const ExtendedSummaryGraph::Edge& e) {
                             std::vector<SliceNode> cands = snapshot.neighbors(e.a);
                             auto nb = snapshot.neighbors(e.b);
                             cands.insert(cands.end(), nb.begin(), nb.end());
                             return cands;
                         });
    return res;
}

inline SkeletonResult build_skeleton(const TimeSeriesDataset& ds, const EstimatorConfig& cfg) {
    PermutationCITester tester(ds, cfg);
    SkeletonOptions opts;
    opts.max_level = cfg.max_level;
    opts.names = ds.names();
    return build_skeleton(tester, opts);
}

}  // namespace causent
