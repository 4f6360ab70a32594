#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

#include "causent/ci_test.hpp"
#include "causent/graph.hpp"
#include "causent/simulate.hpp"

namespace causent {

// Exact d-separation on the latent-inclusive extended summary DAG. Past
// nodes stand for the aggregated lag window of their series; hidden series
// participate as ordinary nodes but never appear in conditioning sets.
class DsepOracle {
public:
    explicit DsepOracle(const GroundTruth& truth) : DsepOracle(truth.latent_graph) {}

    explicit DsepOracle(const ExtendedSummaryGraph& dag) {
        n_nodes_ = 2 * dag.num_series();
        parents_.resize(n_nodes_);
        children_.resize(n_nodes_);
        for (const auto& e : dag.edges()) {
            SliceNode from, to;
            if (e.mark_a == Mark::Tail && e.mark_b == Mark::Arrow) {
                from = e.a;
                to = e.b;
            } else if (e.mark_b == Mark::Tail && e.mark_a == Mark::Arrow) {
                from = e.b;
                to = e.a;
            } else {
                throw InvalidArgumentError("dsep oracle: graph must be fully directed");
            }
            parents_[id(to)].push_back(id(from));
            children_[id(from)].push_back(id(to));
        }
    }

    bool dsep(SliceNode a, SliceNode b, const std::vector<Conditioner>& cond) const {
        std::vector<char> in_z(n_nodes_, 0);
        for (const auto& c : cond) in_z[id(to_node(c))] = 1;

        // ancestors of the conditioning set (conditioned nodes included)
        std::vector<char> anc(n_nodes_, 0);
        std::vector<int> stack;
        for (int v = 0; v < n_nodes_; ++v)
            if (in_z[v]) {
                anc[v] = 1;
                stack.push_back(v);
            }
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int p : parents_[v])
                if (!anc[p]) {
                    anc[p] = 1;
                    stack.push_back(p);
                }
        }

        // reachability with collider handling; state = (node, entered-downward?)
        int src = id(a), dst = id(b);
        std::vector<char> seen_up(n_nodes_, 0), seen_down(n_nodes_, 0);
        std::vector<std::pair<int, bool>> frontier{{src, false}};  // false = "up" entry
        seen_up[src] = 1;
        while (!frontier.empty()) {
            auto [v, down] = frontier.back();
            frontier.pop_back();
            if (v == dst && v != src) return false;
            auto push = [&](int u, bool d) {
                auto& seen = d ? seen_down : seen_up;
                if (!seen[u]) {
                    seen[u] = 1;
                    frontier.emplace_back(u, d);
                }
            };
            if (!down) {
                if (in_z[v]) continue;
                for (int p : parents_[v]) push(p, false);
                for (int c : children_[v]) push(c, true);
            } else {
                if (!in_z[v])
                    for (int c : children_[v]) push(c, true);
                if (anc[v])
                    for (int p : parents_[v]) push(p, false);
            }
        }
        return true;
    }

private:
    static int id(SliceNode n) { return n.series * 2 + (n.slice == Slice::Present ? 1 : 0); }

    int n_nodes_ = 0;
    std::vector<std::vector<int>> parents_, children_;
};

inline bool dsep_oracle(const GroundTruth& truth, SliceNode a, SliceNode b,
                        const std::vector<Conditioner>& cond) {
    return DsepOracle(truth).dsep(a, b, cond);
}

// Drop-in replacement for the permutation tester: answers queries from exact
// d-separation on the ground truth.
class OracleCITester : public CITester {
public:
    explicit OracleCITester(const GroundTruth& truth)
        : oracle_(truth), d_(truth.latent_graph.num_series() -
                             static_cast<int>(truth.hidden_series.size())) {}

    OracleCITester(const ExtendedSummaryGraph& dag, int observed)
        : oracle_(dag), d_(observed) {}

    int num_series() const override { return d_; }

    CITestResult test(const TestSpec& spec) override {
        SliceNode a = spec.kind == TestKind::Lagged ? past(spec.cause) : present(spec.cause);
        bool indep = oracle_.dsep(a, present(spec.effect), spec.conditioners);
        return CITestResult{indep ? 0.0 : 1.0, indep ? 1.0 : 0.0, indep, 0};
    }

private:
    DsepOracle oracle_;
    int d_;
};

enum class ScoringMode { Compatible, Strict };

struct MeasureScore {
    double f1 = 0.0, precision = 0.0, recall = 0.0;
    long tp = 0, fp = 0, fn = 0;
};

struct ScoreReport {
    MeasureScore cross;                 // F^{p != q}: everything but self edges
    std::optional<MeasureScore> self;   // F^{p = q}: (X^q_{t-}, X^q_t) edges only
};

namespace detail {

inline bool mark_compatible(Mark predicted, Mark truth, ScoringMode mode) {
    if (mode == ScoringMode::Strict) return predicted == truth;
    return predicted == truth || predicted == Mark::Circle || truth == Mark::Circle;
}

inline void finalize(MeasureScore& m) {
    double denom_p = static_cast<double>(m.tp + m.fp);
    double denom_r = static_cast<double>(m.tp + m.fn);
    m.precision = denom_p > 0 ? m.tp / denom_p : 0.0;
    m.recall = denom_r > 0 ? m.tp / denom_r : 0.0;
    m.f1 = (m.precision + m.recall) > 0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
}

inline bool is_self_edge(const ExtendedSummaryGraph::Edge& e) {
    return (e.a.is_past() || e.b.is_past()) && e.a.series == e.b.series;
}

}  // namespace detail

// A predicted edge is a true positive when the truth links the same node
// pair and both endpoint marks are compatible (Circle matches anything in
// Compatible mode; Strict requires identical marks).
inline ScoreReport f1_scores(const ExtendedSummaryGraph& predicted,
                             const ExtendedSummaryGraph& truth,
                             ScoringMode mode = ScoringMode::Compatible) {
    if (predicted.num_series() != truth.num_series())
        throw InvalidArgumentError("f1_scores: graphs have different series counts");

    MeasureScore cross, self;
    bool any_self = false;
    for (const auto& e : predicted.edges()) {
        bool hit = false;
        if (auto tm = truth.marks(e.a, e.b)) {
            hit = detail::mark_compatible(e.mark_a, tm->first, mode) &&
                  detail::mark_compatible(e.mark_b, tm->second, mode);
        }
        MeasureScore& m = detail::is_self_edge(e) ? self : cross;
        any_self |= detail::is_self_edge(e);
        (hit ? m.tp : m.fp) += 1;
    }
    for (const auto& e : truth.edges()) {
        bool matched = false;
        if (auto pm = predicted.marks(e.a, e.b)) {
            matched = detail::mark_compatible(pm->first, e.mark_a, mode) &&
                      detail::mark_compatible(pm->second, e.mark_b, mode);
        }
        MeasureScore& m = detail::is_self_edge(e) ? self : cross;
        any_self |= detail::is_self_edge(e);
        if (!matched) m.fn += 1;
    }
    detail::finalize(cross);
    ScoreReport report;
    report.cross = cross;
    if (any_self) {
        detail::finalize(self);
        report.self = self;
    }
    return report;
}

}  // namespace causent
