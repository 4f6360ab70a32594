#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "causent/dataset.hpp"
#include "causent/detail/hash.hpp"
#include "causent/errors.hpp"
#include "causent/graph.hpp"

namespace causent {

// The five benchmark generators. Naming: ring* variants add self causes on
// every series; *_t0 uses instantaneous cross effects, *_tpos lagged ones;
// seven2h/ring7t2h have seven observed series plus two hidden common causes.
enum class StructureId {
    ring4ts_t0,
    fourts_tpos,
    ring4ts_tpos,
    seven2h_tpos,
    ring7t2h_tpos,
};

inline const std::vector<StructureId>& all_structures() {
    static const std::vector<StructureId> all = {
        StructureId::ring4ts_t0, StructureId::fourts_tpos, StructureId::ring4ts_tpos,
        StructureId::seven2h_tpos, StructureId::ring7t2h_tpos};
    return all;
}

inline std::string to_string(StructureId s) {
    switch (s) {
        case StructureId::ring4ts_t0: return "ring4ts_t0";
        case StructureId::fourts_tpos: return "fourts_tpos";
        case StructureId::ring4ts_tpos: return "ring4ts_tpos";
        case StructureId::seven2h_tpos: return "seven2h_tpos";
        default: return "ring7t2h_tpos";
    }
}

inline StructureId structure_from_string(const std::string& s) {
    for (StructureId id : all_structures())
        if (to_string(id) == s) return id;
    throw InvalidArgumentError("unknown structure id: " + s +
                               " (valid: ring4ts_t0, fourts_tpos, ring4ts_tpos, seven2h_tpos, "
                               "ring7t2h_tpos)");
}

namespace detail {

struct StructureSpec {
    int d_observed;
    bool self_causes;
    bool instantaneous;
    std::vector<std::pair<int, int>> cross;              // cause -> effect, observed indices
    std::vector<std::pair<int, int>> confounded;         // present-present bidirected pairs
    std::vector<std::vector<int>> latent_targets;        // one entry per hidden series
};

inline const StructureSpec& structure_spec(StructureId id) {
    static const StructureSpec four_t0{4, true, true, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, {}, {}};
    static const StructureSpec four_tpos{4, false, false, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, {}, {}};
    static const StructureSpec ring_four{4, true, false, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, {}, {}};
    static const StructureSpec seven{
        7, false, false, {{1, 0}, {2, 1}, {3, 2}, {3, 4}, {4, 5}, {5, 6}},
        {{6, 1}, {0, 5}}, {{6, 1}, {0, 5}}};
    static const StructureSpec ring_seven{
        7, true, false, {{1, 0}, {2, 1}, {3, 2}, {3, 4}, {4, 5}, {5, 6}},
        {{6, 1}, {0, 5}}, {{6, 1}, {0, 5}}};
    switch (id) {
        case StructureId::ring4ts_t0: return four_t0;
        case StructureId::fourts_tpos: return four_tpos;
        case StructureId::ring4ts_tpos: return ring_four;
        case StructureId::seven2h_tpos: return seven;
        default: return ring_seven;
    }
}

}  // namespace detail

inline bool has_hidden_causes(StructureId id) {
    return !detail::structure_spec(id).latent_targets.empty();
}

enum class NonlinearFn { Abs, Tanh, Sin, Cos };

inline const char* to_string(NonlinearFn f) {
    switch (f) {
        case NonlinearFn::Abs: return "abs";
        case NonlinearFn::Tanh: return "tanh";
        case NonlinearFn::Sin: return "sin";
        default: return "cos";
    }
}

inline double apply_fn(NonlinearFn f, double x) {
    switch (f) {
        case NonlinearFn::Abs: return std::fabs(x);
        case NonlinearFn::Tanh: return std::tanh(x);
        case NonlinearFn::Sin: return std::sin(x);
        default: return std::cos(x);
    }
}

struct EdgeMeta {
    int cause, effect;  // simulation indices (hidden series included)
    int lag;
    double coef;
    NonlinearFn fn;
};

struct SelfMeta {
    int series;
    double coef;
};

struct GenMeta {
    std::uint64_t seed = 0;
    std::size_t T = 0;
    int attempts = 1;
    std::vector<EdgeMeta> edges;
    std::vector<SelfMeta> self;
};

// Everything benchmark scoring and oracle tests need: the observed truth
// graph (bidirected marks for confounded pairs), the hidden series, and the
// fully directed latent-inclusive graph used for d-separation queries.
struct GroundTruth {
    StructureId structure = StructureId::fourts_tpos;
    ExtendedSummaryGraph graph;
    std::vector<int> hidden_series;
    ExtendedSummaryGraph latent_graph;
    GenMeta meta;
};

// Observed-variables truth: lagged edges oriented past -> present,
// instantaneous edges directed, hidden confounding as bidirected
// present-present edges.
inline ExtendedSummaryGraph truth_graph(StructureId id) {
    const auto& spec = detail::structure_spec(id);
    ExtendedSummaryGraph g(spec.d_observed);
    if (spec.self_causes)
        for (int q = 0; q < spec.d_observed; ++q)
            g.add_edge(past(q), present(q), Mark::Tail, Mark::Arrow);
    for (auto [p, q] : spec.cross) {
        if (spec.instantaneous)
            g.add_edge(present(p), present(q), Mark::Tail, Mark::Arrow);
        else
            g.add_edge(past(p), present(q), Mark::Tail, Mark::Arrow);
    }
    for (auto [a, b] : spec.confounded)
        g.add_edge(present(a), present(b), Mark::Arrow, Mark::Arrow);
    return g;
}

namespace detail {

inline ExtendedSummaryGraph latent_truth_graph(StructureId id) {
    const auto& spec = structure_spec(id);
    int h = static_cast<int>(spec.latent_targets.size());
    int m = spec.d_observed + h;
    std::vector<std::string> names;
    for (int i = 0; i < spec.d_observed; ++i) names.push_back("X" + std::to_string(i + 1));
    for (int i = 0; i < h; ++i) names.push_back("H" + std::to_string(i + 1));
    ExtendedSummaryGraph g(m, names);
    if (spec.self_causes)
        for (int q = 0; q < m; ++q) g.add_edge(past(q), present(q), Mark::Tail, Mark::Arrow);
    for (auto [p, q] : spec.cross) {
        if (spec.instantaneous)
            g.add_edge(present(p), present(q), Mark::Tail, Mark::Arrow);
        else
            g.add_edge(past(p), present(q), Mark::Tail, Mark::Arrow);
    }
    for (int l = 0; l < h; ++l)
        for (int target : spec.latent_targets[l])
            g.add_edge(past(spec.d_observed + l), present(target), Mark::Tail, Mark::Arrow);
    return g;
}

}  // namespace detail

// Synthetic data from the structural process
//   X^q_t = a_qq X^q_{t-1} + sum_p a_pq f_pq(X^p_{t-lag}) + 0.1 xi^q_t
// with coefficients drawn once per edge from U([-1,-0.1] u [0.1,1]), self
// coefficients from U([0.1,0.9]), f per edge from {abs, tanh, sin, cos} and
// xi standard normal. Cross lags are uniform on {1, 2} for lagged structures
// and 0 for the instantaneous one; hidden series drive their confounded pair
// at lag 1 and are dropped from the emitted dataset. A 100-step burn-in is
// discarded; a run whose burn-in exceeds 1e6 in magnitude is re-seeded.
inline std::pair<TimeSeriesDataset, GroundTruth> generate(StructureId id, std::size_t T,
                                                          std::uint64_t seed) {
    if (T < 50) throw InsufficientDataError("generate: need T >= 50");
    const auto& spec = detail::structure_spec(id);
    const int h = static_cast<int>(spec.latent_targets.size());
    const int m = spec.d_observed + h;
    const std::size_t burn_in = 100;
    const std::size_t total = T + burn_in;

    for (int attempt = 0; attempt < 100; ++attempt) {
        std::mt19937_64 rng(detail::mix64(seed ^ (0x5eedULL * attempt)));
        std::uniform_real_distribution<double> mag(0.1, 1.0);
        std::uniform_real_distribution<double> self_mag(0.1, 0.9);
        std::uniform_int_distribution<int> coin(0, 1);
        std::uniform_int_distribution<int> fn_pick(0, 3);
        std::uniform_int_distribution<int> lag_pick(1, 2);
        std::normal_distribution<double> gauss(0.0, 1.0);

        GenMeta meta;
        meta.seed = seed;
        meta.T = T;
        meta.attempts = attempt + 1;
        for (auto [p, q] : spec.cross) {
            double coef = mag(rng) * (coin(rng) ? 1.0 : -1.0);
            NonlinearFn fn = static_cast<NonlinearFn>(fn_pick(rng));
            int lag = spec.instantaneous ? 0 : lag_pick(rng);
            meta.edges.push_back({p, q, lag, coef, fn});
        }
        for (int l = 0; l < h; ++l) {
            for (int target : spec.latent_targets[l]) {
                double coef = mag(rng) * (coin(rng) ? 1.0 : -1.0);
                NonlinearFn fn = static_cast<NonlinearFn>(fn_pick(rng));
                meta.edges.push_back({spec.d_observed + l, target, 1, coef, fn});
            }
        }
        if (spec.self_causes)
            for (int q = 0; q < m; ++q) meta.self.push_back({q, self_mag(rng)});

        std::vector<std::vector<double>> x(m, std::vector<double>(total, 0.0));
        std::vector<std::vector<const EdgeMeta*>> into(m);
        for (const auto& e : meta.edges) into[e.effect].push_back(&e);

        bool diverged = false;
        for (std::size_t t = 0; t < total && !diverged; ++t) {
            for (int q = 0; q < m; ++q) {
                double v = 0.1 * gauss(rng);
                if (spec.self_causes && t >= 1) v += meta.self[q].coef * x[q][t - 1];
                for (const EdgeMeta* e : into[q]) {
                    if (t >= static_cast<std::size_t>(e->lag))
                        v += e->coef * apply_fn(e->fn, x[e->cause][t - e->lag]);
                }
                x[q][t] = v;
                if (t < burn_in && std::fabs(v) > 1e6) diverged = true;
            }
        }
        if (diverged) continue;

        std::vector<std::string> names;
        std::vector<std::vector<double>> cols;
        for (int q = 0; q < spec.d_observed; ++q) {
            names.push_back("X" + std::to_string(q + 1));
            cols.emplace_back(x[q].begin() + burn_in, x[q].end());
        }
        GroundTruth truth;
        truth.structure = id;
        truth.graph = truth_graph(id);
        for (int l = 0; l < h; ++l) truth.hidden_series.push_back(spec.d_observed + l);
        truth.latent_graph = detail::latent_truth_graph(id);
        truth.meta = std::move(meta);
        return {TimeSeriesDataset(std::move(names), std::move(cols)), std::move(truth)};
    }
    throw InvariantViolationError("generate: process kept diverging; structure unstable");
}

}  // namespace causent
