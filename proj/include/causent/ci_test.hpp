#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <vector>

#include "causent/detail/hash.hpp"
#include "causent/errors.hpp"
#include "causent/estimator.hpp"
#include "causent/ksg.hpp"
#include "causent/parallel.hpp"

namespace causent {

enum class TestKind { Lagged, Instantaneous };

// One conditional-independence query. For Lagged, cause indexes the past
// window X^cause_{t-gamma:t-1} and effect the present instant X^effect_t
// (cause == effect screens a self cause). For Instantaneous both sides are
// present instants and cause/effect only fix which block the surrogates
// permute.
struct TestSpec {
    TestKind kind = TestKind::Lagged;
    int cause = 0;
    int effect = 0;
    std::vector<Conditioner> conditioners;
};

namespace detail {

inline void validate_conditioners(const TestSpec& spec) {
    for (const auto& c : spec.conditioners) {
        bool clash = false;
        if (spec.kind == TestKind::Lagged) {
            clash = (c == Conditioner{spec.cause, Slice::Past}) ||
                    (c == Conditioner{spec.effect, Slice::Present});
        } else {
            clash = (c == Conditioner{spec.cause, Slice::Present}) ||
                    (c == Conditioner{spec.effect, Slice::Present});
        }
        if (clash)
            throw InvalidConditionerError("conditioner overlaps the tested blocks");
    }
}

inline SampleBlock cause_block(const EmbeddedDataset& emb, const TestSpec& spec) {
    return spec.kind == TestKind::Lagged ? emb.past_window(spec.cause)
                                         : emb.present_instant(spec.cause);
}

// The per-test RNG stream is derived from column content (not position), so
// reordering dataset columns reproduces every test bit-for-bit.
inline std::uint64_t test_seed(const EmbeddedDataset& emb, const TestSpec& spec,
                               std::uint64_t base_seed) {
    std::uint64_t s = mix64(base_seed ^ (spec.kind == TestKind::Lagged ? 0x1a2b3c4d5e6f7081ULL
                                                                       : 0x8091a2b3c4d5e6f7ULL));
    std::uint64_t cause_tag = spec.kind == TestKind::Lagged ? 0x70617374ULL : 0x70726573ULL;
    s = hash_combine(s, emb.series_hash(spec.cause) ^ cause_tag);
    s = hash_combine(s, emb.series_hash(spec.effect) ^ 0x70726573ULL);
    std::uint64_t zacc = 0;
    for (const auto& c : spec.conditioners)
        zacc ^= mix64(emb.series_hash(c.first) ^
                      (c.second == Slice::Past ? 0x70617374ULL : 0x70726573ULL));
    return hash_combine(s, zacc);
}

// Runge-style restricted draw: each row receives the first not-yet-used
// member of its (shuffled) z-neighborhood, in a random row order. Duplicates
// are possible when a whole neighborhood is exhausted.
inline std::vector<std::uint32_t> restricted_permutation(
    const std::vector<std::uint32_t>& neighbor_table, std::size_t n, std::size_t k_perm,
    std::mt19937_64& rng) {
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::uint32_t> row(k_perm);
    std::vector<char> used(n, 0);
    std::vector<std::uint32_t> perm(n, 0);
    for (std::uint32_t i : order) {
        std::copy(neighbor_table.begin() + i * k_perm,
                  neighbor_table.begin() + (i + 1) * k_perm, row.begin());
        std::shuffle(row.begin(), row.end(), rng);
        std::uint32_t pick = row[0];
        for (std::size_t m = 1; used[pick] && m < k_perm; ++m) pick = row[m];
        perm[i] = pick;
        used[pick] = 1;
    }
    return perm;
}

}  // namespace detail

// Greedy causation entropy I(X^q_t ; X^p_{t-gamma:t-1}): the dependence of a
// present value on the full lag window of a candidate cause.
inline double gce(const EmbeddedDataset& emb, int cause, int effect,
                  const EstimatorConfig& cfg) {
    if (emb.degenerate(cause) || emb.degenerate(effect)) return 0.0;
    return ksg_cmi(emb.past_window(cause), emb.present_instant(effect), SampleBlock{}, cfg.k);
}

inline double conditional_gce(const EmbeddedDataset& emb, int cause, int effect,
                              const std::vector<Conditioner>& conditioners,
                              const EstimatorConfig& cfg) {
    TestSpec spec{TestKind::Lagged, cause, effect, conditioners};
    detail::validate_conditioners(spec);
    if (emb.degenerate(cause) || emb.degenerate(effect)) return 0.0;
    return ksg_cmi(emb.past_window(cause), emb.present_instant(effect),
                   emb.conditioning_block(conditioners), cfg.k);
}

inline double instantaneous_cmi(const EmbeddedDataset& emb, int p, int q,
                                const std::vector<Conditioner>& conditioners,
                                const EstimatorConfig& cfg) {
    if (p == q) throw InvalidArgumentError("instantaneous_cmi: p and q must differ");
    TestSpec spec{TestKind::Instantaneous, p, q, conditioners};
    detail::validate_conditioners(spec);
    if (emb.degenerate(p) || emb.degenerate(q)) return 0.0;
    return ksg_cmi(emb.present_instant(p), emb.present_instant(q),
                   emb.conditioning_block(conditioners), cfg.k);
}

// Convenience overloads on raw datasets.
inline double gce(const TimeSeriesDataset& ds, int cause, int effect,
                  const EstimatorConfig& cfg) {
    return gce(EmbeddedDataset(ds, cfg), cause, effect, cfg);
}
inline double conditional_gce(const TimeSeriesDataset& ds, int cause, int effect,
                              const std::vector<Conditioner>& conds,
                              const EstimatorConfig& cfg) {
    return conditional_gce(EmbeddedDataset(ds, cfg), cause, effect, conds, cfg);
}
inline double instantaneous_cmi(const TimeSeriesDataset& ds, int p, int q,
                                const std::vector<Conditioner>& conds,
                                const EstimatorConfig& cfg) {
    return instantaneous_cmi(EmbeddedDataset(ds, cfg), p, q, conds, cfg);
}

// Local permutation significance test. The cause block is permuted only
// within k_perm-nearest neighborhoods of the conditioning block (uniformly
// when the conditioning set is empty); the p-value is
// (1 + #{surrogate >= observed}) / (1 + n_perm) and depends only on inputs
// and the seed, never on evaluation order.
inline CITestResult local_permutation_test(const EmbeddedDataset& emb, const TestSpec& spec,
                                           const EstimatorConfig& cfg) {
    detail::validate_conditioners(spec);
    if (spec.kind == TestKind::Instantaneous && spec.cause == spec.effect)
        throw InvalidArgumentError("instantaneous test: series must differ");
    if (cfg.n_perm < 1) throw InvalidArgumentError("n_perm must be >= 1");

    std::size_t n = emb.n();
    if (emb.degenerate(spec.cause) || emb.degenerate(spec.effect))
        return CITestResult{0.0, 1.0, true, n};

    SampleBlock x = detail::cause_block(emb, spec);
    SampleBlock y = emb.present_instant(spec.effect);
    SampleBlock z = emb.conditioning_block(spec.conditioners);

    KsgPermutationEvaluator eval(x, y, z, cfg.k, n <= cfg.engine_cache_limit);
    double observed = eval.evaluate(KsgPermutationEvaluator::identity_permutation(n));

    std::mt19937_64 rng(detail::test_seed(emb, spec, cfg.seed));
    std::size_t k_perm = std::min<std::size_t>(cfg.k_perm, n);
    std::vector<std::uint32_t> neighbor_table;
    if (!z.empty()) neighbor_table = eval.z_neighbor_table(static_cast<int>(k_perm));

    std::vector<std::vector<std::uint32_t>> perms(cfg.n_perm);
    for (auto& perm : perms) {
        if (z.empty()) {
            perm.resize(n);
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
        } else {
            perm = detail::restricted_permutation(neighbor_table, n, k_perm, rng);
        }
    }

    std::vector<double> surrogate(cfg.n_perm);
    parallel_for(cfg.n_perm, [&](std::size_t s) { surrogate[s] = eval.evaluate(perms[s]); });

    std::size_t exceed = 0;
    for (double s : surrogate) exceed += (s >= observed);
    double p = static_cast<double>(1 + exceed) / static_cast<double>(1 + cfg.n_perm);
    return CITestResult{observed, p, p > cfg.alpha, n};
}

// Conditional-independence decision source used by the discovery algorithms.
// The production implementation wraps the permutation test; tests substitute
// an exact d-separation oracle.
class CITester {
public:
    virtual ~CITester() = default;
    virtual int num_series() const = 0;
    virtual CITestResult test(const TestSpec& spec) = 0;
    // Ranking tie-break key; content-derived for data testers so that column
    // order never matters.
    virtual std::uint64_t series_key(int series) const {
        return static_cast<std::uint64_t>(series);
    }
};

class PermutationCITester : public CITester {
public:
    PermutationCITester(const TimeSeriesDataset& ds, EstimatorConfig cfg)
        : emb_(ds, cfg), cfg_(cfg) {}

    int num_series() const override { return static_cast<int>(emb_.num_series()); }
    std::uint64_t series_key(int series) const override { return emb_.series_hash(series); }
    const EmbeddedDataset& embedded() const { return emb_; }
    const EstimatorConfig& config() const { return cfg_; }

    CITestResult test(const TestSpec& spec) override {
        TestSpec s = spec;
        std::sort(s.conditioners.begin(), s.conditioners.end());
        s.conditioners.erase(std::unique(s.conditioners.begin(), s.conditioners.end()),
                             s.conditioners.end());
        if (s.kind == TestKind::Instantaneous &&
            series_key(s.cause) > series_key(s.effect))
            std::swap(s.cause, s.effect);
        auto key = cache_key(s);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        CITestResult r = local_permutation_test(emb_, s, cfg_);
        cache_.emplace(std::move(key), r);
        return r;
    }

private:
    using CacheKey = std::tuple<int, int, int, std::vector<Conditioner>>;

    static CacheKey cache_key(const TestSpec& s) {
        return {static_cast<int>(s.kind), s.cause, s.effect, s.conditioners};
    }

    EmbeddedDataset emb_;
    EstimatorConfig cfg_;
    std::map<CacheKey, CITestResult> cache_;
};

}  // namespace causent
