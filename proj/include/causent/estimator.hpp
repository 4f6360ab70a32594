#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "causent/dataset.hpp"
#include "causent/detail/hash.hpp"
#include "causent/errors.hpp"
#include "causent/graph.hpp"

namespace causent {

// Estimation and testing parameters. alpha defaults to 0.05; hidden-cause
// pipelines switch it to 0.1 at the CLI level.
struct EstimatorConfig {
    int gamma = 5;          // max lag; past windows span t-gamma .. t-1
    int k = 10;             // kNN neighbor count
    int k_perm = 5;         // local-permutation neighborhood size
    int n_perm = 100;       // permutation count
    double alpha = 0.05;    // significance level
    std::uint64_t seed = 0;
    int max_level = -1;     // conditioning-set size cap; negative = unlimited
    // Above this sample count the permutation tester recomputes distances
    // per surrogate instead of caching n x n matrices.
    std::size_t engine_cache_limit = 1600;
};

struct CITestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool independent = true;
    std::size_t n_used = 0;
};

// n aligned observations by m columns, row-major.
struct SampleBlock {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    SampleBlock() = default;
    SampleBlock(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    bool empty() const { return cols == 0; }
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }

    void append_columns(const SampleBlock& other) {
        if (empty()) {
            *this = other;
            return;
        }
        if (other.empty()) return;
        if (other.rows != rows) throw InvalidArgumentError("block: row count mismatch");
        SampleBlock merged(rows, cols + other.cols);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) merged.at(r, c) = at(r, c);
            for (std::size_t c = 0; c < other.cols; ++c) merged.at(r, cols + c) = other.at(r, c);
        }
        *this = std::move(merged);
    }
};

enum class WindowSpec { PastWindow, PresentInstant };

// Raw lag embedding: rows are t = gamma .. T-1. A past window yields the
// columns (X_{t-gamma}, ..., X_{t-1}); a present instant the single column
// X_t. All blocks over the same dataset share the row index.
inline SampleBlock lag_embed(const std::vector<double>& series, WindowSpec spec, int gamma) {
    if (gamma < 1) throw InvalidArgumentError("lag_embed: gamma must be >= 1");
    std::size_t T = series.size();
    if (T <= static_cast<std::size_t>(gamma))
        throw InsufficientDataError("lag_embed: need T > gamma");
    std::size_t n = T - static_cast<std::size_t>(gamma);
    if (spec == WindowSpec::PresentInstant) {
        SampleBlock b(n, 1);
        for (std::size_t r = 0; r < n; ++r) b.at(r, 0) = series[r + gamma];
        return b;
    }
    SampleBlock b(n, static_cast<std::size_t>(gamma));
    for (std::size_t r = 0; r < n; ++r) {
        std::size_t t = r + gamma;
        for (int c = 0; c < gamma; ++c) b.at(r, c) = series[t - gamma + c];
    }
    return b;
}

inline SampleBlock lag_embed(const TimeSeriesDataset& ds, int series, WindowSpec spec,
                             int gamma) {
    if (series < 0 || static_cast<std::size_t>(series) >= ds.num_series())
        throw InvalidArgumentError("lag_embed: series index out of range");
    return lag_embed(ds.column(series), spec, gamma);
}

// Dataset prepared for estimation: each series standardized to zero mean and
// unit variance, then perturbed by seeded jitter of magnitude 1e-10 so the
// kNN estimator never sees tied values. Jitter streams derive from the column
// content, not its position, which keeps every downstream statistic invariant
// under column reordering.
class EmbeddedDataset {
public:
    EmbeddedDataset(const TimeSeriesDataset& ds, const EstimatorConfig& cfg)
        : gamma_(cfg.gamma), names_(ds.names()) {
        if (cfg.gamma < 1) throw InvalidArgumentError("estimator: gamma must be >= 1");
        if (ds.num_series() == 0) throw InvalidArgumentError("estimator: empty dataset");
        if (ds.length() <= static_cast<std::size_t>(cfg.gamma))
            throw InsufficientDataError("estimator: need T > gamma");
        n_ = ds.length() - static_cast<std::size_t>(cfg.gamma);
        series_.resize(ds.num_series());
        hashes_.resize(ds.num_series());
        degenerate_.resize(ds.num_series(), false);
        for (std::size_t i = 0; i < ds.num_series(); ++i) {
            const auto& raw = ds.column(i);
            hashes_[i] = detail::hash_doubles(raw);
            series_[i] = standardize(raw, i, cfg, hashes_[i]);
        }
    }

    std::size_t num_series() const { return series_.size(); }
    std::size_t n() const { return n_; }
    int gamma() const { return gamma_; }
    const std::vector<std::string>& names() const { return names_; }
    std::uint64_t series_hash(int i) const { return hashes_.at(i); }
    bool degenerate(int i) const { return degenerate_.at(i); }

    SampleBlock past_window(int series) const {
        return lag_embed(series_.at(series), WindowSpec::PastWindow, gamma_);
    }
    SampleBlock present_instant(int series) const {
        return lag_embed(series_.at(series), WindowSpec::PresentInstant, gamma_);
    }
    SampleBlock embed(const Conditioner& c) const {
        return c.second == Slice::Past ? past_window(c.first) : present_instant(c.first);
    }

    // Concatenation of conditioner embeddings in canonical (sorted) order;
    // degenerate series are skipped since they carry no information.
    SampleBlock conditioning_block(std::vector<Conditioner> conds) const {
        std::sort(conds.begin(), conds.end());
        conds.erase(std::unique(conds.begin(), conds.end()), conds.end());
        SampleBlock z;
        for (const auto& c : conds) {
            if (degenerate(c.first)) continue;
            z.append_columns(embed(c));
        }
        return z;
    }

private:
    std::vector<double> standardize(const std::vector<double>& raw, std::size_t idx,
                                    const EstimatorConfig& cfg, std::uint64_t content_hash) {
        double mean = 0.0;
        for (double v : raw) mean += v;
        mean /= static_cast<double>(raw.size());
        double var = 0.0;
        for (double v : raw) var += (v - mean) * (v - mean);
        var /= static_cast<double>(raw.size() > 1 ? raw.size() - 1 : 1);
        double sd = std::sqrt(var);
        std::vector<double> out(raw.size(), 0.0);
        if (!(sd > 1e-15 * (std::abs(mean) + 1.0))) {
            degenerate_[idx] = true;
            return out;
        }
        std::mt19937_64 rng(detail::hash_combine(cfg.seed, content_hash ^ 0x6a09e667f3bcc908ULL));
        std::uniform_real_distribution<double> jitter(-1e-10, 1e-10);
        for (std::size_t t = 0; t < raw.size(); ++t)
            out[t] = (raw[t] - mean) / sd + jitter(rng);
        return out;
    }

    int gamma_;
    std::size_t n_ = 0;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> series_;
    std::vector<std::uint64_t> hashes_;
    std::vector<bool> degenerate_;
};

}  // namespace causent
