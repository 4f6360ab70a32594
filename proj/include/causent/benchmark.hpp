#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "causent/evaluate.hpp"
#include "causent/orient_fci.hpp"
#include "causent/orient_pc.hpp"
#include "causent/parallel.hpp"
#include "causent/simulate.hpp"

namespace causent {

// PC-style worst-case count of independence tests, 4d^2(2d-1)^(kappa-1)/(kappa-1)!
// where kappa - 1 is the deepest conditioning level reached.
inline double test_count_bound(int d, int max_level_reached) {
    double bound = 4.0 * d * d;
    for (int i = 1; i <= max_level_reached; ++i)
        bound *= static_cast<double>(2 * d - 1) / static_cast<double>(i);
    return bound;
}

struct BenchmarkOptions {
    int n_datasets = 10;
    std::size_t T = 1000;
    EstimatorConfig cfg;
    ScoringMode mode = ScoringMode::Compatible;
    // Significance defaults per algorithm; an explicit cfg.alpha wins when
    // alpha_overridden is set.
    double alpha_sufficient = 0.05;
    double alpha_hidden = 0.1;
    bool alpha_overridden = false;
};

struct BenchmarkRow {
    StructureId structure;
    std::string algorithm;
    int n_datasets = 0;
    std::size_t T = 0;
    double f1_cross_mean = 0.0, f1_cross_std = 0.0;
    std::optional<double> f1_self_mean, f1_self_std;
    double seconds = 0.0;
    double tests_mean = 0.0;
    std::size_t tests_max = 0;
    int max_level = 0;
    double bound = 0.0;
    bool bound_ok = true;  // only meaningful for causally sufficient runs
};

namespace detail {

struct MeanStd {
    double mean = 0.0, std = 0.0;
};

inline MeanStd mean_std(const std::vector<double>& v) {
    if (v.empty()) return {};
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var = v.size() > 1 ? var / static_cast<double>(v.size() - 1) : 0.0;
    return {mean, std::sqrt(var)};
}

}  // namespace detail

// Runs the matching algorithm (PCGCE for causally sufficient structures,
// FCIGCE otherwise) over n freshly generated datasets per structure and
// scores each output against the ground truth.
inline std::vector<BenchmarkRow> run_benchmark(const std::vector<StructureId>& structures,
                                               const BenchmarkOptions& opts) {
    if (opts.n_datasets < 1) throw InvalidArgumentError("benchmark: need n_datasets >= 1");
    std::vector<BenchmarkRow> rows;
    for (StructureId structure : structures) {
        const bool hidden = has_hidden_causes(structure);
        EstimatorConfig cfg = opts.cfg;
        if (!opts.alpha_overridden)
            cfg.alpha = hidden ? opts.alpha_hidden : opts.alpha_sufficient;

        struct RunOut {
            double f1_cross = 0.0;
            std::optional<double> f1_self;
            std::size_t tests = 0;
            int max_level = 0;
        };
        std::vector<RunOut> outs(opts.n_datasets);
        auto start = std::chrono::steady_clock::now();
        parallel_for(opts.n_datasets, [&](std::size_t i) {
            std::uint64_t seed = detail::hash_combine(
                cfg.seed, (static_cast<std::uint64_t>(structure) << 32) ^ i);
            EstimatorConfig run_cfg = cfg;
            run_cfg.seed = seed;
            auto [data, truth] = generate(structure, opts.T, seed);
            ExtendedSummaryGraph out;
            TestLog log;
            if (hidden) {
                FcigceResult r = fcigce(data, run_cfg);
                out = std::move(r.graph);
                log = std::move(r.log);
            } else {
                PcgceResult r = pcgce(data, run_cfg);
                out = std::move(r.graph);
                log = std::move(r.log);
            }
            ScoreReport score = f1_scores(out, truth.graph, opts.mode);
            outs[i] = {score.cross.f1,
                       score.self ? std::optional<double>(score.self->f1) : std::nullopt,
                       log.total_tests, log.max_level_reached};
        });
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                             .count();

        BenchmarkRow row;
        row.structure = structure;
        row.algorithm = hidden ? "fcigce" : "pcgce";
        row.n_datasets = opts.n_datasets;
        row.T = opts.T;
        row.seconds = seconds;
        std::vector<double> cross, self;
        for (const auto& o : outs) {
            cross.push_back(o.f1_cross);
            if (o.f1_self) self.push_back(*o.f1_self);
            row.tests_mean += static_cast<double>(o.tests);
            row.tests_max = std::max(row.tests_max, o.tests);
            row.max_level = std::max(row.max_level, o.max_level);
        }
        row.tests_mean /= static_cast<double>(opts.n_datasets);
        auto cs = detail::mean_std(cross);
        row.f1_cross_mean = cs.mean;
        row.f1_cross_std = cs.std;
        if (!self.empty()) {
            auto ss = detail::mean_std(self);
            row.f1_self_mean = ss.mean;
            row.f1_self_std = ss.std;
        }
        if (!hidden) {
            row.bound_ok = true;
            for (const auto& o : outs) {
                double b = test_count_bound(static_cast<int>(truth_graph(structure).num_series()),
                                            o.max_level);
                row.bound = std::max(row.bound, b);
                if (static_cast<double>(o.tests) > b) row.bound_ok = false;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void report_markdown(const std::vector<BenchmarkRow>& rows, std::ostream& out) {
    out << "| structure | algorithm | n | T | F1 (p!=q) | F1 (p=q) | tests (mean) | time (s) |\n";
    out << "|---|---|---|---|---|---|---|---|\n";
    char buf[64];
    for (const auto& r : rows) {
        out << "| " << to_string(r.structure) << " | " << r.algorithm << " | " << r.n_datasets
            << " | " << r.T << " | ";
        std::snprintf(buf, sizeof(buf), "%.2f ± %.2f", r.f1_cross_mean, r.f1_cross_std);
        out << buf << " | ";
        if (r.f1_self_mean) {
            std::snprintf(buf, sizeof(buf), "%.2f ± %.2f", *r.f1_self_mean, *r.f1_self_std);
            out << buf;
        } else {
            out << "-";
        }
        std::snprintf(buf, sizeof(buf), "%.1f", r.tests_mean);
        out << " | " << buf << " | ";
        std::snprintf(buf, sizeof(buf), "%.1f", r.seconds);
        out << buf << " |\n";
    }
}

inline void report_csv(const std::vector<BenchmarkRow>& rows, std::ostream& out) {
    out << "structure,algorithm,n_datasets,T,f1_cross_mean,f1_cross_std,f1_self_mean,"
           "f1_self_std,tests_mean,tests_max,max_level,seconds\n";
    out.precision(6);
    for (const auto& r : rows) {
        out << to_string(r.structure) << ',' << r.algorithm << ',' << r.n_datasets << ',' << r.T
            << ',' << r.f1_cross_mean << ',' << r.f1_cross_std << ',';
        if (r.f1_self_mean)
            out << *r.f1_self_mean << ',' << *r.f1_self_std;
        else
            out << ',';
        out << ',' << r.tests_mean << ',' << r.tests_max << ',' << r.max_level << ','
            << r.seconds << '\n';
    }
}

}  // namespace causent
