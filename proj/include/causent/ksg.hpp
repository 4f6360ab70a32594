#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "causent/errors.hpp"
#include "causent/estimator.hpp"

namespace causent {

namespace detail {

// Digamma at positive integer arguments: psi(1) = -euler_gamma,
// psi(m+1) = psi(m) + 1/m. All counts fed to the estimator are integers,
// so a cumulative table is exact and cheap.
inline std::vector<double> digamma_table(std::size_t max_arg) {
    std::vector<double> psi(max_arg + 1, 0.0);
    if (max_arg >= 1) psi[1] = -0.57721566490153286060651209008240243;
    for (std::size_t m = 1; m < max_arg; ++m)
        psi[m + 1] = psi[m] + 1.0 / static_cast<double>(m);
    return psi;
}

inline double chebyshev(const double* a, const double* b, std::size_t dims) {
    double m = 0.0;
    for (std::size_t c = 0; c < dims; ++c) {
        double d = std::fabs(a[c] - b[c]);
        if (d > m) m = d;
    }
    return m;
}

inline void check_blocks(const SampleBlock& x, const SampleBlock& y, const SampleBlock& z,
                         int k) {
    if (x.empty() || y.empty()) throw InvalidArgumentError("ksg: x and y must be non-empty");
    if (x.rows != y.rows || (!z.empty() && z.rows != x.rows))
        throw InvalidArgumentError("ksg: blocks must share the row count");
    if (k < 1) throw InvalidArgumentError("ksg: k must be >= 1");
    if (x.rows <= static_cast<std::size_t>(k))
        throw InsufficientDataError("ksg: need more samples than k");
    for (const SampleBlock* b : {&x, &y, &z}) {
        for (std::size_t c = 0; c < b->cols; ++c) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::size_t r = 0; r < b->rows; ++r) {
                lo = std::min(lo, b->at(r, c));
                hi = std::max(hi, b->at(r, c));
            }
            if (!(hi > lo)) throw DegenerateDataError("ksg: zero-variance column");
        }
    }
}

// Tracks the (k+1) smallest values seen; top() is the current k-th neighbor
// distance (rank k with the self distance included at rank 0).
class SmallestK {
public:
    explicit SmallestK(std::size_t cap) : cap_(cap) { heap_.reserve(cap); }

    bool full() const { return heap_.size() == cap_; }
    double bound() const { return heap_.front(); }

    void offer(double v) {
        if (heap_.size() < cap_) {
            heap_.push_back(v);
            std::push_heap(heap_.begin(), heap_.end());
        } else if (v < heap_.front()) {
            std::pop_heap(heap_.begin(), heap_.end());
            heap_.back() = v;
            std::push_heap(heap_.begin(), heap_.end());
        }
    }

    void reset() { heap_.clear(); }

private:
    std::size_t cap_;
    std::vector<double> heap_;
};

inline std::size_t count_less(const double* sorted_row, std::size_t n, double eps) {
    return static_cast<std::size_t>(std::lower_bound(sorted_row, sorted_row + n, eps) -
                                    sorted_row);
}

}  // namespace detail

// Evaluates the kNN conditional mutual information statistic for the observed
// sample and for surrogates in which the rows of x are re-indexed by a
// permutation. Up to `cache` mode it precomputes the pairwise Chebyshev
// distance matrices once, so each surrogate costs far less than a fresh
// estimate; the fallback recomputes distances per call and is used when the
// matrices would not fit comfortably in memory.
//
// The observed statistic (identity permutation) is bit-identical between the
// two modes.
class KsgPermutationEvaluator {
public:
    KsgPermutationEvaluator(const SampleBlock& x, const SampleBlock& y, const SampleBlock& z,
                            int k, bool cache)
        : x_(x), y_(y), z_(z), k_(static_cast<std::size_t>(k)), n_(x.rows), cached_(cache) {
        detail::check_blocks(x, y, z, k);
        psi_ = detail::digamma_table(n_ + 1);
        if (cached_) build_matrices();
    }

    std::size_t n() const { return n_; }
    bool conditional() const { return !z_.empty(); }

    static std::vector<std::uint32_t> identity_permutation(std::size_t n) {
        std::vector<std::uint32_t> p(n);
        std::iota(p.begin(), p.end(), 0);
        return p;
    }

    // perm[i] is the source row of x placed at row i; y and z stay in place.
    double evaluate(const std::vector<std::uint32_t>& perm) const {
        return cached_ ? evaluate_cached(perm) : evaluate_direct(perm);
    }

    // For each row, the k_perm nearest rows in z-space (self included at
    // rank 0); flattened n x k_perm. Only valid for conditional statistics.
    std::vector<std::uint32_t> z_neighbor_table(int k_perm) const {
        std::size_t kp = std::min<std::size_t>(k_perm, n_);
        std::vector<std::uint32_t> table(n_ * kp);
        std::vector<double> buf(n_);
        std::vector<std::uint32_t> idx(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            if (cached_) {
                for (std::size_t t = 0; t < kp; ++t) table[i * kp + t] = zb_order_[i * n_ + t];
                continue;
            }
            for (std::size_t j = 0; j < n_; ++j)
                buf[j] = detail::chebyshev(z_.row(i), z_.row(j), z_.cols);
            std::iota(idx.begin(), idx.end(), 0);
            std::partial_sort(idx.begin(), idx.begin() + kp, idx.end(),
                              [&](std::uint32_t a, std::uint32_t b) { return buf[a] < buf[b]; });
            for (std::size_t t = 0; t < kp; ++t) table[i * kp + t] = idx[t];
        }
        return table;
    }

private:
    void build_matrices() {
        const std::size_t n = n_;
        dx_.resize(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            dx_[i * n + i] = 0.0;
            for (std::size_t j = i + 1; j < n; ++j) {
                double d = detail::chebyshev(x_.row(i), x_.row(j), x_.cols);
                dx_[i * n + j] = d;
                dx_[j * n + i] = d;
            }
        }
        if (conditional()) {
            // b = max(dy, dz) (the "yz" margin), zb = dz.
            b_sorted_.resize(n * n);
            b_order_.resize(n * n);
            zb_sorted_.resize(n * n);
            zb_order_.resize(n * n);
            std::vector<double> brow(n), zrow(n);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    double dy = detail::chebyshev(y_.row(i), y_.row(j), y_.cols);
                    double dz = detail::chebyshev(z_.row(i), z_.row(j), z_.cols);
                    zrow[j] = dz;
                    brow[j] = std::max(dy, dz);
                }
                sort_row(brow, &b_sorted_[i * n], &b_order_[i * n]);
                sort_row(zrow, &zb_sorted_[i * n], &zb_order_[i * n]);
            }
        } else {
            b_sorted_.resize(n * n);
            b_order_.resize(n * n);
            dx_sorted_.resize(n * n);
            std::vector<double> brow(n);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j)
                    brow[j] = detail::chebyshev(y_.row(i), y_.row(j), y_.cols);
                sort_row(brow, &b_sorted_[i * n], &b_order_[i * n]);
                std::copy(dx_.begin() + i * n, dx_.begin() + (i + 1) * n,
                          dx_sorted_.begin() + i * n);
                std::sort(dx_sorted_.begin() + i * n, dx_sorted_.begin() + (i + 1) * n);
            }
        }
    }

    static void sort_row(const std::vector<double>& row, double* sorted_out,
                         std::uint32_t* order_out) {
        const std::size_t n = row.size();
        std::vector<std::uint32_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (row[a] != row[b]) return row[a] < row[b];
            return a < b;
        });
        for (std::size_t t = 0; t < n; ++t) {
            order_out[t] = idx[t];
            sorted_out[t] = row[idx[t]];
        }
    }

    double evaluate_cached(const std::vector<std::uint32_t>& perm) const {
        const std::size_t n = n_;
        double total = 0.0;
        detail::SmallestK top(k_ + 1);
        for (std::size_t i = 0; i < n; ++i) {
            const double* dxrow = &dx_[static_cast<std::size_t>(perm[i]) * n];
            const double* bs = &b_sorted_[i * n];
            const std::uint32_t* bo = &b_order_[i * n];
            top.reset();
            for (std::size_t t = 0; t < n; ++t) {
                double base = bs[t];
                if (top.full() && base >= top.bound()) break;
                double v = std::max(dxrow[perm[bo[t]]], base);
                top.offer(v);
            }
            double eps = top.bound();
            total += conditional() ? cond_term(i, perm, dxrow, eps)
                                   : mi_term(i, perm, dxrow, eps);
        }
        double mean = total / static_cast<double>(n);
        return conditional() ? psi_[k_] + mean : psi_[k_] + psi_[n] + mean;
    }

    double cond_term(std::size_t i, const std::vector<std::uint32_t>& perm, const double* dxrow,
                     double eps) const {
        const std::size_t n = n_;
        if (!(eps > 0.0)) return psi_[1] - psi_[1] - psi_[1];
        const double* zs = &zb_sorted_[i * n];
        const std::uint32_t* zo = &zb_order_[i * n];
        std::size_t c_yz = detail::count_less(&b_sorted_[i * n], n, eps);
        std::size_t c_z = detail::count_less(zs, n, eps);
        std::size_t c_xz = 0;
        for (std::size_t t = 0; t < c_z; ++t)
            c_xz += dxrow[perm[zo[t]]] < eps;
        return psi_[c_z] - psi_[c_xz] - psi_[c_yz];
    }

    double mi_term(std::size_t i, const std::vector<std::uint32_t>& perm, const double*,
                   double eps) const {
        const std::size_t n = n_;
        if (!(eps > 0.0)) return -(psi_[1] + psi_[1]);
        std::size_t c_x = detail::count_less(&dx_sorted_[static_cast<std::size_t>(perm[i]) * n],
                                             n, eps);
        std::size_t c_y = detail::count_less(&b_sorted_[i * n], n, eps);
        return -(psi_[c_x] + psi_[c_y]);
    }

    double evaluate_direct(const std::vector<std::uint32_t>& perm) const {
        const std::size_t n = n_;
        std::vector<double> dx(n), db(n), dz(n);
        double total = 0.0;
        std::vector<double> joint(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double* xi = x_.row(perm[i]);
            for (std::size_t j = 0; j < n; ++j) {
                dx[j] = detail::chebyshev(xi, x_.row(perm[j]), x_.cols);
                double dy = detail::chebyshev(y_.row(i), y_.row(j), y_.cols);
                if (conditional()) {
                    dz[j] = detail::chebyshev(z_.row(i), z_.row(j), z_.cols);
                    db[j] = std::max(dy, dz[j]);
                } else {
                    db[j] = dy;
                }
                joint[j] = std::max(dx[j], db[j]);
            }
            std::nth_element(joint.begin(), joint.begin() + k_, joint.end());
            double eps = joint[k_];
            if (!(eps > 0.0)) {
                total += conditional() ? psi_[1] - psi_[1] - psi_[1] : -(psi_[1] + psi_[1]);
                continue;
            }
            if (conditional()) {
                std::size_t c_z = 0, c_xz = 0, c_yz = 0;
                for (std::size_t j = 0; j < n; ++j) {
                    bool zin = dz[j] < eps;
                    c_z += zin;
                    c_xz += zin && dx[j] < eps;
                    c_yz += db[j] < eps;
                }
                total += psi_[c_z] - psi_[c_xz] - psi_[c_yz];
            } else {
                std::size_t c_x = 0, c_y = 0;
                for (std::size_t j = 0; j < n; ++j) {
                    c_x += dx[j] < eps;
                    c_y += db[j] < eps;
                }
                total += -(psi_[c_x] + psi_[c_y]);
            }
        }
        double mean = total / static_cast<double>(n);
        return conditional() ? psi_[k_] + mean : psi_[k_] + psi_[n] + mean;
    }

    SampleBlock x_, y_, z_;
    std::size_t k_;
    std::size_t n_;
    bool cached_;
    std::vector<double> psi_;
    // Cached mode: dx raw; b = yz margin (or y margin when unconditional)
    // sorted per row with its argsort; zb = z margin likewise.
    std::vector<double> dx_, dx_sorted_, b_sorted_, zb_sorted_;
    std::vector<std::uint32_t> b_order_, zb_order_;
};

// Supremum-distance kNN estimate of I(x; y | z) in nats; empty z gives the
// two-block mutual information variant of the same estimator family.
inline double ksg_cmi(const SampleBlock& x, const SampleBlock& y, const SampleBlock& z, int k) {
    KsgPermutationEvaluator eval(x, y, z, k, /*cache=*/false);
    return eval.evaluate(KsgPermutationEvaluator::identity_permutation(x.rows));
}

inline double ksg_mi(const SampleBlock& x, const SampleBlock& y, int k) {
    return ksg_cmi(x, y, SampleBlock{}, k);
}

}  // namespace causent
