// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tandemq/csv.hpp"

namespace tandemq {

struct TableOptions {
    /// Upper bound on n_max: the fill is O(n_max^3) time and O(n_max^2)
    /// memory, so a runaway grid request is rejected instead of hanging.
    int max_grid = 1500;
    /// Also fill T independently from the first-step difference equation
    /// and record the maximum disagreement against T1 + T2.
    bool verify = false;
};

/// Triangular arrays of the full-information expected sojourn times for a
/// tagged customer who joins at position n of queue 1 with m customers in
/// queue 2: T1(n,m) = n/mu1, T2(n,m) from the geometric-sum recursion, and
/// T(n,m) = T1(n,m) + T2(n,m). Valid for all grid points with n + m <= n_max.
/// Immutable once built; safe to share across threads.
class SojournTable {
  public:
    SojournTable(double mu1, double mu2, int n_max)
        : mu1_(mu1), mu2_(mu2), n_max_(n_max) {
        const std::size_t cells = cell_count(n_max);
        t1_.resize(cells);
        t2_.resize(cells);
        t_.resize(cells);
        row_offset_.resize(static_cast<std::size_t>(n_max) + 2, 0);
        std::size_t off = 0;
        for (int n = 0; n <= n_max; ++n) {
            row_offset_[static_cast<std::size_t>(n)] = off;
            off += static_cast<std::size_t>(n_max - n + 1);
        }
        row_offset_[static_cast<std::size_t>(n_max) + 1] = off;
    }

    double mu1() const { return mu1_; }
    double mu2() const { return mu2_; }
    int n_max() const { return n_max_; }

    bool covers(int n, int m) const {
        return n >= 0 && m >= 0 && n + m <= n_max_;
    }

    double t1(int n, int m) const { return t1_[index(n, m)]; }
    double t2(int n, int m) const { return t2_[index(n, m)]; }
    double t(int n, int m) const { return t_[index(n, m)]; }

    /// Max |T_diff - (T1+T2)| between the two fill paths; present only
    /// when the table was built with TableOptions::verify.
    std::optional<double> dual_path_max_diff() const { return dual_path_max_diff_; }

    static std::size_t cell_count(int n_max) {
        const auto n = static_cast<std::size_t>(n_max) + 1;
        return n * (n + 1) / 2;
    }

  private:
    std::size_t index(int n, int m) const {
        if (!covers(n, m))
            throw std::out_of_range("sojourn table does not cover (n=" + std::to_string(n) +
                                    ", m=" + std::to_string(m) + "); n_max=" + std::to_string(n_max_));
        return row_offset_[static_cast<std::size_t>(n)] + static_cast<std::size_t>(m);
    }

    double mu1_, mu2_;
    int n_max_;
    std::vector<std::size_t> row_offset_;
    std::vector<double> t1_, t2_, t_;
    std::optional<double> dual_path_max_diff_;

    friend SojournTable build_table(double, double, int, const TableOptions&);
};

/// Builds the sojourn-time tables on the triangle n + m <= n_max.
///
/// T2 is filled row by row in n with the geometric-sum recursion
///   T2(n,m) = beta^m T2(n-1,1) + (mu1/(mu1+mu2)) * sum_{j<m} beta^j T2(n-1,m+1-j),
/// beta = mu2/(mu1+mu2), anchored at T2(0,m) = m/mu2; the m = 0 case reduces
/// to T2(n,0) = T2(n-1,1). Powers of beta are precomputed by iterated
/// multiplication. With TableOptions::verify, T is additionally filled from
/// the first-step difference equation with its own boundaries and the two
/// paths must agree to 1e-10.
inline SojournTable build_table(double mu1, double mu2, int n_max,
                                const TableOptions& opts = {}) {
    if (!(std::isfinite(mu1) && mu1 > 0.0) || !(std::isfinite(mu2) && mu2 > 0.0))
        throw std::invalid_argument("service rates must be > 0 and finite");
    if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
    if (n_max > opts.max_grid)
        throw std::runtime_error("n_max=" + std::to_string(n_max) +
                                 " exceeds the grid budget (max_grid=" +
                                 std::to_string(opts.max_grid) + ")");

    SojournTable tab(mu1, mu2, n_max);
    const double total = mu1 + mu2;
    const double beta = mu2 / total;
    const double w1 = mu1 / total;

    std::vector<double> beta_pow(static_cast<std::size_t>(n_max) + 1);
    beta_pow[0] = 1.0;
    for (std::size_t j = 1; j < beta_pow.size(); ++j) beta_pow[j] = beta_pow[j - 1] * beta;

    auto at = [&](std::vector<double>& v, int n, int m) -> double& {
        return v[tab.row_offset_[static_cast<std::size_t>(n)] + static_cast<std::size_t>(m)];
    };

    for (int m = 0; m <= n_max; ++m) {
        at(tab.t1_, 0, m) = 0.0;
        at(tab.t2_, 0, m) = static_cast<double>(m) / mu2;
    }
    for (int n = 1; n <= n_max; ++n) {
        const double tn1 = static_cast<double>(n) / mu1;
        for (int m = 0; m <= n_max - n; ++m) {
            double s = 0.0;
            for (int j = 0; j < m; ++j)
                s += beta_pow[static_cast<std::size_t>(j)] * at(tab.t2_, n - 1, m + 1 - j);
            at(tab.t1_, n, m) = tn1;
            at(tab.t2_, n, m) = beta_pow[static_cast<std::size_t>(m)] * at(tab.t2_, n - 1, 1) + w1 * s;
        }
    }
    for (int n = 0; n <= n_max; ++n)
        for (int m = 0; m <= n_max - n; ++m)
            at(tab.t_, n, m) = at(tab.t1_, n, m) + at(tab.t2_, n, m);

    if (opts.verify) {
        // Independent fill of T over anti-diagonals: within a diagonal the
        // (n-1, m+1) term is already done, the (n, m-1) term sits one
        // diagonal lower.
        std::vector<double> alt(SojournTable::cell_count(n_max));
        auto alt_at = [&](int n, int m) -> double& {
            return alt[tab.row_offset_[static_cast<std::size_t>(n)] + static_cast<std::size_t>(m)];
        };
        for (int m = 0; m <= n_max; ++m) alt_at(0, m) = static_cast<double>(m) / mu2;
        for (int s = 1; s <= n_max; ++s) {
            for (int n = 1; n <= s; ++n) {
                const int m = s - n;
                if (m == 0)
                    alt_at(n, 0) = 1.0 / mu1 + alt_at(n - 1, 1);
                else
                    alt_at(n, m) = 1.0 / total + w1 * alt_at(n - 1, m + 1) + beta * alt_at(n, m - 1);
            }
        }
        double max_diff = 0.0;
        for (int n = 0; n <= n_max; ++n)
            for (int m = 0; m <= n_max - n; ++m)
                max_diff = std::max(max_diff, std::abs(alt_at(n, m) - at(tab.t_, n, m)));
        tab.dual_path_max_diff_ = max_diff;
        if (max_diff > 1e-10)
            throw std::logic_error("sojourn table dual-path fill disagrees: max |diff| = " +
                                   format_double(max_diff));
    }
    return tab;
}

/// Closed form for the first difference Delta_1 T2(0,m) = T2(1,m) - T2(0,m):
/// (1/mu2) * (alpha - 1 + (alpha+1)^(-m)) / alpha with alpha = mu1/mu2.
/// Decreasing in m with limit (alpha-1)/(alpha*mu2); non-negative for all m
/// exactly when alpha >= 1.
inline double delta1_t2_row0(double mu1, double mu2, int m) {
    if (!(std::isfinite(mu1) && mu1 > 0.0) || !(std::isfinite(mu2) && mu2 > 0.0))
        throw std::invalid_argument("service rates must be > 0 and finite");
    if (m < 0) throw std::invalid_argument("m must be >= 0");
    const double alpha = mu1 / mu2;
    // (alpha+1)^(-m) = beta^m with beta = mu2/(mu1+mu2)
    const double beta = mu2 / (mu1 + mu2);
    double pw = 1.0;
    for (int j = 0; j < m; ++j) pw *= beta;
    return (alpha - 1.0 + pw) / (alpha * mu2);
}

struct MonotonicityFinding {
    bool nondecreasing = true;
    /// (n, m) of the first comparison T(n+1, ...) < T(n, ...) that fails.
    std::optional<std::pair<int, int>> counterexample;
};

/// Results of scanning the table for the monotonicity facts:
/// t1 and the anti-diagonal restriction of T are non-decreasing in n
/// unconditionally; t2 is non-decreasing in n iff mu1 >= mu2.
struct MonotonicityReport {
    MonotonicityFinding t1_in_n;
    MonotonicityFinding t_antidiagonal;
    MonotonicityFinding t2_in_n;
};

inline MonotonicityReport check_monotonicity(const SojournTable& tab) {
    MonotonicityReport rep;
    // Violations must exceed rounding noise to count.
    auto violates = [](double lo, double hi) {
        const double tol = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
        return hi < lo - tol;
    };
    const int n_max = tab.n_max();
    for (int n = 0; n < n_max && rep.t1_in_n.nondecreasing; ++n)
        for (int m = 0; m + n + 1 <= n_max; ++m)
            if (violates(tab.t1(n, m), tab.t1(n + 1, m))) {
                rep.t1_in_n = {false, std::make_pair(n, m)};
                break;
            }
    for (int k = 1; k <= n_max && rep.t_antidiagonal.nondecreasing; ++k)
        for (int n = 0; n < k; ++n)
            if (violates(tab.t(n, k - n), tab.t(n + 1, k - n - 1))) {
                rep.t_antidiagonal = {false, std::make_pair(n, k - n)};
                break;
            }
    for (int n = 0; n < n_max && rep.t2_in_n.nondecreasing; ++n)
        for (int m = 0; m + n + 1 <= n_max; ++m)
            if (violates(tab.t2(n, m), tab.t2(n + 1, m))) {
                rep.t2_in_n = {false, std::make_pair(n, m)};
                break;
            }
    return rep;
}

/// CSV dump of the grid: header n,m,t1,t2,t then one row per grid point,
/// n-major. '.' decimal, ',' delimiter, LF line endings.
inline void write_table_csv(std::ostream& os, const SojournTable& tab) {
    os << "n,m,t1,t2,t\n";
    for (int n = 0; n <= tab.n_max(); ++n)
        for (int m = 0; m <= tab.n_max() - n; ++m)
            os << n << ',' << m << ',' << format_double(tab.t1(n, m)) << ','
               << format_double(tab.t2(n, m)) << ',' << format_double(tab.t(n, m)) << '\n';
}

}  // namespace tandemq
