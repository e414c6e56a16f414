// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tandemq/csv.hpp"
#include "tandemq/model.hpp"
#include "tandemq/sojourn.hpp"

namespace tandemq {

namespace detail {

/// Two service rates are treated as equal when they agree to ~9 digits;
/// past that point the geometric ratio forms lose about half the
/// significand while the equal-rates branch is exact.
inline bool rates_equal(double mu1, double mu2) {
    return std::abs(mu1 - mu2) <= 1e-9 * std::max(mu1, mu2);
}

inline void require_rates(double mu1, double mu2) {
    if (!(std::isfinite(mu1) && mu1 > 0.0) || !(std::isfinite(mu2) && mu2 > 0.0))
        throw std::invalid_argument("service rates must be > 0 and finite");
}

}  // namespace detail

/// The law of the queue-l occupancy seen by an arrival who observes k
/// customers in total. Independent of both the population threshold K and
/// the arrival rate.
struct ConditionalDistribution {
    int k = 0;
    int node = 1;
    std::vector<double> weights;  // p_node(n | k), n = 0..k

    double operator[](std::size_t n) const { return weights[n]; }
    std::size_t size() const { return weights.size(); }
};

/// p_node(. | k) in the stable ratio form: with the ratio q oriented so
/// q = min(mu1,mu2)/max(mu1,mu2) < 1, every weight is q^x (1-q)/(1-q^(k+1))
/// and no intermediate exceeds 1. Numerically equal rates use the uniform
/// law 1/(k+1).
inline ConditionalDistribution conditional_dist(double mu1, double mu2, int k, int node = 1) {
    detail::require_rates(mu1, mu2);
    if (k < 0) throw std::invalid_argument("k must be >= 0");
    if (node != 1 && node != 2) throw std::invalid_argument("node must be 1 or 2");

    ConditionalDistribution dist;
    dist.k = k;
    dist.node = node;
    dist.weights.resize(static_cast<std::size_t>(k) + 1);

    if (detail::rates_equal(mu1, mu2)) {
        const double u = 1.0 / static_cast<double>(k + 1);
        for (auto& w : dist.weights) w = u;
        return dist;
    }

    // p1(n|k) is proportional to mu1^(k-n) mu2^n; the larger rate is
    // divided out so the geometric weights run downward from 1.
    const double q = std::min(mu1, mu2) / std::max(mu1, mu2);
    double qk1 = 1.0;
    for (int j = 0; j <= k; ++j) qk1 *= q;
    const double scale = (1.0 - q) / (1.0 - qk1);

    // Ascending exponent when the weight favors small n, else descending.
    const bool mass_at_low_n = (node == 1) ? (mu1 > mu2) : (mu2 > mu1);
    double pw = scale;
    for (int n = 0; n <= k; ++n) {
        const int idx = mass_at_low_n ? n : k - n;
        dist.weights[static_cast<std::size_t>(idx)] = pw;
        pw *= q;
    }
    return dist;
}

struct StationaryLawOptions {
    /// Guard on the materialized triangle, (K+1)(K+2)/2 states.
    int max_threshold = 2000;
};

/// Stationary distribution of the tandem network when the whole population
/// plays the threshold-K strategy: pi(n,m) = c_K rho1^n rho2^m on the
/// triangle n+m <= K. States are stored anti-diagonal-major.
class StationaryLaw {
  public:
    StationaryLaw(int K, double rho1, double rho2)
        : K_(K), rho1_(rho1), rho2_(rho2), pi_(state_count(K), 0.0) {}

    int threshold() const { return K_; }
    double rho1() const { return rho1_; }
    double rho2() const { return rho2_; }
    double normalization() const { return c_k_; }
    std::size_t states() const { return pi_.size(); }

    double operator()(int n, int m) const { return pi_[index(n, m)]; }

    /// Law of the total occupancy Q* = Q*1 + Q*2.
    std::vector<double> total_distribution() const {
        std::vector<double> out(static_cast<std::size_t>(K_) + 1, 0.0);
        for (int k = 0; k <= K_; ++k)
            for (int n = 0; n <= k; ++n) out[static_cast<std::size_t>(k)] += (*this)(n, k - n);
        return out;
    }

    /// Conditional law of the node occupancy given Q* = k, extracted by
    /// direct normalization over the anti-diagonal. Formula-independent check
    /// surface for conditional_dist.
    std::vector<double> conditional_given_total(int k, int node = 1) const {
        if (k < 0 || k > K_) throw std::out_of_range("k outside 0..K");
        std::vector<double> out(static_cast<std::size_t>(k) + 1, 0.0);
        double tot = 0.0;
        for (int n = 0; n <= k; ++n) tot += (*this)(n, k - n);
        for (int n = 0; n <= k; ++n) {
            const int idx = (node == 1) ? n : k - n;
            out[static_cast<std::size_t>(idx)] = (*this)(n, k - n) / tot;
        }
        return out;
    }

    static std::size_t state_count(int K) {
        const auto k = static_cast<std::size_t>(K) + 1;
        return k * (k + 1) / 2;
    }

    static std::size_t index_of(int n, int m) {
        const auto s = static_cast<std::size_t>(n + m);
        return s * (s + 1) / 2 + static_cast<std::size_t>(n);
    }

    /// Wraps an externally computed probability vector (anti-diagonal-major,
    /// already normalized). c_K is read off pi(0,0), the weight-1 state.
    static StationaryLaw from_probabilities(int K, double rho1, double rho2,
                                            std::vector<double> pi) {
        if (pi.size() != state_count(K))
            throw std::invalid_argument("probability vector size does not match the triangle");
        StationaryLaw law(K, rho1, rho2);
        law.pi_ = std::move(pi);
        law.c_k_ = law.pi_[0];
        return law;
    }

  private:
    std::size_t index(int n, int m) const {
        if (n < 0 || m < 0 || n + m > K_) throw std::out_of_range("state outside the triangle");
        return index_of(n, m);
    }

    int K_;
    double rho1_, rho2_;
    double c_k_ = 0.0;
    std::vector<double> pi_;
};

/// Product-form stationary law on the triangle n+m <= K. Weights are
/// accumulated by iterated multiplication; when rho^K would leave the
/// double range the fill switches to log space with max-subtraction.
inline StationaryLaw stationary_law(const ModelParams& params, int K,
                                    const StationaryLawOptions& opts = {}) {
    require_valid(params, /*allow_degenerate_costs=*/true);
    if (K < 0) throw std::invalid_argument("threshold K must be >= 0");
    if (K > opts.max_threshold)
        throw std::runtime_error("K=" + std::to_string(K) + " exceeds the stationary-law cap (" +
                                 std::to_string(opts.max_threshold) + ")");

    const double rho1 = params.lambda / params.mu1;
    const double rho2 = params.lambda / params.mu2;

    std::vector<double> weights(StationaryLaw::state_count(K), 0.0);
    const double span = static_cast<double>(K) *
                        std::max(std::abs(std::log(rho1)), std::abs(std::log(rho2)));
    double sum = 0.0;
    if (span < 690.0) {
        double w_row = 1.0;  // rho1^n at m = 0
        for (int n = 0; n <= K; ++n) {
            double w = w_row;
            for (int m = 0; m <= K - n; ++m) {
                weights[StationaryLaw::index_of(n, m)] = w;
                sum += w;
                w *= rho2;
            }
            w_row *= rho1;
        }
    } else {
        const double l1 = std::log(rho1), l2 = std::log(rho2);
        double lmax = 0.0;
        for (int n = 0; n <= K; ++n)
            for (int m : {0, K - n})
                lmax = std::max(lmax, n * l1 + m * l2);
        for (int n = 0; n <= K; ++n)
            for (int m = 0; m <= K - n; ++m) {
                const double w = std::exp(n * l1 + m * l2 - lmax);
                weights[StationaryLaw::index_of(n, m)] = w;
                sum += w;
            }
    }
    for (auto& w : weights) w /= sum;
    return StationaryLaw::from_probabilities(K, rho1, rho2, std::move(weights));
}

/// Closed form for the conditional mean sojourn at node 1 of an arrival
/// observing k customers, in the orientation-stable ratio
/// form; equal rates reduce to (1 + k/2)/mu1.
///
/// 1 - q^(k+1) is evaluated through expm1/log1p: the two terms of the
/// closed form cancel almost completely as q -> 1 (both grow like
/// 1/(mu1-mu2)), so the power must stay accurate to full precision right
/// up to the equal-rates switch.
inline double t1_cond(double mu1, double mu2, int k) {
    detail::require_rates(mu1, mu2);
    if (k < 0) throw std::invalid_argument("k must be >= 0");
    if (detail::rates_equal(mu1, mu2))
        return (1.0 + static_cast<double>(k) / 2.0) / mu1;

    if (mu1 > mu2) {
        const double log_q = std::log1p((mu2 - mu1) / mu1);  // log(mu2/mu1) < 0
        const double one_minus_qk1 = -std::expm1(static_cast<double>(k + 1) * log_q);
        const double qk1 = 1.0 - one_minus_qk1;
        return 1.0 / (mu1 - mu2) - (static_cast<double>(k + 1) / mu1) * qk1 / one_minus_qk1;
    }
    // mu1 < mu2: fold with r = mu1/mu2 < 1 so nothing overflows.
    const double log_r = std::log1p((mu1 - mu2) / mu2);  // log(mu1/mu2) < 0
    const double one_minus_rk1 = -std::expm1(static_cast<double>(k + 1) * log_r);
    return 1.0 / (mu1 - mu2) + (static_cast<double>(k + 1) / mu1) / one_minus_rk1;
}

/// Conditional mean sojourn at node 2: sum over the position the arrival
/// lands in, T2(k) = sum_n T2(n+1, k-n) p1(n|k). Needs the table to cover
/// anti-diagonal k+1.
inline double t2_cond(const SojournTable& table, double mu1, double mu2, int k) {
    detail::require_rates(mu1, mu2);
    if (k < 0) throw std::invalid_argument("k must be >= 0");
    if (!(table.mu1() == mu1 && table.mu2() == mu2))
        throw std::invalid_argument("table was built for different service rates");
    if (table.n_max() < k + 1)
        throw std::out_of_range("sojourn table covers anti-diagonals up to " +
                                std::to_string(table.n_max()) + " but t2_cond(k=" +
                                std::to_string(k) + ") needs " + std::to_string(k + 1));
    const ConditionalDistribution p = conditional_dist(mu1, mu2, k, 1);
    double sum = 0.0;
    for (int n = 0; n <= k; ++n)
        sum += p.weights[static_cast<std::size_t>(n)] * table.t2(n + 1, k - n);
    return sum;
}

/// Total conditional mean sojourn T(k) = T1(k) + T2(k). With verify, the
/// direct expectation E[T(n+1, k-n)] over p1(.|k) is computed as well and
/// must agree to 1e-10.
inline double t_cond(const SojournTable& table, double mu1, double mu2, int k,
                     bool verify = false) {
    const double value = t1_cond(mu1, mu2, k) + t2_cond(table, mu1, mu2, k);
    if (verify) {
        const ConditionalDistribution p = conditional_dist(mu1, mu2, k, 1);
        double direct = 0.0;
        for (int n = 0; n <= k; ++n)
            direct += p.weights[static_cast<std::size_t>(n)] * table.t(n + 1, k - n);
        if (std::abs(direct - value) > 1e-10)
            throw std::logic_error("t_cond direct expectation disagrees with T1(k)+T2(k): " +
                                   format_double(std::abs(direct - value)));
    }
    return value;
}

enum class OrderComparisonKind { equal, strict, violation };

struct OrderComparison {
    int n = 0;
    double lhs = 0.0;  // P{Q(k+1)=n+1} P{Q(k)=n}
    double rhs = 0.0;  // P{Q(k+1)=n}   P{Q(k)=n+1}
    OrderComparisonKind kind = OrderComparisonKind::equal;
};

/// Likelihood-ratio comparison of Q*_node(k+1) against Q*_node(k).
struct OrderReport {
    int k = 0;
    int node = 1;
    bool holds = true;            // lhs >= rhs everywhere
    bool equal_below_k = true;    // equality (to 1e-12 relative) for n < k
    bool strict_at_k = false;     // rhs exactly 0, lhs > 0 at n = k
    std::vector<OrderComparison> comparisons;
    std::optional<int> first_violation;
};

/// Checks P{Q(k+1)=n+1} P{Q(k)=n} >= P{Q(k+1)=n} P{Q(k)=n+1} for n = 0..k.
/// The conditional laws make this an equality for n < k and strict at
/// n = k, where the right side vanishes.
inline OrderReport lr_order_check(double mu1, double mu2, int k, int node = 1) {
    if (k < 0) throw std::invalid_argument("k must be >= 0");
    const ConditionalDistribution lo = conditional_dist(mu1, mu2, k, node);
    const ConditionalDistribution hi = conditional_dist(mu1, mu2, k + 1, node);

    OrderReport rep;
    rep.k = k;
    rep.node = node;
    for (int n = 0; n <= k; ++n) {
        OrderComparison c;
        c.n = n;
        const double lo_n1 = (n + 1 <= k) ? lo.weights[static_cast<std::size_t>(n) + 1] : 0.0;
        c.lhs = hi.weights[static_cast<std::size_t>(n) + 1] * lo.weights[static_cast<std::size_t>(n)];
        c.rhs = hi.weights[static_cast<std::size_t>(n)] * lo_n1;
        const double tol = 1e-12 * std::max(c.lhs, c.rhs);
        if (c.rhs == 0.0 && c.lhs > 0.0)
            c.kind = OrderComparisonKind::strict;
        else if (std::abs(c.lhs - c.rhs) <= tol)
            c.kind = OrderComparisonKind::equal;
        else if (c.lhs > c.rhs)
            c.kind = OrderComparisonKind::strict;
        else
            c.kind = OrderComparisonKind::violation;
        if (c.kind == OrderComparisonKind::violation) {
            rep.holds = false;
            if (!rep.first_violation) rep.first_violation = n;
        }
        if (n < k && c.kind != OrderComparisonKind::equal) rep.equal_below_k = false;
        if (n == k) rep.strict_at_k = (c.rhs == 0.0 && c.lhs > 0.0);
        rep.comparisons.push_back(c);
    }
    return rep;
}

/// CSV profile of the conditional sojourn means: header k,t1,t2,t, one row
/// per k = 0..k_max. The table must cover anti-diagonal k_max + 1.
inline void write_cond_profile_csv(std::ostream& os, const SojournTable& table,
                                   double mu1, double mu2, int k_max) {
    os << "k,t1,t2,t\n";
    for (int k = 0; k <= k_max; ++k) {
        const double a = t1_cond(mu1, mu2, k);
        const double b = t2_cond(table, mu1, mu2, k);
        os << k << ',' << format_double(a) << ',' << format_double(b) << ','
           << format_double(a + b) << '\n';
    }
}

}  // namespace tandemq
