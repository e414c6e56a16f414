// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "tandemq/model.hpp"
#include "tandemq/partial_info.hpp"
#include "tandemq/rng.hpp"

namespace tandemq {

struct SimConfig {
    std::uint64_t seed = 1;
    std::uint64_t warmup_events = 100000;
    std::uint64_t measured_events = 1000000;
    std::uint32_t replications = 1;
    /// Worker threads for replications (merging is order-independent of
    /// scheduling, so results do not depend on this).
    std::uint32_t threads = 1;
};

/// Mergeable bivariate moments of (s1, s2) samples for one observed-k
/// level: Welford means and second moments plus the cross moment.
struct PerKStats {
    std::uint64_t count = 0;
    double mean1 = 0.0, mean2 = 0.0;
    double m2_1 = 0.0, m2_2 = 0.0, c12 = 0.0;

    void push(double s1, double s2) {
        ++count;
        const double d1 = s1 - mean1;
        const double d2 = s2 - mean2;
        mean1 += d1 / static_cast<double>(count);
        mean2 += d2 / static_cast<double>(count);
        const double d1b = s1 - mean1;
        const double d2b = s2 - mean2;
        m2_1 += d1 * d1b;
        m2_2 += d2 * d2b;
        c12 += d1 * d2b;
    }

    void merge(const PerKStats& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(count), nb = static_cast<double>(o.count);
        const double n = na + nb;
        const double d1 = o.mean1 - mean1;
        const double d2 = o.mean2 - mean2;
        m2_1 += o.m2_1 + d1 * d1 * na * nb / n;
        m2_2 += o.m2_2 + d2 * d2 * na * nb / n;
        c12 += o.c12 + d1 * d2 * na * nb / n;
        mean1 += d1 * nb / n;
        mean2 += d2 * nb / n;
        count += o.count;
    }

    double var1() const { return count >= 2 ? m2_1 / static_cast<double>(count - 1) : std::numeric_limits<double>::quiet_NaN(); }
    double var2() const { return count >= 2 ? m2_2 / static_cast<double>(count - 1) : std::numeric_limits<double>::quiet_NaN(); }
    double cov() const { return count >= 2 ? c12 / static_cast<double>(count - 1) : std::numeric_limits<double>::quiet_NaN(); }
    double se1() const { return count >= 2 ? std::sqrt(var1() / static_cast<double>(count)) : std::numeric_limits<double>::quiet_NaN(); }
    double se2() const { return count >= 2 ? std::sqrt(var2() / static_cast<double>(count)) : std::numeric_limits<double>::quiet_NaN(); }
};

/// Monte Carlo estimates from the event simulation under a K-strategy.
struct SimEstimate {
    ModelParams params;
    int threshold = 0;  // K
    SimConfig config;

    /// Time-weighted state probabilities on the triangle n+m <= K,
    /// anti-diagonal-major (StationaryLaw::index_of layout). Sums to 1.
    std::vector<double> occupancy;
    /// Sojourn moments per observed k, k = 0..K-1.
    std::vector<PerKStats> per_k;
    /// Count of arrivals (joiners and balkers) that observed each total
    /// k = 0..K during the measurement window.
    std::vector<std::uint64_t> arrivals_seen;
    double acceptance_fraction = std::numeric_limits<double>::quiet_NaN();
    double measured_time = 0.0;
    std::uint64_t measured_arrivals = 0;
    std::uint64_t joined = 0;
    /// Exit order equals arrival order in every replication (FIFO tandem).
    bool fifo_order_verified = false;

    double occupancy_at(int n, int m) const {
        return occupancy[StationaryLaw::index_of(n, m)];
    }

    /// Time-weighted law of the total occupancy Q*.
    std::vector<double> total_distribution() const {
        std::vector<double> out(static_cast<std::size_t>(threshold) + 1, 0.0);
        for (int k = 0; k <= threshold; ++k)
            for (int n = 0; n <= k; ++n) out[static_cast<std::size_t>(k)] += occupancy_at(n, k - n);
        return out;
    }

    /// Distribution of k seen by arrivals (PASTA comparison surface).
    std::vector<double> arrival_seen_distribution() const {
        std::vector<double> out(arrivals_seen.size(), 0.0);
        const double tot = static_cast<double>(measured_arrivals);
        if (tot > 0)
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] = static_cast<double>(arrivals_seen[i]) / tot;
        return out;
    }
};

namespace detail {

struct Customer {
    double arrive_t = 0.0;
    double transfer_t = 0.0;
    int k_seen = 0;
    std::uint64_t order = 0;
    bool measured = false;
};

struct RepResult {
    std::vector<double> state_time;          // durations per state
    std::vector<PerKStats> per_k;
    std::vector<std::uint64_t> arrivals_seen;
    std::uint64_t measured_arrivals = 0;
    std::uint64_t joined = 0;
    double measured_time = 0.0;
    bool fifo_ok = true;
};

/// One replication: exponential race among {arrival, node-1 completion,
/// node-2 completion}, FIFO at both nodes, arrivals blocked (balk) at
/// total occupancy K. Events 0..warmup-1 are discarded, the next
/// measured_events are measured, then the run drains until every customer
/// who joined inside the window has left so no sojourn is censored.
inline RepResult run_replication(const ModelParams& p, int K, const SimConfig& cfg,
                                 std::uint32_t rep) {
    Xoshiro256pp rng = replication_stream(cfg.seed, rep);
    RepResult out;
    out.state_time.assign(StationaryLaw::state_count(K), 0.0);
    out.per_k.assign(static_cast<std::size_t>(K), PerKStats{});
    out.arrivals_seen.assign(static_cast<std::size_t>(K) + 1, 0);

    std::deque<Customer> queue1, queue2;
    int q1 = 0, q2 = 0;
    double now = 0.0;
    std::uint64_t next_order = 0, next_exit = 0;
    std::uint64_t measured_in_flight = 0;

    const std::uint64_t window_begin = cfg.warmup_events;
    const std::uint64_t window_end = cfg.warmup_events + cfg.measured_events;

    for (std::uint64_t event = 0;; ++event) {
        const bool measuring = event >= window_begin && event < window_end;
        if (event >= window_end && measured_in_flight == 0) break;

        const double r1 = q1 > 0 ? p.mu1 : 0.0;
        const double r2 = q2 > 0 ? p.mu2 : 0.0;
        const double total = p.lambda + r1 + r2;
        const double dt = rng.exponential(total);
        if (measuring) {
            out.state_time[StationaryLaw::index_of(q1, q2)] += dt;
            out.measured_time += dt;
        }
        now += dt;

        const double pick = rng.uniform01() * total;
        if (pick <= p.lambda) {
            const int k = q1 + q2;
            if (measuring) {
                ++out.measured_arrivals;
                ++out.arrivals_seen[static_cast<std::size_t>(k)];
            }
            if (k < K) {
                if (measuring) ++out.joined;
                Customer c;
                c.arrive_t = now;
                c.k_seen = k;
                c.order = next_order++;  // joiners only, so exits must be 0,1,2,...
                c.measured = measuring;
                if (c.measured) ++measured_in_flight;
                queue1.push_back(c);
                ++q1;
            }
        } else if (pick <= p.lambda + r1) {
            Customer c = queue1.front();
            queue1.pop_front();
            c.transfer_t = now;
            queue2.push_back(c);
            --q1;
            ++q2;
        } else {
            Customer c = queue2.front();
            queue2.pop_front();
            --q2;
            if (c.order != next_exit) out.fifo_ok = false;
            next_exit = c.order + 1;
            if (c.measured) {
                --measured_in_flight;
                out.per_k[static_cast<std::size_t>(c.k_seen)].push(c.transfer_t - c.arrive_t,
                                                                   now - c.transfer_t);
            }
        }
    }
    return out;
}

}  // namespace detail

/// Seeded event simulation of the tandem network under the threshold-K
/// strategy. Identical (params, K, config) produce identical estimates.
/// Replications use disjoint RNG streams and merge associatively, so the
/// thread count never changes the result.
inline SimEstimate simulate(const ModelParams& params, int K, const SimConfig& cfg) {
    require_valid(params, /*allow_degenerate_costs=*/true);
    if (K < 0) throw std::invalid_argument("threshold K must be >= 0");
    if (cfg.measured_events < 1) throw std::invalid_argument("measured_events must be >= 1");
    if (cfg.replications < 1) throw std::invalid_argument("replications must be >= 1");

    std::vector<detail::RepResult> reps(cfg.replications);
    const std::uint32_t workers =
        std::min<std::uint32_t>(std::max<std::uint32_t>(cfg.threads, 1), cfg.replications);
    if (workers <= 1) {
        for (std::uint32_t r = 0; r < cfg.replications; ++r)
            reps[r] = detail::run_replication(params, K, cfg, r);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::uint32_t> next{0};
        for (std::uint32_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::uint32_t r = next.fetch_add(1); r < cfg.replications;
                     r = next.fetch_add(1))
                    reps[r] = detail::run_replication(params, K, cfg, r);
            });
        for (auto& t : pool) t.join();
    }

    SimEstimate est;
    est.params = params;
    est.threshold = K;
    est.config = cfg;
    est.occupancy.assign(StationaryLaw::state_count(K), 0.0);
    est.per_k.assign(static_cast<std::size_t>(K), PerKStats{});
    est.arrivals_seen.assign(static_cast<std::size_t>(K) + 1, 0);
    est.fifo_order_verified = true;

    for (const auto& r : reps) {
        for (std::size_t i = 0; i < est.occupancy.size(); ++i) est.occupancy[i] += r.state_time[i];
        for (std::size_t i = 0; i < est.per_k.size(); ++i) est.per_k[i].merge(r.per_k[i]);
        for (std::size_t i = 0; i < est.arrivals_seen.size(); ++i)
            est.arrivals_seen[i] += r.arrivals_seen[i];
        est.measured_arrivals += r.measured_arrivals;
        est.joined += r.joined;
        est.measured_time += r.measured_time;
        est.fifo_order_verified = est.fifo_order_verified && r.fifo_ok;
    }
    for (auto& w : est.occupancy) w /= est.measured_time;
    if (est.measured_arrivals > 0)
        est.acceptance_fraction =
            static_cast<double>(est.joined) / static_cast<double>(est.measured_arrivals);
    return est;
}

/// Empirical profit at one observed-k level. Rows for k never observed are
/// flagged absent rather than reported as zero.
struct ProfitEstimateRow {
    int k = 0;
    std::uint64_t count = 0;
    bool present = false;
    double profit_mean = std::numeric_limits<double>::quiet_NaN();
    double profit_se = std::numeric_limits<double>::quiet_NaN();
    double ci_lo = std::numeric_limits<double>::quiet_NaN();
    double ci_hi = std::numeric_limits<double>::quiet_NaN();
};

struct EmpiricalProfit {
    std::vector<ProfitEstimateRow> rows;  // k = 0..K-1
    double z = 1.959963984540054;         // 95% normal quantile
};

/// Plugs the per-k sojourn means into P(k) = R - c1 s1 - c2 s2. The two
/// sample means come from the same customers, so the variance of the
/// estimate keeps the cross term: var = (c1^2 v1 + c2^2 v2 + 2 c1 c2 cov)/n.
inline EmpiricalProfit empirical_profit(const ModelParams& params, const SimEstimate& est) {
    EmpiricalProfit out;
    for (int k = 0; k < est.threshold; ++k) {
        const PerKStats& s = est.per_k[static_cast<std::size_t>(k)];
        ProfitEstimateRow row;
        row.k = k;
        row.count = s.count;
        row.present = s.count >= 1;
        if (row.present)
            row.profit_mean = params.reward - params.cost1 * s.mean1 - params.cost2 * s.mean2;
        if (s.count >= 2) {
            const double var_mean = (params.cost1 * params.cost1 * s.var1() +
                                     params.cost2 * params.cost2 * s.var2() +
                                     2.0 * params.cost1 * params.cost2 * s.cov()) /
                                    static_cast<double>(s.count);
            row.profit_se = std::sqrt(std::max(var_mean, 0.0));
            row.ci_lo = row.profit_mean - out.z * row.profit_se;
            row.ci_hi = row.profit_mean + out.z * row.profit_se;
        }
        out.rows.push_back(row);
    }
    return out;
}

/// Simulates and maps the per-k sojourn means through the profit formula.
inline EmpiricalProfit estimate_profit_empirical(const ModelParams& params, int K,
                                                 const SimConfig& cfg) {
    return empirical_profit(params, simulate(params, K, cfg));
}

}  // namespace tandemq
