// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tandemq/csv.hpp"
#include "tandemq/log.hpp"
#include "tandemq/model.hpp"
#include "tandemq/partial_info.hpp"
#include "tandemq/sojourn.hpp"

namespace tandemq {

struct ProfitRow {
    int k = 0;
    double t1 = 0.0;
    double t2 = 0.0;
    double profit = 0.0;  // R - c1*t1 - c2*t2 exactly as computed
};

struct ProfitProfile {
    std::vector<ProfitRow> rows;
};

/// Sufficient conditions under which P(k) is non-increasing.
struct ConditionReport {
    bool mu1_gt_mu2 = false;
    bool c1_ge_c2 = false;
    bool any = false;
};

inline ConditionReport monotone_conditions(const ModelParams& p) {
    ConditionReport r;
    r.mu1_gt_mu2 = p.mu1 > p.mu2;
    r.c1_ge_c2 = p.cost1 >= p.cost2;
    r.any = r.mu1_gt_mu2 || r.c1_ge_c2;
    return r;
}

/// Expected net profit of joining when k customers are observed:
/// P(k) = R - c1 T1(k) - c2 T2(k). The table must cover anti-diagonal k+1.
inline double profit(const ModelParams& params, const SojournTable& table, int k) {
    return params.reward - params.cost1 * t1_cond(params.mu1, params.mu2, k) -
           params.cost2 * t2_cond(table, params.mu1, params.mu2, k);
}

enum class ThresholdOutcome { finite, infinite_certified, unresolved_at_cap };

struct ThresholdResult {
    ThresholdOutcome outcome = ThresholdOutcome::unresolved_at_cap;
    std::optional<int> threshold;  // set iff outcome == finite
    int cap = 0;                   // scan cap in force
    ConditionReport conditions;
    ProfitProfile profile;
    std::string note;  // diagnostics: which branch decided, truncations
};

inline const char* outcome_name(ThresholdOutcome o) {
    switch (o) {
        case ThresholdOutcome::finite: return "finite";
        case ThresholdOutcome::infinite_certified: return "infinite";
        case ThresholdOutcome::unresolved_at_cap: return "unresolved";
    }
    return "unresolved";
}

struct SolveOptions {
    /// Budget forwarded to the internal sojourn table; bounds how far a
    /// scan that keeps needing T2 values can go.
    int table_budget = 1500;
    bool allow_degenerate_costs = false;
};

namespace detail {

/// Grows a table geometrically so a scan over k pays O(final^3) once
/// instead of rebuilding per step.
class GrowingTable {
  public:
    GrowingTable(double mu1, double mu2, int budget) : mu1_(mu1), mu2_(mu2), budget_(budget) {}

    /// Ensures coverage of anti-diagonal `diag`; returns false when the
    /// budget forbids it.
    bool ensure(int diag) {
        if (diag > budget_) return false;
        if (!table_ || table_->n_max() < diag) {
            long long size = table_ ? table_->n_max() : 64;
            while (size < diag) size *= 2;
            size = std::min<long long>(size, budget_);
            table_.emplace(build_table(mu1_, mu2_, static_cast<int>(size),
                                       TableOptions{budget_, false}));
        }
        return true;
    }

    const SojournTable& get() const { return *table_; }
    bool has() const { return table_.has_value(); }

  private:
    double mu1_, mu2_;
    int budget_;
    std::optional<SojournTable> table_;
};

}  // namespace detail

/// Scans P(k) for the equilibrium threshold K = least k with P(k) < 0
/// (a customer indifferent at P(k) = 0 joins).
///
/// Termination:
///  - c2 > 0: every customer's departure follows k+1 sequential node-2
///    services, so T(k) >= (k+1)/mu2 and, when c1 >= c2, P(k) must turn
///    negative by k_bound = ceil(R mu2 / c2) + 1. The scan runs to
///    min(cap, k_bound); absence of a sign change past k_bound with
///    c1 >= c2 is a logic error, with c1 < c2 it degrades to
///    unresolved_at_cap with a diagnostic.
///  - c2 == 0 and mu1 > mu2: P(k) = R - c1 T1(k) is non-increasing with
///    closed-form limit R - c1/(mu1 - mu2); a non-negative limit certifies
///    K = infinity, otherwise the scan meets the sign change.
///  - otherwise the scan runs to cap and reports unresolved_at_cap if no
///    sign change is found.
inline ThresholdResult find_threshold(const ModelParams& params, int cap = 10000,
                                      const SolveOptions& opts = {}) {
    require_valid(params, opts.allow_degenerate_costs);
    if (cap < 1) throw std::invalid_argument("cap must be >= 1");

    ThresholdResult res;
    res.cap = cap;
    res.conditions = monotone_conditions(params);

    const double mu1 = params.mu1, mu2 = params.mu2;
    const bool needs_t2 = params.cost2 > 0.0;

    int scan_end = cap;
    std::optional<int> k_bound;     // min(true certified bound, cap)
    bool bound_within_cap = false;  // true when the scan can cover the whole bound
    if (needs_t2) {
        const double kb = std::ceil(params.reward * mu2 / params.cost2) + 1.0;
        bound_within_cap = kb <= static_cast<double>(cap);
        k_bound = bound_within_cap ? static_cast<int>(kb) : cap;
        scan_end = *k_bound;
    }

    if (!needs_t2 && mu1 > mu2) {
        const double limit = params.reward - params.cost1 / (mu1 - mu2);
        if (limit >= 0.0) {
            res.outcome = ThresholdOutcome::infinite_certified;
            res.note = "c2 = 0 and mu1 > mu2: P(k) is non-increasing with limit R - c1/(mu1-mu2) = " +
                       format_double(limit) + " >= 0";
            // Short illustrative profile; the t2 column is genuine even
            // though it carries zero cost weight.
            const int prefix = std::min(cap, 32);
            detail::GrowingTable gt(mu1, mu2, opts.table_budget);
            if (gt.ensure(prefix + 1)) {
                for (int k = 0; k <= prefix; ++k) {
                    ProfitRow row{k, t1_cond(mu1, mu2, k), t2_cond(gt.get(), mu1, mu2, k), 0.0};
                    row.profit = params.reward - params.cost1 * row.t1 - params.cost2 * row.t2;
                    res.profile.rows.push_back(row);
                }
            }
            return res;
        }
        // Negative limit: the sign change exists; fall through to the scan.
    }

    detail::GrowingTable gt(mu1, mu2, opts.table_budget);
    bool profile_truncated = false;
    int last_scanned = -1;
    for (int k = 0; k <= scan_end; ++k) {
        const bool covered = gt.ensure(k + 1);
        if (!covered && needs_t2) {
            res.outcome = ThresholdOutcome::unresolved_at_cap;
            res.note = "scan stopped at k=" + std::to_string(k - 1) +
                       ": sojourn table budget (" + std::to_string(opts.table_budget) +
                       " anti-diagonals) reached before min(cap, k_bound)";
            log_info(res.note);
            return res;
        }
        const double t1 = t1_cond(mu1, mu2, k);
        const double t2 = covered ? t2_cond(gt.get(), mu1, mu2, k)
                                  : std::numeric_limits<double>::quiet_NaN();
        const double p = params.reward - params.cost1 * t1 -
                         (needs_t2 ? params.cost2 * t2 : 0.0);
        last_scanned = k;
        if (covered)
            res.profile.rows.push_back(ProfitRow{k, t1, t2, p});
        else
            profile_truncated = true;  // c2 == 0 only: profit is exact, t2 column unavailable
        if (p < 0.0) {
            res.outcome = ThresholdOutcome::finite;
            res.threshold = k;
            if (profile_truncated)
                res.note = "profile truncated at the sojourn-table budget (" +
                           std::to_string(opts.table_budget) + " anti-diagonals)";
            return res;
        }
    }

    if (needs_t2 && bound_within_cap) {
        if (params.cost1 >= params.cost2)
            throw std::logic_error(
                "certified bound violated: c2 > 0 and c1 >= c2 force P(k) < 0 by k_bound=" +
                std::to_string(*k_bound) + " yet the scan found none");
        res.outcome = ThresholdOutcome::unresolved_at_cap;
        res.note = "P(k) never went negative up to the certified bound k_bound=" +
                   std::to_string(*k_bound) +
                   "; c1 < c2, so the bound does not certify a finite threshold";
        return res;
    }

    res.outcome = ThresholdOutcome::unresolved_at_cap;
    res.note = "no sign change found for k <= " + std::to_string(last_scanned);
    if (profile_truncated)
        res.note += "; profile truncated at the sojourn-table budget";
    return res;
}

/// Profile CSV: header k,t1,t2,profit.
inline void write_profile_csv(std::ostream& os, const ProfitProfile& profile) {
    os << "k,t1,t2,profit\n";
    for (const auto& row : profile.rows)
        os << row.k << ',' << format_double(row.t1) << ',' << format_double(row.t2) << ','
           << format_double(row.profit) << '\n';
}

}  // namespace tandemq
