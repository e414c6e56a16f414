// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace tandemq {

/// Parameters of the two-node tandem network with strategic arrivals:
/// Poisson arrivals at rate lambda, exponential single servers at rates
/// mu1 and mu2, a reward R collected on service completion and waiting
/// costs c1, c2 paid per unit of sojourn time at the respective node.
struct ModelParams {
    double lambda = 1.0;
    double mu1 = 1.0;
    double mu2 = 1.0;
    double reward = 0.0;  // R
    double cost1 = 0.0;   // C1
    double cost2 = 0.0;   // C2
};

struct FieldCheck {
    std::string field;
    bool ok = true;
    std::string message;
};

/// Outcome of validate(): per-field diagnostics plus the derived economic
/// facts shared by every other module.
struct ValidationReport {
    std::vector<FieldCheck> checks;
    bool ok = false;
    /// P(0) = R - c1/mu1 - c2/mu2, the net profit of joining an empty
    /// system; NaN when the rate fields are invalid.
    double base_profit = std::numeric_limits<double>::quiet_NaN();
    /// True iff base_profit >= 0. A customer with profit exactly zero
    /// joins, so the boundary R = c1/mu1 + c2/mu2 is viable.
    bool viable = false;

    const FieldCheck* find(const std::string& field) const {
        for (const auto& c : checks)
            if (c.field == field) return &c;
        return nullptr;
    }
};

inline double base_profit(const ModelParams& p) {
    return p.reward - p.cost1 / p.mu1 - p.cost2 / p.mu2;
}

namespace detail {

inline bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }
inline bool nonnegative_finite(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace detail

/// Per-field validation. Rates must be strictly positive and finite,
/// economic constants finite and non-negative. Both costs being zero is
/// rejected unless allow_degenerate_costs is set (profit would be the
/// constant R and the balking problem trivial).
inline ValidationReport validate(const ModelParams& p, bool allow_degenerate_costs = false) {
    ValidationReport r;
    auto check_rate = [&](const char* name, double v) {
        if (detail::positive_finite(v))
            r.checks.push_back({name, true, {}});
        else
            r.checks.push_back({name, false, std::string(name) + " must be > 0 and finite"});
    };
    auto check_money = [&](const char* name, double v) {
        if (detail::nonnegative_finite(v))
            r.checks.push_back({name, true, {}});
        else
            r.checks.push_back({name, false, std::string(name) + " must be >= 0 and finite"});
    };
    check_rate("lambda", p.lambda);
    check_rate("mu1", p.mu1);
    check_rate("mu2", p.mu2);
    check_money("R", p.reward);
    check_money("c1", p.cost1);
    check_money("c2", p.cost2);
    if (!allow_degenerate_costs && p.cost1 == 0.0 && p.cost2 == 0.0) {
        r.checks.push_back({"costs", false, "c1 and c2 are both zero (degenerate economics); pass the explicit flag to allow"});
    }
    r.ok = true;
    for (const auto& c : r.checks) r.ok = r.ok && c.ok;

    const bool rates_ok = detail::positive_finite(p.mu1) && detail::positive_finite(p.mu2);
    const bool money_ok = detail::nonnegative_finite(p.reward) &&
                          detail::nonnegative_finite(p.cost1) &&
                          detail::nonnegative_finite(p.cost2);
    if (rates_ok && money_ok) {
        r.base_profit = base_profit(p);
        r.viable = r.base_profit >= 0.0;
    }
    return r;
}

/// True iff joining an empty system is worthwhile: R - c1/mu1 - c2/mu2 >= 0.
/// Requires valid parameters.
inline bool viability(const ModelParams& p) {
    return base_profit(p) >= 0.0;
}

/// Throws std::invalid_argument naming the first failing field.
inline void require_valid(const ModelParams& p, bool allow_degenerate_costs = false) {
    const ValidationReport r = validate(p, allow_degenerate_costs);
    if (r.ok) return;
    for (const auto& c : r.checks)
        if (!c.ok) throw std::invalid_argument(c.message);
}

}  // namespace tandemq
