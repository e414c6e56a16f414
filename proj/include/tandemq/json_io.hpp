// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "tandemq/equilibrium.hpp"
#include "tandemq/model.hpp"
#include "tandemq/partial_info.hpp"
#include "tandemq/simulate.hpp"

namespace tandemq {

inline nlohmann::json params_to_json(const ModelParams& p) {
    return nlohmann::json{{"lambda", p.lambda}, {"mu1", p.mu1},   {"mu2", p.mu2},
                          {"R", p.reward},      {"c1", p.cost1},  {"c2", p.cost2}};
}

inline ModelParams params_from_json(const nlohmann::json& j) {
    ModelParams p;
    if (j.contains("lambda")) p.lambda = j.at("lambda").get<double>();
    if (j.contains("mu1")) p.mu1 = j.at("mu1").get<double>();
    if (j.contains("mu2")) p.mu2 = j.at("mu2").get<double>();
    if (j.contains("R")) p.reward = j.at("R").get<double>();
    if (j.contains("c1")) p.cost1 = j.at("c1").get<double>();
    if (j.contains("c2")) p.cost2 = j.at("c2").get<double>();
    return p;
}

/// Threshold result document: {"outcome", "K", "cap", "monotone", "profile"}.
inline nlohmann::json threshold_to_json(const ThresholdResult& res) {
    nlohmann::json profile = nlohmann::json::array();
    for (const auto& row : res.profile.rows)
        profile.push_back({{"k", row.k}, {"t1", row.t1}, {"t2", row.t2}, {"profit", row.profit}});
    nlohmann::json j{{"outcome", outcome_name(res.outcome)},
                     {"cap", res.cap},
                     {"monotone", res.conditions.any},
                     {"profile", std::move(profile)}};
    if (res.threshold)
        j["K"] = *res.threshold;
    else
        j["K"] = nullptr;
    return j;
}

namespace detail {

inline nlohmann::json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace detail

/// Simulation report: seed and window echoed, occupancy as {n,m,p} rows,
/// per-k sojourn moments with standard errors (null below two samples).
inline nlohmann::json estimate_to_json(const SimEstimate& est) {
    nlohmann::json occ = nlohmann::json::array();
    for (int k = 0; k <= est.threshold; ++k)
        for (int n = 0; n <= k; ++n)
            occ.push_back({{"n", n}, {"m", k - n}, {"p", est.occupancy_at(n, k - n)}});

    nlohmann::json per_k = nlohmann::json::array();
    for (int k = 0; k < est.threshold; ++k) {
        const PerKStats& s = est.per_k[static_cast<std::size_t>(k)];
        nlohmann::json row{{"k", k}, {"count", s.count}};
        row["t1_mean"] = s.count >= 1 ? nlohmann::json(s.mean1) : nlohmann::json(nullptr);
        row["t2_mean"] = s.count >= 1 ? nlohmann::json(s.mean2) : nlohmann::json(nullptr);
        row["t1_se"] = s.count >= 2 ? detail::finite_or_null(s.se1()) : nlohmann::json(nullptr);
        row["t2_se"] = s.count >= 2 ? detail::finite_or_null(s.se2()) : nlohmann::json(nullptr);
        per_k.push_back(std::move(row));
    }

    return nlohmann::json{{"seed", est.config.seed},
                          {"warmup_events", est.config.warmup_events},
                          {"measured_events", est.config.measured_events},
                          {"replications", est.config.replications},
                          {"K", est.threshold},
                          {"params", params_to_json(est.params)},
                          {"acceptance_fraction", est.acceptance_fraction},
                          {"measured_time", est.measured_time},
                          {"occupancy", std::move(occ)},
                          {"per_k", std::move(per_k)}};
}

inline nlohmann::json empirical_profit_to_json(const EmpiricalProfit& ep) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : ep.rows) {
        nlohmann::json row{{"k", r.k}, {"count", r.count}, {"present", r.present}};
        row["profit_mean"] = r.present ? detail::finite_or_null(r.profit_mean) : nlohmann::json(nullptr);
        row["profit_se"] = detail::finite_or_null(r.profit_se);
        row["ci_lo"] = detail::finite_or_null(r.ci_lo);
        row["ci_hi"] = detail::finite_or_null(r.ci_hi);
        rows.push_back(std::move(row));
    }
    return nlohmann::json{{"z", ep.z}, {"per_k", std::move(rows)}};
}

}  // namespace tandemq
