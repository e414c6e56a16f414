// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tandemq/model.hpp"
#include "tandemq/partial_info.hpp"
#include "tandemq/sojourn.hpp"
#include "tandemq/steady_state.hpp"

namespace tandemq {

struct CheckResult {
    std::string name;
    bool pass = false;
    double max_err = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct SuiteOptions {
    bool quick = false;
    /// Deliberately corrupts one solver probability so the suite must
    /// fail; harness sanity only.
    bool inject_fault = false;
};

/// Cross-oracle consistency suite: the closed forms against the
/// truncated-generator solver, the two table fill paths against each
/// other, the conditional-sojourn closed form against the direct expectation, and
/// the likelihood-ratio ordering pattern.
inline std::vector<CheckResult> run_validation_suite(const SuiteOptions& opts = {}) {
    std::vector<CheckResult> results;
    const std::vector<double> lambdas{0.5, 1.0, 2.0};
    const std::vector<double> rates{0.5, 1.0, 2.0};

    {
        CheckResult c{"product_form_vs_solver", true, 0.0, 1e-10, ""};
        const int k_max = opts.quick ? 10 : 30;
        bool fault_pending = opts.inject_fault;
        for (double lambda : lambdas) {
            for (double mu1 : rates) {
                for (double mu2 : rates) {
                    ModelParams p{lambda, mu1, mu2, 1.0, 1.0, 1.0};
                    for (int K = 0; K <= k_max; ++K) {
                        const StationaryLaw form = stationary_law(p, K);
                        StationaryLaw solved = solve_steady_state(p, K);
                        std::vector<double> probs(solved.states());
                        for (int k = 0; k <= K; ++k)
                            for (int n = 0; n <= k; ++n)
                                probs[StationaryLaw::index_of(n, k - n)] = solved(n, k - n);
                        if (fault_pending && K >= 1) {
                            probs[0] = -probs[0];
                            fault_pending = false;
                        }
                        for (int k = 0; k <= K; ++k)
                            for (int n = 0; n <= k; ++n) {
                                const double err =
                                    std::abs(probs[StationaryLaw::index_of(n, k - n)] -
                                             form(n, k - n));
                                if (err > c.max_err) {
                                    c.max_err = err;
                                    c.detail = "lambda=" + format_double(lambda) +
                                               " mu1=" + format_double(mu1) +
                                               " mu2=" + format_double(mu2) +
                                               " K=" + std::to_string(K);
                                }
                            }
                    }
                }
            }
        }
        c.pass = c.max_err <= c.tolerance;
        results.push_back(c);
    }

    {
        CheckResult c{"table_dual_path", true, 0.0, 1e-10, ""};
        const int n_max = opts.quick ? 20 : 40;
        for (double ratio : {0.1, 0.5, 1.0, 2.0, 10.0}) {
            const SojournTable tab = [&] {
                TableOptions topt;
                topt.verify = true;
                return build_table(ratio, 1.0, n_max, topt);
            }();
            const double err = tab.dual_path_max_diff().value();
            if (err > c.max_err) {
                c.max_err = err;
                c.detail = "mu1/mu2=" + format_double(ratio);
            }
        }
        c.pass = c.max_err <= c.tolerance;
        results.push_back(c);
    }

    {
        CheckResult c{"t1_closed_form_vs_direct_sum", true, 0.0, 1e-11, ""};
        const int k_max = opts.quick ? 30 : 60;
        for (double mu1 : rates) {
            for (double mu2 : rates) {
                for (int k = 0; k <= k_max; ++k) {
                    const ConditionalDistribution p = conditional_dist(mu1, mu2, k, 1);
                    double direct = 0.0, comp = 0.0;  // Kahan to keep the oracle sharp
                    for (int n = 0; n <= k; ++n) {
                        const double term =
                            (static_cast<double>(n + 1) / mu1) * p.weights[static_cast<std::size_t>(n)] - comp;
                        const double t = direct + term;
                        comp = (t - direct) - term;
                        direct = t;
                    }
                    const double err = std::abs(direct - t1_cond(mu1, mu2, k));
                    if (err > c.max_err) {
                        c.max_err = err;
                        c.detail = "mu1=" + format_double(mu1) + " mu2=" + format_double(mu2) +
                                   " k=" + std::to_string(k);
                    }
                }
            }
        }
        c.pass = c.max_err <= c.tolerance;
        results.push_back(c);
    }

    {
        CheckResult c{"likelihood_ratio_ordering", true, 0.0, 1e-12, ""};
        const int k_max = opts.quick ? 10 : 40;
        bool ok = true;
        for (double mu1 : rates) {
            for (double mu2 : rates) {
                for (int node : {1, 2}) {
                    for (int k = 0; k <= k_max; ++k) {
                        const OrderReport rep = lr_order_check(mu1, mu2, k, node);
                        for (const auto& cmp : rep.comparisons) {
                            const double rel = std::max(cmp.lhs, cmp.rhs) > 0.0
                                                   ? std::abs(cmp.lhs - cmp.rhs) /
                                                         std::max(cmp.lhs, cmp.rhs)
                                                   : 0.0;
                            if (cmp.n < k && rel > c.max_err) {
                                c.max_err = rel;
                                c.detail = "mu1=" + format_double(mu1) +
                                           " mu2=" + format_double(mu2) +
                                           " k=" + std::to_string(k) + " n=" + std::to_string(cmp.n);
                            }
                        }
                        if (!rep.holds || !rep.equal_below_k || !rep.strict_at_k) {
                            ok = false;
                            c.detail = "pattern broken at mu1=" + format_double(mu1) +
                                       " mu2=" + format_double(mu2) + " k=" + std::to_string(k) +
                                       " node=" + std::to_string(node);
                        }
                    }
                }
            }
        }
        c.pass = ok && c.max_err <= c.tolerance;
        results.push_back(c);
    }

    return results;
}

}  // namespace tandemq
