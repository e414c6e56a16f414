// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: runs every release criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits non-zero if any
// criterion fails. The path to the tandemq CLI binary is expected as
// argv[1] (ctest wires it); without it the determinism criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <tandemq/json_io.hpp>
#include <tandemq/tandemq.hpp>

namespace fs = std::filesystem;
using namespace tandemq;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
};

const std::vector<double> kRates{0.5, 1.0, 2.0};
const std::vector<double> kLambdas{0.5, 1.0, 2.0};

std::string fmt(double v) { return format_double(v); }

// 1. Product-form agreement: solver vs closed-form law, K <= 30, rate grid.
Outcome criterion_product_form() {
    Outcome out;
    Timer timer;
    double max_err = 0.0;
    for (double lambda : kLambdas)
        for (double mu1 : kRates)
            for (double mu2 : kRates) {
                const ModelParams p{lambda, mu1, mu2, 1, 1, 1};
                for (int K = 0; K <= 30; ++K) {
                    const StationaryLaw got = solve_steady_state(p, K);
                    const StationaryLaw want = stationary_law(p, K);
                    for (int k = 0; k <= K; ++k)
                        for (int n = 0; n <= k; ++n)
                            max_err = std::max(max_err, std::abs(got(n, k - n) - want(n, k - n)));
                }
            }
    const double elapsed = timer.seconds();
    if (max_err > 1e-10) out.fail("max state error " + fmt(max_err) + " > 1e-10");
    if (elapsed >= 30.0) out.fail("runtime " + fmt(elapsed) + "s >= 30s");
    out.detail += "max_err=" + fmt(max_err) + " runtime=" + fmt(elapsed) + "s";
    return out;
}

// 2. Recursion consistency: dual-path table fill on n_max = 40.
Outcome criterion_dual_path() {
    Outcome out;
    Timer timer;
    double max_err = 0.0;
    TableOptions opts;
    opts.verify = true;
    for (double ratio : {0.1, 0.5, 1.0, 2.0, 10.0}) {
        const SojournTable tab = build_table(ratio, 1.0, 40, opts);
        max_err = std::max(max_err, tab.dual_path_max_diff().value());
    }
    const double elapsed = timer.seconds();
    if (max_err > 1e-10) out.fail("max fill disagreement " + fmt(max_err) + " > 1e-10");
    if (elapsed >= 5.0) out.fail("runtime " + fmt(elapsed) + "s >= 5s");
    out.detail += "max_err=" + fmt(max_err) + " runtime=" + fmt(elapsed) + "s";
    return out;
}

// 3. Closed-form T1(k) vs the direct weighted sum; equal-rates continuity.
Outcome criterion_t1_closed_form() {
    Outcome out;
    double max_err = 0.0;
    for (double mu1 : kRates)
        for (double mu2 : kRates)
            for (int k = 0; k <= 60; ++k) {
                const ConditionalDistribution p = conditional_dist(mu1, mu2, k, 1);
                double direct = 0.0, comp = 0.0;
                for (int n = 0; n <= k; ++n) {
                    const double term =
                        (static_cast<double>(n + 1) / mu1) * p.weights[static_cast<std::size_t>(n)] -
                        comp;
                    const double t = direct + term;
                    comp = (t - direct) - term;
                    direct = t;
                }
                max_err = std::max(max_err, std::abs(direct - t1_cond(mu1, mu2, k)));
            }
    if (max_err > 1e-11) out.fail("closed form vs direct sum " + fmt(max_err) + " > 1e-11");

    double max_rel = 0.0;
    for (int k : {0, 1, 5, 20, 60})
        for (double mu2 : {1.0 - 1e-7, 1.0 + 1e-7}) {
            const double equal = t1_cond(1.0, 1.0, k);
            max_rel = std::max(max_rel, std::abs(t1_cond(1.0, mu2, k) - equal) / equal);
        }
    if (max_rel > 1e-5) out.fail("branch continuity " + fmt(max_rel) + " > 1e-5 relative");
    out.detail += "max_err=" + fmt(max_err) + " continuity=" + fmt(max_rel);
    return out;
}

// 4. K-independence of the conditional laws, 1e-12.
Outcome criterion_k_independence() {
    Outcome out;
    double max_err = 0.0;
    for (double lambda : kLambdas)
        for (double mu1 : kRates)
            for (double mu2 : kRates)
                for (int k : {0, 1, 2, 4, 8})
                    for (int K = k; K <= k + 10; ++K) {
                        const StationaryLaw law =
                            stationary_law(ModelParams{lambda, mu1, mu2, 1, 1, 1}, K);
                        const std::vector<double> got = law.conditional_given_total(k, 1);
                        const ConditionalDistribution want = conditional_dist(mu1, mu2, k, 1);
                        for (int n = 0; n <= k; ++n)
                            max_err = std::max(max_err,
                                               std::abs(got[static_cast<std::size_t>(n)] -
                                                        want[static_cast<std::size_t>(n)]));
                    }
    if (max_err > 1e-12) out.fail("conditional law mismatch " + fmt(max_err) + " > 1e-12");
    out.detail += "max_err=" + fmt(max_err);
    return out;
}

// 5. Monotonicity suite across the table and the conditional profiles.
Outcome criterion_monotonicity() {
    Outcome out;
    double delta_err = 0.0;
    const std::vector<std::pair<double, double>> grid = {
        {0.5, 0.5}, {0.5, 1.0}, {0.5, 2.0}, {1.0, 0.5}, {1.0, 1.0},
        {1.0, 2.0}, {2.0, 0.5}, {2.0, 1.0}, {2.0, 2.0}, {0.1, 1.0}};
    for (const auto& [mu1, mu2] : grid) {
        const SojournTable tab = build_table(mu1, mu2, 41);
        const MonotonicityReport rep = check_monotonicity(tab);
        if (!rep.t1_in_n.nondecreasing)
            out.fail("T1 not monotone in n at mu1=" + fmt(mu1) + " mu2=" + fmt(mu2));
        if (!rep.t_antidiagonal.nondecreasing)
            out.fail("T anti-diagonal violated at mu1=" + fmt(mu1) + " mu2=" + fmt(mu2));
        if (rep.t2_in_n.nondecreasing != (mu1 >= mu2))
            out.fail("T2-in-n iff broken at mu1=" + fmt(mu1) + " mu2=" + fmt(mu2));
        if (mu1 == 0.1 && mu2 == 1.0 && !rep.t2_in_n.counterexample.has_value())
            out.fail("no automatic counterexample at mu1=0.1");

        for (int m = 0; m <= 40; ++m)
            delta_err = std::max(delta_err, std::abs(delta1_t2_row0(mu1, mu2, m) -
                                                     (tab.t2(1, m) - tab.t2(0, m))));

        double p1 = t1_cond(mu1, mu2, 0);
        double pt = t_cond(tab, mu1, mu2, 0);
        double p2 = t2_cond(tab, mu1, mu2, 0);
        for (int k = 1; k <= 40; ++k) {
            const double c1 = t1_cond(mu1, mu2, k);
            const double ct = t_cond(tab, mu1, mu2, k);
            const double c2 = t2_cond(tab, mu1, mu2, k);
            if (c1 < p1 - 1e-12) out.fail("T1(k) decreased at k=" + std::to_string(k));
            if (ct < pt - 1e-12) out.fail("T(k) decreased at k=" + std::to_string(k));
            if (mu1 >= mu2 && c2 < p2 - 1e-12)
                out.fail("T2(k) decreased under mu1 >= mu2 at k=" + std::to_string(k));
            p1 = c1;
            pt = ct;
            p2 = c2;
        }
    }
    if (delta_err > 1e-12) out.fail("delta closed form error " + fmt(delta_err) + " > 1e-12");
    out.detail += "delta_err=" + fmt(delta_err);
    return out;
}

// 6. Likelihood-ratio ordering pattern, k <= 40, both nodes.
Outcome criterion_lr_ordering() {
    Outcome out;
    double max_rel = 0.0;
    for (double mu1 : kRates)
        for (double mu2 : kRates)
            for (int node : {1, 2})
                for (int k = 0; k <= 40; ++k) {
                    const OrderReport rep = lr_order_check(mu1, mu2, k, node);
                    if (!rep.holds || !rep.equal_below_k || !rep.strict_at_k) {
                        out.fail("pattern broken at mu1=" + fmt(mu1) + " mu2=" + fmt(mu2) +
                                 " k=" + std::to_string(k) + " node=" + std::to_string(node));
                        continue;
                    }
                    for (const auto& cmp : rep.comparisons)
                        if (cmp.n < k) {
                            const double den = std::max(cmp.lhs, cmp.rhs);
                            if (den > 0.0)
                                max_rel = std::max(max_rel, std::abs(cmp.lhs - cmp.rhs) / den);
                        }
                }
    if (max_rel > 1e-12) out.fail("equality slack " + fmt(max_rel) + " > 1e-12 relative");
    out.detail += "max_rel=" + fmt(max_rel);
    return out;
}

// 7. Worked equilibrium example with lambda-invariance and joint scaling.
Outcome criterion_worked_example() {
    Outcome out;
    const double want[] = {2.0, 1.0, 0.0, -1.0};
    auto check_result = [&](const ModelParams& p, double scale, const std::string& tag) {
        const ThresholdResult res = find_threshold(p);
        if (res.outcome != ThresholdOutcome::finite || res.threshold != 3) {
            out.fail(tag + ": expected K=3");
            return;
        }
        if (res.profile.rows.size() != 4) {
            out.fail(tag + ": profile size " + std::to_string(res.profile.rows.size()));
            return;
        }
        for (int k = 0; k < 4; ++k) {
            const double got = res.profile.rows[static_cast<std::size_t>(k)].profit / scale;
            if (std::abs(got - want[k]) > 1e-10)
                out.fail(tag + ": P(" + std::to_string(k) + ") = " + fmt(got));
        }
    };
    check_result(ModelParams{1, 1, 1, 4, 1, 1}, 1.0, "base");
    check_result(ModelParams{0.25, 1, 1, 4, 1, 1}, 1.0, "lambda=0.25");
    check_result(ModelParams{4, 1, 1, 4, 1, 1}, 1.0, "lambda=4");
    for (double c : {0.1, 10.0})
        check_result(ModelParams{1, 1, 1, 4 * c, c, c}, c, "scale c=" + fmt(c));
    out.detail += "K=3, P=(2,1,0,-1)";
    return out;
}

// 8. Certified-infinite branch with a positive profit tail.
Outcome criterion_infinite_branch() {
    Outcome out;
    const ModelParams p{1, 2, 1, 2, 1, 0};
    const ThresholdResult res = find_threshold(p);
    if (res.outcome != ThresholdOutcome::infinite_certified)
        out.fail(std::string("outcome ") + outcome_name(res.outcome));
    const SojournTable tab = build_table(2.0, 1.0, 202);
    double min_profit = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 200; ++k) min_profit = std::min(min_profit, profit(p, tab, k));
    if (!(min_profit > 0.0)) out.fail("min P(k) over k<=200 is " + fmt(min_profit));
    out.detail += "min P(k<=200)=" + fmt(min_profit);
    return out;
}

// 9. Simulation cross-check at 1e6 measured events.
Outcome criterion_simulation() {
    Outcome out;
    Timer timer;
    const ModelParams p{1, 1, 1, 4, 1, 1};
    SimConfig cfg;
    cfg.seed = 20250808;
    cfg.warmup_events = 100000;
    cfg.measured_events = 1000000;
    const SimEstimate est = simulate(p, 4, cfg);

    const StationaryLaw exact = stationary_law(p, 4);
    double tv = 0.0;
    for (int k = 0; k <= 4; ++k)
        for (int n = 0; n <= k; ++n)
            tv += std::abs(est.occupancy_at(n, k - n) - exact(n, k - n));
    tv *= 0.5;
    if (!(tv < 0.01)) out.fail("occupancy TV " + fmt(tv) + " >= 0.01");

    const SojournTable tab = build_table(1.0, 1.0, 6);
    for (int k = 0; k < 4; ++k) {
        const PerKStats& s = est.per_k[static_cast<std::size_t>(k)];
        if (s.count < 1000) {
            out.fail("k=" + std::to_string(k) + " has too few samples");
            continue;
        }
        const double d1 = std::abs(s.mean1 - t1_cond(1.0, 1.0, k));
        const double d2 = std::abs(s.mean2 - t2_cond(tab, 1.0, 1.0, k));
        if (d1 > 4.0 * s.se1())
            out.fail("node-1 mean off at k=" + std::to_string(k) + " by " + fmt(d1 / s.se1()) + " SE");
        if (d2 > 4.0 * s.se2())
            out.fail("node-2 mean off at k=" + std::to_string(k) + " by " + fmt(d2 / s.se2()) + " SE");
    }

    const EmpiricalProfit ep = empirical_profit(p, est);
    if (!(ep.rows[2].ci_lo <= 0.0 && ep.rows[2].ci_hi >= 0.0))
        out.fail("P(2) interval [" + fmt(ep.rows[2].ci_lo) + ", " + fmt(ep.rows[2].ci_hi) +
                 "] misses 0");

    const double elapsed = timer.seconds();
    if (elapsed >= 120.0) out.fail("runtime " + fmt(elapsed) + "s >= 120s");
    out.detail += "tv=" + fmt(tv) + " P2_ci=[" + fmt(ep.rows[2].ci_lo) + "," +
                  fmt(ep.rows[2].ci_hi) + "] runtime=" + fmt(elapsed) + "s";
    return out;
}

// 10. Determinism through the CLI plus the default validation grid.
Outcome criterion_determinism(const char* cli) {
    Outcome out;
    if (cli == nullptr) {
        out.fail("tandemq CLI path not provided as argv[1]");
        return out;
    }
    const fs::path dir = fs::temp_directory_path() / "tandemq_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto run = [&](const std::string& args) {
        const std::string cmd = "'" + std::string(cli) + "' " + args + " > '" +
                                (dir / "stdout.txt").string() + "' 2> '" +
                                (dir / "stderr.txt").string() + "'";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    auto slurp = [](const fs::path& path) {
        std::ifstream is(path, std::ios::binary);
        std::ostringstream os;
        os << is.rdbuf();
        return os.str();
    };

    const std::string sim =
        "simulate --lambda 1 --mu1 1 --mu2 1 --K 4 --seed 7 --events 1000000 --warmup 100000";
    if (run(sim + " --out '" + (dir / "a").string() + "'") != 0) out.fail("simulate run 1 failed");
    if (run(sim + " --out '" + (dir / "b").string() + "'") != 0) out.fail("simulate run 2 failed");
    if (out.pass) {
        const std::string a = slurp(dir / "a" / "simulate.json");
        const std::string b = slurp(dir / "b" / "simulate.json");
        if (a.empty() || a != b) out.fail("simulate JSON not byte-identical across reruns");
    }

    const int validate_rc = run("validate --out '" + (dir / "v").string() + "'");
    if (validate_rc != 0) out.fail("cmd_validate exited " + std::to_string(validate_rc));
    out.detail += "simulate JSON identical, validate rc=" + std::to_string(validate_rc);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const char* cli = argc > 1 ? argv[1] : nullptr;
    struct Entry {
        int id;
        const char* name;
        Outcome outcome;
    };
    std::vector<Entry> entries;
    entries.push_back({1, "product-form agreement (solver vs closed form)", criterion_product_form()});
    entries.push_back({2, "recursion consistency (dual-path table fill)", criterion_dual_path()});
    entries.push_back({3, "closed-form T1(k) vs direct sum + continuity", criterion_t1_closed_form()});
    entries.push_back({4, "K-independence of conditional laws", criterion_k_independence()});
    entries.push_back({5, "monotonicity suite", criterion_monotonicity()});
    entries.push_back({6, "likelihood-ratio ordering", criterion_lr_ordering()});
    entries.push_back({7, "worked equilibrium example", criterion_worked_example()});
    entries.push_back({8, "certified infinite branch", criterion_infinite_branch()});
    entries.push_back({9, "simulation cross-check", criterion_simulation()});
    entries.push_back({10, "determinism and default validation grid", criterion_determinism(cli)});

    bool all = true;
    for (const auto& e : entries) {
        all = all && e.outcome.pass;
        std::cout << (e.outcome.pass ? "PASS" : "FAIL") << " criterion " << e.id << ": " << e.name;
        if (!e.outcome.detail.empty()) std::cout << " (" << e.outcome.detail << ")";
        std::cout << '\n';
    }
    std::cout << (all ? "acceptance: all criteria passed" : "acceptance: FAILURES present") << '\n';
    return all ? 0 : 1;
}
