// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>

#include <tandemq/sojourn.hpp>

using namespace tandemq;

namespace {

// Independent oracle: top-down memoized evaluation of the first-step
// recursions, deliberately different in form and fill order from the
// library's bottom-up geometric-sum build.
class RecursionOracle {
  public:
    RecursionOracle(double mu1, double mu2) : mu1_(mu1), mu2_(mu2) {}

    double t(int n, int m) {
        if (n == 0) return m / mu2_;
        if (m == 0) return 1.0 / mu1_ + t(n - 1, 1);
        const auto key = std::make_pair(n, m);
        if (auto it = memo_t_.find(key); it != memo_t_.end()) return it->second;
        const double total = mu1_ + mu2_;
        const double v = 1.0 / total + mu1_ / total * t(n - 1, m + 1) + mu2_ / total * t(n, m - 1);
        memo_t_[key] = v;
        return v;
    }

    double t2(int n, int m) {
        if (n == 0) return m / mu2_;
        if (m == 0) return t2(n - 1, 1);
        const auto key = std::make_pair(n, m);
        if (auto it = memo_t2_.find(key); it != memo_t2_.end()) return it->second;
        const double total = mu1_ + mu2_;
        const double v = mu1_ / total * t2(n - 1, m + 1) + mu2_ / total * t2(n, m - 1);
        memo_t2_[key] = v;
        return v;
    }

  private:
    double mu1_, mu2_;
    std::map<std::pair<int, int>, double> memo_t_;
    std::map<std::pair<int, int>, double> memo_t2_;
};

// Tiny deterministic generator for property-style sweeps.
struct Gen {
    std::uint64_t s = 0x9e3779b97f4a7c15ULL;
    double rate() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return 0.05 + (s % 10000) / 2500.0;  // (0.05, 4.05)
    }
};

}  // namespace

TEST_SUITE("sojourn") {
    TEST_CASE("boundary rows are exact") {
        const SojournTable tab = build_table(1.0, 1.0, 12);
        for (int m = 0; m <= 12; ++m) {
            CHECK(tab.t(0, m) == static_cast<double>(m));
            CHECK(tab.t2(0, m) == static_cast<double>(m));
            CHECK(tab.t1(0, m) == 0.0);
        }
        CHECK(tab.t(1, 0) == 2.0);  // 1/mu1 + T(0,1)
    }

    TEST_CASE("frozen hand-recursed values at mu1 = mu2 = 1") {
        const SojournTable tab = build_table(1.0, 1.0, 8);
        CHECK(tab.t(1, 1) == doctest::Approx(2.5).epsilon(1e-14));
        CHECK(tab.t2(1, 1) == doctest::Approx(1.5).epsilon(1e-14));
        CHECK(tab.t2(2, 1) == doctest::Approx(1.875).epsilon(1e-14));
        CHECK(tab.t2(1, 2) == doctest::Approx(2.25).epsilon(1e-14));
        CHECK(tab.t2(3, 0) == doctest::Approx(1.875).epsilon(1e-14));

        RecursionOracle oracle(1.0, 1.0);
        CHECK(oracle.t(1, 1) == doctest::Approx(2.5).epsilon(1e-14));
        CHECK(oracle.t2(2, 1) == doctest::Approx(1.875).epsilon(1e-14));
    }

    TEST_CASE("library table matches the top-down oracle across rate ratios") {
        for (double mu1 : {0.1, 0.5, 1.0, 2.0, 10.0}) {
            const SojournTable tab = build_table(mu1, 1.0, 25);
            RecursionOracle oracle(mu1, 1.0);
            double max_err = 0.0;
            for (int n = 0; n <= 25; ++n)
                for (int m = 0; m <= 25 - n; ++m) {
                    max_err = std::max(max_err, std::abs(tab.t(n, m) - oracle.t(n, m)));
                    max_err = std::max(max_err, std::abs(tab.t2(n, m) - oracle.t2(n, m)));
                }
            CAPTURE(mu1);
            CHECK(max_err <= 1e-10);
        }
    }

    TEST_CASE("dual-path fill agrees to 1e-10 on the 40-grid") {
        TableOptions opts;
        opts.verify = true;
        for (double ratio : {0.1, 0.5, 1.0, 2.0, 10.0}) {
            const SojournTable tab = build_table(ratio, 1.0, 40, opts);
            REQUIRE(tab.dual_path_max_diff().has_value());
            CAPTURE(ratio);
            CHECK(*tab.dual_path_max_diff() <= 1e-10);
        }
    }

    TEST_CASE("decomposition T = T1 + T2 holds exactly by construction") {
        const SojournTable tab = build_table(0.7, 1.3, 30);
        double max_err = 0.0;
        for (int n = 0; n <= 30; ++n)
            for (int m = 0; m <= 30 - n; ++m)
                max_err = std::max(max_err, std::abs(tab.t(n, m) - tab.t1(n, m) - tab.t2(n, m)));
        CHECK(max_err <= 1e-10);
    }

    TEST_CASE("entries are finite and non-negative") {
        Gen gen;
        for (int i = 0; i < 12; ++i) {
            const SojournTable tab = build_table(gen.rate(), gen.rate(), 20);
            for (int n = 0; n <= 20; ++n)
                for (int m = 0; m <= 20 - n; ++m) {
                    REQUIRE(std::isfinite(tab.t(n, m)));
                    REQUIRE(tab.t(n, m) >= 0.0);
                    REQUIRE(tab.t2(n, m) >= 0.0);
                }
        }
    }

    TEST_CASE("time scaling: rates scaled by c divide every entry by c") {
        Gen gen;
        for (double c : {2.0, 3.7, 0.25}) {
            const double mu1 = gen.rate(), mu2 = gen.rate();
            const SojournTable base = build_table(mu1, mu2, 18);
            const SojournTable scaled = build_table(c * mu1, c * mu2, 18);
            for (int n = 0; n <= 18; ++n)
                for (int m = 0; m <= 18 - n; ++m) {
                    const double want = base.t(n, m) / c;
                    if (want == 0.0)
                        CHECK(scaled.t(n, m) == 0.0);
                    else
                        CHECK(std::abs(scaled.t(n, m) - want) <= 1e-12 * std::abs(want));
                }
        }
    }

    TEST_CASE("delta1_t2_row0 closed form") {
        // alpha = 1: exact halving sequence.
        CHECK(delta1_t2_row0(1.0, 1.0, 0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(delta1_t2_row0(1.0, 1.0, 1) == doctest::Approx(0.5).epsilon(1e-15));
        // Large-m limit is (alpha - 1) / (alpha mu2).
        CHECK(delta1_t2_row0(2.0, 1.0, 400) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK_THROWS_AS(delta1_t2_row0(0.0, 1.0, 1), std::invalid_argument);
        CHECK_THROWS_AS(delta1_t2_row0(1.0, 1.0, -1), std::invalid_argument);
    }

    TEST_CASE("delta1_t2_row0 equals table first differences to 1e-12") {
        for (double mu1 : {0.1, 0.5, 1.0, 2.0, 10.0}) {
            const SojournTable tab = build_table(mu1, 1.0, 40);
            for (int m = 0; m <= 39; ++m) {
                const double want = tab.t2(1, m) - tab.t2(0, m);
                CAPTURE(mu1);
                CAPTURE(m);
                CHECK(std::abs(delta1_t2_row0(mu1, 1.0, m) - want) <= 1e-12);
            }
        }
    }

    TEST_CASE("monotonicity: T1 and anti-diagonal T always, T2 iff mu1 >= mu2") {
        for (double mu1 : {0.1, 0.5, 1.0, 2.0, 10.0}) {
            for (double mu2 : {0.5, 1.0, 2.0}) {
                const SojournTable tab = build_table(mu1, mu2, 40);
                const MonotonicityReport rep = check_monotonicity(tab);
                CAPTURE(mu1);
                CAPTURE(mu2);
                CHECK(rep.t1_in_n.nondecreasing);
                CHECK(rep.t_antidiagonal.nondecreasing);
                CHECK(rep.t2_in_n.nondecreasing == (mu1 >= mu2));
                if (!rep.t2_in_n.nondecreasing) {
                    REQUIRE(rep.t2_in_n.counterexample.has_value());
                    const auto [n, m] = *rep.t2_in_n.counterexample;
                    CHECK(tab.t2(n + 1, m) < tab.t2(n, m));
                }
            }
        }
    }

    TEST_CASE("mu1=0.1, mu2=1 counterexample is concrete") {
        const SojournTable tab = build_table(0.1, 1.0, 40);
        const MonotonicityReport rep = check_monotonicity(tab);
        CHECK_FALSE(rep.t2_in_n.nondecreasing);
        REQUIRE(rep.t2_in_n.counterexample.has_value());
    }

    TEST_CASE("degenerate grid n_max = 0") {
        const SojournTable tab = build_table(1.0, 2.0, 0);
        CHECK(tab.t(0, 0) == 0.0);
        CHECK_THROWS_AS(tab.t(0, 1), std::out_of_range);
    }

    TEST_CASE("argument and budget errors") {
        CHECK_THROWS_AS(build_table(0.0, 1.0, 5), std::invalid_argument);
        CHECK_THROWS_AS(build_table(1.0, -2.0, 5), std::invalid_argument);
        CHECK_THROWS_AS(build_table(1.0, 1.0, -1), std::invalid_argument);
        TableOptions tiny;
        tiny.max_grid = 10;
        CHECK_THROWS_AS(build_table(1.0, 1.0, 11, tiny), std::runtime_error);
    }

    TEST_CASE("CSV grid dump is byte-exact") {
        const SojournTable tab = build_table(1.0, 1.0, 2);
        std::ostringstream os;
        write_table_csv(os, tab);
        CHECK(os.str() ==
              "n,m,t1,t2,t\n"
              "0,0,0,0,0\n"
              "0,1,0,1,1\n"
              "0,2,0,2,2\n"
              "1,0,1,1,2\n"
              "1,1,1,1.5,2.5\n"
              "2,0,2,1.5,3.5\n");
    }
}
