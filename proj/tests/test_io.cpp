// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <tandemq/json_io.hpp>

using namespace tandemq;
using nlohmann::json;

TEST_SUITE("json_io") {
    TEST_CASE("params round-trip through the documented keys") {
        const ModelParams p{0.5, 1.5, 2.5, 4.0, 0.25, 0.75};
        const json j = params_to_json(p);
        CHECK(j.at("lambda") == 0.5);
        CHECK(j.at("mu1") == 1.5);
        CHECK(j.at("mu2") == 2.5);
        CHECK(j.at("R") == 4.0);
        CHECK(j.at("c1") == 0.25);
        CHECK(j.at("c2") == 0.75);
        const ModelParams back = params_from_json(j);
        CHECK(back.lambda == p.lambda);
        CHECK(back.reward == p.reward);
        CHECK(back.cost2 == p.cost2);
    }

    TEST_CASE("threshold document carries the documented schema") {
        const ThresholdResult res = find_threshold(ModelParams{1, 1, 1, 4, 1, 1});
        const json j = threshold_to_json(res);
        CHECK(j.at("outcome") == "finite");
        CHECK(j.at("K") == 3);
        CHECK(j.at("cap") == 10000);
        CHECK(j.at("monotone") == true);
        REQUIRE(j.at("profile").size() == 4);
        CHECK(j.at("profile")[2].at("profit") == 0.0);
        CHECK(j.at("profile")[3].is_object());
    }

    TEST_CASE("infinite outcome serializes K as null") {
        const ThresholdResult res = find_threshold(ModelParams{1, 2, 1, 2, 1, 0});
        const json j = threshold_to_json(res);
        CHECK(j.at("outcome") == "infinite");
        CHECK(j.at("K").is_null());
    }

    TEST_CASE("simulation report echoes the seed and flags sparse cells") {
        SimConfig cfg;
        cfg.seed = 12345;
        cfg.warmup_events = 0;
        cfg.measured_events = 2;
        const SimEstimate est = simulate(ModelParams{1, 1, 1, 4, 1, 1}, 3, cfg);
        const json j = estimate_to_json(est);
        CHECK(j.at("seed") == 12345);
        CHECK(j.at("K") == 3);
        REQUIRE(j.at("per_k").size() == 3);
        bool saw_null = false;
        for (const auto& row : j.at("per_k"))
            if (row.at("t1_mean").is_null()) saw_null = true;
        CHECK(saw_null);
        CHECK(j.at("occupancy").size() == 10);  // triangle over K = 3
    }

    TEST_CASE("empirical profit serializes intervals") {
        SimConfig cfg;
        cfg.seed = 9;
        cfg.warmup_events = 1000;
        cfg.measured_events = 50000;
        const ModelParams p{1, 1, 1, 4, 1, 1};
        const EmpiricalProfit ep = estimate_profit_empirical(p, 3, cfg);
        const json j = empirical_profit_to_json(ep);
        REQUIRE(j.at("per_k").size() == 3);
        for (const auto& row : j.at("per_k")) {
            CHECK(row.contains("ci_lo"));
            CHECK(row.contains("ci_hi"));
        }
    }
}
