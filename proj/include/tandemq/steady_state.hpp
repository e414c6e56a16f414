// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "tandemq/model.hpp"
#include "tandemq/partial_info.hpp"

namespace tandemq {

struct SteadyStateOptions {
    /// Dense elimination is O(states^3) with states = (K+1)(K+2)/2; the
    /// default keeps the solve in the seconds range. Raise it only if you
    /// accept the cubic cost.
    int max_threshold = 80;
};

/// Independent steady-state oracle: assembles the generator of the
/// truncated chain (arrivals blocked at n+m = K) and solves the global
/// balance equations Q^T pi = 0 by dense Gaussian elimination with partial
/// pivoting, one balance row replaced by the normalization sum pi = 1.
/// No product-form knowledge is used anywhere in this path.
inline StationaryLaw solve_steady_state(const ModelParams& params, int K,
                                        const SteadyStateOptions& opts = {}) {
    require_valid(params, /*allow_degenerate_costs=*/true);
    if (K < 0) throw std::invalid_argument("threshold K must be >= 0");
    if (K > opts.max_threshold)
        throw std::runtime_error("K=" + std::to_string(K) +
                                 " exceeds the steady-state dimension cap (max_threshold=" +
                                 std::to_string(opts.max_threshold) + ")");

    const std::size_t dim = StationaryLaw::state_count(K);
    std::vector<double> a(dim * dim, 0.0);
    std::vector<double> b(dim, 0.0);
    auto at = [&](std::size_t row, std::size_t col) -> double& { return a[row * dim + col]; };

    // Row `to` of Q^T collects in-rates; the diagonal carries -out_rate.
    for (int n = 0; n <= K; ++n) {
        for (int m = 0; m <= K - n; ++m) {
            const std::size_t s = StationaryLaw::index_of(n, m);
            if (n + m < K) {
                at(StationaryLaw::index_of(n + 1, m), s) += params.lambda;
                at(s, s) -= params.lambda;
            }
            if (n > 0) {
                at(StationaryLaw::index_of(n - 1, m + 1), s) += params.mu1;
                at(s, s) -= params.mu1;
            }
            if (m > 0) {
                at(StationaryLaw::index_of(n, m - 1), s) += params.mu2;
                at(s, s) -= params.mu2;
            }
        }
    }
    for (std::size_t col = 0; col < dim; ++col) at(dim - 1, col) = 1.0;
    b[dim - 1] = 1.0;

    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t pivot = col;
        double best = std::abs(at(col, col));
        for (std::size_t row = col + 1; row < dim; ++row) {
            const double v = std::abs(at(row, col));
            if (v > best) {
                best = v;
                pivot = row;
            }
        }
        if (best == 0.0) throw std::runtime_error("singular balance system");
        if (pivot != col) {
            for (std::size_t j = col; j < dim; ++j) std::swap(at(pivot, j), at(col, j));
            std::swap(b[pivot], b[col]);
        }
        const double inv = 1.0 / at(col, col);
        for (std::size_t row = col + 1; row < dim; ++row) {
            const double f = at(row, col) * inv;
            if (f == 0.0) continue;
            at(row, col) = 0.0;
            for (std::size_t j = col + 1; j < dim; ++j) at(row, j) -= f * at(col, j);
            b[row] -= f * b[col];
        }
    }
    std::vector<double> x(dim, 0.0);
    for (std::size_t i = dim; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < dim; ++j) s -= at(i, j) * x[j];
        x[i] = s / at(i, i);
    }

    double sum = 0.0;
    for (double v : x) sum += v;
    for (auto& v : x) v /= sum;
    return StationaryLaw::from_probabilities(K, params.lambda / params.mu1,
                                             params.lambda / params.mu2, std::move(x));
}

}  // namespace tandemq
