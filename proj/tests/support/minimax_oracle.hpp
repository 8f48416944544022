#pragma once

// Brute-force linear minimax risk over a K-dimensional ellipsoid, written independently of
// the library's Pinsker code.
//
// Value = min_w max_{sum b_k^2 theta_k^2 <= C} sum (1-w_k)^2 theta_k^2 + v_k w_k^2.
// Writing s_k = theta_k^2 the inner max is over a simplex-like polytope and the objective is
// linear in s, so min and max swap; for fixed s the best w_k = s_k/(s_k+v_k) and the value
// g(s) = sum s_k v_k/(s_k+v_k) is concave. Frank-Wolfe climbs g while the dual
// C max_k (1-w_k)^2/b_k^2 + sum w_k^2 v_k bounds it from above.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct MinimaxResult {
    double lower = 0.0;
    double upper = 0.0;
    int iterations = 0;
};

inline MinimaxResult brute_force_minimax(const std::vector<double>& b2, const std::vector<double>& v, double C,
                                         double rel_tol = 1e-7, int max_iter = 200000) {
    const std::size_t K = b2.size();
    std::vector<double> s(K), w(K);
    for (std::size_t k = 0; k < K; ++k) s[k] = C / (static_cast<double>(K) * b2[k]);

    auto value = [&](const std::vector<double>& x) {
        double g = 0.0;
        for (std::size_t k = 0; k < K; ++k) g += x[k] * v[k] / (x[k] + v[k]);
        return g;
    };

    MinimaxResult out;
    out.upper = 1e300;
    for (int it = 0; it < max_iter; ++it) {
        for (std::size_t k = 0; k < K; ++k) w[k] = s[k] / (s[k] + v[k]);
        out.lower = std::max(out.lower, value(s));

        double worst = 0.0;
        std::size_t vertex = 0;
        double variance = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const double r = (1.0 - w[k]) * (1.0 - w[k]) / b2[k];
            if (r > worst) worst = r, vertex = k;
            variance += w[k] * w[k] * v[k];
        }
        out.upper = std::min(out.upper, C * worst + variance);
        out.iterations = it + 1;
        if (out.upper - out.lower <= rel_tol * out.upper) break;

        // exact line search towards the vertex by golden section on the concave g
        std::vector<double> target(K, 0.0);
        target[vertex] = C / b2[vertex];
        auto along = [&](double t) {
            std::vector<double> x(K);
            for (std::size_t k = 0; k < K; ++k) x[k] = (1 - t) * s[k] + t * target[k];
            return value(x);
        };
        double lo = 0.0, hi = 1.0;
        const double phi = (std::sqrt(5.0) - 1) / 2;
        for (int g = 0; g < 80; ++g) {
            const double a = hi - phi * (hi - lo), c = lo + phi * (hi - lo);
            if (along(a) < along(c)) lo = a;
            else hi = c;
        }
        const double t = 0.5 * (lo + hi);
        for (std::size_t k = 0; k < K; ++k) s[k] = (1 - t) * s[k] + t * target[k];
    }
    return out;
}

}  // namespace oracle
