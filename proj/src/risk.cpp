#include "flrwn/risk.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flrwn/equivalence.hpp"
#include "flrwn/errors.hpp"
#include "flrwn/parallel.hpp"
#include "flrwn/rng.hpp"

namespace flrwn {

MiseEstimate summarize(const std::vector<double>& values) {
    if (values.size() < 2) throw ArgumentError("need at least two replications, got " + std::to_string(values.size()));
    const Eigen::Map<const Eigen::VectorXd> v(values.data(), static_cast<Eigen::Index>(values.size()));
    const double mean = v.mean();
    const double var = (v.array() - mean).square().sum() / static_cast<double>(values.size() - 1);
    return {mean, std::sqrt(var / static_cast<double>(values.size())), values.size()};
}

std::vector<double> replicate(std::size_t reps, std::uint64_t seed, const LossFunction& loss, unsigned threads) {
    std::vector<double> out(reps);
    parallel_for(reps, threads, [&](std::size_t r) { out[r] = loss(r, derive_seed(seed, "replication", r)); });
    return out;
}

MiseEstimate mise_monte_carlo(std::size_t reps, std::uint64_t seed, const LossFunction& loss, unsigned threads) {
    if (reps < 2) throw ArgumentError("Monte Carlo needs reps >= 2, got " + std::to_string(reps));
    return summarize(replicate(reps, seed, loss, threads));
}

RateFit rate_regression(const std::vector<double>& n_grid, const std::vector<double>& values) {
    if (n_grid.size() != values.size()) throw DimensionError("grid and values differ in length");
    if (n_grid.size() < 3) throw ArgumentError("rate regression needs at least three points");
    const auto p = static_cast<Eigen::Index>(n_grid.size());
    Eigen::MatrixXd X(p, 2);
    Eigen::VectorXd y(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        if (!(n_grid[i] > 0.0) || !(values[i] > 0.0)) throw ArgumentError("rate regression needs positive inputs");
        X(i, 0) = 1.0;
        X(i, 1) = std::log(n_grid[i]);
        y[i] = std::log(values[i]);
    }
    const Eigen::Vector2d coef = X.colPivHouseholderQr().solve(y);
    const double rss = (y - X * coef).squaredNorm();
    const double s2 = rss / static_cast<double>(p - 2);
    const Eigen::Matrix2d cov = s2 * (X.transpose() * X).inverse();
    return {coef[1], std::sqrt(std::max(0.0, cov(1, 1))), coef[0]};
}

double linear_sequence_risk(const Eigen::Ref<const Eigen::VectorXd>& theta, const Eigen::Ref<const Eigen::VectorXd>& lambda,
                            const Eigen::Ref<const Eigen::VectorXd>& weights, double sigma, double n) {
    if (theta.size() != lambda.size()) throw DimensionError("theta and lambda lengths differ");
    if (weights.size() > theta.size()) throw DimensionError("more weights than coefficients");
    double risk = 0.0;
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
        const double w = k < weights.size() ? weights[k] : 0.0;
        risk += (1.0 - w) * (1.0 - w) * theta[k] * theta[k] + sigma * sigma / n * w * w / lambda[k];
    }
    return risk;
}

RiskDecomposition pinsker_conditional_risk(const CovOperator& cov, const Eigen::Ref<const Eigen::VectorXd>& theta,
                                           const Eigen::Ref<const Eigen::VectorXd>& weights, double floor, double sigma) {
    if (!cov.empirical()) throw ArgumentError("decomposition needs an empirical covariance");
    const auto r = static_cast<Eigen::Index>(cov.rank());
    const Eigen::VectorXd f = cov.eigenvectors().transpose() * theta;
    RiskDecomposition out;
    out.bias = theta.squaredNorm() - f.squaredNorm();
    for (Eigen::Index k = 0; k < r; ++k) {
        const double w = k < weights.size() ? weights[k] : 0.0;
        const double lam = cov.eigenvalues()[k];
        const double floored = std::max(lam, floor);
        const double shrink = w * lam / floored - 1.0;
        out.bias += shrink * shrink * f[k] * f[k];
        out.variance += w * w * lam / (floored * floored);
    }
    out.bias = std::max(0.0, out.bias);
    out.variance *= sigma * sigma / static_cast<double>(cov.sample_size());
    return out;
}

double tv_bound(double mean_sq_delta, double sigma) {
    if (!(sigma > 0.0)) throw ArgumentError("sigma must be positive");
    if (!(mean_sq_delta >= 0.0)) throw ArgumentError("mean squared Delta must be nonnegative");
    return 2.0 * std::sqrt(-std::expm1(-mean_sq_delta / (2.0 * sigma * sigma)));
}

double delta56_replicate(const Delta56Setup& setup, const CovOperator& population, std::size_t n, std::uint64_t seed) {
    if (n < 4) throw ArgumentError("Delta study needs n >= 4");
    const std::size_t m = n / 2;
    const auto sample = sample_design(setup.design, n, derive_seed(seed, "delta.design"));
    if (!sample.frame().compatible(population.frame())) throw DimensionError("population operator has a different frame");
    const Eigen::VectorXd theta = embed_coefficients(setup.theta, population);

    Eigen::VectorXd diff = Eigen::VectorXd::Zero(theta.size());
    if (!setup.force_exact_estimate) {
        const auto first = sample.slice(0, m);
        const Eigen::VectorXd y = simulate_responses(first, theta, setup.sigma, derive_seed(seed, "delta.responses"));
        const std::size_t K = std::min(select_cutoff(m, setup.design.alpha, setup.beta), population.rank());
        diff = theta - embed_coefficients(cutoff_estimate(first, y, population, K), population);
    }
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(theta.size());
    if (!setup.force_population_cov) {
        const auto second = empirical_covariance(sample.slice(m, n - m));
        delta = population.sqrt_apply(diff) - second.sqrt_apply(diff);
    }
    return static_cast<double>(n - m) * delta.squaredNorm();
}

std::vector<Delta56Point> delta56_study(const Delta56Setup& setup, const std::vector<std::size_t>& n_grid,
                                       std::size_t reps, std::uint64_t seed, unsigned threads) {
    std::vector<Delta56Point> out;
    for (std::size_t n : n_grid) {
        const std::size_t rank = setup.design.kind == DesignKind::basis_expansion
                                     ? setup.design.effective_truncation(n)
                                     : std::max<std::size_t>(static_cast<std::size_t>(setup.theta.size()), 64);
        const auto population = true_covariance(setup.design, rank, n);
        const auto est = mise_monte_carlo(
            reps, derive_seed(seed, "delta.n", n),
            [&](std::size_t, std::uint64_t s) { return delta56_replicate(setup, population, n, s); }, threads);
        out.push_back({n, est, tv_bound(est.mean, setup.sigma)});
    }
    return out;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ArgumentError("KS test needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    const double root = std::sqrt(ne);
    const double lambda = (root + 0.12 + 0.11 / root) * d;
    // Q_KS(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)
    double p = 1.0;
    if (lambda >= 0.2) {
        double sum = 0.0;
        double sign = 1.0;
        for (int k = 1; k <= 200; ++k) {
            const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
            sum += term;
            if (std::abs(term) < 1e-16 * std::abs(sum)) break;
            sign = -sign;
        }
        p = std::clamp(2.0 * sum, 0.0, 1.0);
    }
    return {d, p};
}

EquivalenceTestReport two_sample_equivalence_test(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                                  const Eigen::Ref<const Eigen::MatrixXd>& b, double level) {
    if (a.cols() != b.cols()) throw DimensionError("samples have different coordinate counts");
    if (a.rows() == 0 || b.rows() == 0 || a.cols() == 0) throw ArgumentError("equivalence test needs nonempty samples");
    if (!(level > 0.0 && level < 1.0)) throw ArgumentError("level must lie in (0, 1)");
    EquivalenceTestReport report;
    report.level = level;
    report.adjusted_level = level / static_cast<double>(a.cols());
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        std::vector<double> x(a.col(c).data(), a.col(c).data() + a.rows());
        std::vector<double> y(b.col(c).data(), b.col(c).data() + b.rows());
        const auto r = ks_two_sample(std::move(x), std::move(y));
        report.coordinates.push_back(r);
        const bool reject = r.p_value < report.adjusted_level;
        report.rejected.push_back(reject);
        report.rejections += reject ? 1 : 0;
    }
    report.rejection_rate = static_cast<double>(report.rejections) / static_cast<double>(a.cols());
    return report;
}

EquivalenceTestReport two_route_test(const DesignSample& sample, const Eigen::Ref<const Eigen::VectorXd>& theta,
                                     double sigma, std::size_t draws, std::uint64_t seed, double level) {
    const auto cov = empirical_covariance(sample);
    const auto T = build_gram_transform(sample, cov);
    const auto n = static_cast<Eigen::Index>(sample.size());
    Eigen::MatrixXd flr(static_cast<Eigen::Index>(draws), n);
    Eigen::MatrixXd wn(static_cast<Eigen::Index>(draws), n);
    for (std::size_t i = 0; i < draws; ++i) {
        const auto y = simulate_responses(sample, theta, sigma, derive_seed(seed, "route.flr", i));
        flr.row(static_cast<Eigen::Index>(i)) = flr_to_whitenoise(y, T, sigma).z.transpose();
        wn.row(static_cast<Eigen::Index>(i)) = simulate_empirical_wn(theta, cov, sigma, derive_seed(seed, "route.wn", i)).z.transpose();
    }
    return two_sample_equivalence_test(flr, wn, level);
}

}  // namespace flrwn
