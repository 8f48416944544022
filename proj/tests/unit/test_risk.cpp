#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "flrwn/errors.hpp"
#include "flrwn/risk.hpp"

using namespace flrwn;

TEST(MonteCarlo, ZeroAndOracleEstimators) {
    const Eigen::VectorXd theta = Eigen::VectorXd::LinSpaced(5, 1.0, 2.0);
    const auto zero = mise_monte_carlo(10, 1, [&](std::size_t, std::uint64_t) { return theta.squaredNorm(); });
    EXPECT_DOUBLE_EQ(zero.mean, theta.squaredNorm());
    EXPECT_EQ(zero.std_error, 0.0);
    const auto truth = mise_monte_carlo(10, 1, [](std::size_t, std::uint64_t) { return 0.0; });
    EXPECT_EQ(truth.mean, 0.0);
    EXPECT_THROW(mise_monte_carlo(1, 1, [](std::size_t, std::uint64_t) { return 0.0; }), ArgumentError);
}

TEST(MonteCarlo, StandardErrorShrinksLikeRootReps) {
    auto loss = [](std::size_t, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g;
        const double x = g(rng);
        return x * x;
    };
    const auto a = mise_monte_carlo(4000, 3, loss);
    const auto b = mise_monte_carlo(8000, 4, loss);
    EXPECT_NEAR(a.std_error / b.std_error, std::sqrt(2.0), 0.2 * std::sqrt(2.0));
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResults) {
    auto loss = [](std::size_t r, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        return std::uniform_real_distribution<double>(0, 1)(rng) + static_cast<double>(r);
    };
    EXPECT_EQ(replicate(100, 9, loss, 1), replicate(100, 9, loss, 4));
}

TEST(RateRegression, Examples) {
    const std::vector<double> ns{100, 400, 1600, 6400};
    std::vector<double> inv, flat;
    for (double n : ns) inv.push_back(3.0 / n), flat.push_back(2.0);
    EXPECT_NEAR(rate_regression(ns, inv).slope, -1.0, 1e-12);
    EXPECT_NEAR(rate_regression(ns, flat).slope, 0.0, 1e-12);

    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    std::vector<double> grid, noisy;
    for (int p = 9; p <= 14; ++p) {
        const double n = std::pow(2.0, p);
        grid.push_back(n);
        noisy.push_back(std::pow(n, -4.0 / 7.0) * (1 + 0.05 * g(rng)));
    }
    const auto fit = rate_regression(grid, noisy);
    EXPECT_NEAR(fit.slope, -4.0 / 7.0, 0.05);
    EXPECT_GT(fit.std_error, 0.0);
    EXPECT_THROW(rate_regression({1, 2}, {1, 2}), ArgumentError);
}

TEST(TvBound, Examples) {
    EXPECT_EQ(tv_bound(0.0, 1.0), 0.0);
    EXPECT_NEAR(tv_bound(1e6, 1.0), 2.0, 1e-12);
    const double sigma = 0.7;
    EXPECT_NEAR(tv_bound(2 * sigma * sigma * std::log(2.0), sigma), std::sqrt(2.0), 1e-12);
    EXPECT_LT(tv_bound(0.1, 1.0), tv_bound(0.2, 1.0));
    EXPECT_THROW(tv_bound(1.0, 0.0), ArgumentError);
    EXPECT_THROW(tv_bound(-1.0, 1.0), ArgumentError);
}

TEST(TvBound, DominatesClassifierProxy) {
    // Two Gaussians N(0, s^2 I) and N(delta, s^2 I): the best classifier thresholds the
    // projection on delta; its accuracy gives the proxy 2 acc - 1.
    const double sigma = 1.0;
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g;
    for (double d : {0.1, 0.5, 1.0, 2.0}) {
        const int draws = 20000;
        int correct = 0;
        for (int i = 0; i < draws; ++i) {
            const bool shifted = i % 2;
            const double x = (shifted ? d : 0.0) + sigma * g(rng);
            correct += ((x > d / 2) == shifted);
        }
        const double acc = static_cast<double>(correct) / draws;
        const double proxy = 2 * acc - 1;
        const double se = 2 * std::sqrt(acc * (1 - acc) / draws);
        EXPECT_LE(proxy, tv_bound(d * d, sigma) + 3 * se) << "d=" << d;
    }
}

TEST(Delta56, ForcedCasesVanish) {
    Delta56Setup setup;
    setup.theta = Eigen::VectorXd::LinSpaced(10, 0.3, 0.01);
    const auto population = true_covariance(setup.design, setup.design.effective_truncation(64), 64);
    setup.force_population_cov = true;
    EXPECT_EQ(delta56_replicate(setup, population, 64, 1), 0.0);
    setup.force_population_cov = false;
    setup.force_exact_estimate = true;
    EXPECT_EQ(delta56_replicate(setup, population, 64, 1), 0.0);
    setup.force_exact_estimate = false;
    EXPECT_GT(delta56_replicate(setup, population, 64, 1), 0.0);
}

TEST(KolmogorovSmirnov, IdenticalSamples) {
    std::vector<double> a{0.3, -1.0, 2.0, 0.1};
    const auto r = ks_two_sample(a, a);
    EXPECT_EQ(r.statistic, 0.0);
    EXPECT_EQ(r.p_value, 1.0);
    EXPECT_THROW(ks_two_sample({}, a), ArgumentError);
}

TEST(KolmogorovSmirnov, StatisticByHand) {
    // ECDFs of {1,2,3} and {2.5,4}: largest gap 2/3 at x in [2, 2.5)
    const auto r = ks_two_sample({1, 2, 3}, {2.5, 4});
    EXPECT_NEAR(r.statistic, 2.0 / 3.0, 1e-15);
}

TEST(KolmogorovSmirnov, CalibrationUnderTheNull) {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    const int trials = 400, coords = 5, draws = 500;
    std::size_t rejections = 0;
    for (int t = 0; t < trials; ++t) {
        Eigen::MatrixXd a(draws, coords), b(draws, coords);
        for (int i = 0; i < draws; ++i)
            for (int c = 0; c < coords; ++c) a(i, c) = g(rng), b(i, c) = g(rng);
        rejections += two_sample_equivalence_test(a, b).rejections > 0;
    }
    const double rate = static_cast<double>(rejections) / trials;
    EXPECT_LE(rate, 0.05 + 3 * std::sqrt(0.05 * 0.95 / trials));
}

TEST(KolmogorovSmirnov, PowerAgainstUnitShift) {
    std::mt19937_64 rng(22);
    std::normal_distribution<double> g;
    int detected = 0;
    for (int t = 0; t < 100; ++t) {
        Eigen::MatrixXd a(2000, 3), b(2000, 3);
        for (int i = 0; i < 2000; ++i)
            for (int c = 0; c < 3; ++c) a(i, c) = g(rng), b(i, c) = g(rng) + (c == 1 ? 1.0 : 0.0);
        const auto report = two_sample_equivalence_test(a, b);
        detected += report.rejected[1];
    }
    EXPECT_GE(detected, 99);
}
