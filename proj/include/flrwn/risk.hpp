#pragma once

// Monte Carlo harnesses: MISE estimation, rate regressions, the Delta_{5,6} study with its
// total-variation surrogate, and two-sample distributional tests.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "flrwn/covariance.hpp"
#include "flrwn/design.hpp"
#include "flrwn/estimators.hpp"

namespace flrwn {

struct MiseEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t reps = 0;
};

/// Mean and standard error of the mean; needs at least two values.
MiseEstimate summarize(const std::vector<double>& values);

/// Replication r evaluates loss(r, derive_seed(seed, "replication", r)); the result does not
/// depend on `threads`.
using LossFunction = std::function<double(std::size_t rep, std::uint64_t seed)>;
MiseEstimate mise_monte_carlo(std::size_t reps, std::uint64_t seed, const LossFunction& loss, unsigned threads = 1);

/// Same as mise_monte_carlo but returns every replication's loss.
std::vector<double> replicate(std::size_t reps, std::uint64_t seed, const LossFunction& loss, unsigned threads = 1);

struct RateFit {
    double slope = 0.0;
    double std_error = 0.0;
    double intercept = 0.0;
};

/// Least-squares fit of log value on log n; needs at least three points.
RateFit rate_regression(const std::vector<double>& n_grid, const std::vector<double>& values);

struct RiskReport {
    std::vector<double> n_grid;
    std::vector<MiseEstimate> mise;
    std::vector<double> a_n;    ///< empty when not applicable
    std::vector<double> ratio;  ///< mise / a_n
    RateFit fit;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
};

/// Exact risk of the linear rule theta-hat_k = w_k y_k / sqrt(lambda_k) in the sequence model:
/// sum (1 - w_k)^2 theta_k^2 + (sigma^2/n) sum w_k^2 / lambda_k, with w_k = 0 past the weights.
double linear_sequence_risk(const Eigen::Ref<const Eigen::VectorXd>& theta, const Eigen::Ref<const Eigen::VectorXd>& lambda,
                            const Eigen::Ref<const Eigen::VectorXd>& weights, double sigma, double n);

struct RiskDecomposition {
    double bias = 0.0;
    double variance = 0.0;
    double total() const { return bias + variance; }
};

/// The two terms of E[||theta-hat - theta||^2 | X] for the plug-in Pinsker estimator:
/// sum_k (w_k lambda-hat_k / lambda-hat_{k,rho} - 1)^2 <phi-hat_k, theta>^2 (every k, so the part of theta
/// outside the empirical range counts fully) and (sigma^2/n) sum_k w_k^2 lambda-hat_k / lambda-hat_{k,rho}^2.
RiskDecomposition pinsker_conditional_risk(const CovOperator& cov, const Eigen::Ref<const Eigen::VectorXd>& theta,
                                           const Eigen::Ref<const Eigen::VectorXd>& weights, double floor, double sigma);

/// 2 (1 - exp(-E||Delta||^2 / (2 sigma^2)))^{1/2}.
double tv_bound(double mean_sq_delta, double sigma);

struct Delta56Setup {
    DesignSpec design;
    Eigen::VectorXd theta;  ///< coefficients along the population eigenfunctions
    double beta = 2.0;      ///< for the cutoff K
    double sigma = 1.0;
    bool force_population_cov = false;  ///< replace Gamma-hat_2 by Gamma
    bool force_exact_estimate = false;  ///< replace theta-hat_1 by theta
};

/// ||Delta_{5,6}||^2 = (n-m) ||(Gamma^{1/2} - Gamma-hat_2^{1/2})(theta - theta-hat_1)||^2 for one draw,
/// m = floor(n/2). `population` must be true_covariance(design, ., n).
double delta56_replicate(const Delta56Setup& setup, const CovOperator& population, std::size_t n, std::uint64_t seed);

struct Delta56Point {
    std::size_t n = 0;
    MiseEstimate mean_sq;
    double tv = 0.0;
};

std::vector<Delta56Point> delta56_study(const Delta56Setup& setup, const std::vector<std::size_t>& n_grid,
                                       std::size_t reps, std::uint64_t seed, unsigned threads = 1);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct EquivalenceTestReport {
    std::vector<KsResult> coordinates;
    std::vector<bool> rejected;
    double level = 0.05;
    double adjusted_level = 0.05;  ///< level / coordinate count
    std::size_t rejections = 0;
    double rejection_rate = 0.0;
};

/// Column-wise KS tests between draws a and b (rows are draws), Bonferroni-adjusted.
EquivalenceTestReport two_sample_equivalence_test(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                                  const Eigen::Ref<const Eigen::MatrixXd>& b, double level = 0.05);

/// Draws of A^T Y (regression route) and of the direct white-noise coefficients for one fixed
/// design sample, then the column-wise test. theta in frame coordinates.
EquivalenceTestReport two_route_test(const DesignSample& sample, const Eigen::Ref<const Eigen::VectorXd>& theta,
                                     double sigma, std::size_t draws, std::uint64_t seed, double level = 0.05);

}  // namespace flrwn
