#pragma once

// Exact finite-sample equivalence between regression data (X, Y) and the
// empirical white-noise coefficients Z_k = sqrt(n) lambda-hat_k^{1/2} <phi-hat_k, theta> + sigma eps_k.

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "flrwn/covariance.hpp"
#include "flrwn/design_sample.hpp"

namespace flrwn {

/// Q_jk = <X_j, phi-hat_k>, D = diag(sqrt(n lambda-hat_k)), A = Q D^{-1} (orthogonal).
struct GramTransform {
    Eigen::MatrixXd Q;
    Eigen::VectorXd d;
    Eigen::MatrixXd A;

    std::size_t size() const { return static_cast<std::size_t>(A.rows()); }
};

/// `cov` must be empirical_covariance(sample). Throws DegenerateDesignError when its
/// numerical rank is below n.
GramTransform build_gram_transform(const DesignSample& sample, const CovOperator& cov);

struct WnCoefficients {
    Eigen::VectorXd z;
    double sigma = 1.0;
};

/// z = A^T Y.
WnCoefficients flr_to_whitenoise(const Eigen::Ref<const Eigen::VectorXd>& Y, const GramTransform& T, double sigma);

/// Y = A z.
Eigen::VectorXd whitenoise_to_flr(const WnCoefficients& z, const GramTransform& T);

/// Drift sqrt(n) lambda-hat_k^{1/2} <phi-hat_k, theta> for k < count; zero past the rank.
Eigen::VectorXd wn_drift(const Eigen::Ref<const Eigen::VectorXd>& theta, const CovOperator& cov, std::size_t count);

/// Direct route: n coefficients drift + sigma eps with fresh standard normals.
WnCoefficients simulate_empirical_wn(const Eigen::Ref<const Eigen::VectorXd>& theta, const CovOperator& cov,
                                     double sigma, std::uint64_t seed);

/// log[(2 pi)^{-n/2} sigma^{-n} exp(-||Y - x||^2 / (2 sigma^2))], x_j = <X_j, theta>.
double conditional_loglik(const Eigen::Ref<const Eigen::VectorXd>& Y, const DesignSample& sample,
                          const Eigen::Ref<const Eigen::VectorXd>& theta, double sigma);

/// The same density written in the rotated coordinates: ||A^T Y - D f||^2 with f_k = <phi-hat_k, theta>.
double reduced_loglik(const Eigen::Ref<const Eigen::VectorXd>& Y, const GramTransform& T, const CovOperator& cov,
                      const Eigen::Ref<const Eigen::VectorXd>& theta, double sigma);

/// Grid path t -> Z(t) for display: sum_k z_k int_0^t phi-hat_k plus sigma times the
/// part of a Brownian path orthogonal to the empirical eigenfunctions.
Eigen::VectorXd render_wn_path(const WnCoefficients& z, const CovOperator& cov, std::uint64_t seed);

}  // namespace flrwn
