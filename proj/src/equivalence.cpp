#include "flrwn/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "flrwn/errors.hpp"
#include "flrwn/rng.hpp"

namespace flrwn {

namespace {

double gaussian_loglik(double squared_residual, std::size_t n, double sigma) {
    if (!(sigma > 0.0)) throw ArgumentError("sigma must be positive");
    const double dn = static_cast<double>(n);
    return -0.5 * dn * std::log(2.0 * std::numbers::pi) - dn * std::log(sigma) -
           squared_residual / (2.0 * sigma * sigma);
}

}  // namespace

GramTransform build_gram_transform(const DesignSample& sample, const CovOperator& cov) {
    const std::size_t n = sample.size();
    if (!cov.frame().compatible(sample.frame())) throw DimensionError("covariance and designs live in different frames");
    if (cov.sample_size() != n) throw ArgumentError("covariance was not built from this sample");
    if (cov.rank() < n) {
        throw DegenerateDesignError("design functions are numerically dependent: rank " + std::to_string(cov.rank()) +
                                    " < n = " + std::to_string(n));
    }
    GramTransform T;
    T.Q = sample.coordinates().transpose() * cov.eigenvectors();
    T.d = (static_cast<double>(n) * cov.eigenvalues().array()).sqrt();
    T.A = T.Q * T.d.cwiseInverse().asDiagonal();
    return T;
}

WnCoefficients flr_to_whitenoise(const Eigen::Ref<const Eigen::VectorXd>& Y, const GramTransform& T, double sigma) {
    if (static_cast<std::size_t>(Y.size()) != T.size()) throw DimensionError("response length does not match the transform");
    return {T.A.transpose() * Y, sigma};
}

Eigen::VectorXd whitenoise_to_flr(const WnCoefficients& z, const GramTransform& T) {
    if (static_cast<std::size_t>(z.z.size()) != T.size()) throw DimensionError("coefficient length does not match the transform");
    return T.A * z.z;
}

Eigen::VectorXd wn_drift(const Eigen::Ref<const Eigen::VectorXd>& theta, const CovOperator& cov, std::size_t count) {
    if (static_cast<std::size_t>(theta.size()) != cov.frame().dim()) throw DimensionError("theta does not match the frame");
    const double root_n = std::sqrt(static_cast<double>(cov.sample_size()));
    Eigen::VectorXd drift = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(count));
    const auto r = static_cast<Eigen::Index>(std::min(count, cov.rank()));
    drift.head(r) = root_n * cov.eigenvalues().head(r).cwiseSqrt().cwiseProduct(cov.eigenvectors().leftCols(r).transpose() * theta);
    return drift;
}

WnCoefficients simulate_empirical_wn(const Eigen::Ref<const Eigen::VectorXd>& theta, const CovOperator& cov,
                                     double sigma, std::uint64_t seed) {
    if (!cov.empirical()) throw ArgumentError("simulate_empirical_wn needs an empirical covariance");
    if (!(sigma >= 0.0)) throw ArgumentError("sigma must be nonnegative");
    WnCoefficients out{wn_drift(theta, cov, cov.sample_size()), sigma};
    if (sigma > 0.0) {
        auto rng = make_rng(seed, "wn.noise");
        std::normal_distribution<double> normal;
        for (Eigen::Index k = 0; k < out.z.size(); ++k) out.z[k] += sigma * normal(rng);
    }
    return out;
}

double conditional_loglik(const Eigen::Ref<const Eigen::VectorXd>& Y, const DesignSample& sample,
                          const Eigen::Ref<const Eigen::VectorXd>& theta, double sigma) {
    if (static_cast<std::size_t>(Y.size()) != sample.size()) throw DimensionError("response length does not match the sample");
    if (static_cast<std::size_t>(theta.size()) != sample.frame().dim()) throw DimensionError("theta does not match the frame");
    const Eigen::VectorXd residual = Y - sample.coordinates().transpose() * theta;
    return gaussian_loglik(residual.squaredNorm(), sample.size(), sigma);
}

double reduced_loglik(const Eigen::Ref<const Eigen::VectorXd>& Y, const GramTransform& T, const CovOperator& cov,
                      const Eigen::Ref<const Eigen::VectorXd>& theta, double sigma) {
    if (static_cast<std::size_t>(Y.size()) != T.size()) throw DimensionError("response length does not match the transform");
    const Eigen::VectorXd f = cov.eigenvectors().transpose() * theta;
    const Eigen::VectorXd residual = T.A.transpose() * Y - T.d.cwiseProduct(f);
    return gaussian_loglik(residual.squaredNorm(), T.size(), sigma);
}

Eigen::VectorXd render_wn_path(const WnCoefficients& z, const CovOperator& cov, std::uint64_t seed) {
    const std::size_t D = cov.frame().grid_size();
    const auto r = static_cast<Eigen::Index>(std::min<std::size_t>(z.z.size(), cov.rank()));
    const Eigen::MatrixXd phi = cov.frame().synthesize_columns(cov.eigenvectors().leftCols(r));
    const double h = 1.0 / static_cast<double>(D - 1);

    // left-point integrals int_0^t phi_k and a Brownian path on the grid
    Eigen::MatrixXd integrals = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(D), r);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(D));
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(r);
    auto rng = make_rng(seed, "wn.path");
    std::normal_distribution<double> normal;
    for (Eigen::Index i = 1; i < static_cast<Eigen::Index>(D); ++i) {
        const double dw = std::sqrt(h) * normal(rng);
        integrals.row(i) = integrals.row(i - 1) + h * phi.row(i - 1);
        w[i] = w[i - 1] + dw;
        xi += dw * phi.row(i - 1).transpose();
    }
    const Eigen::VectorXd residual = w - integrals * xi;
    return integrals * z.z.head(r) + z.sigma * residual;
}

}  // namespace flrwn
