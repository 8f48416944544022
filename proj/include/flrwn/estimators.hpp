#pragma once

// Spectral-cutoff estimation and the Pinsker machinery over the Sobolev-type ellipsoid
// sum_k (1 + k^{2 beta}) theta_k^2 <= C.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>

#include <Eigen/Dense>

#include "flrwn/covariance.hpp"
#include "flrwn/design_sample.hpp"
#include "flrwn/equivalence.hpp"
#include "flrwn/whitenoise.hpp"

namespace flrwn {

struct ThetaClass {
    double beta = 2.0;
    double radius = 1.0;  ///< C_Theta

    /// beta > (alpha + 1)/2 and radius > 0; SpecError otherwise.
    void validate(double alpha) const;
    /// Additionally beta > alpha + 3/2, needed by the data-driven estimator.
    void validate_data_driven(double alpha) const;

    /// beta_k = (1 + k^{2 beta})^{1/2}, k one-based.
    double beta_k(std::size_t k) const;
    double ellipsoid_norm(const Eigen::Ref<const Eigen::VectorXd>& theta) const;
};

/// Eigenvalue sequence lambda_k, k one-based. `length` 0 means defined for every k.
struct Spectrum {
    std::function<double(std::size_t)> value;
    std::size_t length = 0;

    double operator()(std::size_t k) const { return value(k); }

    static Spectrum power(double alpha);
    static Spectrum from(Eigen::VectorXd lambda);
};

/// K = ceil(m^{1/(2 beta + alpha + 1)}), at least 1.
std::size_t select_cutoff(std::size_t m, double alpha, double beta);

/// Sequence form: theta-hat_k = y_k / sqrt(lambda_k), k <= K.
Eigen::VectorXd cutoff_estimate(const SeqObservation& obs, std::size_t K);

/// White-noise form on the first sample: m^{-1/2} lambda_k^{-1} sum_j lambda-hat_j^{1/2} <phi_k, phi-hat_j> z_j,
/// with (lambda-hat, phi-hat) from `cov_hat` and (lambda, phi) from `population`.
Eigen::VectorXd cutoff_estimate(const WnCoefficients& z, const CovOperator& cov_hat, const CovOperator& population,
                                std::size_t m, std::size_t K);

/// Regression form: (1/(m lambda_k)) sum_l Y_l <X_l, phi_k>.
Eigen::VectorXd cutoff_estimate(const DesignSample& sample, const Eigen::Ref<const Eigen::VectorXd>& Y,
                                const CovOperator& population, std::size_t K);

/// w_k = (1 - gamma beta_k)_+, k = 1..K.
Eigen::VectorXd pinsker_weights(double gamma, const ThetaClass& cls, std::size_t K);

/// Number of k with gamma beta_k < 1.
std::size_t pinsker_support(double gamma, const ThetaClass& cls);

/// Phi_1(x) = sum_k lambda_k^{-1} beta_k (1 - x beta_k)_+, x > 0.
double pinsker_phi1(double x, const Spectrum& lambda, const ThetaClass& cls);

/// Unique zero of Phi_1(x) - C x n / sigma^2 on [0, 1/beta_1]. Bisection down to an absolute
/// width `tol` on gamma, finished by the exact linear solve on the final piece.
double pinsker_gamma_oracle(const Spectrum& lambda, const ThetaClass& cls, double sigma, double n,
                            double tol = 1e-12);

/// a_n = (sigma^2/n) sum_k lambda_k^{-1} (1 - gamma beta_k)_+.
double sharp_risk_constant(const Spectrum& lambda, const ThetaClass& cls, double sigma, double n, double gamma);
double sharp_risk_constant(const Spectrum& lambda, const ThetaClass& cls, double sigma, double n);

struct PinskerPlan {
    double gamma = 0.0;
    Eigen::VectorXd weights;  ///< over the support
    double a_n = 0.0;
    double rho = 0.0;
    std::size_t m = 0;        ///< estimation part of the split
};

/// Valid truncation exponents lie in (alpha/(2 alpha + 3), 1/2); the default is the midpoint.
double default_rho(double alpha);
void validate_rho(double rho, double alpha);

/// n^{rho/alpha} / log n, the index beyond which the weights may be forced to zero.
double support_cap(double n, double rho, double alpha);

struct PinskerOptions {
    double rho = 0.0;
    double alpha = 2.0;
    /// n in the floor n^{-rho} and in the support cap; 0 uses the sample size.
    double floor_n = 0.0;
    bool enforce_cap = false;
};

struct PinskerFit {
    Eigen::VectorXd coefficients;  ///< along phi-hat_j
    Eigen::VectorXd coordinates;   ///< theta-hat in the frame
    double floor = 0.0;            ///< n^{-rho}
    double cap = 0.0;
    bool cap_binding = false;      ///< some weight past the cap was nonzero
};

/// theta-hat = sum_j w_j (1/n) sum_l Y_l <X_l, phi-hat_j> phi-hat_j / max(lambda-hat_j, n^{-rho}).
/// `cov` is the empirical covariance of `sample`.
PinskerFit flr_pinsker_estimator(const DesignSample& sample, const Eigen::Ref<const Eigen::VectorXd>& Y,
                                 const CovOperator& cov, const Eigen::Ref<const Eigen::VectorXd>& weights,
                                 const PinskerOptions& options);

/// m = ceil(n (1 - 1/log n)), the size of the estimation part.
std::size_t data_driven_split(std::size_t n);

struct DataDrivenGamma {
    double gamma_hat = 0.0;
    double gamma_tilde = 0.0;
    double lower = 0.0;  ///< n^{-beta/(2 beta + 1)}
    double upper = 0.0;  ///< n^{-beta/(3 beta + 1)}
    std::size_t m = 0;
};

/// gamma-tilde solves Phi-hat_1 = Phi_2 with the floored eigenvalues of the last n - m designs;
/// gamma-hat is its median with the two bounds.
DataDrivenGamma data_driven_gamma(const DesignSample& sample, const ThetaClass& cls, double sigma, double rho,
                                  double tol = 1e-12);

struct DataDrivenFit {
    DataDrivenGamma gamma;
    PinskerFit fit;
};

/// Split, tune gamma on the training part, estimate on the first m pairs.
DataDrivenFit fit_data_driven_pinsker(const DesignSample& sample, const Eigen::Ref<const Eigen::VectorXd>& Y,
                                      const ThetaClass& cls, double sigma, const PinskerOptions& options);

enum class ThetaMode { boundary, random, least_favorable, spike };

const char* to_string(ThetaMode mode);
ThetaMode parse_theta_mode(std::string_view text);

struct ThetaRequest {
    ThetaMode mode = ThetaMode::boundary;
    std::size_t count = 64;       ///< K coefficients returned
    double sigma = 1.0;           ///< least-favorable only
    double n = 1.0;               ///< least-favorable only
    std::size_t spike_index = 1;  ///< spike only, one-based
};

/// Ellipsoid members. boundary: k^{-beta-1/2}/log(k+1) scaled onto the boundary; random: uniform in
/// the ellipsoid; least_favorable: theta_k^2 = (sigma^2/(n lambda_k)) (1/(gamma_n beta_k) - 1)_+;
/// spike: all mass on one coordinate.
Eigen::VectorXd sample_theta(const ThetaClass& cls, const ThetaRequest& request, const Spectrum& lambda,
                             std::uint64_t seed);

/// Frame coordinates of sum_k c_k phi_k over the population eigenfunctions.
Eigen::VectorXd embed_coefficients(const Eigen::Ref<const Eigen::VectorXd>& coefficients, const CovOperator& population);

}  // namespace flrwn
