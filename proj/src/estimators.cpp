#include "flrwn/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "flrwn/errors.hpp"
#include "flrwn/rng.hpp"

namespace flrwn {

namespace {

struct Phi1Value {
    double value = 0.0;
    std::size_t support = 0;
    bool truncated = false;  ///< the spectrum ended while weights were still positive
};

Phi1Value phi1_detail(double x, const Spectrum& lambda, const ThetaClass& cls) {
    Phi1Value out;
    for (std::size_t k = 1;; ++k) {
        const double bk = cls.beta_k(k);
        if (x * bk >= 1.0) break;
        if (lambda.length > 0 && k > lambda.length) {
            out.truncated = true;
            break;
        }
        out.value += bk * (1.0 - x * bk) / lambda(k);
        out.support = k;
    }
    return out;
}

void require_sigma_n(double sigma, double n) {
    if (!(sigma > 0.0)) throw ArgumentError("sigma must be positive");
    if (!(n > 0.0)) throw ArgumentError("n must be positive");
}

}  // namespace

void ThetaClass::validate(double alpha) const {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw SpecError("ellipsoid radius must be positive");
    if (!(beta > (alpha + 1.0) / 2.0)) {
        throw SpecError("beta = " + std::to_string(beta) + " must exceed (alpha + 1)/2 = " + std::to_string((alpha + 1.0) / 2.0));
    }
}

void ThetaClass::validate_data_driven(double alpha) const {
    validate(alpha);
    if (!(beta > alpha + 1.5)) {
        throw SpecError("data-driven tuning needs beta > alpha + 3/2, got beta = " + std::to_string(beta));
    }
}

double ThetaClass::beta_k(std::size_t k) const {
    return std::sqrt(1.0 + std::pow(static_cast<double>(k), 2.0 * beta));
}

double ThetaClass::ellipsoid_norm(const Eigen::Ref<const Eigen::VectorXd>& theta) const {
    double s = 0.0;
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
        const double bk = beta_k(static_cast<std::size_t>(k + 1));
        s += bk * bk * theta[k] * theta[k];
    }
    return s;
}

Spectrum Spectrum::power(double alpha) {
    return {[alpha](std::size_t k) { return std::pow(static_cast<double>(k), -alpha); }, 0};
}

Spectrum Spectrum::from(Eigen::VectorXd lambda) {
    const auto length = static_cast<std::size_t>(lambda.size());
    return {[values = std::move(lambda)](std::size_t k) {
                if (k < 1 || k > static_cast<std::size_t>(values.size())) throw ArgumentError("spectrum index out of range");
                return values[static_cast<Eigen::Index>(k - 1)];
            },
            length};
}

std::size_t select_cutoff(std::size_t m, double alpha, double beta) {
    if (m < 1) throw ArgumentError("cutoff needs m >= 1");
    const double x = std::pow(static_cast<double>(m), 1.0 / (2.0 * beta + alpha + 1.0));
    // guard against 1000^{1/7}-style values landing a hair above an integer
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(x * (1.0 - 1e-12))));
}

Eigen::VectorXd cutoff_estimate(const SeqObservation& obs, std::size_t K) {
    if (K > obs.size()) throw ArgumentError("cutoff K = " + std::to_string(K) + " exceeds the observed frequencies");
    const auto k = static_cast<Eigen::Index>(K);
    if (k > 0 && !(obs.lambda.head(k).minCoeff() > 0.0)) throw ArgumentError("eigenvalues up to K must be positive");
    return obs.y.head(k).cwiseQuotient(obs.lambda.head(k).cwiseSqrt());
}

Eigen::VectorXd cutoff_estimate(const WnCoefficients& z, const CovOperator& cov_hat, const CovOperator& population,
                                std::size_t m, std::size_t K) {
    if (K > population.rank()) throw ArgumentError("cutoff K exceeds the available spectrum");
    if (m < 1) throw ArgumentError("m must be positive");
    if (!cov_hat.frame().compatible(population.frame())) throw DimensionError("operators live in different frames");
    const auto r = static_cast<Eigen::Index>(std::min<std::size_t>(z.z.size(), cov_hat.rank()));
    const auto k = static_cast<Eigen::Index>(K);
    const Eigen::MatrixXd cross = population.eigenvectors().leftCols(k).transpose() * cov_hat.eigenvectors().leftCols(r);
    const Eigen::VectorXd weighted = cov_hat.eigenvalues().head(r).cwiseSqrt().cwiseProduct(z.z.head(r));
    return (cross * weighted).cwiseQuotient(population.eigenvalues().head(k)) / std::sqrt(static_cast<double>(m));
}

Eigen::VectorXd cutoff_estimate(const DesignSample& sample, const Eigen::Ref<const Eigen::VectorXd>& Y,
                                const CovOperator& population, std::size_t K) {
    if (K > population.rank()) throw ArgumentError("cutoff K exceeds the available spectrum");
    if (static_cast<std::size_t>(Y.size()) != sample.size()) throw DimensionError("response length does not match the sample");
    if (!sample.frame().compatible(population.frame())) throw DimensionError("designs and operator live in different frames");
    const auto k = static_cast<Eigen::Index>(K);
    const Eigen::VectorXd scores = population.eigenvectors().leftCols(k).transpose() * (sample.coordinates() * Y);
    return scores.cwiseQuotient(population.eigenvalues().head(k)) / static_cast<double>(sample.size());
}

Eigen::VectorXd pinsker_weights(double gamma, const ThetaClass& cls, std::size_t K) {
    if (!(gamma >= 0.0)) throw ArgumentError("gamma must be nonnegative");
    Eigen::VectorXd w(static_cast<Eigen::Index>(K));
    for (std::size_t k = 1; k <= K; ++k) w[static_cast<Eigen::Index>(k - 1)] = std::max(0.0, 1.0 - gamma * cls.beta_k(k));
    return w;
}

std::size_t pinsker_support(double gamma, const ThetaClass& cls) {
    if (!(gamma > 0.0)) throw ArgumentError("support is unbounded for gamma <= 0");
    std::size_t k = 0;
    while (gamma * cls.beta_k(k + 1) < 1.0) ++k;
    return k;
}

double pinsker_phi1(double x, const Spectrum& lambda, const ThetaClass& cls) {
    if (!(x > 0.0)) throw ArgumentError("Phi_1 diverges at x <= 0");
    const auto v = phi1_detail(x, lambda, cls);
    if (v.truncated) throw ArgumentError("spectrum is shorter than the weight support at x = " + std::to_string(x));
    return v.value;
}

double pinsker_gamma_oracle(const Spectrum& lambda, const ThetaClass& cls, double sigma, double n, double tol) {
    if (!(tol > 0.0)) throw ArgumentError("tolerance must be positive");
    require_sigma_n(sigma, n);
    const double slope = cls.radius * n / (sigma * sigma);
    auto phi = [&](double x) { return phi1_detail(x, lambda, cls).value - slope * x; };

    double lo = 0.0;
    double hi = 1.0 / cls.beta_k(1);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (phi(mid) > 0.0) lo = mid;
        else hi = mid;
    }
    double root = 0.5 * (lo + hi);

    // Phi is linear between kinks: solve exactly on the piece holding the bracket
    const auto piece = phi1_detail(root, lambda, cls);
    if (!piece.truncated && piece.support > 0) {
        double a = 0.0;
        double b = 0.0;
        for (std::size_t k = 1; k <= piece.support; ++k) {
            const double bk = cls.beta_k(k);
            a += bk / lambda(k);
            b += bk * bk / lambda(k);
        }
        const double exact = a / (b + slope);
        if (exact > 0.0 && exact * cls.beta_k(piece.support) < 1.0 && exact * cls.beta_k(piece.support + 1) >= 1.0) {
            root = exact;
        }
    }
    if (phi1_detail(root, lambda, cls).truncated) {
        throw ArgumentError("spectrum of length " + std::to_string(lambda.length) + " is shorter than the Pinsker support");
    }
    return root;
}

double sharp_risk_constant(const Spectrum& lambda, const ThetaClass& cls, double sigma, double n, double gamma) {
    require_sigma_n(sigma, n);
    if (!(gamma > 0.0)) throw ArgumentError("gamma must be positive");
    double s = 0.0;
    for (std::size_t k = 1;; ++k) {
        const double w = 1.0 - gamma * cls.beta_k(k);
        if (w <= 0.0) break;
        if (lambda.length > 0 && k > lambda.length) throw ArgumentError("spectrum is shorter than the weight support");
        s += w / lambda(k);
    }
    return sigma * sigma / n * s;
}

double sharp_risk_constant(const Spectrum& lambda, const ThetaClass& cls, double sigma, double n) {
    return sharp_risk_constant(lambda, cls, sigma, n, pinsker_gamma_oracle(lambda, cls, sigma, n));
}

double default_rho(double alpha) { return 0.5 * (alpha / (2.0 * alpha + 3.0) + 0.5); }

void validate_rho(double rho, double alpha) {
    const double lo = alpha / (2.0 * alpha + 3.0);
    if (!(rho > lo && rho < 0.5)) {
        throw ArgumentError("rho = " + std::to_string(rho) + " must lie in (" + std::to_string(lo) + ", 0.5)");
    }
}

double support_cap(double n, double rho, double alpha) { return std::pow(n, rho / alpha) / std::log(n); }

PinskerFit flr_pinsker_estimator(const DesignSample& sample, const Eigen::Ref<const Eigen::VectorXd>& Y,
                                 const CovOperator& cov, const Eigen::Ref<const Eigen::VectorXd>& weights,
                                 const PinskerOptions& options) {
    validate_rho(options.rho, options.alpha);
    const std::size_t n = sample.size();
    if (static_cast<std::size_t>(Y.size()) != n) throw DimensionError("response length does not match the sample");
    if (!cov.frame().compatible(sample.frame())) throw DimensionError("covariance and designs live in different frames");
    if (n < 2) throw ArgumentError("the estimator needs n >= 2");
    const double floor_n = options.floor_n > 0.0 ? options.floor_n : static_cast<double>(n);

    PinskerFit fit;
    fit.floor = std::pow(floor_n, -options.rho);
    fit.cap = support_cap(floor_n, options.rho, options.alpha);
    const auto r = static_cast<Eigen::Index>(std::min<std::size_t>(weights.size(), cov.rank()));
    Eigen::VectorXd w = weights.head(r);
    for (Eigen::Index j = 0; j < r; ++j) {
        if (static_cast<double>(j + 1) > fit.cap && w[j] > 0.0) {
            fit.cap_binding = true;
            if (options.enforce_cap) w[j] = 0.0;
        }
    }
    // (1/n) sum_l Y_l <X_l, phi-hat_j>
    const Eigen::VectorXd scores =
        cov.eigenvectors().leftCols(r).transpose() * (sample.coordinates() * Y) / static_cast<double>(n);
    const Eigen::VectorXd floored = cov.eigenvalues().head(r).cwiseMax(fit.floor);
    fit.coefficients = w.cwiseProduct(scores).cwiseQuotient(floored);
    fit.coordinates = cov.eigenvectors().leftCols(r) * fit.coefficients;
    return fit;
}

std::size_t data_driven_split(std::size_t n) {
    if (n < 8) throw ArgumentError("data-driven split needs n >= 8, got " + std::to_string(n));
    const double dn = static_cast<double>(n);
    const auto m = static_cast<std::size_t>(std::ceil(dn * (1.0 - 1.0 / std::log(dn))));
    if (m < 1 || m >= n) throw ArgumentError("degenerate split for n = " + std::to_string(n));
    return m;
}

DataDrivenGamma data_driven_gamma(const DesignSample& sample, const ThetaClass& cls, double sigma, double rho,
                                  double tol) {
    const std::size_t n = sample.size();
    if (!(rho > 0.0 && rho < 0.5)) throw ArgumentError("rho must lie in (0, 0.5)");
    DataDrivenGamma out;
    out.m = data_driven_split(n);
    const double dn = static_cast<double>(n);
    const auto training = empirical_covariance(sample.slice(out.m, n - out.m));
    const double floor = std::pow(dn, -rho);
    Spectrum floored{[&training, floor](std::size_t k) { return std::max(training.eigenvalue(k - 1), floor); }, 0};
    out.gamma_tilde = pinsker_gamma_oracle(floored, cls, sigma, dn, tol);
    out.lower = std::pow(dn, -cls.beta / (2.0 * cls.beta + 1.0));
    out.upper = std::pow(dn, -cls.beta / (3.0 * cls.beta + 1.0));
    out.gamma_hat = std::clamp(out.gamma_tilde, out.lower, out.upper);
    return out;
}

DataDrivenFit fit_data_driven_pinsker(const DesignSample& sample, const Eigen::Ref<const Eigen::VectorXd>& Y,
                                      const ThetaClass& cls, double sigma, const PinskerOptions& options) {
    validate_rho(options.rho, options.alpha);
    if (static_cast<std::size_t>(Y.size()) != sample.size()) throw DimensionError("response length does not match the sample");
    DataDrivenFit out;
    out.gamma = data_driven_gamma(sample, cls, sigma, options.rho);
    const auto estimation = sample.slice(0, out.gamma.m);
    const auto cov = empirical_covariance(estimation);
    const auto weights = pinsker_weights(out.gamma.gamma_hat, cls, std::min(cov.rank(), pinsker_support(out.gamma.gamma_hat, cls)));
    PinskerOptions opts = options;
    if (opts.floor_n <= 0.0) opts.floor_n = static_cast<double>(sample.size());
    out.fit = flr_pinsker_estimator(estimation, Y.head(static_cast<Eigen::Index>(out.gamma.m)), cov, weights, opts);
    return out;
}

const char* to_string(ThetaMode mode) {
    switch (mode) {
        case ThetaMode::boundary: return "boundary";
        case ThetaMode::random: return "random";
        case ThetaMode::least_favorable: return "least-favorable";
        case ThetaMode::spike: return "spike";
    }
    return "boundary";
}

ThetaMode parse_theta_mode(std::string_view text) {
    if (text == "boundary") return ThetaMode::boundary;
    if (text == "random") return ThetaMode::random;
    if (text == "least-favorable" || text == "least_favorable") return ThetaMode::least_favorable;
    if (text == "spike") return ThetaMode::spike;
    throw ArgumentError("unknown theta mode '" + std::string(text) + "'");
}

Eigen::VectorXd sample_theta(const ThetaClass& cls, const ThetaRequest& request, const Spectrum& lambda,
                             std::uint64_t seed) {
    if (!(cls.radius > 0.0)) throw SpecError("ellipsoid radius must be positive");
    const auto K = static_cast<Eigen::Index>(request.count);
    if (K < 1) throw ArgumentError("theta needs at least one coefficient");
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(K);
    switch (request.mode) {
        case ThetaMode::boundary:
            for (Eigen::Index k = 0; k < K; ++k) {
                const double kk = static_cast<double>(k + 1);
                theta[k] = std::pow(kk, -cls.beta - 0.5) / std::log(kk + 1.0);
            }
            theta *= std::sqrt(cls.radius / cls.ellipsoid_norm(theta));
            break;
        case ThetaMode::random: {
            auto rng = make_rng(seed, "theta.random");
            std::normal_distribution<double> normal;
            std::uniform_real_distribution<double> unit;
            for (Eigen::Index k = 0; k < K; ++k) theta[k] = normal(rng);
            const double radius = std::pow(unit(rng), 1.0 / static_cast<double>(K));
            theta *= radius * std::sqrt(cls.radius / cls.ellipsoid_norm(theta));
            break;
        }
        case ThetaMode::least_favorable: {
            const double gamma = pinsker_gamma_oracle(lambda, cls, request.sigma, request.n);
            if (pinsker_support(gamma, cls) > request.count) {
                throw ArgumentError("least-favorable profile needs more than " + std::to_string(request.count) + " coefficients");
            }
            const double noise = request.sigma * request.sigma / request.n;
            for (Eigen::Index k = 0; k < K; ++k) {
                const auto kk = static_cast<std::size_t>(k + 1);
                const double v = noise / lambda(kk) * (1.0 / (gamma * cls.beta_k(kk)) - 1.0);
                theta[k] = std::sqrt(std::max(0.0, v));
            }
            break;
        }
        case ThetaMode::spike: {
            if (request.spike_index < 1 || request.spike_index > request.count) throw ArgumentError("spike index out of range");
            const double bk = cls.beta_k(request.spike_index);
            theta[static_cast<Eigen::Index>(request.spike_index - 1)] = std::sqrt(cls.radius) / bk;
            break;
        }
    }
    return theta;
}

Eigen::VectorXd embed_coefficients(const Eigen::Ref<const Eigen::VectorXd>& coefficients, const CovOperator& population) {
    if (static_cast<std::size_t>(coefficients.size()) > population.rank()) {
        throw DimensionError("more coefficients than population eigenfunctions");
    }
    return population.eigenvectors().leftCols(coefficients.size()) * coefficients;
}

}  // namespace flrwn
