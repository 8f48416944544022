#include "flrwn/design.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "flrwn/errors.hpp"

namespace flrwn {

namespace {

constexpr std::size_t kMaxDefaultTruncation = 128;
constexpr double kGramRankTolerance = 1e-10;

double sigma_x(const DesignSpec& spec, std::size_t i) { return spec.diffusion ? (*spec.diffusion)[i] : 1.0; }

}  // namespace

const char* to_string(DesignKind kind) {
    return kind == DesignKind::basis_expansion ? "basis" : "gaussian";
}

const char* to_string(CoefficientLaw::Shape shape) {
    switch (shape) {
        case CoefficientLaw::Shape::uniform: return "uniform";
        case CoefficientLaw::Shape::triangular: return "triangular";
        case CoefficientLaw::Shape::degenerate: return "degenerate";
    }
    return "uniform";
}

double CoefficientLaw::variance() const {
    const double a2 = half_width * half_width;
    switch (shape) {
        case Shape::uniform: return a2 / 3.0;
        case Shape::triangular: return a2 / 6.0;
        case Shape::degenerate: return 0.0;
    }
    return 0.0;
}

double CoefficientLaw::draw(Rng& rng) const {
    std::uniform_real_distribution<double> u(-half_width, half_width);
    switch (shape) {
        case Shape::uniform: return u(rng);
        case Shape::triangular: {
            // sum of two independent uniforms on [-a/2, a/2]
            const double a = u(rng);
            const double b = u(rng);
            return 0.5 * (a + b);
        }
        case Shape::degenerate: return 0.0;
    }
    return 0.0;
}

void DesignSpec::validate() const {
    if (!(alpha >= 2.0) || !std::isfinite(alpha)) throw SpecError("alpha must be finite and >= 2, got " + std::to_string(alpha));
    if (grid_size < 2) throw SpecError("grid_size must be at least 2");
    if (kind == DesignKind::basis_expansion) {
        if (!(std::abs(law.variance() - 1.0) <= 1e-12)) {
            throw SpecError(std::string("coefficient law '") + to_string(law.shape) +
                            "' must have variance 1, has " + std::to_string(law.variance()));
        }
        if (truncation > 0 && grid_size < 2 * truncation) {
            throw SpecError("grid of " + std::to_string(grid_size) + " nodes cannot resolve truncation " +
                            std::to_string(truncation));
        }
    } else {
        if (diffusion) {
            if (diffusion->grid_size() != grid_size) throw SpecError("diffusion grid does not match grid_size");
            if (!(diffusion->values().minCoeff() > 0.0)) throw SpecError("diffusion sigma_X must be positive everywhere");
        }
    }
}

std::size_t DesignSpec::effective_truncation(std::size_t n) const {
    if (truncation > 0) return truncation;
    return std::clamp<std::size_t>(2 * n, 1, std::min(kMaxDefaultTruncation, grid_size / 2));
}

Frame DesignSpec::frame(std::size_t n) const {
    if (kind == DesignKind::integrated_gaussian) return Frame::grid(grid_size);
    return Frame::over(shared_fourier_basis(effective_truncation(n), grid_size));
}

DesignSample sample_basis_design(const DesignSpec& spec, std::size_t n, std::uint64_t seed) {
    if (spec.kind != DesignKind::basis_expansion) throw SpecError("sample_basis_design needs a basis-expansion spec");
    spec.validate();
    Frame frame = spec.frame(n);
    const auto J = static_cast<Eigen::Index>(frame.dim());
    Eigen::VectorXd scale(J);
    for (Eigen::Index j = 0; j < J; ++j) scale[j] = std::pow(static_cast<double>(j + 1), -spec.alpha / 2.0);
    Eigen::MatrixXd coords(J, static_cast<Eigen::Index>(n));
    auto rng = make_rng(seed, "design.basis");
    for (Eigen::Index i = 0; i < coords.cols(); ++i) {
        for (Eigen::Index j = 0; j < J; ++j) coords(j, i) = scale[j] * spec.law.draw(rng);
    }
    return DesignSample(std::move(frame), std::move(coords));
}

DesignSample sample_gaussian_design(const DesignSpec& spec, std::size_t n, std::uint64_t seed) {
    if (spec.kind != DesignKind::integrated_gaussian) throw SpecError("sample_gaussian_design needs an integrated-gaussian spec");
    spec.validate();
    const std::size_t D = spec.grid_size;
    const double root_h = std::sqrt(1.0 / static_cast<double>(D - 1));
    Eigen::MatrixXd values(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(n));
    auto rng = make_rng(seed, "design.gaussian");
    std::normal_distribution<double> normal;
    for (Eigen::Index i = 0; i < values.cols(); ++i) {
        double x = 0.0;
        values(0, i) = 0.0;
        for (std::size_t l = 1; l < D; ++l) {
            x += sigma_x(spec, l - 1) * root_h * normal(rng);
            values(static_cast<Eigen::Index>(l), i) = x;
        }
    }
    Frame frame = Frame::grid(D);
    const Eigen::VectorXd root_w = trapezoid_weights(D).cwiseSqrt();
    return DesignSample(std::move(frame), root_w.asDiagonal() * values);
}

DesignSample sample_design(const DesignSpec& spec, std::size_t n, std::uint64_t seed) {
    return spec.kind == DesignKind::basis_expansion ? sample_basis_design(spec, n, seed)
                                                    : sample_gaussian_design(spec, n, seed);
}

CovOperator true_covariance(const DesignSpec& spec, std::size_t K, std::size_t n) {
    spec.validate();
    if (spec.kind == DesignKind::basis_expansion) {
        Frame frame = spec.frame(n);
        if (K > frame.dim()) {
            throw SpecError("K = " + std::to_string(K) + " exceeds the truncation J = " + std::to_string(frame.dim()));
        }
        const auto k = static_cast<Eigen::Index>(K);
        Eigen::VectorXd lambda(k);
        for (Eigen::Index j = 0; j < k; ++j) lambda[j] = std::pow(static_cast<double>(j + 1), -spec.alpha);
        Eigen::MatrixXd vectors = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(frame.dim()), k);
        return CovOperator(std::move(frame), std::move(lambda), std::move(vectors));
    }
    // E X(s_a) X(s_b) = sum_{l < min(a,b)} sigma_X(t_l)^2 h
    const std::size_t D = spec.grid_size;
    const double h = 1.0 / static_cast<double>(D - 1);
    Eigen::VectorXd cumulative(static_cast<Eigen::Index>(D));
    cumulative[0] = 0.0;
    for (std::size_t l = 1; l < D; ++l) {
        const double s = sigma_x(spec, l - 1);
        cumulative[static_cast<Eigen::Index>(l)] = cumulative[static_cast<Eigen::Index>(l - 1)] + s * s * h;
    }
    const Eigen::VectorXd root_w = trapezoid_weights(D).cwiseSqrt();
    Eigen::MatrixXd kernel(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
    for (Eigen::Index a = 0; a < kernel.rows(); ++a) {
        for (Eigen::Index b = 0; b < kernel.cols(); ++b) kernel(a, b) = root_w[a] * root_w[b] * cumulative[std::min(a, b)];
    }
    return decompose_kernel(Frame::grid(D), kernel, K);
}

ConditionXReport verify_condition_x(const DesignSpec& spec, const DesignSample& sample) {
    spec.validate();
    const std::size_t n = sample.size();
    if (n < 100) throw ArgumentError("verify_condition_x needs n >= 100, got " + std::to_string(n));
    ConditionXReport report;
    report.sample_size = n;
    const Eigen::MatrixXd& c = sample.coordinates();
    const Eigen::VectorXd norms = c.colwise().norm().transpose();
    report.mean_norm = norms.mean();
    report.mean_function_norm = c.rowwise().mean().norm();
    for (int step = 1; step <= 8; ++step) {
        const double x = 0.5 * step * report.mean_norm;
        report.thresholds.push_back(x);
        report.tail_frequency.push_back(static_cast<double>((norms.array() >= x).count()) / static_cast<double>(n));
    }
    // rank of the Gram matrix <X_i, X_j>, via whichever side is smaller
    const Eigen::MatrixXd gram = n <= static_cast<std::size_t>(c.rows()) ? Eigen::MatrixXd(c.transpose() * c)
                                                                          : Eigen::MatrixXd(c * c.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = solver.eigenvalues();
    const double top = ev.size() > 0 ? ev.maxCoeff() : 0.0;
    report.gram_rank = top > 0.0 ? static_cast<std::size_t>((ev.array() > kGramRankTolerance * top).count()) : 0;
    report.rank_deficient = report.gram_rank < n;
    return report;
}

Eigen::VectorXd simulate_responses(const DesignSample& sample, const Eigen::Ref<const Eigen::VectorXd>& theta,
                                   double sigma, std::uint64_t seed) {
    if (static_cast<std::size_t>(theta.size()) != sample.frame().dim()) throw DimensionError("theta does not match the design frame");
    if (!(sigma >= 0.0)) throw ArgumentError("sigma must be nonnegative");
    Eigen::VectorXd y = sample.coordinates().transpose() * theta;
    if (sigma > 0.0) {
        auto rng = make_rng(seed, "responses");
        std::normal_distribution<double> normal;
        for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sigma * normal(rng);
    }
    return y;
}

}  // namespace flrwn
