#pragma once

// Random design functions X_1..X_n and their population covariance operators.
//
// Two processes are available. The basis expansion X = sum_j j^{-alpha/2} G_j phi_j
// over a Fourier basis lives in a J-dimensional coordinate frame; the integrated
// Gaussian process X(t) = int_0^t sigma_X(s) dW(s) lives on the grid.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flrwn/covariance.hpp"
#include "flrwn/design_sample.hpp"
#include "flrwn/function_space.hpp"
#include "flrwn/rng.hpp"

namespace flrwn {

enum class DesignKind { basis_expansion, integrated_gaussian };

const char* to_string(DesignKind kind);

/// Symmetric compactly supported law on [-half_width, half_width] for the G_j.
struct CoefficientLaw {
    enum class Shape { uniform, triangular, degenerate };
    Shape shape = Shape::uniform;
    double half_width = 1.7320508075688772;  // sqrt(3)

    double variance() const;
    double draw(Rng& rng) const;

    static CoefficientLaw uniform() { return {}; }
    static CoefficientLaw triangular() { return {Shape::triangular, 2.449489742783178}; }
    static CoefficientLaw degenerate() { return {Shape::degenerate, 0.0}; }
};

const char* to_string(CoefficientLaw::Shape shape);

struct DesignSpec {
    DesignKind kind = DesignKind::basis_expansion;
    double alpha = 2.0;
    /// Basis functions in the expansion; 0 selects min(2n, 128).
    std::size_t truncation = 0;
    CoefficientLaw law;
    /// sigma_X on the grid; empty means sigma_X = 1.
    std::optional<GridFunction> diffusion;
    std::size_t grid_size = kDefaultGridSize;

    /// Throws SpecError when an invariant fails.
    void validate() const;
    /// J actually used for a sample of size n.
    std::size_t effective_truncation(std::size_t n) const;
    /// Coordinate frame shared by every sample (and the population operator) of size n.
    Frame frame(std::size_t n) const;
};

DesignSample sample_basis_design(const DesignSpec& spec, std::size_t n, std::uint64_t seed);

/// Left-point Ito cumulative sums of sigma_X(t_i) dW_i, X(0) = 0.
DesignSample sample_gaussian_design(const DesignSpec& spec, std::size_t n, std::uint64_t seed);

/// Dispatches on spec.kind.
DesignSample sample_design(const DesignSpec& spec, std::size_t n, std::uint64_t seed);

/// Population covariance with the leading K eigenpairs. For the basis expansion the
/// frame is spec.frame(n) and the eigenpairs are (j^{-alpha}, phi_j) exactly; `n` only
/// fixes J. For the integrated Gaussian process the discretized kernel is eigen-solved.
CovOperator true_covariance(const DesignSpec& spec, std::size_t K, std::size_t n = 0);

struct ConditionXReport {
    std::vector<double> thresholds;      ///< x values
    std::vector<double> tail_frequency;  ///< fraction of ||X_i|| >= x
    double mean_norm = 0.0;              ///< average ||X_i||
    double mean_function_norm = 0.0;     ///< ||(1/n) sum_i X_i||
    std::size_t gram_rank = 0;
    std::size_t sample_size = 0;
    bool rank_deficient = false;         ///< gram_rank < n, e.g. truncation J < n
};

/// Diagnostics for the design law. Requires n >= 100.
ConditionXReport verify_condition_x(const DesignSpec& spec, const DesignSample& sample);

/// Y_i = <X_i, theta> + sigma eps_i, theta given in the sample's frame coordinates.
Eigen::VectorXd simulate_responses(const DesignSample& sample, const Eigen::Ref<const Eigen::VectorXd>& theta,
                                   double sigma, std::uint64_t seed);

}  // namespace flrwn
