#pragma once

// Covariance operators on L2([0,1]) held in eigen-decomposed form, in the
// coordinates of a Frame. Population operators (Gamma) and empirical ones
// (Gamma-hat, built from a DesignSample) share this representation.

#include <cstddef>

#include <Eigen/Dense>

#include "flrwn/design_sample.hpp"
#include "flrwn/function_space.hpp"

namespace flrwn {

/// Eigenvalues below this multiple of the largest one are treated as zero.
inline constexpr double kRankTolerance = 1e-12;

class CovOperator {
public:
    /// `eigenvalues` non-increasing and positive, `eigenvectors` dim x rank orthonormal
    /// coordinate columns. `sample_size` is n for an empirical operator, 0 otherwise.
    CovOperator(Frame frame, Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors,
                std::size_t sample_size = 0);

    const Frame& frame() const { return frame_; }
    std::size_t rank() const { return static_cast<std::size_t>(eigenvalues_.size()); }
    std::size_t sample_size() const { return sample_size_; }
    bool empirical() const { return sample_size_ > 0; }

    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }
    /// Zero-based; returns 0 past the retained rank.
    double eigenvalue(std::size_t k) const {
        return k < rank() ? eigenvalues_[static_cast<Eigen::Index>(k)] : 0.0;
    }
    GridFunction eigenfunction(std::size_t k) const;
    Basis eigenbasis() const;

    /// V diag(lambda) V^T in frame coordinates.
    Eigen::MatrixXd kernel_coordinates() const;
    /// K(s,t) on the grid (grid_size x grid_size); exactly symmetric.
    Eigen::MatrixXd kernel() const;

    Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& coordinates) const;
    Eigen::VectorXd sqrt_apply(const Eigen::Ref<const Eigen::VectorXd>& coordinates) const;

    /// Copy keeping only the leading `count` eigenpairs.
    CovOperator truncated(std::size_t count) const;

private:
    Frame frame_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigenvectors_;
    std::size_t sample_size_;
};

GridFunction apply(const CovOperator& op, const GridFunction& f);

/// Sum_k lambda_k^{1/2} <f, phi_k> phi_k over the retained eigenpairs.
GridFunction sqrt_apply(const CovOperator& op, const GridFunction& f);

enum class EigenRoute { automatic, dual, primal };

/// Gamma-hat f = (1/n) Sum_j <X_j, f> X_j, eigen-decomposed. The dual route solves
/// the n x n matrix <X_i, X_j>/n, the primal route the dim x dim kernel; automatic
/// picks the smaller. Signs follow the reference-Fourier convention and, at full
/// rank n, the last eigenfunction is flipped if needed so that det A = +1.
CovOperator empirical_covariance(const DesignSample& sample, EigenRoute route = EigenRoute::automatic);

/// Eigen-decomposes a symmetric kernel given in frame coordinates.
CovOperator decompose_kernel(Frame frame, const Eigen::Ref<const Eigen::MatrixXd>& kernel_coordinates,
                             std::size_t max_rank = 0);

/// Flips each eigenvector so that its largest-magnitude coefficient in the reference
/// Fourier basis (first one on ties) is positive.
void apply_sign_convention(const Frame& frame, Eigen::MatrixXd& eigenvectors);

/// Quadrature-weighted Frobenius distance of the two kernels.
double hs_distance(const CovOperator& a, const CovOperator& b);

struct EigenGapReport {
    Eigen::VectorXd scaled_gaps;  ///< (lambda_j - lambda_{j+1}) j^{alpha+1}, j = 1..r
    double min_scaled_gap = 0.0;
    std::size_t argmin = 0;       ///< one-based j of the minimum
    double threshold = 0.0;
    bool flagged = false;         ///< min_scaled_gap < threshold
};

/// Spacing diagnostic for the eigenvalue sequence. `max_index` limits j (0: full rank).
EigenGapReport eigen_gap_check(const CovOperator& op, double alpha, double threshold = 1e-8,
                               std::size_t max_index = 0);

}  // namespace flrwn
