#include "flrwn/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "flrwn/errors.hpp"

namespace flrwn {

namespace {

constexpr std::size_t kReferenceFourierCount = 64;

struct SortedEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

// Descending eigenpairs of a symmetric matrix, truncated to the numerical rank.
SortedEigen descending_eigen(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) throw std::runtime_error("symmetric eigen-solver failed");
    const Eigen::VectorXd ascending = solver.eigenvalues();
    const auto size = ascending.size();
    const double top = size > 0 ? ascending[size - 1] : 0.0;
    Eigen::Index rank = 0;
    if (top > 0.0) {
        while (rank < size && ascending[size - 1 - rank] > kRankTolerance * top) ++rank;
    }
    SortedEigen out;
    out.values = ascending.tail(rank).reverse();
    out.vectors = solver.eigenvectors().rightCols(rank).rowwise().reverse();
    return out;
}

Eigen::MatrixXd reference_coefficients(const Frame& frame, const Eigen::MatrixXd& vectors) {
    if (!frame.is_grid() && frame.basis()->kind() == BasisKind::fourier) return vectors;
    const std::size_t count = std::min(kReferenceFourierCount, frame.grid_size() / 2);
    const auto reference = shared_fourier_basis(count, frame.grid_size());
    const Eigen::MatrixXd values = frame.synthesize_columns(vectors);
    const Eigen::VectorXd w = trapezoid_weights(frame.grid_size());
    return reference->values().transpose() * w.asDiagonal() * values;
}

}  // namespace

CovOperator::CovOperator(Frame frame, Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors,
                         std::size_t sample_size)
    : frame_(std::move(frame)),
      eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      sample_size_(sample_size) {
    if (eigenvectors_.cols() != eigenvalues_.size() ||
        static_cast<std::size_t>(eigenvectors_.rows()) != frame_.dim()) {
        throw DimensionError("eigenpair shapes do not match the frame");
    }
    for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) {
        if (!(eigenvalues_[k] > 0.0)) throw ArgumentError("retained eigenvalues must be positive");
        if (k > 0 && eigenvalues_[k] > eigenvalues_[k - 1]) throw ArgumentError("eigenvalues must be non-increasing");
    }
}

GridFunction CovOperator::eigenfunction(std::size_t k) const {
    if (k >= rank()) throw ArgumentError("eigenfunction index " + std::to_string(k) + " beyond rank");
    return frame_.synthesize(eigenvectors_.col(static_cast<Eigen::Index>(k)));
}

Basis CovOperator::eigenbasis() const { return Basis(BasisKind::eigen, frame_.synthesize_columns(eigenvectors_)); }

Eigen::MatrixXd CovOperator::kernel_coordinates() const {
    Eigen::MatrixXd k = eigenvectors_ * eigenvalues_.asDiagonal() * eigenvectors_.transpose();
    return 0.5 * (k + k.transpose());
}

Eigen::MatrixXd CovOperator::kernel() const {
    // K(s,t) = sum_k lambda_k phi_k(s) phi_k(t)
    const Eigen::MatrixXd phi = frame_.synthesize_columns(eigenvectors_);
    Eigen::MatrixXd k = phi * eigenvalues_.asDiagonal() * phi.transpose();
    return 0.5 * (k + k.transpose());
}

Eigen::VectorXd CovOperator::apply(const Eigen::Ref<const Eigen::VectorXd>& coordinates) const {
    if (static_cast<std::size_t>(coordinates.size()) != frame_.dim()) throw DimensionError("coordinate length mismatch");
    return eigenvectors_ * eigenvalues_.cwiseProduct(eigenvectors_.transpose() * coordinates);
}

Eigen::VectorXd CovOperator::sqrt_apply(const Eigen::Ref<const Eigen::VectorXd>& coordinates) const {
    if (static_cast<std::size_t>(coordinates.size()) != frame_.dim()) throw DimensionError("coordinate length mismatch");
    return eigenvectors_ * eigenvalues_.cwiseSqrt().cwiseProduct(eigenvectors_.transpose() * coordinates);
}

CovOperator CovOperator::truncated(std::size_t count) const {
    const auto keep = static_cast<Eigen::Index>(std::min(count, rank()));
    return CovOperator(frame_, eigenvalues_.head(keep), eigenvectors_.leftCols(keep), sample_size_);
}

GridFunction apply(const CovOperator& op, const GridFunction& f) {
    return op.frame().synthesize(op.apply(op.frame().analyze(f)));
}

GridFunction sqrt_apply(const CovOperator& op, const GridFunction& f) {
    return op.frame().synthesize(op.sqrt_apply(op.frame().analyze(f)));
}

void apply_sign_convention(const Frame& frame, Eigen::MatrixXd& eigenvectors) {
    if (eigenvectors.cols() == 0) return;
    const Eigen::MatrixXd reference = reference_coefficients(frame, eigenvectors);
    for (Eigen::Index k = 0; k < eigenvectors.cols(); ++k) {
        Eigen::Index best = 0;
        double best_abs = -1.0;
        for (Eigen::Index i = 0; i < reference.rows(); ++i) {
            const double a = std::abs(reference(i, k));
            if (a > best_abs) {
                best_abs = a;
                best = i;
            }
        }
        if (reference(best, k) < 0.0) eigenvectors.col(k) *= -1.0;
    }
}

CovOperator decompose_kernel(Frame frame, const Eigen::Ref<const Eigen::MatrixXd>& kernel_coordinates,
                             std::size_t max_rank) {
    if (static_cast<std::size_t>(kernel_coordinates.rows()) != frame.dim() ||
        kernel_coordinates.rows() != kernel_coordinates.cols()) {
        throw DimensionError("kernel shape does not match the frame");
    }
    const Eigen::MatrixXd sym = 0.5 * (kernel_coordinates + kernel_coordinates.transpose());
    auto eig = descending_eigen(sym);
    if (max_rank > 0 && static_cast<Eigen::Index>(max_rank) < eig.values.size()) {
        eig.values.conservativeResize(static_cast<Eigen::Index>(max_rank));
        eig.vectors.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(max_rank));
    }
    apply_sign_convention(frame, eig.vectors);
    return CovOperator(std::move(frame), std::move(eig.values), std::move(eig.vectors));
}

CovOperator empirical_covariance(const DesignSample& sample, EigenRoute route) {
    const std::size_t n = sample.size();
    if (n == 0) throw ArgumentError("empirical covariance of an empty sample");
    const Eigen::MatrixXd& c = sample.coordinates();
    const double inv_n = 1.0 / static_cast<double>(n);
    if (route == EigenRoute::automatic) route = n <= sample.frame().dim() ? EigenRoute::dual : EigenRoute::primal;

    SortedEigen eig;
    if (route == EigenRoute::dual) {
        const Eigen::MatrixXd gram = inv_n * (c.transpose() * c);
        auto dual = descending_eigen(gram);
        eig.values = dual.values;
        // phi_k = sum_j u_jk X_j / sqrt(n lambda_k)
        eig.vectors = c * dual.vectors;
        for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
            eig.vectors.col(k) /= std::sqrt(static_cast<double>(n) * eig.values[k]);
        }
    } else {
        eig = descending_eigen(inv_n * (c * c.transpose()));
    }
    apply_sign_convention(sample.frame(), eig.vectors);

    const auto rank = eig.values.size();
    if (static_cast<std::size_t>(rank) == n) {
        // A = Q D^{-1} with Q_jk = <X_j, phi_k>, D = diag(sqrt(n lambda_k))
        Eigen::MatrixXd a = c.transpose() * eig.vectors;
        for (Eigen::Index k = 0; k < rank; ++k) a.col(k) /= std::sqrt(static_cast<double>(n) * eig.values[k]);
        if (a.partialPivLu().determinant() < 0.0) eig.vectors.col(rank - 1) *= -1.0;
    }
    return CovOperator(sample.frame(), std::move(eig.values), std::move(eig.vectors), n);
}

double hs_distance(const CovOperator& a, const CovOperator& b) {
    if (!a.frame().compatible(b.frame())) throw DimensionError("operators live on different grids or frames");
    return (a.kernel_coordinates() - b.kernel_coordinates()).norm();
}

EigenGapReport eigen_gap_check(const CovOperator& op, double alpha, double threshold, std::size_t max_index) {
    EigenGapReport report;
    report.threshold = threshold;
    std::size_t r = op.rank();
    if (max_index > 0) r = std::min(r, max_index);
    report.scaled_gaps.resize(static_cast<Eigen::Index>(r));
    report.min_scaled_gap = r > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    for (std::size_t j = 1; j <= r; ++j) {
        const double gap = op.eigenvalue(j - 1) - op.eigenvalue(j);
        const double scaled = gap * std::pow(static_cast<double>(j), alpha + 1.0);
        report.scaled_gaps[static_cast<Eigen::Index>(j - 1)] = scaled;
        if (scaled < report.min_scaled_gap) {
            report.min_scaled_gap = scaled;
            report.argmin = j;
        }
    }
    report.flagged = report.min_scaled_gap < threshold;
    return report;
}

}  // namespace flrwn
