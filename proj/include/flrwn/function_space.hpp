#pragma once

// Grid-based arithmetic on L2([0,1]): composite-trapezoid quadrature on a uniform
// grid with both endpoints, orthonormal bases, and isometric coordinate frames.

#include <cstddef>
#include <memory>
#include <utility>

#include <Eigen/Dense>

namespace flrwn {

inline constexpr std::size_t kDefaultGridSize = 1024;

/// Node i of a uniform grid with `grid_size` points on [0,1].
double grid_point(std::size_t i, std::size_t grid_size);

/// Composite-trapezoid weights on the uniform grid.
Eigen::VectorXd trapezoid_weights(std::size_t grid_size);

/// A real function on [0,1] sampled at `grid_size` equispaced nodes.
class GridFunction {
public:
    /// Throws ArgumentError when fewer than two nodes or non-finite values are given.
    explicit GridFunction(Eigen::VectorXd values);

    template <typename F>
    static GridFunction sample(std::size_t grid_size, F&& f) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(grid_size));
        for (std::size_t i = 0; i < grid_size; ++i) v[static_cast<Eigen::Index>(i)] = f(grid_point(i, grid_size));
        return GridFunction(std::move(v));
    }
    static GridFunction constant(std::size_t grid_size, double value);
    static GridFunction zero(std::size_t grid_size) { return constant(grid_size, 0.0); }

    std::size_t grid_size() const { return static_cast<std::size_t>(values_.size()); }
    const Eigen::VectorXd& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
    double t(std::size_t i) const { return grid_point(i, grid_size()); }

    GridFunction operator+(const GridFunction& other) const;
    GridFunction operator-(const GridFunction& other) const;
    GridFunction operator*(double scale) const;

private:
    Eigen::VectorXd values_;
};

/// Quadrature approximation of the L2 inner product. Throws DimensionError on grid mismatch.
double inner_product(const GridFunction& f, const GridFunction& g);

/// L_p norm for p in {1, 2, infinity}; any other p is an ArgumentError.
double norm(const GridFunction& f, double p = 2.0);

enum class BasisKind { fourier, eigen, custom };

const char* to_string(BasisKind kind);

/// A finite family of functions on a common grid, stored column-wise (grid_size x count).
class Basis {
public:
    Basis(BasisKind kind, Eigen::MatrixXd values);

    BasisKind kind() const { return kind_; }
    std::size_t count() const { return static_cast<std::size_t>(values_.cols()); }
    std::size_t grid_size() const { return static_cast<std::size_t>(values_.rows()); }
    const Eigen::MatrixXd& values() const { return values_; }

    /// Zero-based: function(0) is the first basis element.
    GridFunction function(std::size_t k) const;

    /// Quadrature Gram matrix of the functions.
    Eigen::MatrixXd gram() const;

private:
    BasisKind kind_;
    Eigen::MatrixXd values_;
};

/// {1, sqrt2 cos(2 pi t), sqrt2 sin(2 pi t), sqrt2 cos(4 pi t), ...} truncated to `count`.
/// Requires count >= 1 and grid_size >= 2 * count (ResolutionError otherwise).
Basis fourier_basis(std::size_t count, std::size_t grid_size = kDefaultGridSize);

/// Shared immutable copy of fourier_basis(count, grid_size); cached per (count, grid_size).
std::shared_ptr<const Basis> shared_fourier_basis(std::size_t count, std::size_t grid_size);

/// First J coefficients <f, phi_k>. Throws ArgumentError when J exceeds basis.count().
Eigen::VectorXd project(const GridFunction& f, const Basis& basis, std::size_t count);

/// Sum_k c_k phi_k over the first c.size() basis functions.
GridFunction synthesize(const Basis& basis, const Eigen::Ref<const Eigen::VectorXd>& coefficients);

/// Isometric coordinates for a finite-dimensional subspace of L2 on the grid.
///
/// A grid frame maps f to sqrt(w) .* f (w the trapezoid weights), so Euclidean
/// products of coordinates reproduce the quadrature inner product exactly. A basis
/// frame uses the coefficients in an orthonormal basis; it is exact on the span.
class Frame {
public:
    static Frame grid(std::size_t grid_size);
    static Frame over(std::shared_ptr<const Basis> basis);

    bool is_grid() const { return basis_ == nullptr; }
    std::size_t dim() const;
    std::size_t grid_size() const { return grid_size_; }
    const Basis* basis() const { return basis_.get(); }
    const std::shared_ptr<const Basis>& shared_basis() const { return basis_; }

    Eigen::VectorXd analyze(const GridFunction& f) const;
    GridFunction synthesize(const Eigen::Ref<const Eigen::VectorXd>& coordinates) const;
    /// Grid values (grid_size x k) of k coordinate columns.
    Eigen::MatrixXd synthesize_columns(const Eigen::Ref<const Eigen::MatrixXd>& coordinates) const;

    bool compatible(const Frame& other) const;

private:
    Frame(std::size_t grid_size, std::shared_ptr<const Basis> basis);

    std::size_t grid_size_;
    std::shared_ptr<const Basis> basis_;
    Eigen::VectorXd sqrt_weights_;
};

}  // namespace flrwn
