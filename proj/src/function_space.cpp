#include "flrwn/function_space.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "flrwn/errors.hpp"

namespace flrwn {

namespace {

void require_same_grid(std::size_t a, std::size_t b) {
    if (a != b) {
        throw DimensionError("grid size mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

}  // namespace

double grid_point(std::size_t i, std::size_t grid_size) {
    return static_cast<double>(i) / static_cast<double>(grid_size - 1);
}

Eigen::VectorXd trapezoid_weights(std::size_t grid_size) {
    if (grid_size < 2) throw ArgumentError("grid needs at least two nodes");
    const double h = 1.0 / static_cast<double>(grid_size - 1);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid_size), h);
    w[0] = w[w.size() - 1] = 0.5 * h;
    return w;
}

GridFunction::GridFunction(Eigen::VectorXd values) : values_(std::move(values)) {
    if (values_.size() < 2) throw ArgumentError("a grid function needs at least two nodes");
    if (!values_.allFinite()) throw ArgumentError("grid function values must be finite");
}

GridFunction GridFunction::constant(std::size_t grid_size, double value) {
    return GridFunction(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid_size), value));
}

GridFunction GridFunction::operator+(const GridFunction& other) const {
    require_same_grid(grid_size(), other.grid_size());
    return GridFunction(values_ + other.values_);
}

GridFunction GridFunction::operator-(const GridFunction& other) const {
    require_same_grid(grid_size(), other.grid_size());
    return GridFunction(values_ - other.values_);
}

GridFunction GridFunction::operator*(double scale) const { return GridFunction(values_ * scale); }

double inner_product(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f.grid_size(), g.grid_size());
    const auto& a = f.values();
    const auto& b = g.values();
    const auto last = a.size() - 1;
    const double h = 1.0 / static_cast<double>(last);
    double interior = a.segment(1, last - 1).dot(b.segment(1, last - 1));
    return h * (interior + 0.5 * (a[0] * b[0] + a[last] * b[last]));
}

double norm(const GridFunction& f, double p) {
    if (p == 2.0) return std::sqrt(std::max(0.0, inner_product(f, f)));
    if (std::isinf(p) && p > 0) return f.values().cwiseAbs().maxCoeff();
    if (p == 1.0) {
        const Eigen::VectorXd w = trapezoid_weights(f.grid_size());
        return w.dot(f.values().cwiseAbs());
    }
    throw ArgumentError("unsupported norm exponent p=" + std::to_string(p) + " (use 1, 2 or infinity)");
}

const char* to_string(BasisKind kind) {
    switch (kind) {
        case BasisKind::fourier: return "fourier";
        case BasisKind::eigen: return "eigen";
        case BasisKind::custom: return "custom";
    }
    return "custom";
}

Basis::Basis(BasisKind kind, Eigen::MatrixXd values) : kind_(kind), values_(std::move(values)) {
    if (values_.rows() < 2) throw ArgumentError("basis functions need at least two grid nodes");
    if (!values_.allFinite()) throw ArgumentError("basis values must be finite");
}

GridFunction Basis::function(std::size_t k) const {
    if (k >= count()) throw ArgumentError("basis index out of range");
    return GridFunction(values_.col(static_cast<Eigen::Index>(k)));
}

Eigen::MatrixXd Basis::gram() const {
    const Eigen::VectorXd w = trapezoid_weights(grid_size());
    return values_.transpose() * w.asDiagonal() * values_;
}

Basis fourier_basis(std::size_t count, std::size_t grid_size) {
    if (count < 1) throw ArgumentError("fourier basis needs at least one function");
    if (grid_size < 2 * count) {
        throw ResolutionError("grid of " + std::to_string(grid_size) + " nodes cannot resolve " +
                              std::to_string(count) + " fourier functions (need >= " +
                              std::to_string(2 * count) + ")");
    }
    const auto rows = static_cast<Eigen::Index>(grid_size);
    Eigen::MatrixXd values(rows, static_cast<Eigen::Index>(count));
    const double root2 = std::numbers::sqrt2;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double t = grid_point(static_cast<std::size_t>(i), grid_size);
        values(i, 0) = 1.0;
        for (std::size_t j = 1; j < count; ++j) {
            const double freq = 2.0 * std::numbers::pi * static_cast<double>((j + 1) / 2);
            values(i, static_cast<Eigen::Index>(j)) =
                (j % 2 == 1) ? root2 * std::cos(freq * t) : root2 * std::sin(freq * t);
        }
    }
    return Basis(BasisKind::fourier, std::move(values));
}

std::shared_ptr<const Basis> shared_fourier_basis(std::size_t count, std::size_t grid_size) {
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const Basis>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{count, grid_size}];
    if (!slot) slot = std::make_shared<const Basis>(fourier_basis(count, grid_size));
    return slot;
}

Eigen::VectorXd project(const GridFunction& f, const Basis& basis, std::size_t count) {
    if (count > basis.count()) {
        throw ArgumentError("cannot project on " + std::to_string(count) + " functions of a basis with " +
                            std::to_string(basis.count()));
    }
    require_same_grid(f.grid_size(), basis.grid_size());
    const Eigen::VectorXd wf = trapezoid_weights(f.grid_size()).cwiseProduct(f.values());
    return basis.values().leftCols(static_cast<Eigen::Index>(count)).transpose() * wf;
}

GridFunction synthesize(const Basis& basis, const Eigen::Ref<const Eigen::VectorXd>& coefficients) {
    if (static_cast<std::size_t>(coefficients.size()) > basis.count()) {
        throw DimensionError("more coefficients than basis functions");
    }
    return GridFunction(basis.values().leftCols(coefficients.size()) * coefficients);
}

Frame::Frame(std::size_t grid_size, std::shared_ptr<const Basis> basis)
    : grid_size_(grid_size), basis_(std::move(basis)) {
    if (!basis_) sqrt_weights_ = trapezoid_weights(grid_size_).cwiseSqrt();
}

Frame Frame::grid(std::size_t grid_size) { return Frame(grid_size, nullptr); }

Frame Frame::over(std::shared_ptr<const Basis> basis) {
    if (!basis) throw ArgumentError("basis frame needs a basis");
    const auto grid_size = basis->grid_size();
    return Frame(grid_size, std::move(basis));
}

std::size_t Frame::dim() const { return basis_ ? basis_->count() : grid_size_; }

Eigen::VectorXd Frame::analyze(const GridFunction& f) const {
    require_same_grid(f.grid_size(), grid_size_);
    if (basis_) return project(f, *basis_, basis_->count());
    return sqrt_weights_.cwiseProduct(f.values());
}

GridFunction Frame::synthesize(const Eigen::Ref<const Eigen::VectorXd>& coordinates) const {
    if (static_cast<std::size_t>(coordinates.size()) != dim()) throw DimensionError("coordinate length mismatch");
    if (basis_) return flrwn::synthesize(*basis_, coordinates);
    return GridFunction(coordinates.cwiseQuotient(sqrt_weights_));
}

Eigen::MatrixXd Frame::synthesize_columns(const Eigen::Ref<const Eigen::MatrixXd>& coordinates) const {
    if (static_cast<std::size_t>(coordinates.rows()) != dim()) throw DimensionError("coordinate length mismatch");
    if (basis_) return basis_->values() * coordinates;
    return sqrt_weights_.cwiseInverse().asDiagonal() * coordinates;
}

bool Frame::compatible(const Frame& other) const {
    if (grid_size_ != other.grid_size_ || is_grid() != other.is_grid()) return false;
    if (is_grid() || basis_ == other.basis_) return true;
    if (basis_->count() != other.basis_->count() || basis_->kind() != other.basis_->kind()) return false;
    return basis_->values() == other.basis_->values();
}

}  // namespace flrwn
