#pragma once

#include <cstddef>
#include <utility>

#include <Eigen/Dense>

#include "flrwn/errors.hpp"
#include "flrwn/function_space.hpp"

namespace flrwn {

/// n design functions X_1..X_n sharing one frame, stored as coordinate columns.
class DesignSample {
public:
    DesignSample(Frame frame, Eigen::MatrixXd coordinates)
        : frame_(std::move(frame)), coordinates_(std::move(coordinates)) {
        if (static_cast<std::size_t>(coordinates_.rows()) != frame_.dim()) {
            throw DimensionError("design coordinates do not match the frame dimension");
        }
    }

    std::size_t size() const { return static_cast<std::size_t>(coordinates_.cols()); }
    const Frame& frame() const { return frame_; }
    /// dim x n; column i holds the coordinates of X_{i+1}.
    const Eigen::MatrixXd& coordinates() const { return coordinates_; }

    GridFunction function(std::size_t i) const {
        return frame_.synthesize(coordinates_.col(static_cast<Eigen::Index>(i)));
    }
    /// grid_size x n matrix of X_i(t_j).
    Eigen::MatrixXd grid_values() const { return frame_.synthesize_columns(coordinates_); }

    /// Designs with indices [first, first + count).
    DesignSample slice(std::size_t first, std::size_t count) const {
        if (first + count > size()) throw ArgumentError("design slice out of range");
        return DesignSample(frame_, coordinates_.middleCols(static_cast<Eigen::Index>(first),
                                                            static_cast<Eigen::Index>(count)));
    }

private:
    Frame frame_;
    Eigen::MatrixXd coordinates_;
};

}  // namespace flrwn
