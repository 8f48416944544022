#pragma once

// Sequence form of the white-noise inverse problem dY = Gamma^{1/2} theta dt + sigma n^{-1/2} dW:
// y_k = sqrt(lambda_k) theta_k + noise xi_k.

#include <cstddef>
#include <cstdint>
#include <utility>

#include <Eigen/Dense>

namespace flrwn {

struct SeqObservation {
    Eigen::VectorXd y;
    Eigen::VectorXd lambda;
    /// Standard deviation of each coordinate's noise, sigma / sqrt(n) for the plain model.
    double noise = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(y.size()); }
};

/// Default number of retained frequencies, max(4 n^{1/(2 beta + alpha + 1)}, 64).
std::size_t default_frequency_count(std::size_t n, double alpha, double beta);

SeqObservation simulate_sequence(const Eigen::Ref<const Eigen::VectorXd>& theta,
                                 const Eigen::Ref<const Eigen::VectorXd>& lambda, double n, double sigma,
                                 std::uint64_t seed);

/// Independent observations of the same drift from m and n - m data points, stored per
/// observation: noise sigma/sqrt(m) and sigma/sqrt(n - m).
std::pair<SeqObservation, SeqObservation> simulate_split(const Eigen::Ref<const Eigen::VectorXd>& theta,
                                                         const Eigen::Ref<const Eigen::VectorXd>& lambda,
                                                         std::size_t m, std::size_t n, double sigma,
                                                         std::uint64_t seed);

/// T1 = (m S1 + (n-m) S2)/n carries the drift at noise sigma/sqrt(n); T2 = S1 - S2 is
/// pure noise and independent of T1.
std::pair<SeqObservation, SeqObservation> recombine_split(const SeqObservation& s1, const SeqObservation& s2,
                                                          std::size_t m, std::size_t n);

}  // namespace flrwn
