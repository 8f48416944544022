#include "flrwn/whitenoise.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "flrwn/errors.hpp"
#include "flrwn/rng.hpp"

namespace flrwn {

namespace {

void check_inputs(const Eigen::Ref<const Eigen::VectorXd>& theta, const Eigen::Ref<const Eigen::VectorXd>& lambda,
                  double sigma) {
    if (theta.size() < 1) throw ArgumentError("need at least one frequency");
    if (theta.size() != lambda.size()) throw DimensionError("theta and lambda lengths differ");
    if (!(lambda.minCoeff() > 0.0)) throw ArgumentError("eigenvalues must be positive");
    if (!(sigma >= 0.0)) throw ArgumentError("sigma must be nonnegative");
}

SeqObservation observe(const Eigen::Ref<const Eigen::VectorXd>& theta, const Eigen::Ref<const Eigen::VectorXd>& lambda,
                       double noise, Rng& rng) {
    SeqObservation obs{lambda.cwiseSqrt().cwiseProduct(theta), lambda, noise};
    if (noise > 0.0) {
        std::normal_distribution<double> normal;
        for (Eigen::Index k = 0; k < obs.y.size(); ++k) obs.y[k] += noise * normal(rng);
    }
    return obs;
}

}  // namespace

std::size_t default_frequency_count(std::size_t n, double alpha, double beta) {
    const double k = 4.0 * std::pow(static_cast<double>(n), 1.0 / (2.0 * beta + alpha + 1.0));
    return std::max<std::size_t>(static_cast<std::size_t>(std::ceil(k)), 64);
}

SeqObservation simulate_sequence(const Eigen::Ref<const Eigen::VectorXd>& theta,
                                 const Eigen::Ref<const Eigen::VectorXd>& lambda, double n, double sigma,
                                 std::uint64_t seed) {
    check_inputs(theta, lambda, sigma);
    if (!(n > 0.0)) throw ArgumentError("n must be positive");
    auto rng = make_rng(seed, "sequence");
    return observe(theta, lambda, sigma / std::sqrt(n), rng);
}

std::pair<SeqObservation, SeqObservation> simulate_split(const Eigen::Ref<const Eigen::VectorXd>& theta,
                                                         const Eigen::Ref<const Eigen::VectorXd>& lambda,
                                                         std::size_t m, std::size_t n, double sigma,
                                                         std::uint64_t seed) {
    check_inputs(theta, lambda, sigma);
    if (m == 0 || m >= n) throw ArgumentError("split needs 0 < m < n");
    auto rng1 = make_rng(seed, "split.first");
    auto rng2 = make_rng(seed, "split.second");
    auto s1 = observe(theta, lambda, sigma / std::sqrt(static_cast<double>(m)), rng1);
    auto s2 = observe(theta, lambda, sigma / std::sqrt(static_cast<double>(n - m)), rng2);
    return {std::move(s1), std::move(s2)};
}

std::pair<SeqObservation, SeqObservation> recombine_split(const SeqObservation& s1, const SeqObservation& s2,
                                                          std::size_t m, std::size_t n) {
    if (m == 0 || m >= n) throw ArgumentError("split needs 0 < m < n");
    if (s1.size() != s2.size() || s1.lambda.size() != s2.lambda.size()) throw DimensionError("split observations differ in length");
    const double dm = static_cast<double>(m);
    const double dr = static_cast<double>(n - m);
    const double dn = static_cast<double>(n);
    SeqObservation t1{(dm * s1.y + dr * s2.y) / dn, s1.lambda,
                      std::sqrt(dm * dm * s1.noise * s1.noise + dr * dr * s2.noise * s2.noise) / dn};
    SeqObservation t2{s1.y - s2.y, s1.lambda, std::sqrt(s1.noise * s1.noise + s2.noise * s2.noise)};
    return {std::move(t1), std::move(t2)};
}

}  // namespace flrwn
