// Desk-scale acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flrwn/cli.hpp"
#include "flrwn/covariance.hpp"
#include "flrwn/design.hpp"
#include "flrwn/equivalence.hpp"
#include "flrwn/estimators.hpp"
#include "flrwn/io.hpp"
#include "flrwn/risk.hpp"
#include "flrwn/rng.hpp"
#include "flrwn/whitenoise.hpp"
#include "minimax_oracle.hpp"

using namespace flrwn;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string fmt(const char* pattern, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, a);
    return buf;
}

DesignSpec gaussian_spec() {
    DesignSpec s;
    s.kind = DesignKind::integrated_gaussian;
    return s;
}

// ---- 1: exact-equivalence algebra
Outcome ac1() {
    double orth = 0, det = 0, offdiag = 0, roundtrip = 0;
    std::mt19937_64 rng(kSeed);
    std::normal_distribution<double> g;
    for (std::size_t n : {5, 25, 100}) {
        for (std::uint64_t r = 0; r < 50; ++r) {
            const auto spec = r % 2 ? gaussian_spec() : DesignSpec{};
            const auto sample = sample_design(spec, n, derive_seed(kSeed, "ac1", n * 1000 + r));
            const auto cov = empirical_covariance(sample);
            const auto T = build_gram_transform(sample, cov);
            const auto N = static_cast<Eigen::Index>(n);
            orth = std::max(orth, (T.A.transpose() * T.A - Eigen::MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff());
            det = std::max(det, std::abs(T.A.determinant() - 1.0));
            Eigen::MatrixXd QtQ = T.Q.transpose() * T.Q;
            QtQ.diagonal().setZero();
            offdiag = std::max(offdiag, QtQ.cwiseAbs().maxCoeff() / (static_cast<double>(n) * cov.eigenvalues()[0]));
            Eigen::VectorXd y(N);
            for (auto& v : y) v = g(rng);
            roundtrip = std::max(roundtrip, (whitenoise_to_flr(flr_to_whitenoise(y, T, 1.0), T) - y).cwiseAbs().maxCoeff());
        }
    }
    return {orth <= 1e-8 && det <= 1e-6 && offdiag <= 1e-8 && roundtrip <= 1e-10,
            "max|A^T A - I| " + fmt("%.2e", orth) + " (<= 1e-8), max|det A - 1| " + fmt("%.2e", det) +
                " (<= 1e-6), max Q^T Q offdiag/(n lambda1) " + fmt("%.2e", offdiag) + " (<= 1e-8), roundtrip " +
                fmt("%.2e", roundtrip) + " (<= 1e-10)"};
}

// ---- 2: distributional equivalence of the two routes
Outcome ac2() {
    const std::size_t n = 25, draws = 2000;
    std::size_t rejections = 0, tests = 0;
    const auto theta_fn = [](double t) { return std::sin(2.0 * M_PI * t) + t * t; };
    for (std::uint64_t b = 0; b < 4; ++b) {
        const auto spec = b % 2 ? gaussian_spec() : DesignSpec{};
        const auto sample = sample_design(spec, n, derive_seed(kSeed, "ac2.design", b));
        Eigen::VectorXd values(static_cast<Eigen::Index>(spec.grid_size));
        for (std::size_t i = 0; i < spec.grid_size; ++i) values[static_cast<Eigen::Index>(i)] = theta_fn(grid_point(i, spec.grid_size));
        const Eigen::VectorXd theta = sample.frame().analyze(GridFunction(values));
        const auto report = two_route_test(sample, theta, 1.0, draws, derive_seed(kSeed, "ac2.battery", b), 0.05);
        rejections += report.rejections;
        tests += report.coordinates.size();
    }
    const double rate = static_cast<double>(rejections) / static_cast<double>(tests);
    const double bound = 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / static_cast<double>(tests));
    return {rate <= bound, std::to_string(rejections) + "/" + std::to_string(tests) + " Bonferroni KS rejections, rate " +
                               fmt("%.4f", rate) + " (<= " + fmt("%.4f", bound) + ")"};
}

// ---- 3: likelihood reduction
Outcome ac3() {
    std::mt19937_64 rng(kSeed + 3);
    std::normal_distribution<double> g;
    double worst = 0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const std::size_t n = 5 + i % 40;
        const auto spec = i % 2 ? gaussian_spec() : DesignSpec{};
        const auto sample = sample_design(spec, n, derive_seed(kSeed, "ac3", i));
        const auto cov = empirical_covariance(sample);
        const auto T = build_gram_transform(sample, cov);
        Eigen::VectorXd theta(static_cast<Eigen::Index>(sample.frame().dim()));
        for (auto& v : theta) v = g(rng);
        const double sigma = 0.5 + static_cast<double>(i % 3);
        const auto y = simulate_responses(sample, theta, sigma, derive_seed(kSeed, "ac3.y", i));
        worst = std::max(worst, std::abs(conditional_loglik(y, sample, theta, sigma) - reduced_loglik(y, T, cov, theta, sigma)));
    }
    return {worst <= 1e-8, "max |loglik difference| over 100 instances " + fmt("%.2e", worst) + " (<= 1e-8)"};
}

// ---- 4: Pinsker oracle consistency
Outcome ac4() {
    const ThetaClass toy{1.0, 1.0};
    const auto one = Spectrum::from(Eigen::VectorXd::Ones(1));
    const double gamma = pinsker_gamma_oracle(one, toy, 1.0, 1.0);
    const double a = sharp_risk_constant(one, toy, 1.0, 1.0);
    const double toy_err = std::max(std::abs(gamma - std::sqrt(2.0) / 3.0), std::abs(a - 1.0 / 3.0));

    const ThetaClass cls{2.0, 1.0};
    const auto lambda = Spectrum::power(2.0);
    double worst = 0;
    bool support_ok = true;
    for (double n : {100.0, 1000.0, 10000.0}) {
        const double gn = pinsker_gamma_oracle(lambda, cls, 1.0, n);
        support_ok = support_ok && pinsker_support(gn, cls) <= 8;
        std::vector<double> b2, v;
        for (std::size_t k = 1; k <= 8; ++k) {
            b2.push_back(1.0 + std::pow(static_cast<double>(k), 4.0));
            v.push_back(1.0 / (n * lambda(k)));
        }
        const auto mm = oracle::brute_force_minimax(b2, v, 1.0);
        const double an = sharp_risk_constant(lambda, cls, 1.0, n);
        worst = std::max({worst, std::abs(mm.lower - an) / an, std::abs(mm.upper - an) / an});
    }
    return {toy_err <= 1e-10 && worst <= 0.01 && support_ok,
            "toy error " + fmt("%.1e", toy_err) + " (<= 1e-10), brute-force minimax rel. gap " + fmt("%.2e", worst) +
                " (<= 0.01) at n = 1e2, 1e3, 1e4 with K = 8"};
}

// ---- 5: sharp constant in the sequence model
Outcome ac5() {
    const ThetaClass cls{2.0, 1.0};
    const auto lambda = Spectrum::power(2.0);
    const std::size_t K = 64;
    Eigen::VectorXd lam(static_cast<Eigen::Index>(K));
    for (std::size_t k = 1; k <= K; ++k) lam[static_cast<Eigen::Index>(k - 1)] = lambda(k);
    bool pass = true;
    std::string detail;
    for (double n : {1e4, 1e5}) {
        const double gamma = pinsker_gamma_oracle(lambda, cls, 1.0, n);
        const auto w = pinsker_weights(gamma, cls, K);
        const auto theta = sample_theta(cls, {ThetaMode::least_favorable, K, 1.0, n}, lambda, 0);
        const auto est = mise_monte_carlo(200, derive_seed(kSeed, "ac5", static_cast<std::uint64_t>(n)), [&](std::size_t, std::uint64_t s) {
            const auto obs = simulate_sequence(theta, lam, n, 1.0, s);
            const Eigen::VectorXd hat = w.cwiseProduct(obs.y.cwiseQuotient(lam.cwiseSqrt()));
            return (hat - theta).squaredNorm();
        });
        const double ratio = est.mean / sharp_risk_constant(lambda, cls, 1.0, n, gamma);
        pass = pass && ratio >= 0.8 && ratio <= 1.2;
        detail += "n=" + fmt("%.0e", n) + " MISE/a_n " + fmt("%.4f", ratio) + "; ";
    }
    return {pass, detail + "band [0.8, 1.2]"};
}

// ---- 6: cutoff-estimator rate
Outcome ac6() {
    const double alpha = 2.0, beta = 2.0, sigma = 1.0;
    const ThetaClass cls{beta, 1.0};
    const auto lambda = Spectrum::power(alpha);
    const DesignSpec spec;
    std::vector<double> ns, plain, conditional;
    for (int p = 9; p <= 14; ++p) {
        const std::size_t n = std::size_t{1} << p, m = n / 2;
        const std::size_t K = select_cutoff(m, alpha, beta);
        const auto population = true_covariance(spec, spec.effective_truncation(m), m);
        const Eigen::VectorXd theta = embed_coefficients(
            sample_theta(cls, {ThetaMode::least_favorable, 64, sigma, static_cast<double>(n)}, lambda, 0), population);
        const double tail = theta.tail(theta.size() - static_cast<Eigen::Index>(K)).squaredNorm();
        std::vector<double> loss(100), risk(100);
        for (std::size_t r = 0; r < 100; ++r) {
            const auto s = derive_seed(kSeed, "ac6", n * 1000 + r);
            const auto sample = sample_design(spec, m, derive_seed(s, "design"));
            const auto y = simulate_responses(sample, theta, sigma, derive_seed(s, "responses"));
            loss[r] = (embed_coefficients(cutoff_estimate(sample, y, population, K), population) - theta).squaredNorm();
            // E[loss | designs]: the estimator is linear in Y, so mean and noise variance are explicit
            const Eigen::MatrixXd& C = sample.coordinates();
            const Eigen::VectorXd signal = C.transpose() * theta;
            double cr = tail;
            for (std::size_t k = 0; k < K; ++k) {
                const auto kk = static_cast<Eigen::Index>(k);
                const double lk = lambda(k + 1), md = static_cast<double>(m);
                const double mean = C.row(kk).dot(signal) / (md * lk);
                cr += (mean - theta[kk]) * (mean - theta[kk]) + sigma * sigma * C.row(kk).squaredNorm() / (md * md * lk * lk);
            }
            risk[r] = cr;
        }
        ns.push_back(static_cast<double>(n));
        plain.push_back(summarize(loss).mean);
        conditional.push_back(summarize(risk).mean);
    }
    const double target = -2.0 * beta / (2.0 * beta + alpha + 1.0);
    const auto fit = rate_regression(ns, conditional);
    const auto raw = rate_regression(ns, plain);
    return {std::abs(fit.slope - target) <= 0.15,
            "slope " + fmt("%.4f", fit.slope) + " (conditional MISE given designs; plain Monte Carlo " + fmt("%.4f", raw.slope) +
                "), target " + fmt("%.4f", target) + " +- 0.15"};
}

// ---- 7: data-driven gamma
Outcome ac7() {
    const ThetaClass cls{4.0, 0.1};
    const double sigma = 1.0, rho = default_rho(2.0);
    const auto lambda = Spectrum::power(2.0);
    const DesignSpec spec;
    std::vector<double> med;
    double ratio = 0;
    for (std::size_t n : {1000, 10000}) {
        const double gamma_n = pinsker_gamma_oracle(lambda, cls, sigma, static_cast<double>(n));
        const auto population = true_covariance(spec, spec.effective_truncation(n), n);
        const Eigen::VectorXd theta = embed_coefficients(
            sample_theta(cls, {ThetaMode::least_favorable, 64, sigma, static_cast<double>(n)}, lambda, 0), population);
        std::vector<double> rel(100), loss(100);
        for (std::size_t r = 0; r < 100; ++r) {
            const auto s = derive_seed(kSeed, "ac7", n * 1000 + r);
            const auto sample = sample_design(spec, n, derive_seed(s, "design"));
            const auto y = simulate_responses(sample, theta, sigma, derive_seed(s, "responses"));
            const auto fit = fit_data_driven_pinsker(sample, y, cls, sigma, {rho, 2.0});
            rel[r] = std::abs(fit.gamma.gamma_hat - gamma_n) / gamma_n;
            loss[r] = (fit.fit.coordinates - theta).squaredNorm();
        }
        med.push_back(median(rel));
        ratio = summarize(loss).mean / sharp_risk_constant(lambda, cls, sigma, static_cast<double>(n));
    }
    return {med[1] < med[0] && med[1] < 0.2 && ratio <= 1.35,
            "median |gamma_hat - gamma_n|/gamma_n " + fmt("%.4f", med[0]) + " at 1e3 -> " + fmt("%.4f", med[1]) +
                " at 1e4 (must decrease and be < 0.2); MISE/a_n at 1e4 " + fmt("%.4f", ratio) + " (<= 1.35)"};
}

// ---- 8: Delta_{5,6} vanishes
Outcome ac8() {
    const ThetaClass cls{2.0, 1.0};
    Delta56Setup setup;
    setup.beta = 2.0;
    setup.theta = sample_theta(cls, {ThetaMode::boundary, 64}, Spectrum::power(2.0), 0);
    const auto pts = delta56_study(setup, {256, 1024, 4096}, 50, derive_seed(kSeed, "ac8"));
    bool pass = true;
    std::string detail = "E||Delta||^2 / tv:";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        detail += " n=" + std::to_string(pts[i].n) + " " + fmt("%.4g", pts[i].mean_sq.mean) + "/" + fmt("%.4g", pts[i].tv);
        if (i > 0) pass = pass && pts[i].mean_sq.mean < pts[i - 1].mean_sq.mean && pts[i].tv < pts[i - 1].tv;
    }
    return {pass, detail + " (strictly decreasing)"};
}

// ---- 9: conditional risk decomposition
Outcome ac9() {
    const ThetaClass cls{4.0, 1.0};
    const std::size_t n = 500;
    const double sigma = 1.0, rho = default_rho(2.0);
    const auto lambda = Spectrum::power(2.0);
    const DesignSpec spec;
    const double gamma = pinsker_gamma_oracle(lambda, cls, sigma, static_cast<double>(n));
    const auto w = pinsker_weights(gamma, cls, pinsker_support(gamma, cls));
    const auto population = true_covariance(spec, spec.effective_truncation(n), n);
    const Eigen::VectorXd theta = embed_coefficients(sample_theta(cls, {ThetaMode::boundary, 64}, lambda, 0), population);
    std::vector<double> loss(500), decomposition(500);
    for (std::size_t r = 0; r < 500; ++r) {
        const auto s = derive_seed(kSeed, "ac9", r);
        const auto sample = sample_design(spec, n, derive_seed(s, "design"));
        const auto y = simulate_responses(sample, theta, sigma, derive_seed(s, "responses"));
        const auto cov = empirical_covariance(sample);
        const auto fit = flr_pinsker_estimator(sample, y, cov, w, {rho, 2.0});
        loss[r] = (fit.coordinates - theta).squaredNorm();
        decomposition[r] = pinsker_conditional_risk(cov, theta, w, fit.floor, sigma).total();
    }
    const auto a = summarize(loss), b = summarize(decomposition);
    const double se = std::hypot(a.std_error, b.std_error);
    return {std::abs(a.mean - b.mean) <= 3.0 * se, "simulated MISE " + fmt("%.5g", a.mean) + ", bias+variance " + fmt("%.5g", b.mean) +
                                                       ", |difference| " + fmt("%.2e", std::abs(a.mean - b.mean)) + " (<= 3 x " +
                                                       fmt("%.2e", se) + ")"};
}

// ---- 10: byte-stable subcommands
Outcome ac10() {
    const auto root = std::filesystem::temp_directory_path() / "flrwn_acceptance_ac10";
    std::filesystem::remove_all(root);
    std::filesystem::create_directories(root);
    write_text_file(root / "config.yaml", "seed: 11\n");
    std::size_t compared = 0;
    std::string mismatched;
    for (const char* run : {"first", "second"}) {
        const auto out = (root / run).string();
        for (const auto& name : subcommand_names()) {
            const std::string cfg = (root / "config.yaml").string();
            const std::string threads = std::string(run) == "first" ? "1" : "2";
            std::vector<const char*> argv{"flrwn", name.c_str(), "--config", cfg.c_str(), "--out", out.c_str(), "--threads", threads.c_str()};
            std::ostringstream sink;
            if (run_cli(static_cast<int>(argv.size()), argv.data(), sink, sink) != 0) return {false, name + " failed: " + sink.str()};
        }
    }
    for (const auto& entry : std::filesystem::directory_iterator(root / "first")) {
        const auto other = root / "second" / entry.path().filename();
        ++compared;
        if (!std::filesystem::exists(other) || read_text_file(entry.path()) != read_text_file(other)) mismatched += " " + entry.path().filename().string();
    }
    std::filesystem::remove_all(root);
    return {mismatched.empty() && compared > 0,
            std::to_string(compared) + " artifacts from " + std::to_string(subcommand_names().size()) +
                " subcommands compared across two runs (1 vs 2 threads)" + (mismatched.empty() ? "" : "; differing:" + mismatched)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1 exact-equivalence algebra", ac1},       {"AC2 two-route distributional equivalence", ac2},
        {"AC3 likelihood reduction", ac3},            {"AC4 Pinsker oracle consistency", ac4},
        {"AC5 sharp constant, sequence model", ac5},  {"AC6 cutoff estimator rate", ac6},
        {"AC7 data-driven gamma", ac7},               {"AC8 Delta_{5,6} vanishing", ac8},
        {"AC9 conditional risk decomposition", ac9},  {"AC10 seed determinism", ac10},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
