#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "flrwn/cli.hpp"
#include "flrwn/covariance.hpp"
#include "flrwn/equivalence.hpp"
#include "flrwn/errors.hpp"
#include "flrwn/io.hpp"
#include "flrwn/risk.hpp"
#include "flrwn/rng.hpp"

namespace flrwn {

namespace {

using json = nlohmann::json;

struct Problem {
    std::size_t n = 0;
    CovOperator population;
    Spectrum spectrum;
    Eigen::VectorXd coefficients;  // along the population eigenfunctions
    Eigen::VectorXd theta;         // frame coordinates
};

// Brownian motion: lambda_k = ((k - 1/2) pi)^{-2}
Spectrum brownian_spectrum() {
    return {[](std::size_t k) {
                const double x = (static_cast<double>(k) - 0.5) * std::numbers::pi;
                return 1.0 / (x * x);
            },
            0};
}

std::size_t population_rank(const ExperimentConfig& c, std::size_t n) {
    if (c.design.kind == DesignKind::basis_expansion) return c.design.effective_truncation(n);
    return std::max<std::size_t>(c.theta_count, 64);
}

Problem make_problem(const ExperimentConfig& c, std::size_t n) {
    Problem p{n, true_covariance(c.design, population_rank(c, n), n),
              c.design.kind == DesignKind::basis_expansion ? Spectrum::power(c.design.alpha) : brownian_spectrum(), {}, {}};
    ThetaRequest request;
    request.mode = c.theta_mode;
    request.count = std::min(c.theta_count, p.population.rank());
    request.sigma = c.sigma;
    request.n = static_cast<double>(n);
    request.spike_index = c.spike_index;
    p.coefficients = sample_theta(c.theta_class, request, p.spectrum, derive_seed(c.seed, "theta"));
    p.theta = embed_coefficients(p.coefficients, p.population);
    return p;
}

struct Data {
    DesignSample sample;
    Eigen::VectorXd y;
};

Data simulate_data(const ExperimentConfig& c, const Problem& p, std::uint64_t seed) {
    auto sample = sample_design(c.design, p.n, derive_seed(seed, "design"));
    auto y = simulate_responses(sample, p.theta, c.sigma, derive_seed(seed, "responses"));
    return {std::move(sample), std::move(y)};
}

std::uint64_t single_seed(const ExperimentConfig& c) { return derive_seed(c.seed, "single", c.n); }

struct Fit {
    Eigen::VectorXd theta_hat;
    json info;
};

Fit fit_estimator(const ExperimentConfig& c, const Problem& p, const Data& d) {
    const double alpha = c.design.alpha;
    Fit out;
    switch (c.estimator) {
        case EstimatorKind::cutoff: {
            const std::size_t K = std::min(select_cutoff(p.n, alpha, c.theta_class.beta), p.population.rank());
            out.theta_hat = embed_coefficients(cutoff_estimate(d.sample, d.y, p.population, K), p.population);
            out.info = {{"K", K}};
            break;
        }
        case EstimatorKind::pinsker_oracle: {
            const double gamma = pinsker_gamma_oracle(p.spectrum, c.theta_class, c.sigma, static_cast<double>(p.n));
            const auto cov = empirical_covariance(d.sample);
            const std::size_t support = pinsker_support(gamma, c.theta_class);
            const auto w = pinsker_weights(gamma, c.theta_class, std::min(support, cov.rank()));
            const auto fit = flr_pinsker_estimator(d.sample, d.y, cov, w, {c.effective_rho(), alpha, 0.0, c.enforce_cap});
            out.theta_hat = fit.coordinates;
            out.info = {{"gamma", gamma}, {"support", support}, {"floor", fit.floor}, {"cap", fit.cap}, {"cap_binding", fit.cap_binding}};
            break;
        }
        case EstimatorKind::pinsker_data_driven: {
            const auto dd = fit_data_driven_pinsker(d.sample, d.y, c.theta_class, c.sigma, {c.effective_rho(), alpha, 0.0, c.enforce_cap});
            out.theta_hat = dd.fit.coordinates;
            out.info = {{"gamma_hat", dd.gamma.gamma_hat}, {"gamma_tilde", dd.gamma.gamma_tilde}, {"gamma_lower", dd.gamma.lower},
                        {"gamma_upper", dd.gamma.upper}, {"m", dd.gamma.m}, {"floor", dd.fit.floor}, {"cap", dd.fit.cap},
                        {"cap_binding", dd.fit.cap_binding}};
            break;
        }
    }
    return out;
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct Context {
    const ExperimentConfig& config;
    std::string subcommand;

    std::vector<std::string> comments() const {
        return {"flrwn " + subcommand + " config_hash=" + hex(config_hash(config)) + " seed=" + std::to_string(config.seed)};
    }
    std::string csv(const std::vector<std::string>& header, const Eigen::MatrixXd& rows) const {
        return csv_text(header, rows, comments());
    }
    std::string meta(json body) const {
        body["subcommand"] = subcommand;
        body["config_hash"] = hex(config_hash(config));
        body["seed"] = config.seed;
        body["config"] = canonical_config(config);
        return body.dump(2) + "\n";
    }
};

Eigen::MatrixXd grid_column(std::size_t D) {
    Eigen::MatrixXd t(static_cast<Eigen::Index>(D), 1);
    for (std::size_t i = 0; i < D; ++i) t(static_cast<Eigen::Index>(i), 0) = grid_point(i, D);
    return t;
}

Artifacts cmd_simulate(const Context& ctx) {
    const auto& c = ctx.config;
    const auto p = make_problem(c, c.n);
    const auto d = simulate_data(c, p, single_seed(c));
    const auto D = static_cast<Eigen::Index>(c.design.grid_size);
    const auto n = static_cast<Eigen::Index>(c.n);

    Eigen::MatrixXd designs(D, n + 1);
    designs.col(0) = grid_column(c.design.grid_size);
    designs.rightCols(n) = d.sample.grid_values();
    std::vector<std::string> header{"t"};
    for (Eigen::Index i = 1; i <= n; ++i) header.push_back("x" + std::to_string(i));

    const Eigen::VectorXd signal = d.sample.coordinates().transpose() * p.theta;
    Eigen::MatrixXd responses(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) responses.row(i) << static_cast<double>(i + 1), d.y[i], signal[i];

    Eigen::MatrixXd theta(D, 2);
    theta.col(0) = grid_column(c.design.grid_size);
    theta.col(1) = p.population.frame().synthesize(p.theta).values();

    const auto K = p.coefficients.size();
    Eigen::MatrixXd coeffs(K, 3);
    for (Eigen::Index k = 0; k < K; ++k)
        coeffs.row(k) << static_cast<double>(k + 1), p.coefficients[k], p.population.eigenvalue(static_cast<std::size_t>(k + 1));

    json body = {{"n", c.n}, {"design", to_string(c.design.kind)}, {"frame_dim", d.sample.frame().dim()},
                 {"ellipsoid_norm", c.theta_class.ellipsoid_norm(p.coefficients)}, {"theta_mode", to_string(c.theta_mode)}};
    if (c.n >= 100) {
        const auto x = verify_condition_x(c.design, d.sample);
        body["condition_x"] = {{"gram_rank", x.gram_rank}, {"rank_deficient", x.rank_deficient}, {"mean_norm", x.mean_norm},
                               {"mean_function_norm", x.mean_function_norm}};
    }
    return {{"designs.csv", ctx.csv(header, designs)},
            {"responses.csv", ctx.csv({"index", "y", "signal"}, responses)},
            {"theta.csv", ctx.csv({"t", "theta"}, theta)},
            {"theta_coefficients.csv", ctx.csv({"k", "coefficient", "lambda"}, coeffs)},
            {"simulate.json", ctx.meta(body)}};
}

Artifacts cmd_transform(const Context& ctx) {
    const auto& c = ctx.config;
    const auto p = make_problem(c, c.n);
    const auto d = simulate_data(c, p, single_seed(c));
    const auto cov = empirical_covariance(d.sample);
    const auto T = build_gram_transform(d.sample, cov);
    const auto z = flr_to_whitenoise(d.y, T, c.sigma);
    const Eigen::VectorXd back = whitenoise_to_flr(z, T);
    const Eigen::VectorXd drift = wn_drift(p.theta, cov, c.n);
    const auto n = static_cast<Eigen::Index>(c.n);

    Eigen::MatrixXd wn(n, 4);
    Eigen::MatrixXd round(n, 4);
    for (Eigen::Index k = 0; k < n; ++k) {
        wn.row(k) << static_cast<double>(k + 1), cov.eigenvalues()[k], z.z[k], drift[k];
        round.row(k) << static_cast<double>(k + 1), d.y[k], back[k], std::abs(back[k] - d.y[k]);
    }
    const Eigen::MatrixXd gram = T.A.transpose() * T.A - Eigen::MatrixXd::Identity(n, n);
    json body = {{"n", c.n},
                 {"max_roundtrip_error", round.col(3).maxCoeff()},
                 {"orthogonality_error", gram.cwiseAbs().maxCoeff()},
                 {"determinant", T.A.determinant()},
                 {"sigma", c.sigma}};
    return {{"wn_coefficients.csv", ctx.csv({"k", "lambda_hat", "z", "drift"}, wn)},
            {"responses_roundtrip.csv", ctx.csv({"index", "y", "y_roundtrip", "abs_error"}, round)},
            {"transform.json", ctx.meta(body)}};
}

Artifacts cmd_estimate(const Context& ctx) {
    const auto& c = ctx.config;
    const auto p = make_problem(c, c.n);
    const auto d = simulate_data(c, p, single_seed(c));
    const auto fit = fit_estimator(c, p, d);
    const auto& frame = p.population.frame();
    const auto D = static_cast<Eigen::Index>(c.design.grid_size);

    Eigen::MatrixXd curves(D, 3);
    curves.col(0) = grid_column(c.design.grid_size);
    curves.col(1) = frame.synthesize(p.theta).values();
    curves.col(2) = frame.synthesize(fit.theta_hat).values();
    json body = {{"n", c.n},
                 {"estimator", to_string(c.estimator)},
                 {"loss", (fit.theta_hat - p.theta).squaredNorm()},
                 {"a_n", sharp_risk_constant(p.spectrum, c.theta_class, c.sigma, static_cast<double>(c.n))},
                 {"details", fit.info}};
    return {{"estimate.csv", ctx.csv({"t", "theta", "theta_hat"}, curves)}, {"estimate.json", ctx.meta(body)}};
}

Artifacts cmd_risk(const Context& ctx) {
    const auto& c = ctx.config;
    const auto G = static_cast<Eigen::Index>(c.n_grid.size());
    Eigen::MatrixXd table(G, 5);
    std::vector<double> ns, mise;
    for (Eigen::Index g = 0; g < G; ++g) {
        const std::size_t n = c.n_grid[static_cast<std::size_t>(g)];
        const auto p = make_problem(c, n);
        const auto est = mise_monte_carlo(
            c.replications, derive_seed(c.seed, "risk.n", n),
            [&](std::size_t, std::uint64_t s) {
                const auto d = simulate_data(c, p, s);
                return (fit_estimator(c, p, d).theta_hat - p.theta).squaredNorm();
            },
            c.threads);
        const double a_n = sharp_risk_constant(p.spectrum, c.theta_class, c.sigma, static_cast<double>(n));
        table.row(g) << static_cast<double>(n), est.mean, est.std_error, a_n, est.mean / a_n;
        ns.push_back(static_cast<double>(n));
        mise.push_back(est.mean);
    }
    const double beta = c.theta_class.beta, alpha = c.design.alpha;
    json body = {{"estimator", to_string(c.estimator)},
                 {"replications", c.replications},
                 {"theoretical_slope", -2.0 * beta / (2.0 * beta + alpha + 1.0)}};
    if (ns.size() >= 3) {
        const auto fit = rate_regression(ns, mise);
        body["slope"] = fit.slope;
        body["slope_std_error"] = fit.std_error;
        body["intercept"] = fit.intercept;
    } else {
        body["slope"] = nullptr;
    }
    return {{"risk.csv", ctx.csv({"n", "mise", "std_error", "a_n", "ratio"}, table)}, {"risk.json", ctx.meta(body)}};
}

Artifacts cmd_equivalence(const Context& ctx) {
    const auto& c = ctx.config;
    const auto p = make_problem(c, c.equivalence_n);
    const auto n = static_cast<Eigen::Index>(c.equivalence_n);
    const auto B = static_cast<Eigen::Index>(c.batteries);
    Eigen::MatrixXd tests(B * n, 5);
    std::size_t rejections = 0;
    for (Eigen::Index b = 0; b < B; ++b) {
        const auto battery_seed = derive_seed(c.seed, "equivalence.battery", static_cast<std::uint64_t>(b));
        const auto sample = sample_design(c.design, c.equivalence_n, derive_seed(battery_seed, "design"));
        const auto report = two_route_test(sample, p.theta, c.sigma, c.draws, battery_seed, c.level);
        rejections += report.rejections;
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto& r = report.coordinates[static_cast<std::size_t>(k)];
            tests.row(b * n + k) << static_cast<double>(b + 1), static_cast<double>(k + 1), r.statistic, r.p_value,
                report.rejected[static_cast<std::size_t>(k)] ? 1.0 : 0.0;
        }
    }
    const double total = static_cast<double>(B * n);
    const double rate = static_cast<double>(rejections) / total;
    const double bound = c.level + 3.0 * std::sqrt(c.level * (1.0 - c.level) / total);

    // Delta_{5,6} study with the coefficient profile of the smallest n
    std::size_t smallest = *std::min_element(c.delta_grid.begin(), c.delta_grid.end());
    const auto pd = make_problem(c, smallest);
    Delta56Setup setup{c.design, pd.coefficients, c.theta_class.beta, c.sigma, false, false};
    const auto points = delta56_study(setup, c.delta_grid, c.delta_replications, derive_seed(c.seed, "equivalence.delta"), c.threads);
    Eigen::MatrixXd delta(static_cast<Eigen::Index>(points.size()), 4);
    for (std::size_t i = 0; i < points.size(); ++i)
        delta.row(static_cast<Eigen::Index>(i)) << static_cast<double>(points[i].n), points[i].mean_sq.mean,
            points[i].mean_sq.std_error, points[i].tv;

    json body = {{"n", c.equivalence_n}, {"draws", c.draws},       {"batteries", c.batteries},
                 {"level", c.level},     {"tests", B * n},          {"rejections", rejections},
                 {"rejection_rate", rate}, {"calibration_bound", bound}, {"within_bound", rate <= bound},
                 {"delta_replications", c.delta_replications}};
    return {{"equivalence.csv", ctx.csv({"battery", "coordinate", "statistic", "p_value", "rejected"}, tests)},
            {"delta56.csv", ctx.csv({"n", "mean_sq", "std_error", "tv_bound"}, delta)},
            {"equivalence.json", ctx.meta(body)}};
}

std::vector<double> column(const CsvData& data, const std::string& name) {
    const auto j = data.column(name);
    return {data.rows.col(j).data(), data.rows.col(j).data() + data.rows.rows()};
}

Artifacts cmd_report(const Context& ctx) {
    const auto& c = ctx.config;
    const std::filesystem::path dir(c.output);
    const bool have_risk = std::filesystem::exists(dir / "risk.csv");
    const bool have_delta = std::filesystem::exists(dir / "delta56.csv");
    if (!have_risk && !have_delta) {
        throw ConfigError(dir.string() + ": no risk.csv or delta56.csv to report on; run `risk` or `equivalence` first");
    }
    Artifacts out;
    std::map<double, std::array<double, 7>> merged;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto row = [&](double n) -> std::array<double, 7>& {
        return merged.try_emplace(n, std::array<double, 7>{nan, nan, nan, nan, nan, nan, nan}).first->second;
    };
    json body;
    if (have_risk) {
        const auto risk = read_csv(dir / "risk.csv");
        const auto n = column(risk, "n"), mise = column(risk, "mise"), se = column(risk, "std_error"), a = column(risk, "a_n"),
                   ratio = column(risk, "ratio");
        for (std::size_t i = 0; i < n.size(); ++i) {
            auto& r = row(n[i]);
            r[0] = mise[i], r[1] = se[i], r[2] = a[i], r[3] = ratio[i];
        }
        out["risk_mise.svg"] = svg_line_plot({"MISE against n", "n", "MISE", true, true, {{"MISE", n, mise}, {"a_n", n, a}}});
        out["risk_ratio.svg"] = svg_line_plot({"MISE / a_n", "n", "ratio", true, false, {{"MISE / a_n", n, ratio}}});
        body["risk_rows"] = n.size();
    }
    if (have_delta) {
        const auto delta = read_csv(dir / "delta56.csv");
        const auto n = column(delta, "n"), m = column(delta, "mean_sq"), se = column(delta, "std_error"), tv = column(delta, "tv_bound");
        for (std::size_t i = 0; i < n.size(); ++i) {
            auto& r = row(n[i]);
            r[4] = m[i], r[5] = se[i], r[6] = tv[i];
        }
        out["delta56.svg"] = svg_line_plot(
            {"Delta_{5,6} study", "n", "value", true, true, {{"E||Delta||^2", n, m}, {"tv bound", n, tv}}});
        body["delta_rows"] = n.size();
    }
    Eigen::MatrixXd table(static_cast<Eigen::Index>(merged.size()), 8);
    Eigen::Index i = 0;
    for (const auto& [n, r] : merged) {
        table(i, 0) = n;
        for (int j = 0; j < 7; ++j) table(i, j + 1) = r[static_cast<std::size_t>(j)];
        ++i;
    }
    out["report.csv"] = ctx.csv({"n", "mise", "mise_std_error", "a_n", "ratio", "delta_mean_sq", "delta_std_error", "tv_bound"}, table);
    out["report.json"] = ctx.meta(body);
    return out;
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names{"simulate", "transform", "estimate", "risk", "equivalence", "report"};
    return names;
}

Artifacts run_subcommand(const std::string& name, const ExperimentConfig& config) {
    validate_config(config);
    const Context ctx{config, name};
    if (name == "simulate") return cmd_simulate(ctx);
    if (name == "transform") return cmd_transform(ctx);
    if (name == "estimate") return cmd_estimate(ctx);
    if (name == "risk") return cmd_risk(ctx);
    if (name == "equivalence") return cmd_equivalence(ctx);
    if (name == "report") return cmd_report(ctx);
    throw ConfigError("unknown subcommand '" + name + "'");
}

}  // namespace flrwn
