#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "flrwn/cli.hpp"
#include "flrwn/io.hpp"
#include "flrwn/rng.hpp"

namespace flrwn {

namespace {

std::string located(const std::string& source, int line, const std::string& message) {
    return source + ":" + std::to_string(line) + ": " + message;
}

struct Reader {
    ExperimentConfig& cfg;

    [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
        throw ConfigError(located(cfg.source, node.Mark().line + 1, message));
    }

    template <class T>
    T scalar(const YAML::Node& node, const std::string& key) const {
        if (!node.IsScalar()) fail(node, "'" + key + "' must be a scalar");
        try {
            return node.as<T>();
        } catch (const YAML::BadConversion&) {
            fail(node, "'" + key + "' has an invalid value '" + node.Scalar() + "'");
        }
    }

    std::size_t count(const YAML::Node& node, const std::string& key) const {
        const auto v = scalar<long long>(node, key);
        if (v < 0) fail(node, "'" + key + "' must be nonnegative");
        return static_cast<std::size_t>(v);
    }

    std::vector<std::size_t> counts(const YAML::Node& node, const std::string& key) const {
        if (!node.IsSequence()) fail(node, "'" + key + "' must be a list such as [256, 512]");
        std::vector<std::size_t> out;
        for (const auto& item : node) out.push_back(count(item, key));
        return out;
    }
};

using Setter = std::function<void(const Reader&, const YAML::Node&, const std::string&)>;

std::map<std::string, Setter> setters(ExperimentConfig& c) {
    std::map<std::string, Setter> s;
    s["seed"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.seed = r.scalar<std::uint64_t>(v, k); };
    s["threads"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.threads = static_cast<unsigned>(r.count(v, k)); };
    s["output"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.output = r.scalar<std::string>(v, k); };

    s["design.kind"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) {
        const auto t = r.scalar<std::string>(v, k);
        if (t == "basis") c.design.kind = DesignKind::basis_expansion;
        else if (t == "gaussian") c.design.kind = DesignKind::integrated_gaussian;
        else r.fail(v, "design.kind must be 'basis' or 'gaussian', got '" + t + "'");
    };
    s["design.alpha"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.design.alpha = r.scalar<double>(v, k); };
    s["design.truncation"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.design.truncation = r.count(v, k); };
    s["design.grid_size"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.design.grid_size = r.count(v, k); };
    s["design.law"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) {
        const auto t = r.scalar<std::string>(v, k);
        if (t == "uniform") c.design.law = CoefficientLaw::uniform();
        else if (t == "triangular") c.design.law = CoefficientLaw::triangular();
        else r.fail(v, "design.law must be 'uniform' or 'triangular', got '" + t + "'");
    };

    s["theta.beta"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.theta_class.beta = r.scalar<double>(v, k); };
    s["theta.radius"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.theta_class.radius = r.scalar<double>(v, k); };
    s["theta.mode"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) {
        const auto t = r.scalar<std::string>(v, k);
        try {
            c.theta_mode = parse_theta_mode(t);
        } catch (const std::exception&) {
            r.fail(v, "theta.mode must be boundary, random, least-favorable or spike, got '" + t + "'");
        }
    };
    s["theta.count"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.theta_count = r.count(v, k); };
    s["theta.spike_index"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.spike_index = r.count(v, k); };

    s["noise.sigma"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.sigma = r.scalar<double>(v, k); };

    s["study.n"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.n = r.count(v, k); };
    s["study.n_grid"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.n_grid = r.counts(v, k); };
    s["study.estimator"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) {
        const auto t = r.scalar<std::string>(v, k);
        if (t == "cutoff") c.estimator = EstimatorKind::cutoff;
        else if (t == "pinsker-oracle") c.estimator = EstimatorKind::pinsker_oracle;
        else if (t == "pinsker-data-driven") c.estimator = EstimatorKind::pinsker_data_driven;
        else r.fail(v, "study.estimator must be cutoff, pinsker-oracle or pinsker-data-driven, got '" + t + "'");
    };
    s["study.rho"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.rho = r.scalar<double>(v, k); };
    s["study.replications"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.replications = r.count(v, k); };
    s["study.enforce_cap"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.enforce_cap = r.scalar<bool>(v, k); };

    s["equivalence.n"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.equivalence_n = r.count(v, k); };
    s["equivalence.draws"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.draws = r.count(v, k); };
    s["equivalence.batteries"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.batteries = r.count(v, k); };
    s["equivalence.level"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.level = r.scalar<double>(v, k); };
    s["equivalence.delta_grid"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) { c.delta_grid = r.counts(v, k); };
    s["equivalence.delta_replications"] = [&c](const Reader& r, const YAML::Node& v, const std::string& k) {
        c.delta_replications = r.count(v, k);
    };
    return s;
}

}  // namespace

const char* to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::cutoff: return "cutoff";
        case EstimatorKind::pinsker_oracle: return "pinsker-oracle";
        case EstimatorKind::pinsker_data_driven: return "pinsker-data-driven";
    }
    return "cutoff";
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    ExperimentConfig cfg;
    cfg.source = source;
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(located(source, e.mark.line + 1, e.msg));
    }
    if (root.IsNull()) return cfg;
    if (!root.IsMap()) throw ConfigError(located(source, root.Mark().line + 1, "config must be a mapping of keys"));

    const Reader reader{cfg};
    const auto table = setters(cfg);
    std::set<std::string> sections;
    for (const auto& [key, _] : table)
        if (const auto dot = key.find('.'); dot != std::string::npos) sections.insert(key.substr(0, dot));

    auto apply = [&](const std::string& key, const YAML::Node& key_node, const YAML::Node& value) {
        const auto it = table.find(key);
        if (it == table.end()) reader.fail(key_node, "unknown key '" + key + "'");
        if (cfg.lines.count(key)) reader.fail(key_node, "duplicate key '" + key + "'");
        cfg.lines[key] = key_node.Mark().line + 1;
        it->second(reader, value, key);
    };

    for (const auto& entry : root) {
        const auto name = entry.first.as<std::string>();
        if (sections.count(name)) {
            if (!entry.second.IsMap()) reader.fail(entry.first, "section '" + name + "' must hold key: value pairs");
            for (const auto& inner : entry.second) {
                if (inner.second.IsMap()) reader.fail(inner.first, "nesting deeper than one level is not supported");
                apply(name + "." + inner.first.as<std::string>(), inner.first, inner.second);
            }
        } else {
            apply(name, entry.first, entry.second);
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const std::exception&) {
        throw ConfigError(path.string() + ": cannot read config file");
    }
    return parse_config(text, path.string());
}

void validate_config(const ExperimentConfig& c) {
    auto where = [&](const std::string& key) {
        const auto it = c.lines.find(key);
        return it == c.lines.end() ? c.source + ": " + key + " (default)" : c.source + ":" + std::to_string(it->second) + ": " + key;
    };
    auto check = [&](const std::string& key, bool ok, const std::string& message) {
        if (!ok) throw ConfigError(where(key) + ": " + message);
    };
    auto guard = [&](const std::string& key, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where(key) + ": " + e.what());
        }
    };

    check("threads", c.threads >= 1, "needs at least one thread");
    guard("design.alpha", [&] { c.design.validate(); });
    if (c.design.kind == DesignKind::integrated_gaussian) {
        check("design.alpha", c.design.alpha == 2.0, "the integrated Gaussian design has alpha = 2");
    }
    guard("theta.beta", [&] { c.theta_class.validate(c.design.alpha); });
    if (c.estimator == EstimatorKind::pinsker_data_driven) {
        guard("theta.beta", [&] { c.theta_class.validate_data_driven(c.design.alpha); });
    }
    check("theta.count", c.theta_count >= 1, "needs at least one coefficient");
    if (c.theta_mode == ThetaMode::spike) {
        check("theta.spike_index", c.spike_index >= 1 && c.spike_index <= c.theta_count, "must lie in 1..theta.count");
    }
    check("noise.sigma", c.sigma > 0.0 && std::isfinite(c.sigma), "must be positive");
    guard("study.rho", [&] { validate_rho(c.effective_rho(), c.design.alpha); });

    const std::size_t min_n = c.estimator == EstimatorKind::pinsker_data_driven ? 16 : 4;
    check("study.n", c.n >= min_n, "needs n >= " + std::to_string(min_n));
    check("study.n_grid", !c.n_grid.empty(), "needs at least one sample size");
    for (std::size_t n : c.n_grid) check("study.n_grid", n >= min_n, "every n must be >= " + std::to_string(min_n));
    check("study.replications", c.replications >= 2, "Monte Carlo needs replications >= 2, got " + std::to_string(c.replications));

    check("equivalence.n", c.equivalence_n >= 2, "needs n >= 2");
    if (c.design.kind == DesignKind::basis_expansion) {
        check("equivalence.n", c.design.effective_truncation(c.equivalence_n) >= c.equivalence_n,
              "the exact transform needs truncation J >= n (rank n designs)");
    }
    check("equivalence.draws", c.draws >= 2, "needs at least two draws");
    check("equivalence.batteries", c.batteries >= 1, "needs at least one battery");
    check("equivalence.level", c.level > 0.0 && c.level < 1.0, "must lie in (0, 1)");
    check("equivalence.delta_grid", !c.delta_grid.empty(), "needs at least one sample size");
    for (std::size_t n : c.delta_grid) check("equivalence.delta_grid", n >= 4, "every n must be >= 4");
    check("equivalence.delta_replications", c.delta_replications >= 2, "Monte Carlo needs replications >= 2");
}

std::string canonical_config(const ExperimentConfig& c) {
    std::ostringstream s;
    auto list = [](const std::vector<std::size_t>& v) {
        std::string out = "[";
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
        return out + "]";
    };
    s << "seed=" << c.seed << "\n"
      << "design.kind=" << to_string(c.design.kind) << "\n"
      << "design.alpha=" << format_double(c.design.alpha) << "\n"
      << "design.truncation=" << c.design.truncation << "\n"
      << "design.grid_size=" << c.design.grid_size << "\n"
      << "design.law=" << to_string(c.design.law.shape) << "\n"
      << "theta.beta=" << format_double(c.theta_class.beta) << "\n"
      << "theta.radius=" << format_double(c.theta_class.radius) << "\n"
      << "theta.mode=" << to_string(c.theta_mode) << "\n"
      << "theta.count=" << c.theta_count << "\n"
      << "theta.spike_index=" << c.spike_index << "\n"
      << "noise.sigma=" << format_double(c.sigma) << "\n"
      << "study.n=" << c.n << "\n"
      << "study.n_grid=" << list(c.n_grid) << "\n"
      << "study.estimator=" << to_string(c.estimator) << "\n"
      << "study.rho=" << format_double(c.effective_rho()) << "\n"
      << "study.replications=" << c.replications << "\n"
      << "study.enforce_cap=" << (c.enforce_cap ? "true" : "false") << "\n"
      << "equivalence.n=" << c.equivalence_n << "\n"
      << "equivalence.draws=" << c.draws << "\n"
      << "equivalence.batteries=" << c.batteries << "\n"
      << "equivalence.level=" << format_double(c.level) << "\n"
      << "equivalence.delta_grid=" << list(c.delta_grid) << "\n"
      << "equivalence.delta_replications=" << c.delta_replications << "\n";
    return s.str();
}

std::uint64_t config_hash(const ExperimentConfig& config) { return mix64(fnv1a(canonical_config(config))); }

}  // namespace flrwn
