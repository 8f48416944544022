#pragma once

// Config-driven experiment runner: `flrwn <subcommand> --config FILE [--seed N] [--threads N] [--out DIR]`.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "flrwn/design.hpp"
#include "flrwn/estimators.hpp"

namespace flrwn {

enum class EstimatorKind { cutoff, pinsker_oracle, pinsker_data_driven };

const char* to_string(EstimatorKind kind);

struct ExperimentConfig {
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string output = "flrwn-out";

    DesignSpec design;
    ThetaClass theta_class{2.0, 1.0};
    ThetaMode theta_mode = ThetaMode::boundary;
    std::size_t theta_count = 64;
    std::size_t spike_index = 1;
    double sigma = 1.0;

    std::size_t n = 100;  ///< single-fit sample size (simulate, transform, estimate)
    std::vector<std::size_t> n_grid{256, 512, 1024, 2048};
    EstimatorKind estimator = EstimatorKind::cutoff;
    double rho = 0.0;  ///< 0 selects default_rho(alpha)
    std::size_t replications = 20;
    bool enforce_cap = false;

    std::size_t equivalence_n = 25;
    std::size_t draws = 2000;
    std::size_t batteries = 4;
    double level = 0.05;
    std::vector<std::size_t> delta_grid{256, 1024, 4096};
    std::size_t delta_replications = 50;

    /// 1-based line of each key that appeared in the file, as "section.key".
    std::map<std::string, int> lines;
    std::string source = "<config>";

    double effective_rho() const { return rho > 0.0 ? rho : default_rho(design.alpha); }
};

/// Invalid configuration; the message already carries "file:line:".
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks every module precondition the subcommands rely on. Throws ConfigError.
void validate_config(const ExperimentConfig& config);

/// Canonical key=value listing of everything that influences results (not output or threads).
std::string canonical_config(const ExperimentConfig& config);
std::uint64_t config_hash(const ExperimentConfig& config);

/// File name -> content, produced in memory before anything touches the disk.
using Artifacts = std::map<std::string, std::string>;

/// Runs one subcommand. `report` reads CSVs from config.output.
Artifacts run_subcommand(const std::string& name, const ExperimentConfig& config);

const std::vector<std::string>& subcommand_names();

/// Writes every artifact into `dir`; on failure the files already written are removed.
void write_artifacts(const Artifacts& artifacts, const std::filesystem::path& dir);

/// Exit codes: 0 success, 2 configuration error, 3 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace flrwn
