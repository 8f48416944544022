#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "flrwn/cli.hpp"
#include "flrwn/io.hpp"

namespace flrwn {

void write_artifacts(const Artifacts& artifacts, const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> written;
    try {
        std::filesystem::create_directories(dir);
        for (const auto& [name, content] : artifacts) {
            const auto path = dir / name;
            written.push_back(path);
            write_text_file(path, content);
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& path : written) std::filesystem::remove(path, ec);
        throw;
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Functional linear regression / white-noise experiments"};
    app.require_subcommand(1);
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> out_dir;
    for (const auto& name : subcommand_names()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "YAML experiment config")->required();
        sub->add_option("--seed", seed, "override the master seed");
        sub->add_option("--threads", threads, "worker threads for replications");
        sub->add_option("--out", out_dir, "output directory");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    const std::string name = app.get_subcommands().front()->get_name();

    try {
        auto config = load_config(config_path);
        if (seed) config.seed = *seed;
        if (threads) config.threads = *threads;
        if (out_dir) config.output = *out_dir;
        const auto artifacts = run_subcommand(name, config);
        write_artifacts(artifacts, config.output);
        for (const auto& [file, _] : artifacts) out << (std::filesystem::path(config.output) / file).string() << "\n";
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace flrwn
