#pragma once

// Plain-text artifacts: CSV with shortest round-trip number formatting, and SVG line plots
// written without any plotting dependency.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace flrwn {

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

/// Header line, then one line per row. Lines of `comments` are emitted first, each prefixed by "# ".
std::string csv_text(const std::vector<std::string>& header, const Eigen::Ref<const Eigen::MatrixXd>& rows,
                     const std::vector<std::string>& comments = {});

struct CsvData {
    std::vector<std::string> header;
    Eigen::MatrixXd rows;

    /// Column index by name; ArgumentError when absent.
    Eigen::Index column(const std::string& name) const;
};

/// Parses text written by csv_text (comment lines skipped). Throws ArgumentError on malformed input.
CsvData parse_csv(const std::string& text);
CsvData read_csv(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<PlotSeries> series;
};

std::string svg_line_plot(const PlotSpec& plot);

}  // namespace flrwn
