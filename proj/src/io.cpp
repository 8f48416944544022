#include "flrwn/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "flrwn/errors.hpp"

namespace flrwn {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& text, std::size_t line) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ArgumentError("line " + std::to_string(line) + ": cannot parse number '" + text + "'");
    }
    return v;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fixed(double v, int digits) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
    return ec == std::errc() ? std::string(buf.data(), ptr) : std::string("0");
}

std::string tick_label(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 3);
    return ec == std::errc() ? std::string(buf.data(), ptr) : std::string("?");
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), ptr);
}

std::string csv_text(const std::vector<std::string>& header, const Eigen::Ref<const Eigen::MatrixXd>& rows,
                     const std::vector<std::string>& comments) {
    if (static_cast<std::size_t>(rows.cols()) != header.size() && rows.rows() > 0) {
        throw DimensionError("CSV header has " + std::to_string(header.size()) + " columns, rows have " +
                             std::to_string(rows.cols()));
    }
    std::string out;
    for (const auto& c : comments) out += "# " + c + "\n";
    for (std::size_t j = 0; j < header.size(); ++j) out += (j ? "," : "") + header[j];
    out += "\n";
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < rows.cols(); ++j) {
            if (j) out += ',';
            out += format_double(rows(i, j));
        }
        out += '\n';
    }
    return out;
}

Eigen::Index CsvData::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ArgumentError("CSV has no column '" + name + "'");
    return static_cast<Eigen::Index>(it - header.begin());
}

CsvData parse_csv(const std::string& text) {
    CsvData data;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (data.header.empty()) {
            data.header = split_line(line);
            continue;
        }
        const auto cells = split_line(line);
        if (cells.size() != data.header.size()) {
            throw ArgumentError("line " + std::to_string(line_no) + ": expected " + std::to_string(data.header.size()) +
                                " fields, found " + std::to_string(cells.size()));
        }
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_double(c, line_no));
        rows.push_back(std::move(row));
    }
    if (data.header.empty()) throw ArgumentError("CSV has no header");
    data.rows.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(data.header.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) data.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return data;
}

CsvData read_csv(const std::filesystem::path& path) { return parse_csv(read_text_file(path)); }

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string svg_line_plot(const PlotSpec& plot) {
    constexpr double W = 640, H = 420, left = 80, right = 150, top = 40, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;
    auto tx = [&](double v) { return plot.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return plot.log_y ? std::log10(v) : v; };

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : plot.series) {
        if (s.x.size() != s.y.size()) throw DimensionError("plot series '" + s.name + "' has mismatched lengths");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((plot.log_x && !(s.x[i] > 0)) || (plot.log_y && !(s.y[i] > 0)) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, tx(s.x[i])), x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, ty(s.y[i])), y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    const double padding = 0.05 * (y1 - y0);
    y0 -= padding, y1 += padding;
    auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return top + ph - (ty(v) - y0) / (y1 - y0) * ph; };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\">\n";
    svg += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fixed(left + pw / 2, 1) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + escape_xml(plot.title) + "</text>\n";
    svg += "<rect x=\"" + fixed(left, 1) + "\" y=\"" + fixed(top, 1) + "\" width=\"" + fixed(pw, 1) + "\" height=\"" + fixed(ph, 1) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
        const double vx = plot.log_x ? std::pow(10.0, fx) : fx, vy = plot.log_y ? std::pow(10.0, fy) : fy;
        const double sx = left + pw * i / 4.0, sy = top + ph - ph * i / 4.0;
        svg += "<text x=\"" + fixed(sx, 1) + "\" y=\"" + fixed(top + ph + 18, 1) + "\" text-anchor=\"middle\" font-size=\"11\">" + tick_label(vx) + "</text>\n";
        svg += "<text x=\"" + fixed(left - 6, 1) + "\" y=\"" + fixed(sy + 4, 1) + "\" text-anchor=\"end\" font-size=\"11\">" + tick_label(vy) + "</text>\n";
    }
    svg += "<text x=\"" + fixed(left + pw / 2, 1) + "\" y=\"" + fixed(H - 16, 1) + "\" text-anchor=\"middle\" font-size=\"12\">" + escape_xml(plot.x_label) + "</text>\n";
    svg += "<text x=\"18\" y=\"" + fixed(top + ph / 2, 1) + "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 18 " +
           fixed(top + ph / 2, 1) + ")\">" + escape_xml(plot.y_label) + "</text>\n";
    for (std::size_t s = 0; s < plot.series.size(); ++s) {
        const auto& series = plot.series[s];
        const std::string color = colors[s % 6];
        std::string points;
        for (std::size_t i = 0; i < series.x.size(); ++i) {
            if ((plot.log_x && !(series.x[i] > 0)) || (plot.log_y && !(series.y[i] > 0)) || !std::isfinite(series.y[i])) continue;
            points += (points.empty() ? "" : " ") + fixed(px(series.x[i]), 2) + "," + fixed(py(series.y[i]), 2);
            svg += "<circle cx=\"" + fixed(px(series.x[i]), 2) + "\" cy=\"" + fixed(py(series.y[i]), 2) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
        }
        svg += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
        const double ly = top + 14 + 18.0 * static_cast<double>(s);
        svg += "<line x1=\"" + fixed(left + pw + 10, 1) + "\" y1=\"" + fixed(ly, 1) + "\" x2=\"" + fixed(left + pw + 30, 1) + "\" y2=\"" +
               fixed(ly, 1) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fixed(left + pw + 35, 1) + "\" y=\"" + fixed(ly + 4, 1) + "\" font-size=\"11\">" + escape_xml(series.name) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace flrwn
