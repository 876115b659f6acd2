#include "molres/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <vector>

#include "molres/errors.hpp"

namespace molres {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0, kRight = 30.0, kTop = 50.0, kBottom = 60.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

bool parse_cell(const std::string& s, double& out) {
    if (s.empty()) return false;
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size() && std::isfinite(out);
    } catch (...) {
        return false;
    }
}

struct Mapper {
    double lo = 0.0, hi = 1.0, out_lo = 0.0, out_hi = 1.0;
    double operator()(double v) const {
        if (hi == lo) return 0.5 * (out_lo + out_hi);
        return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
    }
};

// Five-stop blue->yellow color ramp for heatmap cells.
std::string ramp_color(double t) {
    static const double stops[5][3] = {{68, 1, 84},
                                       {59, 82, 139},
                                       {33, 145, 140},
                                       {94, 201, 98},
                                       {253, 231, 37}};
    t = std::clamp(t, 0.0, 1.0);
    const double x = t * 4.0;
    const int i = std::min(3, static_cast<int>(x));
    const double f = x - i;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                  static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                  static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
    return buf;
}

void open_svg(std::ostringstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"28\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
}

void axis_labels(std::ostringstream& out, const std::string& x_label,
                 const std::string& y_label) {
    out << "<text x=\"" << fmt((kLeft + kWidth - kRight) / 2) << "\" y=\"" << fmt(kHeight - 15)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
        << "</text>\n";
    out << "<text x=\"20\" y=\"" << fmt((kTop + kHeight - kBottom) / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 20 " << fmt((kTop + kHeight - kBottom) / 2) << ")\">" << y_label
        << "</text>\n";
}

} // namespace

std::string render_heatmap_svg(const CsvTable& table, const std::string& title,
                               const std::string& x_label, const std::string& y_label) {
    if (table.header.size() < 2 || table.rows.empty())
        throw schema_error("heatmap: need a label column and at least one data column");
    const std::size_t n_cols = table.header.size() - 1;
    const std::size_t n_rows = table.rows.size();

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> cells(n_rows, std::vector<double>(n_cols, 0.0));
    for (std::size_t r = 0; r < n_rows; ++r) {
        if (table.rows[r].size() != table.header.size())
            throw schema_error("heatmap: row width mismatch");
        for (std::size_t c = 0; c < n_cols; ++c) {
            double v;
            if (!parse_cell(table.rows[r][c + 1], v))
                throw schema_error("heatmap: non-numeric cell");
            cells[r][c] = v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }

    std::ostringstream out;
    open_svg(out, title);
    const double plot_w = kWidth - kLeft - kRight - 50.0; // reserve colorbar space
    const double plot_h = kHeight - kTop - kBottom;
    const double cw = plot_w / static_cast<double>(n_cols);
    const double ch = plot_h / static_cast<double>(n_rows);

    for (std::size_t r = 0; r < n_rows; ++r) {
        for (std::size_t c = 0; c < n_cols; ++c) {
            const double t = hi == lo ? 0.5 : (cells[r][c] - lo) / (hi - lo);
            out << "<rect class=\"cell\" x=\"" << fmt(kLeft + c * cw) << "\" y=\""
                << fmt(kTop + r * ch) << "\" width=\"" << fmt(cw) << "\" height=\"" << fmt(ch)
                << "\" fill=\"" << ramp_color(t) << "\"/>\n";
        }
        out << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(kTop + r * ch + ch / 2 + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << table.rows[r][0] << "</text>\n";
    }
    for (std::size_t c = 0; c < n_cols; ++c) {
        out << "<text x=\"" << fmt(kLeft + c * cw + cw / 2) << "\" y=\""
            << fmt(kHeight - kBottom + 16)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << table.header[c + 1] << "</text>\n";
    }

    // Colorbar with min/max labels.
    const double bar_x = kWidth - kRight - 30.0;
    for (int i = 0; i < 40; ++i) {
        const double t = 1.0 - static_cast<double>(i) / 39.0;
        out << "<rect x=\"" << fmt(bar_x) << "\" y=\"" << fmt(kTop + i * plot_h / 40.0)
            << "\" width=\"14\" height=\"" << fmt(plot_h / 40.0 + 0.5) << "\" fill=\""
            << ramp_color(t) << "\"/>\n";
    }
    out << "<text x=\"" << fmt(bar_x - 4) << "\" y=\"" << fmt(kTop + 10)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt_tick(hi)
        << "</text>\n";
    out << "<text x=\"" << fmt(bar_x - 4) << "\" y=\"" << fmt(kTop + plot_h)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt_tick(lo)
        << "</text>\n";

    axis_labels(out, x_label, y_label);
    out << "</svg>\n";
    return out.str();
}

std::string render_lines_svg(const CsvTable& table, const std::string& title,
                             const std::string& x_label, const std::string& y_label) {
    if (table.header.size() < 2)
        throw schema_error("lines: need an x column and at least one series column");

    struct Series {
        std::string name;
        std::vector<std::pair<double, double>> points;
    };
    std::vector<Series> series;
    for (std::size_t c = 1; c < table.header.size(); ++c)
        series.push_back({table.header[c], {}});

    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = std::numeric_limits<double>::infinity(), y_hi = -y_lo;
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw schema_error("lines: row width mismatch");
        double x;
        if (!parse_cell(row[0], x)) throw schema_error("lines: non-numeric x cell");
        for (std::size_t c = 1; c < row.size(); ++c) {
            double y;
            if (!parse_cell(row[c], y)) continue; // empty cell: series absent at this x
            series[c - 1].points.emplace_back(x, y);
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }

    std::erase_if(series, [](const Series& s) { return s.points.empty(); });
    if (series.empty()) throw schema_error("lines: no finite data points");

    std::ostringstream out;
    open_svg(out, title);
    const Mapper mx{x_lo, x_hi, kLeft, kWidth - kRight};
    const Mapper my{y_lo, y_hi, kHeight - kBottom, kTop};

    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kHeight - kBottom) << "\" x2=\""
        << fmt(kWidth - kRight) << "\" y2=\"" << fmt(kHeight - kBottom)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kHeight - kBottom) << "\" x2=\""
        << fmt(kLeft) << "\" y2=\"" << fmt(kTop) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kHeight - kBottom + 16)
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << fmt_tick(x_lo) << "</text>\n";
    out << "<text x=\"" << fmt(kWidth - kRight) << "\" y=\"" << fmt(kHeight - kBottom + 16)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt_tick(x_hi)
        << "</text>\n";
    out << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(kHeight - kBottom)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt_tick(y_lo)
        << "</text>\n";
    out << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(kTop + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt_tick(y_hi)
        << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : series[s].points) out << fmt(mx(x)) << ',' << fmt(my(y)) << ' ';
        out << "\"/>\n";
        // Legend entry.
        const double ly = kTop + 14.0 * static_cast<double>(s);
        out << "<rect class=\"legend\" x=\"" << fmt(kWidth - kRight - 110) << "\" y=\""
            << fmt(ly - 8) << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << fmt(kWidth - kRight - 96) << "\" y=\"" << fmt(ly)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << series[s].name << "</text>\n";
    }

    axis_labels(out, x_label, y_label);
    out << "</svg>\n";
    return out.str();
}

std::string render_memory_svg(const CsvTable& curve, const CsvTable& summary) {
    if (curve.header != std::vector<std::string>{"d", "r2"})
        throw schema_error("memory: curve CSV must have header d,r2");
    if (summary.header != std::vector<std::string>{"mc", "h_star"} || summary.rows.size() != 1)
        throw schema_error("memory: summary CSV must have header mc,h_star and one row");

    std::string annotated = "memory curve (MC=" + summary.rows[0][0] +
                            ", H*=" + summary.rows[0][1] + ")";
    return render_lines_svg(curve, annotated, "delay d (windows)", "R^2(d)");
}

} // namespace molres
