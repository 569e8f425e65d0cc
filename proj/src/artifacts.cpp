#include "elcoinv/artifacts.hpp"

#include "elcoinv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace elcoinv {

namespace {

constexpr double canvas_w = 820.0, canvas_h = 560.0;
constexpr double margin_l = 86.0, margin_r = 26.0, margin_t = 48.0, margin_b = 66.0;

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

struct Ticks {
    std::vector<double> at;
    std::vector<std::string> label;
};

Ticks linear_ticks(double lo, double hi) {
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double step = mag * (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0);
    Ticks t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
        const double snapped = std::abs(v) < 1e-12 * step ? 0.0 : v;
        t.at.push_back(snapped);
        char buf[40];
        std::snprintf(buf, sizeof buf, "%g", snapped);
        t.label.emplace_back(buf);
    }
    return t;
}

Ticks log_ticks(double lo, double hi) {
    Ticks t;
    const int step = std::max(1, static_cast<int>(std::round((hi - lo) / 6.0)));
    for (int e = static_cast<int>(std::ceil(lo)); e <= static_cast<int>(std::floor(hi));
         e += step) {
        t.at.push_back(e);
        char buf[40];
        std::snprintf(buf, sizeof buf, "1e%d", e);
        t.label.emplace_back(buf);
    }
    return t;
}

void pad_range(double& lo, double& hi) {
    if (!(hi > lo)) {
        const double pad = std::max(1.0, std::abs(lo)) * 0.5;
        lo -= pad;
        hi += pad;
    }
}

void open_svg(std::ofstream& out, const std::string& title) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << canvas_w << "\" height=\""
        << canvas_h << "\" viewBox=\"0 0 " << canvas_w << " " << canvas_h << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << canvas_w / 2 << "\" y=\"28\" text-anchor=\"middle\" "
        << "font-family=\"Helvetica, Arial, sans-serif\" font-size=\"17\">" << esc(title)
        << "</text>\n";
}

void draw_legend(std::ofstream& out, const std::vector<PlotSeries>& series) {
    size_t widest = 0;
    for (const auto& s : series) widest = std::max(widest, s.label.size());
    const double bw = 54.0 + 7.3 * static_cast<double>(widest);
    const double bh = 10.0 + 19.0 * static_cast<double>(series.size());
    const double bx = canvas_w - margin_r - bw - 8.0, by = margin_t + 8.0;
    out << "<rect x=\"" << num(bx) << "\" y=\"" << num(by) << "\" width=\"" << num(bw)
        << "\" height=\"" << num(bh)
        << "\" fill=\"white\" fill-opacity=\"0.85\" stroke=\"#999\"/>\n";
    for (size_t i = 0; i < series.size(); ++i) {
        const double ly = by + 19.0 * (static_cast<double>(i) + 1.0) - 4.0;
        out << "<line x1=\"" << num(bx + 8) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
            << num(bx + 38) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << series[i].color
            << "\" stroke-width=\"" << series[i].width << "\""
            << (series[i].dashed ? " stroke-dasharray=\"7 5\"" : "") << "/>\n"
            << "<text x=\"" << num(bx + 44) << "\" y=\"" << num(ly)
            << "\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"13\">"
            << esc(series[i].label) << "</text>\n";
    }
}

void draw_polyline(std::ofstream& out, const PlotSeries& s, const std::vector<double>& px,
                   const std::vector<double>& py) {
    if (px.empty()) return;
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"" << s.width
        << "\"" << (s.dashed ? " stroke-dasharray=\"7 5\"" : "") << " points=\"";
    for (size_t i = 0; i < px.size(); ++i)
        out << (i ? " " : "") << num(px[i]) << "," << num(py[i]);
    out << "\"/>\n";
}

} // namespace

void write_line_plot_svg(const std::filesystem::path& file, const std::string& title,
                         const std::string& xlabel, const std::string& ylabel,
                         const std::vector<PlotSeries>& series, bool log_y) {
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    auto yval = [log_y](double y) { return log_y ? std::log10(y) : y; };
    for (const auto& s : series) {
        if (s.x.size() != s.y.size())
            throw ConfigError("plot: series '" + s.label + "' has mismatched x/y sizes");
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (log_y && !(s.y[i] > 0.0)) continue;
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            ylo = std::min(ylo, yval(s.y[i]));
            yhi = std::max(yhi, yval(s.y[i]));
        }
    }
    if (!std::isfinite(xlo) || !std::isfinite(ylo)) {
        xlo = 0.0, xhi = 1.0, ylo = log_y ? -1.0 : 0.0, yhi = log_y ? 0.0 : 1.0;
    }
    pad_range(xlo, xhi);
    pad_range(ylo, yhi);

    const double pw = canvas_w - margin_l - margin_r, ph = canvas_h - margin_t - margin_b;
    auto px = [&](double x) { return margin_l + (x - xlo) / (xhi - xlo) * pw; };
    auto py = [&](double y) { return margin_t + ph - (y - ylo) / (yhi - ylo) * ph; };

    std::ofstream out(file);
    if (!out) throw ConfigError("plot: cannot write '" + file.string() + "'");
    open_svg(out, title);

    const Ticks xt = linear_ticks(xlo, xhi);
    const Ticks yt = log_y ? log_ticks(ylo, yhi) : linear_ticks(ylo, yhi);
    for (size_t i = 0; i < xt.at.size(); ++i) {
        const double gx = px(xt.at[i]);
        out << "<line x1=\"" << num(gx) << "\" y1=\"" << num(margin_t) << "\" x2=\"" << num(gx)
            << "\" y2=\"" << num(margin_t + ph) << "\" stroke=\"#e3e3e3\"/>\n"
            << "<text x=\"" << num(gx) << "\" y=\"" << num(margin_t + ph + 20)
            << "\" text-anchor=\"middle\" font-family=\"Helvetica, Arial, sans-serif\" "
               "font-size=\"12\">"
            << xt.label[i] << "</text>\n";
    }
    for (size_t i = 0; i < yt.at.size(); ++i) {
        const double gy = py(yt.at[i]);
        out << "<line x1=\"" << num(margin_l) << "\" y1=\"" << num(gy) << "\" x2=\""
            << num(margin_l + pw) << "\" y2=\"" << num(gy) << "\" stroke=\"#e3e3e3\"/>\n"
            << "<text x=\"" << num(margin_l - 8) << "\" y=\"" << num(gy + 4)
            << "\" text-anchor=\"end\" font-family=\"Helvetica, Arial, sans-serif\" "
               "font-size=\"12\">"
            << yt.label[i] << "</text>\n";
    }
    out << "<rect x=\"" << num(margin_l) << "\" y=\"" << num(margin_t) << "\" width=\"" << num(pw)
        << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << num(margin_l + pw / 2) << "\" y=\"" << num(canvas_h - 18)
        << "\" text-anchor=\"middle\" font-family=\"Helvetica, Arial, sans-serif\" "
           "font-size=\"14\">"
        << esc(xlabel) << "</text>\n";
    out << "<text x=\"22\" y=\"" << num(margin_t + ph / 2)
        << "\" text-anchor=\"middle\" font-family=\"Helvetica, Arial, sans-serif\" "
           "font-size=\"14\" transform=\"rotate(-90 22 "
        << num(margin_t + ph / 2) << ")\">" << esc(ylabel) << "</text>\n";

    for (const auto& s : series) {
        std::vector<double> sx, sy;
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (log_y && !(s.y[i] > 0.0)) continue;
            sx.push_back(px(s.x[i]));
            sy.push_back(py(yval(s.y[i])));
        }
        draw_polyline(out, s, sx, sy);
    }
    draw_legend(out, series);
    out << "</svg>\n";
}

void write_plane_plot_svg(const std::filesystem::path& file, const std::string& title,
                          const std::vector<PlotSeries>& series) {
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size())
            throw ConfigError("plot: series '" + s.label + "' has mismatched x/y sizes");
        for (size_t i = 0; i < s.x.size(); ++i) {
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            ylo = std::min(ylo, s.y[i]);
            yhi = std::max(yhi, s.y[i]);
        }
    }
    if (!std::isfinite(xlo)) xlo = -1.0, xhi = 1.0, ylo = -1.0, yhi = 1.0;
    pad_range(xlo, xhi);
    pad_range(ylo, yhi);
    const double padx = 0.06 * (xhi - xlo), pady = 0.06 * (yhi - ylo);
    xlo -= padx, xhi += padx, ylo -= pady, yhi += pady;

    const double pw = canvas_w - margin_l - margin_r, ph = canvas_h - margin_t - margin_b;
    const double scale = std::min(pw / (xhi - xlo), ph / (yhi - ylo));
    const double cx = margin_l + pw / 2, cy = margin_t + ph / 2;
    const double mx = (xlo + xhi) / 2, my = (ylo + yhi) / 2;
    auto px = [&](double x) { return cx + (x - mx) * scale; };
    auto py = [&](double y) { return cy - (y - my) * scale; };

    std::ofstream out(file);
    if (!out) throw ConfigError("plot: cannot write '" + file.string() + "'");
    open_svg(out, title);
    // axes through the origin when it is in view
    if (xlo < 0 && xhi > 0)
        out << "<line x1=\"" << num(px(0)) << "\" y1=\"" << num(margin_t) << "\" x2=\""
            << num(px(0)) << "\" y2=\"" << num(margin_t + ph) << "\" stroke=\"#dddddd\"/>\n";
    if (ylo < 0 && yhi > 0)
        out << "<line x1=\"" << num(margin_l) << "\" y1=\"" << num(py(0)) << "\" x2=\""
            << num(margin_l + pw) << "\" y2=\"" << num(py(0)) << "\" stroke=\"#dddddd\"/>\n";
    out << "<rect x=\"" << num(margin_l) << "\" y=\"" << num(margin_t) << "\" width=\"" << num(pw)
        << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";

    for (const auto& s : series) {
        std::vector<double> sx, sy;
        sx.reserve(s.x.size());
        sy.reserve(s.y.size());
        for (size_t i = 0; i < s.x.size(); ++i) {
            sx.push_back(px(s.x[i]));
            sy.push_back(py(s.y[i]));
        }
        draw_polyline(out, s, sx, sy);
    }
    draw_legend(out, series);
    out << "</svg>\n";
}

std::string csv_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", x);
    return buf;
}

void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(file);
    if (!out) throw ConfigError("csv: cannot write '" + file.string() + "'");
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw ConfigError("csv: row arity does not match the header in '" + file.string() +
                              "'");
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

} // namespace elcoinv
