#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace elcoinv {

/// One labeled polyline of a plot.
struct PlotSeries {
    std::string label;
    std::string color = "#1f6fb2";
    double width = 1.6;
    bool dashed = false;
    std::vector<double> x, y;
};

/// Line plot with ticked axes and a legend, written as a standalone SVG.
/// With `log_y` the y axis is log10-scaled and nonpositive values are dropped.
void write_line_plot_svg(const std::filesystem::path& file, const std::string& title,
                         const std::string& xlabel, const std::string& ylabel,
                         const std::vector<PlotSeries>& series, bool log_y = false);

/// Equal-aspect plot of plane curves (x and y in the same units); used for the
/// boundary overlays.
void write_plane_plot_svg(const std::filesystem::path& file, const std::string& title,
                          const std::vector<PlotSeries>& series);

/// One CSV cell in full double precision scientific notation.
std::string csv_double(double x);

/// Writes a CSV with a mandatory header row; every row must match the
/// header's arity. Cells are written verbatim (format numbers up front).
void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

} // namespace elcoinv
