#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "regulata/simkit.hpp"

namespace regulata {

/// Shortest decimal form with 17 significant digits; reads back exactly.
std::string format_double(double x);

/// Header t, state names, derived names; one row per sample.
void write_csv(const std::filesystem::path& path, const Trajectory& traj);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<Vector> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

struct PlotSeries {
    std::string label;
    std::vector<double> y;
};

struct PlotSpec {
    std::string file;    // e.g. "error.svg"
    std::string title;
    std::string y_label;
    std::vector<std::string> signals;  // derived signal names
    bool log_y = false;
};

/// Polyline chart with axes, ticks and a legend. Non-finite samples break
/// the line; log axes drop nonpositive samples.
std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<double>& x, const std::vector<PlotSeries>& series, bool log_y);

void write_plots(const std::filesystem::path& dir, const Trajectory& traj,
                 const std::vector<PlotSpec>& specs);

void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace regulata
