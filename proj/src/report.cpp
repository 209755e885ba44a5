#include "regulata/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace regulata {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out << text;
    if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

void write_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out << 't';
    for (const auto& n : traj.state_names) out << ',' << n;
    for (const auto& n : traj.derived_names) out << ',' << n;
    out << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out << format_double(traj.times[k]);
        for (double v : traj.states[k]) out << ',' << format_double(v);
        if (k < traj.derived.size())
            for (double v : traj.derived[k]) out << ',' << format_double(v);
        out << '\n';
    }
    if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::IoError, path.string() + " is empty");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) table.header.push_back(cell);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Vector row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (row.size() != table.header.size()) {
            fail(ErrorCode::IoError, path.string() + ": ragged row");
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace {

constexpr double kWidth = 800.0, kHeight = 450.0;
constexpr double kLeft = 80.0, kRight = 170.0, kTop = 40.0, kBottom = 50.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

// Roughly five round tick values covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double f : {1.0, 2.0, 5.0, 10.0}) {
        step = f * mag;
        if (span / step <= 6.0) break;
    }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step)
        out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
    return out;
}

std::string tick_label(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

} // namespace

std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<double>& x, const std::vector<PlotSeries>& series, bool log_y) {
    auto transform = [log_y](double y) { return log_y ? std::log10(y) : y; };
    auto usable = [log_y](double y) { return std::isfinite(y) && (!log_y || y > 0.0); };

    double x0 = x.empty() ? 0.0 : x.front(), x1 = x.empty() ? 1.0 : x.back();
    if (!(x1 > x0)) x1 = x0 + 1.0;
    double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
    for (const auto& s : series)
        for (double y : s.y)
            if (usable(y)) {
                y0 = std::min(y0, transform(y));
                y1 = std::max(y1, transform(y));
            }
    if (!std::isfinite(y0)) {
        y0 = 0.0;
        y1 = 1.0;
    }
    if (y1 - y0 < 1e-12 * std::max(1.0, std::abs(y0))) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double t) { return kLeft + (t - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return kTop + (y1 - v) / (y1 - y0) * ph; };

    std::ostringstream os;
    os.precision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << escape(title) << "</text>\n";

    for (double t : ticks(x0, x1)) {
        os << "<line x1=\"" << px(t) << "\" y1=\"" << kTop << "\" x2=\"" << px(t) << "\" y2=\""
           << kTop + ph << "\" stroke=\"#e5e5e5\"/>\n";
        os << "<text x=\"" << px(t) << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">"
           << tick_label(t) << "</text>\n";
    }
    for (double v : ticks(y0, y1)) {
        os << "<line x1=\"" << kLeft << "\" y1=\"" << py(v) << "\" x2=\"" << kLeft + pw << "\" y2=\""
           << py(v) << "\" stroke=\"#e5e5e5\"/>\n";
        const std::string label = log_y ? "1e" + tick_label(v) : tick_label(v);
        os << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << label
           << "</text>\n";
    }
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
       << escape(x_label) << "</text>\n";
    os << "<text transform=\"translate(18," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(y_label) << (log_y ? " (log)" : "") << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* colour = kPalette[s % std::size(kPalette)];
        std::string points;
        auto flush = [&]() {
            if (!points.empty())
                os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.3\" points=\""
                   << points << "\"/>\n";
            points.clear();
        };
        const auto& y = series[s].y;
        for (std::size_t i = 0; i < y.size() && i < x.size(); ++i) {
            if (!usable(y[i])) {
                flush();
                continue;
            }
            std::ostringstream p;
            p.precision(6);
            p << px(x[i]) << ',' << py(transform(y[i])) << ' ';
            points += p.str();
        }
        flush();
        const double ly = kTop + 14.0 + 18.0 * static_cast<double>(s);
        os << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kLeft + pw + 34
           << "\" y2=\"" << ly - 4 << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << kLeft + pw + 40 << "\" y=\"" << ly << "\">" << escape(series[s].label)
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_plots(const std::filesystem::path& dir, const Trajectory& traj,
                 const std::vector<PlotSpec>& specs) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
    for (const auto& spec : specs) {
        std::vector<PlotSeries> series;
        for (const auto& name : spec.signals) series.push_back({name, traj.derived_column(name)});
        write_text(dir / spec.file, render_svg(spec.title, "t [s]", spec.y_label, traj.times, series, spec.log_y));
    }
}

} // namespace regulata
