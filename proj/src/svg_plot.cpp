#include "phgrasp/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "phgrasp/common.hpp"

namespace phgrasp {

namespace {

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void include(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(lo < hi)) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double m = 0.05 * (hi - lo);
        lo -= m;
        hi += m;
    }
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

// Round tick spacing to a 1/2/5 decade.
double nice_step(double span, int target_ticks) {
    const double raw = span / std::max(1, target_ticks);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) return m * mag;
    }
    return 10.0 * mag;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
    const int W = spec.width, H = spec.height;
    const int ml = 64, mr = 16, mt = 36, mb = 48;  // margins
    const double pw = W - ml - mr, ph = H - mt - mb;

    Range xr, yr;
    for (const auto& s : spec.series) {
        for (double v : s.x) xr.include(v);
        for (double v : s.y) yr.include(v);
    }
    if (!std::isfinite(xr.lo)) {
        xr.lo = 0;
        xr.hi = 1;
        yr.lo = 0;
        yr.hi = 1;
    }
    xr.pad();
    yr.pad();

    auto px = [&](double x) { return ml + pw * (x - xr.lo) / (xr.hi - xr.lo); };
    auto py = [&](double y) { return mt + ph * (1.0 - (y - yr.lo) / (yr.hi - yr.lo)); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
        << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << spec.title << "</text>\n";

    // Axes box.
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
        << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#444\"/>\n";

    // Ticks and grid.
    const double xs = nice_step(xr.hi - xr.lo, 8);
    for (double x = std::ceil(xr.lo / xs) * xs; x <= xr.hi + 1e-12; x += xs) {
        out << "<line x1=\"" << px(x) << "\" y1=\"" << mt << "\" x2=\"" << px(x)
            << "\" y2=\"" << mt + ph << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << px(x) << "\" y=\"" << mt + ph + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">"
            << fmt(x) << "</text>\n";
    }
    const double ys = nice_step(yr.hi - yr.lo, 6);
    for (double y = std::ceil(yr.lo / ys) * ys; y <= yr.hi + 1e-12; y += ys) {
        out << "<line x1=\"" << ml << "\" y1=\"" << py(y) << "\" x2=\"" << ml + pw
            << "\" y2=\"" << py(y) << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << ml - 6 << "\" y=\"" << py(y) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt(y) << "</text>\n";
    }

    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << spec.x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 16 " << mt + ph / 2 << ")\">" << spec.y_label
        << "</text>\n";

    // Series polylines, decimated to at most ~2000 points each.
    int li = 0;
    for (const auto& s : spec.series) {
        const std::size_t n = std::min(s.x.size(), s.y.size());
        const std::size_t stride = std::max<std::size_t>(1, n / 2000);
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < n; i += stride)
            out << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
        if (n > 0) out << fmt(px(s.x[n - 1])) << ',' << fmt(py(s.y[n - 1]));
        out << "\"/>\n";
        out << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 16 + 16 * li
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << s.color
            << "\">" << s.label << "</text>\n";
        ++li;
    }
    out << "</svg>\n";
    return out.str();
}

void write_svg(const PlotSpec& spec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericalError("write_svg: cannot open " + path);
    out << render_svg(spec);
}

}  // namespace phgrasp
