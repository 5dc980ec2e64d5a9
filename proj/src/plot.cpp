#include "fent/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "fent/report.hpp"

namespace fent {

namespace {

constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 20, kTop = 30, kBottom = 50;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

std::string render_plot(const ScalingReport& report) {
    double xmax = 0.0, ymin = 0.0, ymax = 0.0;
    bool any = false;
    std::map<double, std::vector<const ScalingRow*>> groups;
    for (const auto& r : report.rows) {
        const double s = r.scale > 0.0 ? r.scale : r.alpha;
        if (!(s > 0.0)) continue;
        groups[r.gamma].push_back(&r);
        xmax = std::max(xmax, 1.0 / s);
        for (double y : {r.normalized, r.target}) {
            ymin = any ? std::min(ymin, y) : y;
            ymax = any ? std::max(ymax, y) : y;
            any = true;
        }
    }
    if (!any) {
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    xmax *= 1.1;
    const double pad = ymax > ymin ? 0.1 * (ymax - ymin) : std::max(0.1 * std::fabs(ymax), 1e-3);
    ymin -= pad;
    ymax += pad;
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto X = [&](double x) { return kLeft + pw * x / xmax; };
    auto Y = [&](double y) { return kTop + ph * (ymax - y) / (ymax - ymin); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line class=\"axis\" x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(kLeft + pw)
       << "\" y2=\"" << num(kTop + ph) << "\" stroke=\"black\"/>\n";
    os << "<line class=\"axis\" x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft)
       << "\" y2=\"" << num(kTop + ph) << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = xmax * k / 4, yv = ymin + (ymax - ymin) * k / 4;
        os << "<text x=\"" << num(X(xv)) << "\" y=\"" << num(kTop + ph + 18) << "\" font-size=\"11\" text-anchor=\"middle\">"
           << label(xv) << "</text>\n";
        os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(Y(yv) + 4) << "\" font-size=\"11\" text-anchor=\"end\">"
           << label(yv) << "</text>\n";
    }
    os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 10)
       << "\" font-size=\"12\" text-anchor=\"middle\">1 / effective scale</text>\n";
    os << "<text x=\"14\" y=\"" << num(kTop + ph / 2) << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
       << num(kTop + ph / 2) << ")\">normalized trace (" << to_string(report.mode) << ")</text>\n";
    int g = 0;
    for (const auto& [gamma, rows] : groups) {
        const char* color = kColors[g++ % 6];
        const double t = rows.front()->target;
        os << "<line class=\"target\" x1=\"" << num(kLeft) << "\" y1=\"" << num(Y(t)) << "\" x2=\"" << num(kLeft + pw)
           << "\" y2=\"" << num(Y(t)) << "\" stroke=\"" << color << "\" stroke-dasharray=\"6 4\"/>\n";
        for (const ScalingRow* r : rows) {
            const double s = r->scale > 0.0 ? r->scale : r->alpha;
            os << "<circle class=\"marker\" cx=\"" << num(X(1.0 / s)) << "\" cy=\"" << num(Y(r->normalized))
               << "\" r=\"4\" fill=\"" << color << "\"/>\n";
        }
        os << "<text x=\"" << num(kLeft + pw - 4) << "\" y=\"" << num(kTop + 14 * g) << "\" font-size=\"11\" text-anchor=\"end\" fill=\""
           << color << "\">gamma=" << label(gamma) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void emit_plot(const ScalingReport& report, const std::filesystem::path& path) { write_text(path, render_plot(report)); }

}  // namespace fent
