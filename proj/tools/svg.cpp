#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace kitwpa::cli {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

double nice_step(double span) {
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) return m * mag;
    }
    return 10.0 * mag;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void settle() {
        if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
        if (hi - lo <= 1e-300 + 1e-12 * std::abs(hi)) {
            const double pad = std::abs(hi) > 0 ? 0.05 * std::abs(hi) : 1.0;
            lo -= pad;
            hi += pad;
        }
    }
};

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::line(const std::vector<double>& x, const std::vector<double>& y, const std::string& label) {
    series_.push_back({x, y, label, false});
}

void SvgPlot::points(const std::vector<double>& x, const std::vector<double>& y, const std::string& label) {
    series_.push_back({x, y, label, true});
}

void SvgPlot::hline(double y, const std::string& label) { hlines_.push_back({y, label}); }

void SvgPlot::band(double x0, double x1) { bands_.push_back({x0, x1}); }

std::string SvgPlot::render() const {
    Range xr, yr;
    for (const auto& s : series_) {
        for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                xr.add(s.x[i]);
                yr.add(s.y[i]);
            }
        }
    }
    for (const auto& h : hlines_) yr.add(h.y);
    xr.settle();
    yr.settle();
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

    std::string o;
    o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o += "<text x=\"" + fmt(kLeft) + "\" y=\"24\" font-size=\"15\">" + esc(title_) + "</text>\n";

    for (const auto& b : bands_) {
        const double a = px(std::max(b.x0, xr.lo)), z = px(std::min(b.x1, xr.hi));
        if (z <= a) continue;
        o += "<rect x=\"" + fmt(a) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(z - a) + "\" height=\"" + fmt(ph) +
             "\" fill=\"#cccccc\" opacity=\"0.6\"/>\n";
    }

    // axes and ticks
    o += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(pw) + "\" height=\"" + fmt(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    const double xs = nice_step(xr.hi - xr.lo), ys = nice_step(yr.hi - yr.lo);
    for (double t = std::ceil(xr.lo / xs) * xs; t <= xr.hi + 1e-9 * xs; t += xs) {
        const double x = px(t);
        o += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(kTop + ph) + "\" x2=\"" + fmt(x) + "\" y2=\"" +
             fmt(kTop + ph + 5) + "\" stroke=\"black\"/>\n";
        o += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(kTop + ph + 18) + "\" text-anchor=\"middle\">" +
             fmt(std::abs(t) < 1e-12 * xs ? 0.0 : t) + "</text>\n";
    }
    for (double t = std::ceil(yr.lo / ys) * ys; t <= yr.hi + 1e-9 * ys; t += ys) {
        const double y = py(t);
        o += "<line x1=\"" + fmt(kLeft - 5) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(kLeft) + "\" y2=\"" + fmt(y) +
             "\" stroke=\"black\"/>\n";
        o += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(y + 4) + "\" text-anchor=\"end\">" +
             fmt(std::abs(t) < 1e-12 * ys ? 0.0 : t) + "</text>\n";
    }
    o += "<text x=\"" + fmt(kLeft + pw / 2) + "\" y=\"" + fmt(kHeight - 15) + "\" text-anchor=\"middle\">" +
         esc(x_label_) + "</text>\n";
    o += "<text transform=\"translate(18," + fmt(kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         esc(y_label_) + "</text>\n";

    int legend = 0;
    for (size_t k = 0; k < series_.size(); ++k) {
        const auto& s = series_[k];
        const std::string color = kColors[k % 6];
        if (s.markers) {
            for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                o += "<circle cx=\"" + fmt(px(s.x[i])) + "\" cy=\"" + fmt(py(s.y[i])) + "\" r=\"3\" fill=\"" + color +
                     "\"/>\n";
            }
        } else {
            // break the path at non-finite samples (stopbands)
            std::string d;
            bool pen = false;
            for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                    pen = false;
                    continue;
                }
                d += (pen ? " L" : " M") + fmt(px(s.x[i])) + " " + fmt(py(s.y[i]));
                pen = true;
            }
            if (!d.empty()) {
                o += "<path d=\"" + d.substr(1) + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
            }
        }
        if (!s.label.empty()) {
            const double ly = kTop + 10 + 18 * legend++;
            o += "<rect x=\"" + fmt(kWidth - kRight + 12) + "\" y=\"" + fmt(ly - 5) + "\" width=\"14\" height=\"4\" fill=\"" +
                 color + "\"/>\n";
            o += "<text x=\"" + fmt(kWidth - kRight + 32) + "\" y=\"" + fmt(ly) + "\">" + esc(s.label) + "</text>\n";
        }
    }
    for (const auto& h : hlines_) {
        const double y = py(h.y);
        o += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(kLeft + pw) + "\" y2=\"" + fmt(y) +
             "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
        o += "<text x=\"" + fmt(kLeft + pw + 4) + "\" y=\"" + fmt(y + 4) + "\">" + esc(h.label) + "</text>\n";
    }
    o += "</svg>\n";
    return o;
}

}  // namespace kitwpa::cli
