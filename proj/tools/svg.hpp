#pragma once

#include <string>
#include <vector>

namespace kitwpa::cli {

// Minimal static line/scatter chart written as SVG.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label);

    void line(const std::vector<double>& x, const std::vector<double>& y, const std::string& label);
    void points(const std::vector<double>& x, const std::vector<double>& y, const std::string& label);
    void hline(double y, const std::string& label);
    void band(double x0, double x1);  // shaded vertical span

    std::string render() const;

private:
    struct Series {
        std::vector<double> x, y;
        std::string label;
        bool markers = false;
    };
    struct Band {
        double x0, x1;
    };
    struct HLine {
        double y;
        std::string label;
    };

    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
    std::vector<Band> bands_;
    std::vector<HLine> hlines_;
};

}  // namespace kitwpa::cli
