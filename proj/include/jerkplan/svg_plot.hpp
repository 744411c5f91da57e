#pragma once

#include "jerkplan/types.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace jerkplan {

/// Minimal self-contained SVG line chart: one polyline per series over a
/// shared x axis, with an automatic y range and a small legend.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void add_series(const std::string& name, const std::vector<double>& x,
                    const std::vector<double>& y) {
        series_.push_back({name, x, y});
    }

    std::string render(int width = 900, int height = 420) const {
        double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
        double y_min = x_min, y_max = -x_min;
        for (const auto& s : series_) {
            for (double v : s.x) {
                x_min = std::min(x_min, v);
                x_max = std::max(x_max, v);
            }
            for (double v : s.y) {
                y_min = std::min(y_min, v);
                y_max = std::max(y_max, v);
            }
        }
        if (!(x_max > x_min)) x_max = x_min + 1.0;
        if (!(y_max > y_min)) y_max = y_min + 1.0;
        const double pad_y = 0.05 * (y_max - y_min);
        y_min -= pad_y;
        y_max += pad_y;

        const double ml = 70, mr = 20, mt = 40, mb = 50;
        const double pw = width - ml - mr, ph = height - mt - mb;
        const auto sx = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
        const auto sy = [&](double y) { return mt + (y_max - y) / (y_max - y_min) * ph; };

        static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                       "#d62728", "#9467bd", "#8c564b"};
        std::ostringstream svg;
        svg << std::setprecision(8);
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
            << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
            << "\">\n";
        svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        svg << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"15\">" << title_ << "</text>\n";
        svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\""
            << ph << "\" fill=\"none\" stroke=\"#888\"/>\n";

        // Axis ticks: five per axis.
        for (int k = 0; k <= 4; ++k) {
            const double xv = x_min + k * (x_max - x_min) / 4.0;
            const double yv = y_min + k * (y_max - y_min) / 4.0;
            svg << "<text x=\"" << sx(xv) << "\" y=\"" << height - mb + 18
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
                << format_tick(xv) << "</text>\n";
            svg << "<text x=\"" << ml - 6 << "\" y=\"" << sy(yv) + 4
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
                << format_tick(yv) << "</text>\n";
            svg << "<line x1=\"" << ml << "\" y1=\"" << sy(yv) << "\" x2=\"" << width - mr
                << "\" y2=\"" << sy(yv) << "\" stroke=\"#eee\"/>\n";
        }
        svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << x_label_ << "</text>\n";
        svg << "<text x=\"16\" y=\"" << mt + ph / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
            << "transform=\"rotate(-90 16 " << mt + ph / 2 << ")\">" << y_label_
            << "</text>\n";

        for (std::size_t si = 0; si < series_.size(); ++si) {
            const auto& s = series_[si];
            svg << "<polyline fill=\"none\" stroke=\"" << colors[si % 6]
                << "\" stroke-width=\"1.2\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                svg << sx(s.x[i]) << ',' << sy(s.y[i]) << ' ';
            svg << "\"/>\n";
            svg << "<text x=\"" << ml + 10 + 140 * static_cast<double>(si) << "\" y=\""
                << mt - 8 << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
                << colors[si % 6] << "\">" << s.name << "</text>\n";
        }
        svg << "</svg>\n";
        return svg.str();
    }

    void save(const std::string& path, int width = 900, int height = 420) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write file: " + path);
        out << render(width, height);
    }

private:
    struct Series {
        std::string name;
        std::vector<double> x;
        std::vector<double> y;
    };

    static std::string format_tick(double v) {
        std::ostringstream os;
        os << std::setprecision(4) << v;
        return os.str();
    }

    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
};

}  // namespace jerkplan
