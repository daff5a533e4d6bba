#include "flowlab/svg.hpp"

#include <algorithm>
#include <stdexcept>

#include "flowlab/json_writer.hpp"

namespace flowlab::io {

SvgDocument::SvgDocument(double xmin, double xmax, double ymin, double ymax)
    : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax) {
    if (!(xmax > xmin) || !(ymax > ymin)) throw std::invalid_argument("empty svg region");
}

void SvgDocument::add_path(const std::vector<Vec2>& points, std::string_view css_class) {
    if (points.size() < 2) throw std::invalid_argument("svg path needs at least two points");
    std::string d;
    for (std::size_t i = 0; i < points.size(); ++i) {
        d += (i == 0) ? "M" : " L";
        d += format_g6(points[i][0]);
        d += ',';
        d += format_g6(flip(points[i][1]));
    }
    std::string el = "<path class=\"";
    el += css_class;
    el += "\" d=\"" + d + "\"/>";
    elements_.push_back(std::move(el));
    ++paths_;
}

void SvgDocument::add_circle(Vec2 center, double radius, std::string_view css_class) {
    std::string el = "<circle class=\"";
    el += css_class;
    el += "\" cx=\"" + format_g6(center[0]) + "\" cy=\"" + format_g6(flip(center[1])) +
          "\" r=\"" + format_g6(radius) + "\"/>";
    elements_.push_back(std::move(el));
    ++circles_;
}

std::string SvgDocument::str() const {
    const double stroke = std::max(xmax_ - xmin_, ymax_ - ymin_) / 512.0;
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + format_g6(xmin_) + " " +
           format_g6(ymin_) + " " + format_g6(xmax_ - xmin_) + " " + format_g6(ymax_ - ymin_) +
           "\">\n";
    out += "<style>\n";
    out += "path { fill: none; stroke-width: " + format_g6(stroke) + "; }\n";
    out += ".trajectory { stroke: #1f6fb4; }\n";
    out += ".separatrix { stroke: #c43f3f; }\n";
    out += ".marker { fill: #1f6fb4; stroke: none; }\n";
    out += "</style>\n";
    for (const auto& el : elements_) {
        out += el;
        out += '\n';
    }
    out += "</svg>\n";
    return out;
}

std::vector<Vec2> decimate(const std::vector<Vec2>& points, std::size_t max_points) {
    if (max_points < 2) throw std::invalid_argument("max_points must be >= 2");
    if (points.size() <= max_points) return points;
    std::vector<Vec2> out;
    out.reserve(max_points);
    const std::size_t last = points.size() - 1;
    for (std::size_t k = 0; k < max_points; ++k) {
        const std::size_t idx = (k * last) / (max_points - 1);
        out.push_back(points[idx]);
    }
    return out;
}

} // namespace flowlab::io
