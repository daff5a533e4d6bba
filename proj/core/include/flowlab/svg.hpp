#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "flowlab/vec.hpp"

namespace flowlab::io {

/// SVG 1.1 emitter for phase portraits. World coordinates go in; the y axis
/// is flipped so that v grows upward on screen. Output bytes are a pure
/// function of the calls made (floats via "%.6g", fixed element order).
class SvgDocument {
public:
    SvgDocument(double xmin, double xmax, double ymin, double ymax);

    void add_path(const std::vector<Vec2>& points, std::string_view css_class);
    void add_circle(Vec2 center, double radius, std::string_view css_class);

    int path_count() const { return paths_; }
    int circle_count() const { return circles_; }

    std::string str() const;

private:
    double xmin_, xmax_, ymin_, ymax_;
    int paths_ = 0;
    int circles_ = 0;
    std::vector<std::string> elements_;

    double flip(double v) const { return (ymin_ + ymax_) - v; }
};

/// Uniform-stride thinning to at most max_points vertices (endpoints kept).
std::vector<Vec2> decimate(const std::vector<Vec2>& points, std::size_t max_points);

} // namespace flowlab::io
