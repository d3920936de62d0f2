#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace vehfog {

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(b.x - a.x, b.y - a.y); }

/// Axis-aligned rectangle in meters. Interior is the open set.
struct Rect {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    bool contains(Point p) const {  // closed
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }
    bool interior_contains(Point p) const {  // open
        return p.x > x_min && p.x < x_max && p.y > y_min && p.y < y_max;
    }
    friend bool operator==(const Rect&, const Rect&) = default;
};

/// Wall crossings and in-building path length along one line of sight.
struct Obstruction {
    int n = 0;
    double l_obs = 0.0;
};

/// Immutable set of non-overlapping rectangular buildings inside a world rectangle.
class ObstacleMap {
public:
    ObstacleMap() = default;
    /// Validates every invariant; throws ValidationError with the 1-based index
    /// of the offending building (index + 1 stands in for a line number).
    ObstacleMap(Rect bounds, std::vector<Rect> buildings);

    const Rect& bounds() const { return bounds_; }
    const std::vector<Rect>& buildings() const { return buildings_; }

    /// Indices of buildings whose x-extent may intersect [x_lo, x_hi].
    template <typename Fn>
    void for_each_candidate(double x_lo, double x_hi, Fn&& fn) const;

private:
    Rect bounds_{};
    std::vector<Rect> buildings_;
    std::vector<std::size_t> by_x_min_;  // building indices sorted by x_min
    double max_width_ = 0.0;
};

/// Parse the line-oriented map format. Errors report the source line.
ObstacleMap load_map(std::string_view text);
std::string write_map(const ObstacleMap& map);

/// Exact segment/rectangle clipping summed over all buildings. Segments that
/// only touch or slide along a wall contribute nothing.
Obstruction los_obstruction(const ObstacleMap& map, Point p1, Point p2);

/// Single-building contribution; exposed for tests and the link kernel.
Obstruction segment_rect_obstruction(const Rect& rect, Point p1, Point p2);

struct RegionAreas {
    double t_base = 0.0;  // pi r^2
    double r1 = 0.0;      // unshadowed part
    double r2 = 0.0;      // shadowed part, pi d^2
};

RegionAreas region_areas(double r, double d);

/// Manhattan grid: blocks_x by blocks_y buildings separated by streets.
struct GridSpec {
    int blocks_x = 3;
    int blocks_y = 3;
    double block_x = 80.0;
    double block_y = 80.0;
    double street = 20.0;
    double inset = 0.0;
};

ObstacleMap manhattan_grid(const GridSpec& spec);

template <typename Fn>
void ObstacleMap::for_each_candidate(double x_lo, double x_hi, Fn&& fn) const {
    // by_x_min_ is sorted by x_min; anything starting after x_hi cannot intersect,
    // anything starting before x_lo - max_width cannot reach x_lo.
    const double lo = x_lo - max_width_;
    auto first = by_x_min_.begin();
    auto last = by_x_min_.end();
    // lower bound on x_min >= lo
    auto it = std::partition_point(first, last,
                                   [&](std::size_t i) { return buildings_[i].x_min < lo; });
    for (; it != last && buildings_[*it].x_min <= x_hi; ++it) {
        const Rect& b = buildings_[*it];
        if (b.x_max >= x_lo) fn(b);
    }
}

}  // namespace vehfog
