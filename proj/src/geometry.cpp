#include "vehfog/geometry.hpp"

#include <numbers>
#include <sstream>

#include "text_util.hpp"
#include "vehfog/error.hpp"

namespace vehfog {
namespace {

bool interiors_overlap(const Rect& a, const Rect& b) {
    return a.x_min < b.x_max && b.x_min < a.x_max && a.y_min < b.y_max && b.y_min < a.y_max;
}

// lines[i] is the source line of buildings[i]; 0 when not from a file.
void validate(const Rect& bounds, const std::vector<Rect>& buildings,
              const std::vector<std::size_t>& lines) {
    auto line_of = [&](std::size_t i) { return lines.empty() ? i + 1 : lines[i]; };
    if (!(bounds.x_min < bounds.x_max && bounds.y_min < bounds.y_max))
        throw ValidationError(lines.empty() ? 0 : 1, "degenerate bounds");
    for (std::size_t i = 0; i < buildings.size(); ++i) {
        const Rect& b = buildings[i];
        if (!(b.x_min < b.x_max && b.y_min < b.y_max))
            throw ValidationError(line_of(i), "degenerate rectangle");
        if (b.x_min < bounds.x_min || b.y_min < bounds.y_min || b.x_max > bounds.x_max ||
            b.y_max > bounds.y_max)
            throw ValidationError(line_of(i), "building out of bounds");
    }
    std::vector<std::size_t> order(buildings.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return buildings[a].x_min < buildings[b].x_min;
    });
    for (std::size_t a = 0; a < order.size(); ++a) {
        const Rect& ra = buildings[order[a]];
        for (std::size_t b = a + 1; b < order.size(); ++b) {
            const Rect& rb = buildings[order[b]];
            if (rb.x_min >= ra.x_max) break;
            if (interiors_overlap(ra, rb)) {
                const auto later = std::max(order[a], order[b]);
                const auto earlier = std::min(order[a], order[b]);
                throw ValidationError(line_of(later), "overlap with building on line " +
                                                          std::to_string(line_of(earlier)));
            }
        }
    }
}

}  // namespace

ObstacleMap::ObstacleMap(Rect bounds, std::vector<Rect> buildings)
    : bounds_(bounds), buildings_(std::move(buildings)) {
    validate(bounds_, buildings_, {});
    by_x_min_.resize(buildings_.size());
    for (std::size_t i = 0; i < by_x_min_.size(); ++i) {
        by_x_min_[i] = i;
        max_width_ = std::max(max_width_, buildings_[i].width());
    }
    std::sort(by_x_min_.begin(), by_x_min_.end(), [&](std::size_t a, std::size_t b) {
        return buildings_[a].x_min < buildings_[b].x_min;
    });
}

ObstacleMap load_map(std::string_view text) {
    std::optional<Rect> bounds;
    std::vector<Rect> buildings;
    std::vector<std::size_t> lines;
    const auto all = detail::lines_of(text);
    for (std::size_t i = 0; i < all.size(); ++i) {
        const std::size_t line_no = i + 1;
        const auto body = detail::trim(detail::strip_comment(all[i]));
        if (body.empty()) continue;
        auto fields = detail::split_ws(body);
        const bool is_bounds = fields.front() == "bounds";
        if (is_bounds) fields.erase(fields.begin());
        if (fields.size() != 4)
            throw ParseError(line_no, "expected 4 numbers, got " + std::to_string(fields.size()));
        double v[4];
        for (int k = 0; k < 4; ++k) {
            const auto parsed = detail::parse_double(fields[k]);
            if (!parsed) throw ParseError(line_no, "not a number: '" + std::string(fields[k]) + "'");
            v[k] = *parsed;
        }
        const Rect r{v[0], v[1], v[2], v[3]};
        if (is_bounds) {
            if (bounds) throw ParseError(line_no, "duplicate bounds line");
            if (!buildings.empty()) throw ParseError(line_no, "bounds must precede buildings");
            bounds = r;
        } else {
            if (!bounds) throw ParseError(line_no, "missing 'bounds' line before buildings");
            buildings.push_back(r);
            lines.push_back(line_no);
        }
    }
    if (!bounds) throw ParseError(all.size() + 1, "missing 'bounds' line");
    validate(*bounds, buildings, lines);
    return ObstacleMap(*bounds, std::move(buildings));
}

std::string write_map(const ObstacleMap& map) {
    using detail::format_double;
    std::ostringstream os;
    const Rect& b = map.bounds();
    os << "bounds " << format_double(b.x_min) << ' ' << format_double(b.y_min) << ' '
       << format_double(b.x_max) << ' ' << format_double(b.y_max) << '\n';
    for (const Rect& r : map.buildings())
        os << format_double(r.x_min) << ' ' << format_double(r.y_min) << ' '
           << format_double(r.x_max) << ' ' << format_double(r.y_max) << '\n';
    return os.str();
}

Obstruction segment_rect_obstruction(const Rect& rect, Point p1, Point p2) {
    const double dx = p2.x - p1.x;
    const double dy = p2.y - p1.y;
    double t0 = 0.0;
    double t1 = 1.0;
    // Liang-Barsky against the closed rectangle.
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {p1.x - rect.x_min, rect.x_max - p1.x, p1.y - rect.y_min,
                         rect.y_max - p1.y};
    for (int k = 0; k < 4; ++k) {
        if (p[k] == 0.0) {
            if (q[k] < 0.0) return {};
            continue;
        }
        const double t = q[k] / p[k];
        if (p[k] < 0.0)
            t0 = std::max(t0, t);
        else
            t1 = std::min(t1, t);
        if (t0 > t1) return {};
    }
    if (!(t1 > t0)) return {};
    const double tm = 0.5 * (t0 + t1);
    if (!rect.interior_contains({p1.x + tm * dx, p1.y + tm * dy})) return {};  // along a wall

    Obstruction o;
    o.l_obs = (t1 - t0) * std::hypot(dx, dy);
    o.n = ((t0 > 0.0 || !rect.interior_contains(p1)) ? 1 : 0) +
          ((t1 < 1.0 || !rect.interior_contains(p2)) ? 1 : 0);
    return o;
}

Obstruction los_obstruction(const ObstacleMap& map, Point p1, Point p2) {
    Obstruction total;
    const double y_lo = std::min(p1.y, p2.y);
    const double y_hi = std::max(p1.y, p2.y);
    map.for_each_candidate(std::min(p1.x, p2.x), std::max(p1.x, p2.x), [&](const Rect& b) {
        if (b.y_max < y_lo || b.y_min > y_hi) return;
        const Obstruction o = segment_rect_obstruction(b, p1, p2);
        total.n += o.n;
        total.l_obs += o.l_obs;
    });
    return total;
}

RegionAreas region_areas(double r, double d) {
    if (!(r > 0.0)) throw DomainError("region_areas: radius must be positive");
    if (!(d >= 0.0) || d > r) throw DomainError("region_areas: need 0 <= d <= r");
    RegionAreas a;
    a.t_base = std::numbers::pi * r * r;
    a.r2 = std::numbers::pi * d * d;
    a.r1 = a.t_base - a.r2;
    return a;
}

ObstacleMap manhattan_grid(const GridSpec& g) {
    if (g.blocks_x < 1 || g.blocks_y < 1) throw DomainError("grid needs at least one block per axis");
    if (!(g.street >= 0.0) || !(g.inset >= 0.0))
        throw DomainError("street width and inset must be non-negative");
    if (!(g.block_x > 2.0 * g.inset) || !(g.block_y > 2.0 * g.inset))
        throw DomainError("block size must exceed twice the inset");
    const double pitch_x = g.block_x + g.street;
    const double pitch_y = g.block_y + g.street;
    const Rect bounds{0.0, 0.0, g.street + g.blocks_x * pitch_x, g.street + g.blocks_y * pitch_y};
    std::vector<Rect> buildings;
    buildings.reserve(static_cast<std::size_t>(g.blocks_x) * g.blocks_y);
    for (int j = 0; j < g.blocks_y; ++j) {
        for (int i = 0; i < g.blocks_x; ++i) {
            const double x0 = g.street + i * pitch_x;
            const double y0 = g.street + j * pitch_y;
            buildings.push_back(
                {x0 + g.inset, y0 + g.inset, x0 + g.block_x - g.inset, y0 + g.block_y - g.inset});
        }
    }
    return ObstacleMap(bounds, std::move(buildings));
}

}  // namespace vehfog
