#include "limerefine/mask_ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>

#include "limerefine/error.hpp"

namespace limerefine {

namespace {

constexpr double kOnEdgeEps = 1e-9;

bool on_segment(const Point2d& a, const Point2d& b, double px, double py) {
    const double cross = (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (std::abs(cross) > kOnEdgeEps * std::max(1.0, len)) return false;
    return px >= std::min(a.x, b.x) - kOnEdgeEps && px <= std::max(a.x, b.x) + kOnEdgeEps &&
           py >= std::min(a.y, b.y) - kOnEdgeEps && py <= std::max(a.y, b.y) + kOnEdgeEps;
}

bool inside_even_odd(const std::vector<Point2d>& v, double px, double py) {
    bool inside = false;
    const std::size_t n = v.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2d& a = v[i];
        const Point2d& b = v[j];
        if (on_segment(a, b, px, py)) return true;
        if ((a.y > py) != (b.y > py)) {
            const double x_cross = a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y);
            if (px < x_cross) inside = !inside;
        }
    }
    return inside;
}

constexpr std::array<std::array<int, 2>, 4> kNeighbors4{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
constexpr std::array<std::array<int, 2>, 8> kNeighbors8{
    {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

}  // namespace

BinaryMask rasterize_polygon(const Polygon& poly, int width, int height) {
    std::vector<Point2d> distinct;
    for (const auto& p : poly.vertices) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw Error(ErrorCode::DegeneratePolygon, "non-finite vertex");
        }
        if (std::find(distinct.begin(), distinct.end(), p) == distinct.end()) distinct.push_back(p);
    }
    if (distinct.size() < 3) {
        throw Error(ErrorCode::DegeneratePolygon, "polygon needs at least three distinct vertices");
    }

    double min_x = poly.vertices[0].x, max_x = min_x;
    double min_y = poly.vertices[0].y, max_y = min_y;
    for (const auto& p : poly.vertices) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }

    BinaryMask mask(width, height);
    const int x0 = std::clamp(static_cast<int>(std::floor(min_x - 0.5)), 0, width);
    const int x1 = std::clamp(static_cast<int>(std::ceil(max_x)), 0, width);
    const int y0 = std::clamp(static_cast<int>(std::floor(min_y - 0.5)), 0, height);
    const int y1 = std::clamp(static_cast<int>(std::ceil(max_y)), 0, height);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            if (inside_even_odd(poly.vertices, x + 0.5, y + 0.5)) mask.set(x, y);
        }
    }
    return mask;
}

std::vector<BinaryMask> connected_components(const BinaryMask& mask, Connectivity conn) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<int> label(mask.size(), -1);
    std::vector<std::vector<std::size_t>> members;

    std::deque<std::size_t> queue;
    for (std::size_t start = 0; start < mask.size(); ++start) {
        if (!mask[start] || label[start] >= 0) continue;
        const int id = static_cast<int>(members.size());
        members.emplace_back();
        label[start] = id;
        queue.push_back(start);
        while (!queue.empty()) {
            const std::size_t p = queue.front();
            queue.pop_front();
            members[id].push_back(p);
            const int px = static_cast<int>(p % w);
            const int py = static_cast<int>(p / w);
            const std::size_t count = conn == Connectivity::Four ? 4 : 8;
            for (std::size_t k = 0; k < count; ++k) {
                const int nx = px + kNeighbors8[k][0];
                const int ny = py + kNeighbors8[k][1];
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
                if (mask[q] && label[q] < 0) {
                    label[q] = id;
                    queue.push_back(q);
                }
            }
        }
    }

    // Discovery order is raster order of each component's first pixel, so a
    // stable sort by area gives the required tie-break.
    std::vector<std::size_t> order(members.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return members[a].size() > members[b].size();
    });

    std::vector<BinaryMask> out;
    out.reserve(order.size());
    for (std::size_t idx : order) {
        BinaryMask comp(w, h);
        for (std::size_t p : members[idx]) comp.set(p);
        out.push_back(std::move(comp));
    }
    return out;
}

BinaryMask fill_holes(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<std::uint8_t> outside(mask.size(), 0);
    std::deque<std::size_t> queue;
    auto seed = [&](int x, int y) {
        const std::size_t p = static_cast<std::size_t>(y) * w + x;
        if (!mask[p] && !outside[p]) {
            outside[p] = 1;
            queue.push_back(p);
        }
    };
    for (int x = 0; x < w; ++x) {
        seed(x, 0);
        seed(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        seed(0, y);
        seed(w - 1, y);
    }
    while (!queue.empty()) {
        const std::size_t p = queue.front();
        queue.pop_front();
        const int px = static_cast<int>(p % w);
        const int py = static_cast<int>(p / w);
        for (const auto& d : kNeighbors4) {
            const int nx = px + d[0];
            const int ny = py + d[1];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            seed(nx, ny);
        }
    }
    for (auto& b : outside) b ^= 1;
    return BinaryMask(w, h, std::move(outside));
}

BinaryMask inner_boundary(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) continue;
            for (const auto& d : kNeighbors4) {
                const int nx = x + d[0];
                const int ny = y + d[1];
                if (nx < 0 || ny < 0 || nx >= w || ny >= h || !mask.at(nx, ny)) {
                    out.set(x, y);
                    break;
                }
            }
        }
    }
    return out;
}

}  // namespace limerefine
