#include "pnpvem/geometry.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace pnpvem {

double signed_area(std::span<const Point> polygon)
{
    const std::size_t n = polygon.size();
    double twice = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        twice += cross(polygon[i], polygon[(i + 1) % n]);
    return 0.5 * twice;
}

Point polygon_centroid(std::span<const Point> polygon)
{
    // Shift to the first vertex to limit cancellation on small elements.
    const std::size_t n = polygon.size();
    const Point origin = polygon[0];
    double twice_area = 0.0;
    Point acc{};
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = polygon[i] - origin;
        const Point b = polygon[(i + 1) % n] - origin;
        const double c = cross(a, b);
        twice_area += c;
        acc.x += (a.x + b.x) * c;
        acc.y += (a.y + b.y) * c;
    }
    return origin + (1.0 / (3.0 * twice_area)) * acc;
}

double polygon_diameter(std::span<const Point> polygon)
{
    double d = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i)
        for (std::size_t j = i + 1; j < polygon.size(); ++j)
            d = std::max(d, distance(polygon[i], polygon[j]));
    return d;
}

std::vector<Point> clip_polygon(std::span<const Point> polygon, const HalfPlane& plane)
{
    std::vector<Point> out;
    const std::size_t n = polygon.size();
    if (n == 0)
        return out;
    out.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = polygon[i];
        const Point b = polygon[(i + 1) % n];
        const double fa = plane.violation(a);
        const double fb = plane.violation(b);
        if (fa <= 0.0)
            out.push_back(a);
        if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
            const double s = fa / (fa - fb);
            out.push_back(a + s * (b - a));
        }
    }
    return out;
}

std::vector<HalfPlane> edge_half_planes(std::span<const Point> polygon)
{
    std::vector<HalfPlane> planes;
    const std::size_t n = polygon.size();
    planes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = polygon[i];
        const Point b = polygon[(i + 1) % n];
        const Point t = b - a;
        const double len = norm(t);
        // Outward normal of a counterclockwise edge is (t.y, -t.x).
        const Point nrm{t.y / len, -t.x / len};
        planes.push_back({nrm, dot(nrm, a)});
    }
    return planes;
}

std::vector<Point> polygon_kernel(std::span<const Point> polygon)
{
    double xmin = std::numeric_limits<double>::max(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const Point& p : polygon) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    std::vector<Point> kernel{{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}};
    for (const HalfPlane& plane : edge_half_planes(polygon)) {
        kernel = clip_polygon(kernel, plane);
        if (kernel.size() < 3)
            return {};
    }
    if (signed_area(kernel) <= 0.0)
        return {};
    return kernel;
}

Ball chebyshev_ball(std::span<const HalfPlane> planes)
{
    // The optimum of max r s.t. n_i.x + r|n_i| <= c_i sits on a vertex of the
    // (x, y, r) feasible set, i.e. where three constraints are active.
    Ball best{{0.0, 0.0}, -1.0};
    const std::size_t m = planes.size();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            for (std::size_t l = j + 1; l < m; ++l) {
                const std::array<const HalfPlane*, 3> act{&planes[i], &planes[j], &planes[l]};
                double a[3][4];
                for (int r = 0; r < 3; ++r) {
                    a[r][0] = act[r]->normal.x;
                    a[r][1] = act[r]->normal.y;
                    a[r][2] = norm(act[r]->normal);
                    a[r][3] = act[r]->offset;
                }
                const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                                 - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                                 + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
                if (std::abs(det) < 1e-14)
                    continue;
                auto solve_col = [&](int col) {
                    double b[3][3];
                    for (int r = 0; r < 3; ++r)
                        for (int c = 0; c < 3; ++c)
                            b[r][c] = (c == col) ? a[r][3] : a[r][c];
                    return (b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
                          - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
                          + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0])) / det;
                };
                const Point c{solve_col(0), solve_col(1)};
                const double r = solve_col(2);
                if (r <= best.radius)
                    continue;
                bool feasible = true;
                for (const HalfPlane& p : planes) {
                    const double slack = p.offset - dot(p.normal, c) - r * norm(p.normal);
                    if (slack < -1e-12 * (1.0 + std::abs(p.offset))) {
                        feasible = false;
                        break;
                    }
                }
                if (feasible)
                    best = {c, r};
            }
    return best;
}

namespace {

int orientation(Point a, Point b, Point c)
{
    const double v = cross(b - a, c - a);
    const double scale = std::max({norm(b - a), norm(c - a), 1e-300});
    if (std::abs(v) <= 1e-14 * scale * scale)
        return 0;
    return v > 0 ? 1 : -1;
}

bool on_segment(Point a, Point b, Point p)
{
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y
        && p.y <= std::max(a.y, b.y);
}

bool segments_touch(Point a, Point b, Point c, Point d)
{
    const int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
    const int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
    if (o1 * o2 < 0 && o3 * o4 < 0)
        return true;
    if (o1 == 0 && on_segment(a, b, c))
        return true;
    if (o2 == 0 && on_segment(a, b, d))
        return true;
    if (o3 == 0 && on_segment(c, d, a))
        return true;
    if (o4 == 0 && on_segment(c, d, b))
        return true;
    return false;
}

} // namespace

bool is_simple_polygon(std::span<const Point> polygon)
{
    const std::size_t n = polygon.size();
    if (n < 3)
        return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = polygon[i], b = polygon[(i + 1) % n];
        if (a == b)
            return false;
        // Adjacent edge folding back onto this one.
        const Point c = polygon[(i + 2) % n];
        if (orientation(a, b, c) == 0 && dot(b - a, c - b) < 0.0)
            return false;
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1)
                continue;
            if (segments_touch(a, b, polygon[j], polygon[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

bool is_convex_polygon(std::span<const Point> polygon, double tol)
{
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = polygon[i], b = polygon[(i + 1) % n], c = polygon[(i + 2) % n];
        if (cross(b - a, c - b) < -tol * norm(b - a) * norm(c - b))
            return false;
    }
    return true;
}

bool sees_whole_boundary(std::span<const Point> polygon, Point p, double tol)
{
    for (const HalfPlane& plane : edge_half_planes(polygon))
        if (plane.violation(p) >= -tol)
            return false;
    return true;
}

} // namespace pnpvem
