#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace pnpvem {

struct Point
{
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Point a, Point b) = default;
};

inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

/// Signed area of a closed polygon (positive for counterclockwise order).
double signed_area(std::span<const Point> polygon);

/// Area-weighted centroid of a polygon with nonzero area.
Point polygon_centroid(std::span<const Point> polygon);

/// Largest distance between two vertices.
double polygon_diameter(std::span<const Point> polygon);

/// Half-plane {p : n.p <= c}.
struct HalfPlane
{
    Point normal;
    double offset = 0.0;

    double violation(Point p) const { return dot(normal, p) - offset; }
};

/// Sutherland-Hodgman step: clip a convex polygon against one half-plane.
std::vector<Point> clip_polygon(std::span<const Point> polygon, const HalfPlane& plane);

/// Inner half-planes of the edges of a counterclockwise polygon, normals of unit length.
std::vector<HalfPlane> edge_half_planes(std::span<const Point> polygon);

/// Kernel of a simple counterclockwise polygon: the convex set of points that see
/// the whole boundary. Empty when the polygon is not star-shaped.
std::vector<Point> polygon_kernel(std::span<const Point> polygon);

struct Ball
{
    Point center;
    double radius = 0.0;
};

/// Largest ball contained in the intersection of the given half-planes (Chebyshev
/// center). Radius is negative when the intersection is empty.
Ball chebyshev_ball(std::span<const HalfPlane> planes);

/// True when the closed polygon has no two non-adjacent edges that touch and no
/// adjacent edges that fold back on each other.
bool is_simple_polygon(std::span<const Point> polygon);

bool is_convex_polygon(std::span<const Point> polygon, double tol = 1e-14);

/// Strict interior test against every edge line (point lies in the open kernel).
bool sees_whole_boundary(std::span<const Point> polygon, Point p, double tol = 0.0);

} // namespace pnpvem
