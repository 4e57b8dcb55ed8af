#include "pnpvem/mesh.hpp"

#include "pnpvem/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace pnpvem {

PolygonalMesh::PolygonalMesh(std::vector<Point> vertices,
                             const std::vector<std::vector<int>>& elements)
    : vertices_(std::move(vertices))
{
    const int nv = num_vertices();
    for (std::size_t e = 0; e < elements.size(); ++e) {
        if (elements[e].size() < 3)
            throw MeshFormatError("element " + std::to_string(e) + " has fewer than 3 vertices");
        for (int v : elements[e]) {
            if (v < 0 || v >= nv)
                throw MeshFormatError("element " + std::to_string(e) + " references vertex "
                                      + std::to_string(v));
            element_vertices_.push_back(v);
        }
        offsets_.push_back(static_cast<int>(element_vertices_.size()));
    }

    boundary_vertex_.resize(vertices_.size());
    for (int v = 0; v < nv; ++v)
        boundary_vertex_[v] = on_unit_square_boundary(vertices_[v]) ? 1 : 0;

    std::unordered_map<std::uint64_t, int> lookup;
    lookup.reserve(element_vertices_.size());
    element_edges_.resize(element_vertices_.size());
    std::vector<int> left_local;
    for (int e = 0; e < num_elements(); ++e) {
        const auto cyc = element(e);
        const int n = static_cast<int>(cyc.size());
        for (int j = 0; j < n; ++j) {
            const int a = cyc[j], b = cyc[(j + 1) % n];
            const auto key = (static_cast<std::uint64_t>(std::min(a, b)) << 32)
                           | static_cast<std::uint32_t>(std::max(a, b));
            auto [it, inserted] = lookup.try_emplace(key, num_edges());
            if (inserted) {
                edges_.push_back({a, b, e, -1});
                left_local.push_back(j);
            } else {
                Edge& ed = edges_[it->second];
                if (ed.v0 == a || ed.right >= 0)
                    topology_defects_.push_back("edge (" + std::to_string(a) + ","
                                                + std::to_string(b) + ") used by element "
                                                + std::to_string(e)
                                                + " with inconsistent orientation or multiplicity");
                else
                    ed.right = e;
            }
            element_edges_[offsets_[e] + j] = it->second;
        }
    }
    for (int i = 0; i < num_edges(); ++i)
        if (edges_[i].right < 0)
            boundary_edges_.push_back({edges_[i].left, left_local[i]});
}

std::vector<Point> PolygonalMesh::element_points(int e) const
{
    std::vector<Point> pts;
    pts.reserve(element_size(e));
    for (int v : element(e))
        pts.push_back(vertices_[v]);
    return pts;
}

bool PolygonalMesh::element_edge_forward(int e, int j) const
{
    return edges_[element_edge(e, j)].v0 == element(e)[j];
}

bool on_unit_square_boundary(Point p)
{
    return std::min({std::abs(p.x), std::abs(1.0 - p.x), std::abs(p.y), std::abs(1.0 - p.y)})
         < boundary_tolerance;
}

ElementGeometry element_geometry(const PolygonalMesh& mesh, int e)
{
    const auto pts = mesh.element_points(e);
    const double area = signed_area(pts);
    if (!(area > 0.0))
        throw InvalidElement(e, "nonpositive signed area " + std::to_string(area));
    return {area, polygon_centroid(pts), polygon_diameter(pts)};
}

double mesh_size(int num_elements) { return std::sqrt(1.0 / num_elements); }

double mesh_size(const PolygonalMesh& mesh) { return mesh_size(mesh.num_elements()); }

bool QualityReport::all_star_shaped() const
{
    return std::all_of(elements.begin(), elements.end(),
                       [](const ElementQuality& q) { return q.star_shaped; });
}

double QualityReport::mean_inradius_ratio() const
{
    if (elements.empty())
        return 0.0;
    double s = 0.0;
    for (const auto& q : elements)
        s += q.inradius_ratio;
    return s / static_cast<double>(elements.size());
}

ElementQuality element_quality(std::span<const Point> polygon)
{
    ElementQuality q;
    const double diam = polygon_diameter(polygon);
    q.convex = is_convex_polygon(polygon);
    const auto kernel = polygon_kernel(polygon);
    if (!kernel.empty()) {
        const auto planes = edge_half_planes(polygon);
        const Ball ball = chebyshev_ball(planes);
        if (ball.radius > 0.0) {
            q.star_shaped = true;
            q.inradius_ratio = ball.radius / diam;
            q.kernel_point = ball.center;
        }
    }
    double min_dist = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < polygon.size(); ++i)
        for (std::size_t j = i + 1; j < polygon.size(); ++j)
            min_dist = std::min(min_dist, distance(polygon[i], polygon[j]));
    q.min_edge_ratio = min_dist / diam;
    return q;
}

QualityReport validate(const PolygonalMesh& mesh)
{
    QualityReport rep;
    rep.num_elements = mesh.num_elements();
    rep.h = mesh.num_elements() > 0 ? mesh_size(mesh) : 0.0;
    rep.defects = mesh.topology_defects();
    rep.elements.resize(mesh.num_elements());
    rep.min_inradius_ratio = std::numeric_limits<double>::max();
    rep.min_edge_ratio = std::numeric_limits<double>::max();

    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto pts = mesh.element_points(e);
        const double area = signed_area(pts);
        rep.total_area += area;
        const std::string tag = "element " + std::to_string(e) + ": ";
        if (!(area > 0.0)) {
            rep.defects.push_back(tag + "nonpositive signed area (clockwise or degenerate)");
            rep.min_inradius_ratio = 0.0;
            continue;
        }
        if (!is_simple_polygon(pts)) {
            rep.defects.push_back(tag + "self-intersecting vertex cycle");
            rep.min_inradius_ratio = 0.0;
            continue;
        }
        ElementQuality& q = rep.elements[e];
        q = element_quality(pts);
        if (!q.star_shaped)
            rep.defects.push_back(tag + "not star-shaped (empty kernel)");
        rep.min_inradius_ratio = std::min(rep.min_inradius_ratio, q.inradius_ratio);
        rep.min_edge_ratio = std::min(rep.min_edge_ratio, q.min_edge_ratio);
        if (q.inradius_ratio < inradius_warning_ratio)
            rep.warnings.push_back(tag + "inradius ratio " + std::to_string(q.inradius_ratio));
        if (q.min_edge_ratio < edge_warning_ratio)
            rep.warnings.push_back(tag + "min edge ratio " + std::to_string(q.min_edge_ratio));
    }

    for (const Edge& ed : mesh.edges()) {
        if (!ed.on_boundary())
            continue;
        const Point a = mesh.vertex(ed.v0), b = mesh.vertex(ed.v1);
        if (!on_unit_square_boundary(a) || !on_unit_square_boundary(b)
            || !on_unit_square_boundary(0.5 * (a + b)))
            rep.defects.push_back("dangling edge (" + std::to_string(ed.v0) + ","
                                  + std::to_string(ed.v1) + ") inside the domain");
    }
    if (std::abs(rep.total_area - 1.0) > 1e-12)
        rep.defects.push_back("element areas sum to " + std::to_string(rep.total_area)
                              + " (overlap or gap)");
    if (mesh.num_elements() == 0) {
        rep.min_inradius_ratio = 0.0;
        rep.min_edge_ratio = 0.0;
    }
    return rep;
}

namespace {

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& tok)
{
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw MeshFormatError("bad coordinate '" + tok + "'");
    return v;
}

} // namespace

void write_mesh(std::ostream& os, const PolygonalMesh& mesh)
{
    os << "polymesh v1 " << mesh.num_vertices() << ' ' << mesh.num_elements() << '\n';
    for (const Point& p : mesh.vertices())
        os << format_double(p.x) << ' ' << format_double(p.y) << '\n';
    for (int e = 0; e < mesh.num_elements(); ++e) {
        os << mesh.element_size(e);
        for (int v : mesh.element(e))
            os << ' ' << v;
        os << '\n';
    }
}

PolygonalMesh read_mesh(std::istream& is)
{
    std::string magic, version;
    long nv = -1, ne = -1;
    if (!(is >> magic >> version >> nv >> ne) || magic != "polymesh" || version != "v1" || nv < 0
        || ne < 0)
        throw MeshFormatError("missing 'polymesh v1 <n_vertices> <n_elements>' header");
    std::vector<Point> verts(static_cast<std::size_t>(nv));
    for (auto& p : verts) {
        std::string xs, ys;
        if (!(is >> xs >> ys))
            throw MeshFormatError("truncated vertex list");
        p = {parse_double(xs), parse_double(ys)};
    }
    std::vector<std::vector<int>> elems(static_cast<std::size_t>(ne));
    for (auto& el : elems) {
        int count = 0;
        if (!(is >> count) || count < 3)
            throw MeshFormatError("bad element vertex count");
        el.resize(count);
        for (int& v : el)
            if (!(is >> v))
                throw MeshFormatError("truncated element list");
    }
    return PolygonalMesh(std::move(verts), elems);
}

void write_mesh_file(const std::string& path, const PolygonalMesh& mesh)
{
    std::ofstream os(path);
    if (!os)
        throw MeshFormatError("cannot open " + path + " for writing");
    write_mesh(os, mesh);
}

PolygonalMesh read_mesh_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw MeshFormatError("cannot open " + path);
    return read_mesh(is);
}

} // namespace pnpvem
