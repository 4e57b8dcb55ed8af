#pragma once

#include "pnpvem/geometry.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pnpvem {

/// Unique undirected edge. `left` is the element that traverses it from v0 to v1
/// (counterclockwise), `right` the one traversing v1 to v0, or -1.
struct Edge
{
    int v0 = -1;
    int v1 = -1;
    int left = -1;
    int right = -1;

    bool on_boundary() const { return left < 0 || right < 0; }
};

struct BoundaryEdgeRef
{
    int element = -1;
    int local_edge = -1;
};

/// Polygonal decomposition of the unit square. Immutable after construction.
///
/// Element vertex cycles are stored flat; local edge j of an element runs from its
/// vertex j to vertex (j+1) mod n. Construction does not reject malformed input:
/// structural problems are reported by validate().
class PolygonalMesh
{
public:
    PolygonalMesh() = default;
    PolygonalMesh(std::vector<Point> vertices, const std::vector<std::vector<int>>& elements);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_elements() const { return static_cast<int>(offsets_.size()) - 1; }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    const std::vector<Point>& vertices() const { return vertices_; }
    Point vertex(int v) const { return vertices_[v]; }

    std::span<const int> element(int e) const
    {
        return {element_vertices_.data() + offsets_[e],
                static_cast<std::size_t>(offsets_[e + 1] - offsets_[e])};
    }
    int element_size(int e) const { return offsets_[e + 1] - offsets_[e]; }
    std::vector<Point> element_points(int e) const;

    /// Global edge index of local edge j of element e.
    int element_edge(int e, int j) const { return element_edges_[offsets_[e] + j]; }
    /// True when element e runs along its local edge j in the edge's stored direction.
    bool element_edge_forward(int e, int j) const;

    const Edge& edge(int i) const { return edges_[i]; }
    const std::vector<Edge>& edges() const { return edges_; }

    bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }
    const std::vector<BoundaryEdgeRef>& boundary_edges() const { return boundary_edges_; }

    /// Edges referenced by more than two element sides or twice with the same
    /// orientation; filled during construction and surfaced through validate().
    const std::vector<std::string>& topology_defects() const { return topology_defects_; }

    friend bool operator==(const PolygonalMesh& a, const PolygonalMesh& b)
    {
        return a.vertices_ == b.vertices_ && a.offsets_ == b.offsets_
            && a.element_vertices_ == b.element_vertices_;
    }

private:
    std::vector<Point> vertices_;
    std::vector<int> offsets_{0};
    std::vector<int> element_vertices_;
    std::vector<int> element_edges_;
    std::vector<Edge> edges_;
    std::vector<char> boundary_vertex_;
    std::vector<BoundaryEdgeRef> boundary_edges_;
    std::vector<std::string> topology_defects_;
};

/// Distance below which a point counts as lying on the boundary of the unit square.
inline constexpr double boundary_tolerance = 1e-12;

bool on_unit_square_boundary(Point p);

struct ElementGeometry
{
    double area = 0.0;
    Point centroid;
    double diameter = 0.0;
};

/// Shoelace area, area-weighted centroid and vertex diameter. Throws InvalidElement
/// when the signed area is not positive.
ElementGeometry element_geometry(const PolygonalMesh& mesh, int e);

/// h = (|Omega| / N_E)^(1/2) on the unit square.
double mesh_size(const PolygonalMesh& mesh);
double mesh_size(int num_elements);

struct ElementQuality
{
    bool star_shaped = false;
    bool convex = false;
    double inradius_ratio = 0.0;   // radius of largest ball in the kernel / h_E
    double min_edge_ratio = 0.0;   // smallest vertex-vertex distance / h_E
    Point kernel_point;            // center of that ball
};

struct QualityReport
{
    std::vector<ElementQuality> elements;
    int num_elements = 0;
    double h = 0.0;
    double min_inradius_ratio = 0.0;
    double min_edge_ratio = 0.0;
    double total_area = 0.0;
    std::vector<std::string> defects;
    std::vector<std::string> warnings;

    bool structurally_valid() const { return defects.empty(); }
    bool all_star_shaped() const;
    double mean_inradius_ratio() const;
};

inline constexpr double inradius_warning_ratio = 0.05;
inline constexpr double edge_warning_ratio = 0.02;

/// Structural checks plus per-element star-shapedness and regularity ratios.
QualityReport validate(const PolygonalMesh& mesh);

/// Kernel-based quality of one polygon (counterclockwise).
ElementQuality element_quality(std::span<const Point> polygon);

/// Plain-text mesh format, lossless for doubles.
void write_mesh(std::ostream& os, const PolygonalMesh& mesh);
PolygonalMesh read_mesh(std::istream& is);
void write_mesh_file(const std::string& path, const PolygonalMesh& mesh);
PolygonalMesh read_mesh_file(const std::string& path);

} // namespace pnpvem
