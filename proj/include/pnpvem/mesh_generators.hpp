#pragma once

#include "pnpvem/mesh.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pnpvem {

enum class StructuredKind { triangle, square, nonconvex, mixed };

std::optional<StructuredKind> parse_structured_kind(std::string_view name);
std::string_view to_string(StructuredKind kind);

/// n x n cell decompositions of the unit square.
///  - triangle:  each cell cut along its (0,0)-(1,1) diagonal
///  - square:    the cells themselves
///  - nonconvex: each cell cut by a three-segment zig-zag through its midline into
///               two congruent non-convex hexagons
///  - mixed:     2x2 macro-tiles of two quadrilaterals, a pentagon and a triangle;
///               a leftover strip (odd n) is filled with squares
PolygonalMesh generate_structured(StructuredKind kind, int n);

struct VoronoiStats
{
    int reseeded = 0;   // seeds moved because they coincided with an earlier one
};

/// Voronoi diagram of n_seeds uniform random points clipped to the unit square,
/// after lloyd_iters centroidal relaxation sweeps. Bit-identical for equal inputs.
PolygonalMesh generate_voronoi(int n_seeds, int lloyd_iters, std::uint64_t rng_seed,
                               VoronoiStats* stats = nullptr);

/// Cells of the Voronoi diagram of `seeds` clipped to the unit square, one per seed.
std::vector<std::vector<Point>> clipped_voronoi_cells(const std::vector<Point>& seeds);

/// Merge per-cell polygons that share vertices up to rounding into a conforming mesh.
PolygonalMesh mesh_from_cells(const std::vector<std::vector<Point>>& cells);

} // namespace pnpvem
