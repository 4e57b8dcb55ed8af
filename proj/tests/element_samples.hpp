#pragma once

#include "pnpvem/mesh.hpp"
#include "pnpvem/mesh_generators.hpp"

#include <random>
#include <vector>

namespace samples {

/// Elements drawn from all six mesh families with varying refinement and seeds,
/// each passing validate() (star-shaped, positive area).
inline std::vector<std::vector<pnpvem::Point>> random_elements(int count, std::uint64_t seed)
{
    using namespace pnpvem;
    std::mt19937_64 rng(seed);
    std::vector<std::vector<Point>> out;
    int family = 0;
    while (static_cast<int>(out.size()) < count) {
        PolygonalMesh mesh;
        const int n = 1 + static_cast<int>(rng() % 6);
        switch (family++ % 6) {
        case 0: mesh = generate_structured(StructuredKind::triangle, n); break;
        case 1: mesh = generate_structured(StructuredKind::square, n); break;
        case 2: mesh = generate_structured(StructuredKind::nonconvex, n); break;
        case 3: mesh = generate_structured(StructuredKind::mixed, n + 1); break;
        case 4: mesh = generate_voronoi(5 + static_cast<int>(rng() % 60), 0, rng()); break;
        case 5: mesh = generate_voronoi(5 + static_cast<int>(rng() % 60), 10, rng()); break;
        }
        const auto report = validate(mesh);
        const int e = static_cast<int>(rng() % mesh.num_elements());
        if (report.elements[e].star_shaped)
            out.push_back(mesh.element_points(e));
    }
    return out;
}

} // namespace samples
