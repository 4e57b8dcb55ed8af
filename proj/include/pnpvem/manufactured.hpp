#pragma once

#include "pnpvem/dof_map.hpp"
#include "pnpvem/geometry.hpp"
#include "pnpvem/mesh.hpp"
#include "pnpvem/vem_local.hpp"

#include <array>
#include <functional>
#include <vector>

namespace pnpvem {

enum class Field { phi = 0, p1 = 1, p2 = 2 };

/// One term a(t) * s(x, y) of a space-time source.
struct SeparableTerm
{
    std::function<double(double)> time;
    std::function<double(double, double)> space;
};

/// Source given as a sum of separable terms; evaluate() is the pointwise sum.
struct SeparableSource
{
    std::vector<SeparableTerm> terms;

    double operator()(double t, double x, double y) const;
};

/// Manufactured solution on the unit square
///   phi = (1 - e^-t) sin(pi x) sin(pi y)
///   p1  = sin(t)     sin(2 pi x) sin(2 pi y)
///   p2  = sin(2t)    sin(3 pi x) sin(3 pi y)
/// with charges q1, q2 and the sources that make it solve
///   -lap phi - q1 p1 - q2 p2 = f,
///   dp_i/dt - div(grad p_i + q_i p_i grad phi) = F_i.
class ManufacturedCase
{
public:
    explicit ManufacturedCase(double q1 = 1.0, double q2 = -1.0) : q_{q1, q2} {}

    double charge(int species) const { return q_[species - 1]; }

    double value(Field f, double t, double x, double y) const;
    Point gradient(Field f, double t, double x, double y) const;
    double laplacian(Field f, double t, double x, double y) const;
    double time_derivative(Field f, double t, double x, double y) const;

    std::array<double, 3> exact(double t, double x, double y) const;

    /// f = -lap phi - q1 p1 - q2 p2.
    double source_f(double t, double x, double y) const;
    /// F_i = dp_i/dt - lap p_i - q_i (grad p_i . grad phi + p_i lap phi), i in {1, 2}.
    double source_F(int species, double t, double x, double y) const;

    /// The same sources as sums of separable terms.
    SeparableSource separable_f() const;
    SeparableSource separable_F(int species) const;

private:
    std::array<double, 2> q_;
};

/// Global dof vector of a smooth field: vertex values and the edge and internal
/// moments (edge moments in each edge's stored direction).
std::vector<double> dof_interpolate(const PolygonalMesh& mesh, const DofMap& map,
                                    const std::vector<LocalSpace>& spaces,
                                    const std::function<double(Point)>& field);

} // namespace pnpvem
