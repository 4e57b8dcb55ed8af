#include "pnpvem/manufactured.hpp"

#include "pnpvem/errors.hpp"

#include <cmath>
#include <numbers>

namespace pnpvem {

namespace {

constexpr double pi = std::numbers::pi;

int mode(Field f) { return static_cast<int>(f) + 1; }

double amplitude(Field f, double t)
{
    switch (f) {
    case Field::phi: return 1.0 - std::exp(-t);
    case Field::p1: return std::sin(t);
    case Field::p2: return std::sin(2.0 * t);
    }
    return 0.0;
}

double amplitude_rate(Field f, double t)
{
    switch (f) {
    case Field::phi: return std::exp(-t);
    case Field::p1: return std::cos(t);
    case Field::p2: return 2.0 * std::cos(2.0 * t);
    }
    return 0.0;
}

double shape(int m, double x, double y) { return std::sin(m * pi * x) * std::sin(m * pi * y); }

Point shape_gradient(int m, double x, double y)
{
    const double w = m * pi;
    return {w * std::cos(w * x) * std::sin(w * y), w * std::sin(w * x) * std::cos(w * y)};
}

Field species_field(int species)
{
    if (species != 1 && species != 2)
        throw Error("species must be 1 or 2");
    return species == 1 ? Field::p1 : Field::p2;
}

} // namespace

double SeparableSource::operator()(double t, double x, double y) const
{
    double s = 0.0;
    for (const auto& term : terms)
        s += term.time(t) * term.space(x, y);
    return s;
}

double ManufacturedCase::value(Field f, double t, double x, double y) const
{
    return amplitude(f, t) * shape(mode(f), x, y);
}

Point ManufacturedCase::gradient(Field f, double t, double x, double y) const
{
    return amplitude(f, t) * shape_gradient(mode(f), x, y);
}

double ManufacturedCase::laplacian(Field f, double t, double x, double y) const
{
    const int m = mode(f);
    return -2.0 * m * m * pi * pi * value(f, t, x, y);
}

double ManufacturedCase::time_derivative(Field f, double t, double x, double y) const
{
    return amplitude_rate(f, t) * shape(mode(f), x, y);
}

std::array<double, 3> ManufacturedCase::exact(double t, double x, double y) const
{
    return {value(Field::phi, t, x, y), value(Field::p1, t, x, y), value(Field::p2, t, x, y)};
}

double ManufacturedCase::source_f(double t, double x, double y) const
{
    return -laplacian(Field::phi, t, x, y) - q_[0] * value(Field::p1, t, x, y)
         - q_[1] * value(Field::p2, t, x, y);
}

double ManufacturedCase::source_F(int species, double t, double x, double y) const
{
    const Field f = species_field(species);
    const Point gp = gradient(f, t, x, y), gphi = gradient(Field::phi, t, x, y);
    return time_derivative(f, t, x, y) - laplacian(f, t, x, y)
         - charge(species) * (dot(gp, gphi) + value(f, t, x, y) * laplacian(Field::phi, t, x, y));
}

SeparableSource ManufacturedCase::separable_f() const
{
    const double q1 = q_[0], q2 = q_[1];
    return {{
        {[](double t) { return amplitude(Field::phi, t); },
         [](double x, double y) { return 2.0 * pi * pi * shape(1, x, y); }},
        {[](double t) { return amplitude(Field::p1, t); },
         [q1](double x, double y) { return -q1 * shape(2, x, y); }},
        {[](double t) { return amplitude(Field::p2, t); },
         [q2](double x, double y) { return -q2 * shape(3, x, y); }},
    }};
}

SeparableSource ManufacturedCase::separable_F(int species) const
{
    const Field f = species_field(species);
    const int m = mode(f);
    const double q = charge(species);
    return {{
        {[f](double t) { return amplitude_rate(f, t); },
         [m](double x, double y) { return shape(m, x, y); }},
        {[f](double t) { return amplitude(f, t); },
         [m](double x, double y) { return 2.0 * m * m * pi * pi * shape(m, x, y); }},
        // Drift: -q a b (grad S_m . grad S_1 + S_m lap S_1).
        {[f](double t) { return amplitude(f, t) * amplitude(Field::phi, t); },
         [m, q](double x, double y) {
             return -q * (dot(shape_gradient(m, x, y), shape_gradient(1, x, y))
                          - 2.0 * pi * pi * shape(m, x, y) * shape(1, x, y));
         }},
    }};
}

std::vector<double> dof_interpolate(const PolygonalMesh& mesh, const DofMap& map,
                                    const std::vector<LocalSpace>& spaces,
                                    const std::function<double(Point)>& field)
{
    std::vector<double> out(map.num_dofs(), 0.0);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const Eigen::VectorXd local = local_interpolate(spaces[e], field);
        const auto dofs = map.element_dofs(e);
        const auto signs = map.element_signs(e);
        for (std::size_t r = 0; r < dofs.size(); ++r)
            out[dofs[r]] = signs[r] * local[r];
    }
    return out;
}

} // namespace pnpvem
