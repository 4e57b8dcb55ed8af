#include "doctest.h"

#include "fd_oracle.hpp"

#include "pnpvem/errors.hpp"
#include "pnpvem/manufactured.hpp"
#include "pnpvem/mesh_generators.hpp"
#include "pnpvem/pnp_solver.hpp"
#include "pnpvem/study.hpp"

#include <numbers>
#include <random>

using namespace pnpvem;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("exact fields")
{
    const ManufacturedCase mc;
    for (double x : {0.1, 0.37, 0.9})
        for (double y : {0.2, 0.5, 0.77}) {
            const auto v = mc.exact(0.0, x, y);
            CHECK(v[0] == 0.0);
            CHECK(v[1] == 0.0);
            CHECK(v[2] == 0.0);
        }
    const auto v = mc.exact(1.0, 0.5, 0.5);
    CHECK(v[0] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(std::abs(v[1]) < 1e-15);
    CHECK(v[2] == doctest::Approx(std::sin(2.0)).epsilon(1e-15));
}

TEST_CASE("fields vanish on the boundary")
{
    const ManufacturedCase mc;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double s = u(rng), t = u(rng);
        const Point p = i % 4 == 0 ? Point{0, s} : i % 4 == 1 ? Point{1, s} : i % 4 == 2 ? Point{s, 0} : Point{s, 1};
        for (double x : mc.exact(t, p.x, p.y))
            worst = std::max(worst, std::abs(x));
    }
    CHECK(worst < 1e-14);
}

TEST_CASE("sources at known points")
{
    const ManufacturedCase mc;
    CHECK(mc.source_f(0.0, 0.3, 0.6) == 0.0);
    CHECK(mc.source_f(1.0, 0.5, 0.5)
          == doctest::Approx(2.0 * pi * pi * (1.0 - std::exp(-1.0)) + std::sin(2.0)).epsilon(1e-14));
    for (double x : {0.13, 0.5, 0.71})
        for (double y : {0.22, 0.64}) {
            CHECK(mc.source_F(1, 0.0, x, y)
                  == doctest::Approx(std::sin(2 * pi * x) * std::sin(2 * pi * y)).epsilon(1e-14).scale(1.0));
            CHECK(std::isfinite(mc.source_F(2, 0.7, 0.0, y)));
        }
    CHECK_THROWS_AS(mc.source_F(3, 0.0, 0.5, 0.5), Error);
}

TEST_CASE("finite-difference Laplacian of phi matches the analytic one")
{
    const ManufacturedCase mc;
    for (double x : {0.21, 0.5, 0.83})
        for (double y : {0.17, 0.66}) {
            const double t = 0.8;
            const double fd = oracle::d2([&](double s) { return mc.value(Field::phi, t, s, y); }, x, 1e-4)
                            + oracle::d2([&](double s) { return mc.value(Field::phi, t, x, s); }, y, 1e-4);
            const double exact = mc.laplacian(Field::phi, t, x, y);
            CHECK(std::abs(fd - exact) <= 1e-6 * std::abs(exact));
        }
}

TEST_CASE("PDE residual of the derived sources")
{
    for (auto q : {std::array{1.0, -1.0}, std::array{2.0, 0.5}}) {
        const ManufacturedCase mc(q[0], q[1]);
        const auto r = oracle::fd_pde_residual(mc, 20, 20, 5);
        CHECK(r.poisson <= 1e-6);
        CHECK(r.np1 <= 1e-6);
        CHECK(r.np2 <= 1e-6);
    }
}

TEST_CASE("separable sources equal the pointwise ones")
{
    const ManufacturedCase mc(1.0, -1.0);
    const auto f = mc.separable_f();
    const auto F1 = mc.separable_F(1);
    const auto F2 = mc.separable_F(2);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double t = u(rng), x = u(rng), y = u(rng);
        CHECK(f(t, x, y) == doctest::Approx(mc.source_f(t, x, y)).epsilon(1e-13).scale(1.0));
        CHECK(F1(t, x, y) == doctest::Approx(mc.source_F(1, t, x, y)).epsilon(1e-13).scale(1.0));
        CHECK(F2(t, x, y) == doctest::Approx(mc.source_F(2, t, x, y)).epsilon(1e-13).scale(1.0));
    }
}

TEST_CASE("dof interpolation")
{
    const ManufacturedCase mc;
    for (int k = 1; k <= 2; ++k) {
        const auto mesh = generate_structured(StructuredKind::mixed, 4);
        const Discretization disc(mesh, k);
        const auto c = dof_interpolate(mesh, disc.dof_map(), disc.spaces(), [](Point) { return 2.5; });
        for (int v = 0; v < mesh.num_vertices(); ++v)
            CHECK(c[disc.dof_map().vertex_dof(v)] == doctest::Approx(2.5).epsilon(1e-15));
        if (k == 2) {
            // Edge and cell means of a constant are the constant.
            for (int i = 0; i < mesh.num_edges(); ++i)
                CHECK(c[disc.dof_map().edge_dof(i, 0)] == doctest::Approx(2.5).epsilon(1e-13));
            for (int e = 0; e < mesh.num_elements(); ++e)
                CHECK(c[disc.dof_map().internal_dof(e, 0)] == doctest::Approx(2.5).epsilon(1e-13));
        }
        const auto zero = dof_interpolate(mesh, disc.dof_map(), disc.spaces(),
                                          [&](Point p) { return mc.value(Field::p1, 0.0, p.x, p.y); });
        for (double z : zero)
            CHECK(z == 0.0);
    }

    SUBCASE("interpolation error of phi is first order in H1")
    {
        std::array<FieldErrors, 2> e;
        std::array<double, 2> h;
        for (int i = 0; i < 2; ++i) {
            const auto mesh = generate_structured(StructuredKind::square, 8 << i);
            const Discretization disc(mesh, 1);
            const auto dofs = disc.interpolate([&](Point p) { return mc.value(Field::phi, 1.0, p.x, p.y); });
            e[i] = compute_field_errors(
                disc, dofs, [&](Point p) { return mc.value(Field::phi, 1.0, p.x, p.y); },
                [&](Point p) { return mc.gradient(Field::phi, 1.0, p.x, p.y); });
            h[i] = mesh_size(mesh);
        }
        const auto order = observed_order(e[0].h1, e[1].h1, h[0], h[1]);
        REQUIRE(order);
        CHECK(*order >= 0.9);
    }
}
