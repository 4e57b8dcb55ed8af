#include "doctest.h"
#include "oracles.hpp"

#include "pnpvem/geometry.hpp"

#include <cmath>

using namespace pnpvem;

TEST_CASE("shoelace area and centroid of simple shapes")
{
    const std::vector<Point> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(signed_area(square) == doctest::Approx(1.0));
    CHECK(polygon_centroid(square).x == doctest::Approx(0.5));
    CHECK(polygon_centroid(square).y == doctest::Approx(0.5));
    CHECK(polygon_diameter(square) == doctest::Approx(std::sqrt(2.0)));

    const std::vector<Point> cw{{0, 0}, {0, 1}, {1, 1}, {1, 0}};
    CHECK(signed_area(cw) == doctest::Approx(-1.0));
}

TEST_CASE("kernel of an L-shaped polygon is the reentrant corner region")
{
    const std::vector<Point> ell{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
    const auto kernel = polygon_kernel(ell);
    REQUIRE(kernel.size() >= 3);
    CHECK(signed_area(kernel) == doctest::Approx(1.0));
    const Ball ball = chebyshev_ball(edge_half_planes(ell));
    CHECK(ball.radius == doctest::Approx(0.5));
    CHECK(oracle::visibility_kernel_check(ell, ball.center));
    CHECK_FALSE(is_convex_polygon(ell));
    CHECK(is_simple_polygon(ell));
}

TEST_CASE("non-star-shaped polygon has an empty kernel")
{
    // Comb with two deep notches: no point sees both notch bottoms and the top corners.
    const std::vector<Point> comb{{0, 0}, {5, 0}, {5, 3}, {4, 3}, {4, 0.5}, {3, 0.5}, {3, 3},
                                  {2, 3}, {2, 0.5}, {1, 0.5}, {1, 3},  {0, 3}};
    CHECK(polygon_kernel(comb).empty());
}

TEST_CASE("self-intersecting bowtie is not simple")
{
    const std::vector<Point> bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    CHECK_FALSE(is_simple_polygon(bowtie));
}

TEST_CASE("clip keeps the inner side of a half-plane")
{
    const std::vector<Point> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const auto half = clip_polygon(square, {{1.0, 0.0}, 0.25});
    CHECK(signed_area(half) == doctest::Approx(0.25));
}
