#pragma once

#include "pnpvem/geometry.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

namespace pnpvem {

/// dim P_k in two variables.
constexpr int poly_dim(int k) { return k < 0 ? 0 : (k + 1) * (k + 2) / 2; }

/// Scaled monomials m_a(x) = ((x - x_E) / h_E)^a for |a| <= k in graded-lex order:
/// 1, x, y, x^2, xy, y^2, x^3, ...
class ScaledMonomialBasis
{
public:
    ScaledMonomialBasis(Point center, double scale, int degree);

    Point center() const { return center_; }
    double scale() const { return scale_; }
    int degree() const { return degree_; }
    int size() const { return static_cast<int>(exponents_.size()); }
    std::array<int, 2> exponent(int a) const { return exponents_[a]; }

    /// Index of the monomial with the given exponents (must have |a| <= degree).
    static int index(int ex, int ey) { return poly_dim(ex + ey - 1) + ey; }

    /// Values of all monomials at p, length size().
    void values(Point p, std::span<double> out) const;
    Eigen::VectorXd values(Point p) const;
    /// Gradients at p: row 0 is d/dx, row 1 is d/dy.
    Eigen::Matrix<double, 2, Eigen::Dynamic> gradients(Point p) const;

    /// Evaluate sum_a coeffs[a] m_a(p).
    double evaluate(const Eigen::Ref<const Eigen::VectorXd>& coeffs, Point p) const;

private:
    Point center_;
    double scale_;
    int degree_;
    std::vector<std::array<int, 2>> exponents_;
};

/// Value matrix (points x monomials).
Eigen::MatrixXd eval_basis(const ScaledMonomialBasis& basis, std::span<const Point> points);

/// Gradient matrices (points x monomials), one per coordinate direction.
std::array<Eigen::MatrixXd, 2> grad_basis(const ScaledMonomialBasis& basis,
                                          std::span<const Point> points);

struct QuadratureRule
{
    std::vector<Point> points;
    std::vector<double> weights;
    int order = 0;

    std::size_t size() const { return points.size(); }
    double weight_sum() const;
};

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussLegendre
{
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int npoints);

/// Rule exact for 1D polynomials of degree `order` along the segment a-b; weights
/// sum to the segment length.
QuadratureRule edge_quadrature(Point a, Point b, int order);

/// Collapsed-coordinate Gauss rule on a triangle, exact to total degree `order`,
/// all weights positive.
QuadratureRule triangle_quadrature(Point a, Point b, Point c, int order);

/// Point from which the polygon can be fan-triangulated: the centroid when it lies
/// strictly inside the kernel, otherwise the kernel's Chebyshev center. Throws
/// ElementQualityError for polygons that are not star-shaped.
Point fan_point(std::span<const Point> polygon);

/// Fan triangulation from fan_point() with a triangle rule of `order` on each piece.
QuadratureRule polygon_quadrature(std::span<const Point> polygon, int order);

} // namespace pnpvem
