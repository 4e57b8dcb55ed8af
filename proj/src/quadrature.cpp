#include "pnpvem/quadrature.hpp"

#include "pnpvem/errors.hpp"

#include <cmath>
#include <numbers>

namespace pnpvem {

ScaledMonomialBasis::ScaledMonomialBasis(Point center, double scale, int degree)
    : center_(center), scale_(scale), degree_(degree)
{
    if (degree < 0 || degree > 7)
        throw Error("ScaledMonomialBasis: degree " + std::to_string(degree) + " out of range");
    for (int d = 0; d <= degree; ++d)
        for (int ey = 0; ey <= d; ++ey)
            exponents_.push_back({d - ey, ey});
}

void ScaledMonomialBasis::values(Point p, std::span<double> out) const
{
    const double sx = (p.x - center_.x) / scale_;
    const double sy = (p.y - center_.y) / scale_;
    // Powers up to the degree, reused across monomials.
    double px[8], py[8];
    px[0] = py[0] = 1.0;
    for (int i = 1; i <= degree_; ++i) {
        px[i] = px[i - 1] * sx;
        py[i] = py[i - 1] * sy;
    }
    for (std::size_t a = 0; a < exponents_.size(); ++a)
        out[a] = px[exponents_[a][0]] * py[exponents_[a][1]];
}

Eigen::VectorXd ScaledMonomialBasis::values(Point p) const
{
    Eigen::VectorXd v(size());
    values(p, {v.data(), static_cast<std::size_t>(v.size())});
    return v;
}

Eigen::Matrix<double, 2, Eigen::Dynamic> ScaledMonomialBasis::gradients(Point p) const
{
    const double sx = (p.x - center_.x) / scale_;
    const double sy = (p.y - center_.y) / scale_;
    Eigen::Matrix<double, 2, Eigen::Dynamic> g(2, size());
    for (int a = 0; a < size(); ++a) {
        const auto [ex, ey] = exponents_[a];
        g(0, a) = ex == 0 ? 0.0 : ex * std::pow(sx, ex - 1) * std::pow(sy, ey) / scale_;
        g(1, a) = ey == 0 ? 0.0 : ey * std::pow(sx, ex) * std::pow(sy, ey - 1) / scale_;
    }
    return g;
}

double ScaledMonomialBasis::evaluate(const Eigen::Ref<const Eigen::VectorXd>& coeffs, Point p) const
{
    return coeffs.dot(values(p));
}

Eigen::MatrixXd eval_basis(const ScaledMonomialBasis& basis, std::span<const Point> points)
{
    Eigen::MatrixXd m(points.size(), basis.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        m.row(i) = basis.values(points[i]).transpose();
    return m;
}

std::array<Eigen::MatrixXd, 2> grad_basis(const ScaledMonomialBasis& basis,
                                          std::span<const Point> points)
{
    std::array<Eigen::MatrixXd, 2> g{Eigen::MatrixXd(points.size(), basis.size()),
                                     Eigen::MatrixXd(points.size(), basis.size())};
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto gi = basis.gradients(points[i]);
        g[0].row(i) = gi.row(0);
        g[1].row(i) = gi.row(1);
    }
    return g;
}

double QuadratureRule::weight_sum() const
{
    double s = 0.0;
    for (double w : weights)
        s += w;
    return s;
}

namespace {

GaussLegendre compute_gauss_legendre(int n)
{
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        // Map [-1, 1] -> [0, 1].
        gl.nodes[n - 1 - i] = 0.5 * (x + 1.0);
        gl.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return gl;
}

constexpr int max_gauss_points = 40;

} // namespace

const GaussLegendre& gauss_legendre(int npoints)
{
    static const std::vector<GaussLegendre> table = [] {
        std::vector<GaussLegendre> t(max_gauss_points + 1);
        for (int n = 1; n <= max_gauss_points; ++n)
            t[n] = compute_gauss_legendre(n);
        return t;
    }();
    if (npoints < 1 || npoints > max_gauss_points)
        throw Error("gauss_legendre: unsupported point count " + std::to_string(npoints));
    return table[npoints];
}

QuadratureRule edge_quadrature(Point a, Point b, int order)
{
    const auto& gl = gauss_legendre(order / 2 + 1);
    const double len = distance(a, b);
    QuadratureRule rule;
    rule.order = order;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        rule.points.push_back(a + gl.nodes[i] * (b - a));
        rule.weights.push_back(gl.weights[i] * len);
    }
    return rule;
}

QuadratureRule triangle_quadrature(Point a, Point b, Point c, int order)
{
    // x(u, v) = a + u((1 - v)(b - a) + v(c - a)), Jacobian 2|T| u: a degree-p
    // integrand is degree p + 1 in u and degree p in v.
    const auto& gu = gauss_legendre((order + 1) / 2 + 1);
    const auto& gv = gauss_legendre(order / 2 + 1);
    const double twice_area = std::abs(cross(b - a, c - a));
    QuadratureRule rule;
    rule.order = order;
    rule.points.reserve(gu.nodes.size() * gv.nodes.size());
    for (std::size_t i = 0; i < gu.nodes.size(); ++i)
        for (std::size_t j = 0; j < gv.nodes.size(); ++j) {
            const double u = gu.nodes[i], v = gv.nodes[j];
            rule.points.push_back(a + u * ((1.0 - v) * (b - a) + v * (c - a)));
            rule.weights.push_back(gu.weights[i] * gv.weights[j] * u * twice_area);
        }
    return rule;
}

Point fan_point(std::span<const Point> polygon)
{
    const Point centroid = polygon_centroid(polygon);
    const double diam = polygon_diameter(polygon);
    if (sees_whole_boundary(polygon, centroid, 1e-10 * diam))
        return centroid;
    const Ball ball = chebyshev_ball(edge_half_planes(polygon));
    if (!(ball.radius > 1e-12 * diam))
        throw ElementQualityError("polygon is not star-shaped: no interior fan point");
    return ball.center;
}

QuadratureRule polygon_quadrature(std::span<const Point> polygon, int order)
{
    const Point apex = fan_point(polygon);
    QuadratureRule rule;
    rule.order = order;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto tri = triangle_quadrature(apex, polygon[i], polygon[(i + 1) % n], order);
        rule.points.insert(rule.points.end(), tri.points.begin(), tri.points.end());
        rule.weights.insert(rule.weights.end(), tri.weights.begin(), tri.weights.end());
    }
    return rule;
}

} // namespace pnpvem
