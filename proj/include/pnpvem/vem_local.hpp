#pragma once

#include "pnpvem/geometry.hpp"
#include "pnpvem/mesh.hpp"
#include "pnpvem/quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace pnpvem {

/// Scalar field g(t, x, y).
using SpaceTimeFunction = std::function<double(double, double, double)>;

enum class DofKind { vertex, edge, internal };

/// Local degrees of freedom, in order: vertex values, then per edge the moments
/// against scaled Legendre polynomials of degree 0..k-2 (edge j runs from vertex j
/// to vertex j+1), then moments against the scaled monomials of P_{k-2}(E).
/// Moments are normalized by the edge length / element area.
struct DofLayout
{
    int order = 1;
    int num_vertices = 0;

    int per_edge() const { return order - 1; }
    int num_internal() const { return poly_dim(order - 2); }
    int size() const { return num_vertices * order + num_internal(); }

    int vertex_dof(int v) const { return v; }
    int edge_dof(int edge, int j) const { return num_vertices + edge * per_edge() + j; }
    int internal_dof(int a) const { return num_vertices * order + a; }
    DofKind kind(int dof) const;
};

inline constexpr int min_supported_order = 1;
inline constexpr int max_supported_order = 2;

DofLayout build_dof_layout(int num_vertices, int k);
DofLayout build_dof_layout(std::span<const Point> polygon, int k);

/// Per-element projector matrices. Polynomials are stored as coefficient vectors
/// in the scaled monomial basis of degree k; functions of the local space as dof
/// vectors of length N = layout.size().
struct LocalSpace
{
    int k = 1;
    std::vector<Point> vertices;
    ElementGeometry geometry;
    DofLayout layout;
    ScaledMonomialBasis basis{Point{}, 1.0, 1};
    QuadratureRule quadrature;

    Eigen::MatrixXd dof_of_monomial;      // D: N x n_k, dofs of each monomial
    Eigen::MatrixXd pi_nabla;             // n_k x N
    Eigen::MatrixXd pi_nabla_dof;         // N x N, D * pi_nabla
    Eigen::MatrixXd monomial_mass;        // H: n_k x n_k
    Eigen::MatrixXd moments;              // n_k x N, integral of m_a times each basis function
    Eigen::MatrixXd pi0;                  // n_k x N
    Eigen::MatrixXd pi0_km1;              // n_{k-1} x N
    std::array<Eigen::MatrixXd, 2> pi0_grad_km1;  // n_{k-1} x N per direction
    std::array<Eigen::MatrixXd, 2> pi0_grad_k;    // n_k x N per direction

    Eigen::MatrixXd quad_monomials;                 // Q x n_k, monomials at the quadrature points
    /// triple[g](a, b) = int m_a m_g m_b for a, b < n_{k-1}, g < n_k.
    std::vector<Eigen::MatrixXd> triple;

    int num_dofs() const { return layout.size(); }
    int num_monomials() const { return basis.size(); }

    /// Dof vector of the polynomial with the given monomial coefficients.
    Eigen::VectorXd dofs_of(const Eigen::VectorXd& coeffs) const { return dof_of_monomial * coeffs; }
};

/// Default volume quadrature order for order-k spaces.
constexpr int volume_order(int k) { return 2 * k + 2; }

/// Build all projectors on a counterclockwise polygon. Throws InvalidElement for
/// degenerate elements (tagged with element_id) and Error for unsupported k.
LocalSpace build_projectors(std::span<const Point> polygon, int k, int element_id = -1);

/// Stiffness: consistency term through the P_{k-1} projection of gradients plus
/// dof-dof stabilization of (I - Pi_nabla).
Eigen::MatrixXd local_stiffness(const LocalSpace& space);

/// Mass: consistency term through Pi0_k plus |E| times dof-dof stabilization of
/// (I - Pi0_k).
Eigen::MatrixXd local_mass(const LocalSpace& space);

/// Drift coupling K[r][c] = q int (Pi0_{k-1} phi_c)(Pi0_k grad psi).(Pi0_{k-1} grad phi_r).
Eigen::MatrixXd local_coupling_b(const LocalSpace& space, const Eigen::Ref<const Eigen::VectorXd>& psi_dofs,
                                 double charge);

/// Charge coupling, one matrix per species:
/// B_i[r][c] = -q_i int (Pi0_{k-1} phi_c)(Pi0_{k-1} phi_r).
std::array<Eigen::MatrixXd, 2> local_coupling_btilde(const LocalSpace& space, double q1, double q2);

/// Load L[r] = int g(t, .) Pi0_k phi_r, using the element rule or, when
/// quadrature_order > 0, a fresh fan rule of that order.
Eigen::VectorXd local_load(const LocalSpace& space, const SpaceTimeFunction& g, double t,
                           int quadrature_order = 0);

/// Local dof vector of a smooth function (point values and moments).
Eigen::VectorXd local_interpolate(const LocalSpace& space, const std::function<double(Point)>& f);

/// Shifted Legendre polynomial of degree j on [0, 1].
double shifted_legendre(int j, double s);

} // namespace pnpvem
