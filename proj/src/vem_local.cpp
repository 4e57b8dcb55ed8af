#include "pnpvem/vem_local.hpp"

#include "pnpvem/errors.hpp"

#include <cmath>

namespace pnpvem {

DofKind DofLayout::kind(int dof) const
{
    if (dof < num_vertices)
        return DofKind::vertex;
    if (dof < num_vertices * order)
        return DofKind::edge;
    return DofKind::internal;
}

DofLayout build_dof_layout(int num_vertices, int k)
{
    if (k < min_supported_order || k > max_supported_order)
        throw Error("unsupported VEM order k = " + std::to_string(k));
    if (num_vertices < 3)
        throw Error("polygon needs at least 3 vertices");
    return DofLayout{k, num_vertices};
}

DofLayout build_dof_layout(std::span<const Point> polygon, int k)
{
    return build_dof_layout(static_cast<int>(polygon.size()), k);
}

double shifted_legendre(int j, double s)
{
    const double x = 2.0 * s - 1.0;
    double p0 = 1.0, p1 = x;
    if (j == 0)
        return p0;
    for (int n = 2; n <= j; ++n) {
        const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

namespace {

/// Coefficients (in powers of the edge parameter s) of the k+1 trace basis
/// functions of one edge: start vertex, end vertex, Legendre moments 0..k-2.
Eigen::MatrixXd edge_trace_basis(int k)
{
    Eigen::MatrixXd cond = Eigen::MatrixXd::Zero(k + 1, k + 1);
    const auto& gl = gauss_legendre(k + 1);
    for (int p = 0; p <= k; ++p) {
        cond(0, p) = p == 0 ? 1.0 : 0.0;
        cond(1, p) = 1.0;
        for (int j = 0; j + 2 <= k; ++j) {
            double m = 0.0;
            for (std::size_t q = 0; q < gl.nodes.size(); ++q)
                m += gl.weights[q] * std::pow(gl.nodes[q], p) * shifted_legendre(j, gl.nodes[q]);
            cond(2 + j, p) = m;
        }
    }
    // Column c holds the power coefficients of the function whose c-th condition is 1.
    return cond.inverse();
}

const Eigen::MatrixXd& trace_basis_for(int k)
{
    static const std::array<Eigen::MatrixXd, max_supported_order + 1> table = [] {
        std::array<Eigen::MatrixXd, max_supported_order + 1> t;
        for (int kk = min_supported_order; kk <= max_supported_order; ++kk)
            t[kk] = edge_trace_basis(kk);
        return t;
    }();
    return table[k];
}

Eigen::MatrixXd solve_checked(const Eigen::MatrixXd& a, const Eigen::MatrixXd& rhs, int element,
                              const char* what)
{
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const Eigen::MatrixXd permuted = lu.permutationP() * a;
    const auto& packed = lu.matrixLU();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double row_norm = permuted.row(i).cwiseAbs().maxCoeff();
        if (std::abs(packed(i, i)) < 1e-13 * row_norm || row_norm == 0.0)
            throw InvalidElement(element, std::string("singular ") + what + " system");
    }
    return lu.solve(rhs);
}

/// Coefficient c and monomial index of d/dx_dir m_beta = c * m_gamma, or c = 0.
std::pair<double, int> monomial_derivative(const ScaledMonomialBasis& basis, int beta, int dir)
{
    auto [ex, ey] = basis.exponent(beta);
    const int e = dir == 0 ? ex : ey;
    if (e == 0)
        return {0.0, 0};
    if (dir == 0)
        --ex;
    else
        --ey;
    return {e / basis.scale(), ScaledMonomialBasis::index(ex, ey)};
}

} // namespace

LocalSpace build_projectors(std::span<const Point> polygon, int k, int element_id)
{
    LocalSpace s;
    s.k = k;
    s.layout = build_dof_layout(polygon, k);
    s.vertices.assign(polygon.begin(), polygon.end());
    const double area = signed_area(polygon);
    if (!(area > 0.0))
        throw InvalidElement(element_id, "nonpositive signed area");
    s.geometry = {area, polygon_centroid(polygon), polygon_diameter(polygon)};
    s.basis = ScaledMonomialBasis(s.geometry.centroid, s.geometry.diameter, k);
    s.quadrature = polygon_quadrature(polygon, volume_order(k));

    const int nv = s.layout.num_vertices;
    const int ndof = s.layout.size();
    const int nk = poly_dim(k), nkm1 = poly_dim(k - 1), nkm2 = poly_dim(k - 2);
    const double h = s.geometry.diameter;
    const auto& basis = s.basis;

    // Monomial mass matrix and monomial values at the volume quadrature points.
    const std::size_t nq = s.quadrature.size();
    s.quad_monomials.resize(nq, nk);
    s.monomial_mass = Eigen::MatrixXd::Zero(nk, nk);
    for (std::size_t q = 0; q < nq; ++q) {
        const Eigen::VectorXd m = basis.values(s.quadrature.points[q]);
        s.quad_monomials.row(q) = m.transpose();
        s.monomial_mass.noalias() += s.quadrature.weights[q] * m * m.transpose();
    }
    const Eigen::MatrixXd& H = s.monomial_mass;

    // Boundary integrals of each basis function against 1, grad m . n and m n_d.
    const Eigen::MatrixXd& trace = trace_basis_for(k);
    const auto& gl = gauss_legendre(k + 1);
    Eigen::RowVectorXd bnd_mean = Eigen::RowVectorXd::Zero(ndof);
    Eigen::MatrixXd bnd_flux = Eigen::MatrixXd::Zero(nk, ndof);
    std::array<Eigen::MatrixXd, 2> bnd_normal{Eigen::MatrixXd::Zero(nk, ndof),
                                              Eigen::MatrixXd::Zero(nk, ndof)};
    s.dof_of_monomial.resize(ndof, nk);
    for (int v = 0; v < nv; ++v)
        s.dof_of_monomial.row(s.layout.vertex_dof(v)) = basis.values(polygon[v]).transpose();

    for (int e = 0; e < nv; ++e) {
        const Point a = polygon[e], b = polygon[(e + 1) % nv];
        const Point t = b - a;
        const double len = norm(t);
        const Point nrm{t.y / len, -t.x / len};
        std::vector<int> local{s.layout.vertex_dof(e), s.layout.vertex_dof((e + 1) % nv)};
        for (int j = 0; j < s.layout.per_edge(); ++j)
            local.push_back(s.layout.edge_dof(e, j));

        for (int j = 0; j < s.layout.per_edge(); ++j)
            s.dof_of_monomial.row(s.layout.edge_dof(e, j)).setZero();

        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            const double sq = gl.nodes[q];
            const double w = gl.weights[q] * len;
            const Point x = a + sq * t;
            const Eigen::VectorXd m = basis.values(x);
            const auto g = basis.gradients(x);
            const Eigen::VectorXd flux = (nrm.x * g.row(0) + nrm.y * g.row(1)).transpose();

            for (int j = 0; j < s.layout.per_edge(); ++j)
                s.dof_of_monomial.row(s.layout.edge_dof(e, j)) +=
                    gl.weights[q] * shifted_legendre(j, sq) * m.transpose();

            for (int c = 0; c <= k; ++c) {
                double tv = 0.0;
                for (int p = k; p >= 0; --p)
                    tv = tv * sq + trace(p, c);
                const int i = local[c];
                bnd_mean(i) += w * tv;
                bnd_flux.col(i) += w * tv * flux;
                bnd_normal[0].col(i) += w * tv * nrm.x * m;
                bnd_normal[1].col(i) += w * tv * nrm.y * m;
            }
        }
    }
    for (int a = 0; a < nkm2; ++a)
        s.dof_of_monomial.row(s.layout.internal_dof(a)) = H.row(a) / area;

    // Elliptic projection: gradient orthogonality by integration by parts plus
    // the boundary-mean condition.
    Eigen::MatrixXd B = bnd_flux;
    B.row(0) = bnd_mean;
    for (int alpha = 1; alpha < nk; ++alpha) {
        const auto [ex, ey] = basis.exponent(alpha);
        if (ex >= 2)
            B(alpha, s.layout.internal_dof(ScaledMonomialBasis::index(ex - 2, ey))) -=
                area * ex * (ex - 1) / (h * h);
        if (ey >= 2)
            B(alpha, s.layout.internal_dof(ScaledMonomialBasis::index(ex, ey - 2))) -=
                area * ey * (ey - 1) / (h * h);
    }
    const Eigen::MatrixXd G = B * s.dof_of_monomial;
    s.pi_nabla = solve_checked(G, B, element_id, "elliptic projector");
    s.pi_nabla_dof = s.dof_of_monomial * s.pi_nabla;

    // Moments against all of P_k. Degree <= k-2 comes from the internal dofs; the
    // remainder uses (v - Pi_nabla v, q) = 0 for q in P_k orthogonal to P_{k-2}.
    const Eigen::MatrixXd h_pi = H * s.pi_nabla;
    Eigen::MatrixXd low = Eigen::MatrixXd::Zero(nkm2, ndof);
    for (int a = 0; a < nkm2; ++a)
        low(a, s.layout.internal_dof(a)) = area;
    s.moments.resize(nk, ndof);
    s.moments.topRows(nkm2) = low;
    if (nkm2 > 0) {
        const Eigen::MatrixXd proj = H.topLeftCorner(nkm2, nkm2).ldlt().solve(
            H.topRightCorner(nkm2, nk - nkm2));
        s.moments.bottomRows(nk - nkm2) =
            h_pi.bottomRows(nk - nkm2) - proj.transpose() * (h_pi.topRows(nkm2) - low);
    } else {
        s.moments = h_pi;
    }

    s.pi0 = solve_checked(H, s.moments, element_id, "L2 projector");
    const Eigen::MatrixXd H1 = H.topLeftCorner(nkm1, nkm1);
    s.pi0_km1 = solve_checked(H1, s.moments.topRows(nkm1), element_id, "L2 projector");

    // int m_beta d_dir v = -int (d_dir m_beta) v + int_{dE} m_beta n_dir v.
    for (int dir = 0; dir < 2; ++dir) {
        Eigen::MatrixXd rhs = bnd_normal[dir];
        for (int beta = 0; beta < nk; ++beta) {
            const auto [c, gamma] = monomial_derivative(basis, beta, dir);
            if (c != 0.0)
                rhs.row(beta) -= c * s.moments.row(gamma);
        }
        s.pi0_grad_k[dir] = solve_checked(H, rhs, element_id, "gradient projector");
        s.pi0_grad_km1[dir] = solve_checked(H1, rhs.topRows(nkm1), element_id, "gradient projector");
    }

    // The volume rule has degree 2k + 2 >= 3k - 2, so these are exact.
    s.triple.assign(nk, Eigen::MatrixXd::Zero(nkm1, nkm1));
    for (std::size_t q = 0; q < nq; ++q) {
        const auto m = s.quad_monomials.row(q);
        const Eigen::RowVectorXd low = m.head(nkm1);
        const Eigen::MatrixXd outer = s.quadrature.weights[q] * low.transpose() * low;
        for (int g = 0; g < nk; ++g)
            s.triple[g] += m[g] * outer;
    }
    return s;
}

Eigen::MatrixXd local_stiffness(const LocalSpace& s)
{
    const int nkm1 = poly_dim(s.k - 1);
    const Eigen::MatrixXd H1 = s.monomial_mass.topLeftCorner(nkm1, nkm1);
    const Eigen::MatrixXd stab =
        Eigen::MatrixXd::Identity(s.num_dofs(), s.num_dofs()) - s.pi_nabla_dof;
    Eigen::MatrixXd a = stab.transpose() * stab;
    for (int dir = 0; dir < 2; ++dir)
        a.noalias() += s.pi0_grad_km1[dir].transpose() * H1 * s.pi0_grad_km1[dir];
    return a;
}

Eigen::MatrixXd local_mass(const LocalSpace& s)
{
    const Eigen::MatrixXd stab =
        Eigen::MatrixXd::Identity(s.num_dofs(), s.num_dofs()) - s.dof_of_monomial * s.pi0;
    Eigen::MatrixXd m = s.geometry.area * (stab.transpose() * stab);
    m.noalias() += s.pi0.transpose() * s.monomial_mass * s.pi0;
    return m;
}

Eigen::MatrixXd local_coupling_b(const LocalSpace& s, const Eigen::Ref<const Eigen::VectorXd>& psi_dofs,
                                 double charge)
{
    // K = q sum_d G_d^T (sum_g c_{d,g} T_g) P with c_d the P_k coefficients of the
    // projected drift component, G_d, P the P_{k-1} projections of gradients and values.
    const int nkm1 = poly_dim(s.k - 1);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(s.num_dofs(), s.num_dofs());
    Eigen::MatrixXd weighted(nkm1, nkm1);
    for (int dir = 0; dir < 2; ++dir) {
        const Eigen::VectorXd drift = s.pi0_grad_k[dir] * psi_dofs;
        weighted.setZero();
        for (int g = 0; g < s.num_monomials(); ++g)
            weighted += drift[g] * s.triple[g];
        k.noalias() += s.pi0_grad_km1[dir].transpose() * (charge * weighted) * s.pi0_km1;
    }
    return k;
}

std::array<Eigen::MatrixXd, 2> local_coupling_btilde(const LocalSpace& s, double q1, double q2)
{
    const int nkm1 = poly_dim(s.k - 1);
    const Eigen::MatrixXd H1 = s.monomial_mass.topLeftCorner(nkm1, nkm1);
    const Eigen::MatrixXd base = s.pi0_km1.transpose() * H1 * s.pi0_km1;
    return {-q1 * base, -q2 * base};
}

Eigen::VectorXd local_load(const LocalSpace& s, const SpaceTimeFunction& g, double t,
                           int quadrature_order)
{
    if (quadrature_order <= 0 || quadrature_order == s.quadrature.order) {
        Eigen::VectorXd wg(s.quadrature.size());
        for (std::size_t q = 0; q < s.quadrature.size(); ++q) {
            const Point p = s.quadrature.points[q];
            wg[q] = s.quadrature.weights[q] * g(t, p.x, p.y);
        }
        return s.pi0.transpose() * (s.quad_monomials.transpose() * wg);
    }
    const auto rule = polygon_quadrature(s.vertices, quadrature_order);
    Eigen::VectorXd moments = Eigen::VectorXd::Zero(s.num_monomials());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point p = rule.points[q];
        moments += rule.weights[q] * g(t, p.x, p.y) * s.basis.values(p);
    }
    return s.pi0.transpose() * moments;
}

Eigen::VectorXd local_interpolate(const LocalSpace& s, const std::function<double(Point)>& f)
{
    Eigen::VectorXd dofs(s.num_dofs());
    const int nv = s.layout.num_vertices;
    for (int v = 0; v < nv; ++v)
        dofs[s.layout.vertex_dof(v)] = f(s.vertices[v]);
    const auto& gl = gauss_legendre(s.k + 4);
    for (int e = 0; e < nv; ++e) {
        const Point a = s.vertices[e], b = s.vertices[(e + 1) % nv];
        for (int j = 0; j < s.layout.per_edge(); ++j) {
            double m = 0.0;
            for (std::size_t q = 0; q < gl.nodes.size(); ++q)
                m += gl.weights[q] * shifted_legendre(j, gl.nodes[q]) * f(a + gl.nodes[q] * (b - a));
            dofs[s.layout.edge_dof(e, j)] = m;
        }
    }
    for (int a = 0; a < s.layout.num_internal(); ++a) {
        double m = 0.0;
        for (std::size_t q = 0; q < s.quadrature.size(); ++q)
            m += s.quadrature.weights[q] * f(s.quadrature.points[q]) * s.quad_monomials(q, a);
        dofs[s.layout.internal_dof(a)] = m / s.geometry.area;
    }
    return dofs;
}

} // namespace pnpvem
