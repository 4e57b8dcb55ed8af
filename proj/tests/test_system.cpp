#include "doctest.h"

#include "vem_oracles.hpp"

#include "pnpvem/assembly.hpp"
#include "pnpvem/dof_map.hpp"
#include "pnpvem/errors.hpp"
#include "pnpvem/linear_solvers.hpp"
#include "pnpvem/mesh_generators.hpp"
#include "pnpvem/pnp_solver.hpp"

#include <numbers>
#include <random>
#include <set>
#include <sstream>

using namespace pnpvem;

namespace {

constexpr double pi = std::numbers::pi;

Eigen::MatrixXd dense(const CsrMatrix& a)
{
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a.n, a.n);
    for (int r = 0; r < a.n; ++r)
        for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p)
            d(r, a.col[p]) = a.val[p];
    return d;
}

CsrMatrix random_sparse(int n, std::uint64_t seed, bool symmetric_positive)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::vector<int>> rows(n);
    for (int r = 0; r < n; ++r) {
        rows[r].push_back(r);
        for (int j = 0; j < 3; ++j) {
            const int c = static_cast<int>(rng() % n);
            rows[r].push_back(c);
            rows[c].push_back(r);
        }
    }
    CsrMatrix a = csr_from_pattern(n, rows);
    for (int r = 0; r < n; ++r)
        for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
            const int c = a.col[p];
            if (c == r)
                a.val[p] = 8.0;
            else if (symmetric_positive)
                a.val[p] = -0.3 * (1.0 + 0.1 * ((r + c) % 5));
            else
                a.val[p] = u(rng);
        }
    return a;
}

SolverConfig config(double tau, double T = 1.0)
{
    SolverConfig c;
    c.tau = tau;
    c.T = T;
    return c;
}

} // namespace

TEST_CASE("dof map counts")
{
    const auto sq = generate_structured(StructuredKind::square, 2);
    const auto m1 = build_dof_map(sq, 1);
    CHECK(m1.num_dofs() == 9);
    CHECK(m1.num_free() == 1);
    const auto m2 = build_dof_map(sq, 2);
    CHECK(m2.num_dofs() == 9 + 12 + 4);
    // Free: centre vertex, the 4 interior edges, the 4 cell moments.
    CHECK(m2.num_free() == 1 + 4 + 4);
    const auto tri = build_dof_map(generate_structured(StructuredKind::triangle, 1), 1);
    CHECK(tri.num_dofs() == 4);
    CHECK(tri.num_free() == 0);
}

TEST_CASE("dof map sharing and Dirichlet mask")
{
    for (auto kind : {StructuredKind::mixed, StructuredKind::nonconvex}) {
        const auto mesh = generate_structured(kind, 4);
        const auto map = build_dof_map(mesh, 2);
        // Both neighbours of an edge refer to the same global edge dof.
        for (int i = 0; i < mesh.num_edges(); ++i) {
            const Edge& ed = mesh.edge(i);
            for (int e : {ed.left, ed.right}) {
                if (e < 0)
                    continue;
                bool found = false;
                for (int d : map.element_dofs(e))
                    found |= d == map.edge_dof(i, 0);
                CHECK(found);
            }
            CHECK(map.is_dirichlet(map.edge_dof(i, 0)) == ed.on_boundary());
        }
        for (int v = 0; v < mesh.num_vertices(); ++v)
            CHECK(map.is_dirichlet(v) == on_unit_square_boundary(mesh.vertex(v)));
        for (int e = 0; e < mesh.num_elements(); ++e)
            CHECK_FALSE(map.is_dirichlet(map.internal_dof(e, 0)));
    }
}

TEST_CASE("csr kernels: serial and parallel agree")
{
    const auto a = random_sparse(500, 4, false);
    std::vector<double> x(500), y1(500), y2(500);
    for (int i = 0; i < 500; ++i)
        x[i] = std::sin(0.1 * i);
    spmv(a, x, y1, Exec::serial);
    spmv(a, x, y2, Exec::parallel);
    CHECK(y1 == y2);
    CHECK(dot(x, y1, Exec::serial) == doctest::Approx(dot(x, y1, Exec::parallel)).epsilon(1e-14));
    auto z1 = y1, z2 = y1;
    axpy(0.7, x, z1, Exec::serial);
    axpy(0.7, x, z2, Exec::parallel);
    CHECK(z1 == z2);
    const Eigen::VectorXd ref = dense(a) * Eigen::Map<const Eigen::VectorXd>(x.data(), 500);
    for (int i = 0; i < 500; ++i)
        CHECK(y1[i] == doctest::Approx(ref[i]).epsilon(1e-13).scale(1.0));
    CHECK(a.find(0, 0) >= 0);
    CHECK(a.at(0, 0) == 8.0);
}

TEST_CASE("assembly")
{
    SUBCASE("zero supplier gives the zero matrix")
    {
        const auto mesh = generate_structured(StructuredKind::square, 3);
        const auto map = build_dof_map(mesh, 1);
        const Assembler asmb(map);
        const auto z = asmb.assemble_matrix([&](int e, Eigen::MatrixXd& m) {
            const int n = static_cast<int>(map.element_dofs(e).size());
            m = Eigen::MatrixXd::Zero(n, n);
        });
        for (double v : z.val)
            CHECK(v == 0.0);
    }
    SUBCASE("2x2 squares: the free entry is the sum of the four corner entries")
    {
        const auto mesh = generate_structured(StructuredKind::square, 2);
        const Discretization disc(mesh, 1);
        double expected = 0.0;
        for (int e = 0; e < 4; ++e) {
            const auto pts = mesh.element_points(e);
            const auto a = local_stiffness(build_projectors(pts, 1));
            for (int j = 0; j < 4; ++j)
                if (pts[j].x == 0.5 && pts[j].y == 0.5)
                    expected += a(j, j);
        }
        REQUIRE(disc.stiffness().n == 1);
        CHECK(disc.stiffness().val[0] == doctest::Approx(expected).epsilon(1e-15));
        // Per square: |E| |mean grad|^2 = 1/2 plus a dofi-dofi stabilization of 1/4.
        CHECK(expected == doctest::Approx(4.0 * 0.75).epsilon(1e-14));
    }
    SUBCASE("coloring separates elements that share dofs, parallel equals serial")
    {
        const auto mesh = generate_voronoi(80, 2, 9);
        for (int k = 1; k <= 2; ++k) {
            const Discretization disc(mesh, k);
            const Assembler& asmb = disc.assembler();
            std::set<int> covered;
            for (const auto& group : asmb.colors()) {
                std::set<int> used;
                for (int e : group) {
                    covered.insert(e);
                    for (int d : disc.dof_map().element_dofs(e))
                        CHECK(used.insert(d).second);
                }
            }
            CHECK(static_cast<int>(covered.size()) == mesh.num_elements());
            auto fn = [&](int e, Eigen::MatrixXd& m) { m = local_mass(disc.spaces()[e]); };
            const auto a = asmb.assemble_matrix(fn, Exec::serial);
            const auto b = asmb.assemble_matrix(fn, Exec::parallel);
            for (std::size_t p = 0; p < a.val.size(); ++p)
                CHECK(a.val[p] == doctest::Approx(b.val[p]).epsilon(1e-14));
        }
    }
    SUBCASE("exceptions inside parallel assembly propagate")
    {
        const auto mesh = generate_structured(StructuredKind::square, 4);
        const auto map = build_dof_map(mesh, 1);
        const Assembler asmb(map);
        CHECK_THROWS_AS(asmb.assemble_matrix([](int, Eigen::MatrixXd& m) { m = Eigen::MatrixXd::Zero(2, 2); }),
                        Error);
    }
}

TEST_CASE("assembled stiffness on triangles equals P1 finite elements")
{
    for (int n : {1, 3, 6}) {
        const auto mesh = generate_structured(StructuredKind::triangle, n);
        const Discretization disc(mesh, 1);
        const auto& map = disc.dof_map();
        Eigen::MatrixXd fem = Eigen::MatrixXd::Zero(map.num_free(), map.num_free());
        for (int e = 0; e < mesh.num_elements(); ++e) {
            const auto p = mesh.element_points(e);
            const auto [k, m] = oracle::p1_matrices(p[0], p[1], p[2]);
            const auto v = mesh.element(e);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const int fi = map.free_index(v[i]), fj = map.free_index(v[j]);
                    if (fi >= 0 && fj >= 0)
                        fem(fi, fj) += k(i, j);
                }
        }
        if (map.num_free() > 0)
            CHECK((dense(disc.stiffness()) - fem).cwiseAbs().maxCoeff() < 1e-11);
    }
}

TEST_CASE("assembled stiffness is SPD for every family")
{
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    for (auto mesh : {generate_structured(StructuredKind::nonconvex, 4), generate_structured(StructuredKind::mixed, 4),
                      generate_voronoi(40, 0, 3)})
        for (int k = 1; k <= 2; ++k) {
            const Discretization disc(mesh, k);
            const auto& a = disc.stiffness();
            std::vector<double> x(a.n), ax(a.n);
            for (int trial = 0; trial < 5; ++trial) {
                for (double& v : x)
                    v = g(rng);
                spmv(a, x, ax);
                CHECK(dot(x, ax) > 0.0);
            }
            const Eigen::MatrixXd d = dense(a);
            CHECK((d - d.transpose()).cwiseAbs().maxCoeff() < 1e-13 * d.cwiseAbs().maxCoeff());
            CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(d).eigenvalues()[0] > 0.0);
        }
}

TEST_CASE("linear solvers")
{
    SUBCASE("identity")
    {
        CsrMatrix id = csr_from_pattern(5, {{0}, {1}, {2}, {3}, {4}});
        std::fill(id.val.begin(), id.val.end(), 1.0);
        const std::vector<double> b{1, -2, 3, 0.5, 7};
        for (bool sym : {true, false}) {
            std::vector<double> x(5, 0.0);
            solve_linear(id, b, x, sym);
            for (int i = 0; i < 5; ++i)
                CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-14));
        }
    }
    SUBCASE("Krylov methods meet the residual contract")
    {
        for (bool sym : {true, false}) {
            const auto a = random_sparse(3000, 5, sym);
            std::vector<double> b(3000), x(3000, 0.0);
            for (int i = 0; i < 3000; ++i)
                b[i] = std::cos(0.01 * i);
            SolverOptions opt;
            opt.tol = 1e-12;
            const auto st = solve_linear(a, b, x, sym, opt);
            CHECK(st.converged);
            CHECK_FALSE(st.used_dense);
            CHECK(relative_residual(a, b, x) <= 1e-12);
        }
    }
    SUBCASE("dense fallback below the size limit, failure above it")
    {
        const auto a = random_sparse(200, 6, false);
        std::vector<double> b(200, 1.0), x(200, 0.0);
        SolverOptions opt;
        opt.max_iterations = 1;
        const auto st = solve_linear(a, b, x, false, opt);
        CHECK(st.used_dense);
        CHECK(st.residual <= 1e-12);

        opt.dense_fallback = false;
        std::fill(x.begin(), x.end(), 0.0);
        try {
            solve_linear(a, b, x, false, opt);
            FAIL("expected SolverFailure");
        } catch (const SolverFailure& f) {
            CHECK(f.residual() > 1e-12);
        }
    }
    SUBCASE("zero right-hand side")
    {
        const auto a = random_sparse(50, 7, true);
        std::vector<double> b(50, 0.0), x(50, 1.0);
        solve_linear(a, b, x, true);
        for (double v : x)
            CHECK(v == 0.0);
    }
}

TEST_CASE("factorized preconditioner")
{
    const auto a = random_sparse(800, 9, true);
    const FactorizedPreconditioner pc(a);
    std::vector<double> b(800), x(800, 0.0);
    for (int i = 0; i < 800; ++i)
        b[i] = 1.0 + std::sin(0.3 * i);
    SolverOptions opt;
    opt.preconditioner = &pc;
    // An exact factorization makes CG converge immediately.
    const auto st = conjugate_gradient(a, b, x, opt);
    CHECK(st.converged);
    CHECK(st.iterations <= 2);

    // As an approximation of a perturbed nonsymmetric matrix.
    auto n = a;
    for (int r = 0; r < n.n; ++r)
        for (int p = n.row_ptr[r]; p < n.row_ptr[r + 1]; ++p)
            if (n.col[p] > r)
                n.val[p] += 0.05;
    std::fill(x.begin(), x.end(), 0.0);
    const auto sb = bicgstab(n, b, x, opt);
    CHECK(sb.converged);
    CHECK(relative_residual(n, b, x) <= 1e-12);

    auto indefinite = a;
    for (int r = 0; r < indefinite.n; ++r)
        indefinite.val[indefinite.find(r, r)] = r == 5 ? -8.0 : 8.0;
    CHECK_THROWS_AS(FactorizedPreconditioner{indefinite}, Error);
}

TEST_CASE("Jacobi and factorized preconditioning give the same time step")
{
    const auto mesh = generate_voronoi(49, 0, 3);
    const Discretization disc(mesh, 2);
    const ManufacturedCase mc;
    SolverConfig c = config(0.01);
    const PNPSolver fact(disc, ProblemData::manufactured(mc), c);
    c.preconditioning = Preconditioning::jacobi;
    const PNPSolver jac(disc, ProblemData::manufactured(mc), c);
    PNPState a = fact.initial_state(), b = jac.initial_state();
    for (int n = 1; n <= 3; ++n) {
        a = fact.gummel_step(a, 0.01, n);
        b = jac.gummel_step(b, 0.01, n);
    }
    for (std::size_t i = 0; i < a.phi.size(); ++i) {
        CHECK(a.phi[i] == doctest::Approx(b.phi[i]).epsilon(1e-9).scale(1.0));
        CHECK(a.p[0][i] == doctest::Approx(b.p[0][i]).epsilon(1e-9).scale(1.0));
        CHECK(a.p[1][i] == doctest::Approx(b.p[1][i]).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("time grid")
{
    CHECK(time_steps(1.0, 1.0 / 64).size() == 64);
    CHECK(time_steps(1.0, 1.0).size() == 1);
    const auto s = time_steps(1.0, 0.3);
    REQUIRE(s.size() == 4);
    CHECK(s.back() == doctest::Approx(0.1).epsilon(1e-12));
    double total = 0.0;
    for (double t : s)
        total += t;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(time_steps(1.0, 0.0), Error);
}

TEST_CASE("Poisson solve")
{
    const auto mesh = generate_structured(StructuredKind::square, 8);
    const Discretization disc(mesh, 1);
    const int nd = disc.dof_map().num_dofs();
    const std::array<std::vector<double>, 2> zero{std::vector<double>(nd, 0.0), std::vector<double>(nd, 0.0)};

    SUBCASE("zero data gives zero")
    {
        const PNPSolver s(disc, ProblemData{}, config(0.1));
        for (double v : s.poisson_solve(zero, 0.0))
            CHECK(v == 0.0);
    }
    SUBCASE("sin sin load: centre value close to 1")
    {
        ProblemData d;
        d.f.closure = [](double, double x, double y) { return 2 * pi * pi * std::sin(pi * x) * std::sin(pi * y); };
        const PNPSolver s(disc, d, config(0.1));
        const auto phi = s.poisson_solve(zero, 0.0);
        int centre = -1;
        for (int v = 0; v < mesh.num_vertices(); ++v)
            if (mesh.vertex(v).x == 0.5 && mesh.vertex(v).y == 0.5)
                centre = v;
        REQUIRE(centre >= 0);
        CHECK(std::abs(phi[centre] - 1.0) < 0.1);
    }
    SUBCASE("opposite charges with equal densities cancel")
    {
        ProblemData d;
        d.f.closure = [](double, double x, double y) { return x * (1 - x) * y; };
        const PNPSolver s(disc, d, config(0.1));
        auto p = disc.interpolate([](Point q) { return std::sin(pi * q.x) * q.y * (1 - q.y); });
        const auto with = s.poisson_solve({p, p}, 0.0);
        const auto without = s.poisson_solve(zero, 0.0);
        for (int i = 0; i < nd; ++i)
            CHECK(with[i] == doctest::Approx(without[i]).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("Nernst-Planck solve")
{
    const auto mesh = generate_structured(StructuredKind::square, 8);
    const Discretization disc(mesh, 1);
    const int nd = disc.dof_map().num_dofs();

    SUBCASE("steady zero solution")
    {
        const PNPSolver s(disc, ProblemData{}, config(0.01));
        const std::vector<double> zero(nd, 0.0), phi(nd, 0.0);
        for (double v : s.np_solve(1, zero, phi, 0.01, 0.01))
            CHECK(v == 0.0);
    }
    SUBCASE("backward Euler without drift does not increase the mass norm")
    {
        ProblemData d;
        d.drift = false;
        const PNPSolver s(disc, d, config(0.01));
        auto p = disc.interpolate([](Point q) { return std::sin(pi * q.x) * std::sin(2 * pi * q.y) + q.x * q.y; });
        const std::vector<double> phi(nd, 0.0);
        for (int step = 0; step < 5; ++step) {
            const auto next = s.np_solve(1, p, phi, 0.0, 0.01);
            CHECK(mass_norm(disc, next) <= mass_norm(disc, p));
            p = next;
        }
    }
    SUBCASE("one free dof: scalar formula")
    {
        const auto small = generate_structured(StructuredKind::square, 2);
        const Discretization d2(small, 1);
        REQUIRE(d2.dof_map().num_free() == 1);
        const int centre = d2.dof_map().free_dofs()[0];
        // Hand assembly from the local matrices of the four squares.
        double a = 0.0, m = 0.0, kb = 0.0, load = 0.0;
        std::vector<double> psi(d2.dof_map().num_dofs(), 0.0);
        psi[centre] = 0.8;
        for (int e = 0; e < 4; ++e) {
            const auto pts = small.element_points(e);
            const auto sp = build_projectors(pts, 1);
            int j = 0;
            while (small.element(e)[j] != centre)
                ++j;
            Eigen::VectorXd local = Eigen::VectorXd::Zero(4);
            local[j] = 0.8;
            a += local_stiffness(sp)(j, j);
            m += local_mass(sp)(j, j);
            kb += local_coupling_b(sp, local, 1.0)(j, j);
            load += local_load(sp, [](double, double, double) { return 3.0; }, 0.0)[j];
        }
        ProblemData d;
        d.F[0].closure = [](double, double, double) { return 3.0; };
        SolverConfig c = config(0.05);
        c.q = {-1.5, 1.0};
        const PNPSolver s(d2, d, c);
        std::vector<double> prev(d2.dof_map().num_dofs(), 0.0);
        prev[centre] = 0.4;
        const auto p = s.np_solve(1, prev, psi, 0.05, 0.05);
        const double expected = (m * 0.4 / 0.05 + load) / (m / 0.05 + a - 1.5 * kb);
        CHECK(p[centre] == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("Gummel step and time loop")
{
    SUBCASE("zero data converges in one iteration to zero")
    {
        const auto mesh = generate_structured(StructuredKind::square, 4);
        const Discretization disc(mesh, 1);
        const PNPSolver s(disc, ProblemData{}, config(0.1));
        StepRecord rec;
        const auto next = s.gummel_step(s.initial_state(), 0.1, 1, &rec);
        CHECK(rec.gummel_iters == 1);
        for (double v : next.phi)
            CHECK(v == 0.0);
    }
    SUBCASE("manufactured case on squares n=8")
    {
        const auto mesh = generate_structured(StructuredKind::square, 8);
        const Discretization disc(mesh, 1);
        const ManufacturedCase mc;
        const double h = mesh_size(mesh);
        const PNPSolver s(disc, ProblemData::manufactured(mc), config(h * h));
        const auto init = s.initial_state();
        for (double v : init.p[0])
            CHECK(v == 0.0);
        for (double v : init.p[1])
            CHECK(v == 0.0);

        const auto run = s.run();
        CHECK(run.log.size() == 64);
        CHECK(run.state.t == 1.0);
        for (const auto& r : run.log) {
            CHECK(r.gummel_iters <= 20);
            CHECK(r.poisson_residual <= 1e-8);
            CHECK(r.np_residual[0] <= 1e-8);
            CHECK(r.np_residual[1] <= 1e-8);
        }
        // Dirichlet entries stay exactly zero.
        for (int d = 0; d < disc.dof_map().num_dofs(); ++d)
            if (disc.dof_map().is_dirichlet(d)) {
                CHECK(run.state.phi[d] == 0.0);
                CHECK(run.state.p[0][d] == 0.0);
            }

        // Re-entering the fixed point reproduces it.
        PNPState prev = init;
        for (int n = 0; n < 3; ++n)
            prev = s.gummel_step(prev, h * h, n + 1);
        const PNPState cur = s.gummel_step(prev, h * h, 4);
        const auto phi = s.poisson_solve(cur.p, cur.t, &cur.phi);
        double dphi = 0.0, dp = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i)
            dphi = std::max(dphi, std::abs(phi[i] - cur.phi[i]));
        const auto p1 = s.np_solve(1, prev.p[0], phi, cur.t, h * h, &cur.p[0]);
        for (std::size_t i = 0; i < p1.size(); ++i)
            dp = std::max(dp, std::abs(p1[i] - cur.p[0][i]));
        CHECK(dphi < 1e-9);
        CHECK(dp < 1e-9);

        // Identical inputs give identical logs.
        std::ostringstream a, b;
        write_step_log(a, run.log);
        write_step_log(b, s.run().log);
        CHECK(a.str() == b.str());
        CHECK(a.str().rfind("step,t,gummel_iters,poisson_residual,np1_residual,np2_residual\n", 0) == 0);
    }
    SUBCASE("T = tau gives exactly one step")
    {
        const auto mesh = generate_structured(StructuredKind::square, 4);
        const Discretization disc(mesh, 1);
        const PNPSolver s(disc, ProblemData::manufactured(ManufacturedCase()), config(0.25, 0.25));
        CHECK(s.run().log.size() == 1);
    }
    SUBCASE("Gummel failure is reported with the increment history")
    {
        const auto mesh = generate_structured(StructuredKind::square, 4);
        const Discretization disc(mesh, 1);
        SolverConfig c = config(0.1);
        c.gummel_max_iters = 1;
        c.gummel_tol = 1e-30;
        const PNPSolver s(disc, ProblemData::manufactured(ManufacturedCase()), c);
        try {
            s.gummel_step(s.initial_state(), 0.1, 1);
            FAIL("expected GummelNonconvergence");
        } catch (const GummelNonconvergence& g) {
            CHECK(g.step() == 1);
            CHECK(g.increments().size() == 1);
        }
    }
}

TEST_CASE("dissipativity probe over 50 steps")
{
    const auto mesh = generate_voronoi(64, 5, 11);
    const Discretization disc(mesh, 1);
    ProblemData d;
    d.drift = false;
    d.p0[0] = [](Point q) { return std::sin(pi * q.x) * std::sin(pi * q.y) + 0.3 * std::sin(5 * pi * q.x) * q.y; };
    d.p0[1] = [](Point q) { return q.x * (1 - q.x) * q.y * (1 - q.y); };
    const PNPSolver s(disc, d, config(0.02, 1.0));
    PNPState st = s.initial_state();
    for (int n = 0; n < 50; ++n) {
        const PNPState next = s.gummel_step(st, 0.02, n + 1);
        for (int i = 0; i < 2; ++i)
            CHECK(mass_norm(disc, next.p[i]) <= mass_norm(disc, st.p[i]));
        st = next;
    }
}
