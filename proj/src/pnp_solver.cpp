#include "pnpvem/pnp_solver.hpp"

#include "pnpvem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>

namespace pnpvem {

namespace {

template <class Body>
void for_each_element(int n, Exec exec, Body&& body)
{
    if (exec == Exec::serial) {
        for (int e = 0; e < n; ++e)
            body(e);
        return;
    }
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 16)
    for (int e = 0; e < n; ++e) {
        try {
            body(e);
        } catch (...) {
#pragma omp critical(pnpvem_element_error)
            if (!error)
                error = std::current_exception();
        }
    }
    if (error)
        std::rethrow_exception(error);
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

Discretization::Discretization(const PolygonalMesh& mesh, int k, Exec exec) : mesh_(&mesh), k_(k)
{
    spaces_.resize(mesh.num_elements());
    for_each_element(mesh.num_elements(), exec, [&](int e) {
        const auto pts = mesh.element_points(e);
        spaces_[e] = build_projectors(pts, k, e);
    });
    map_ = build_dof_map(mesh, k);
    assembler_ = std::make_unique<Assembler>(map_);
    stiffness_ = assembler_->assemble_matrix(
        [&](int e, Eigen::MatrixXd& m) { m = local_stiffness(spaces_[e]); }, exec);
    mass_ = assembler_->assemble_matrix([&](int e, Eigen::MatrixXd& m) { m = local_mass(spaces_[e]); }, exec);
    charge_ = assembler_->assemble_matrix(
        [&](int e, Eigen::MatrixXd& m) { m = local_coupling_btilde(spaces_[e], -1.0, 0.0)[0]; }, exec);
}

void Discretization::drift_matrix(std::span<const double> psi, CsrMatrix& out, Exec exec) const
{
    assembler_->assemble_matrix(
        [&](int e, Eigen::MatrixXd& m) {
            Eigen::VectorXd local(spaces_[e].num_dofs());
            gather(map_, e, psi, {local.data(), static_cast<std::size_t>(local.size())});
            m = local_coupling_b(spaces_[e], local, 1.0);
        },
        out, exec);
}

std::vector<double> Discretization::load(const SpaceTimeFunction& g, double t, Exec exec,
                                         int quadrature_order) const
{
    return assembler_->assemble_vector(
        [&](int e, Eigen::VectorXd& v) { v = local_load(spaces_[e], g, t, quadrature_order); }, exec);
}

std::vector<double> Discretization::load(const std::function<double(double, double)>& s, Exec exec,
                                         int quadrature_order) const
{
    return load([&s](double, double x, double y) { return s(x, y); }, 0.0, exec, quadrature_order);
}

std::vector<double> Discretization::interpolate(const std::function<double(Point)>& field) const
{
    auto v = dof_interpolate(*mesh_, map_, spaces_, field);
    for (int d = 0; d < map_.num_dofs(); ++d)
        if (map_.is_dirichlet(d))
            v[d] = 0.0;
    return v;
}

ProblemData ProblemData::manufactured(const ManufacturedCase& mc)
{
    ProblemData d;
    d.f.separable = mc.separable_f();
    d.F[0].separable = mc.separable_F(1);
    d.F[1].separable = mc.separable_F(2);
    d.phi0 = [mc](Point p) { return mc.value(Field::phi, 0.0, p.x, p.y); };
    d.p0[0] = [mc](Point p) { return mc.value(Field::p1, 0.0, p.x, p.y); };
    d.p0[1] = [mc](Point p) { return mc.value(Field::p2, 0.0, p.x, p.y); };
    return d;
}

std::vector<double> time_steps(double T, double tau)
{
    if (!(tau > 0.0) || !(T > 0.0))
        throw Error("time grid needs T > 0 and tau > 0");
    const double ratio = T / tau;
    const double n = std::round(ratio);
    if (n >= 1.0 && std::abs(ratio - n) <= 1e-9 * std::max(1.0, ratio))
        return std::vector<double>(static_cast<std::size_t>(n), T / n);
    const auto full = static_cast<std::size_t>(std::floor(ratio));
    std::vector<double> steps(full, tau);
    steps.push_back(T - full * tau);
    return steps;
}

PNPSolver::PNPSolver(const Discretization& disc, ProblemData data, SolverConfig config)
    : disc_(&disc), data_(std::move(data)), config_(config)
{
    if (!(config_.tau > 0.0) || !(config_.gummel_tol > 0.0) || !(config_.linear_tol > 0.0))
        throw Error("solver config needs tau > 0 and positive tolerances");
    for (const auto& term : data_.f.separable.terms)
        f_terms_.push_back(disc.load(term.space, config_.exec, config_.load_quadrature_order));
    for (int i = 0; i < 2; ++i)
        for (const auto& term : data_.F[i].separable.terms)
            F_terms_[i].push_back(disc.load(term.space, config_.exec, config_.load_quadrature_order));
    if (config_.preconditioning == Preconditioning::factorized && disc.dof_map().num_free() > 0)
        poisson_pc_ = std::make_shared<FactorizedPreconditioner>(disc.stiffness());
}

SolverOptions PNPSolver::solver_options(const Preconditioner* pc) const
{
    SolverOptions o;
    o.tol = config_.linear_tol;
    o.exec = config_.exec;
    o.preconditioner = pc;
    return o;
}

std::shared_ptr<const Preconditioner> PNPSolver::np_preconditioner(double tau) const
{
    if (config_.preconditioning != Preconditioning::factorized || disc_->dof_map().num_free() == 0)
        return nullptr;
    std::lock_guard guard(np_cache_->lock);
    if (!np_cache_->pc || np_cache_->tau != tau) {
        CsrMatrix sym = disc_->mass();
        const CsrMatrix* mats[] = {&disc_->mass(), &disc_->stiffness()};
        const double coeffs[] = {1.0 / tau, 1.0};
        combine(mats, coeffs, sym, config_.exec);
        np_cache_->pc = std::make_shared<FactorizedPreconditioner>(sym);
        np_cache_->tau = tau;
    }
    return np_cache_->pc;
}

PNPState PNPSolver::initial_state() const
{
    PNPState s;
    const int n = disc_->dof_map().num_dofs();
    auto init = [&](const std::function<double(Point)>& f) {
        return f ? disc_->interpolate(f) : std::vector<double>(n, 0.0);
    };
    s.phi = init(data_.phi0);
    s.p[0] = init(data_.p0[0]);
    s.p[1] = init(data_.p0[1]);
    return s;
}

std::vector<double> PNPSolver::source_load(const Source& s, const std::vector<std::vector<double>>& cache,
                                           double t) const
{
    std::vector<double> out(disc_->dof_map().num_free(), 0.0);
    for (std::size_t j = 0; j < cache.size(); ++j)
        axpy(s.separable.terms[j].time(t), cache[j], out, config_.exec);
    if (s.closure) {
        const auto extra = disc_->load(s.closure, t, config_.exec, config_.load_quadrature_order);
        axpy(1.0, extra, out, config_.exec);
    }
    return out;
}

std::vector<double> PNPSolver::poisson_rhs(const std::array<std::vector<double>, 2>& p, double t) const
{
    const auto& map = disc_->dof_map();
    auto rhs = source_load(data_.f, f_terms_, t);
    std::vector<double> charge_density(map.num_free());
    for (int i = 0; i < map.num_free(); ++i) {
        const int d = map.free_dofs()[i];
        charge_density[i] = config_.q[0] * p[0][d] + config_.q[1] * p[1][d];
    }
    std::vector<double> coupled(map.num_free());
    spmv(disc_->charge_coupling(), charge_density, coupled, config_.exec);
    axpy(1.0, coupled, rhs, config_.exec);
    return rhs;
}

std::vector<double> PNPSolver::np_rhs(int species, const std::vector<double>& p_prev, double t, double tau) const
{
    auto rhs = source_load(data_.F[species - 1], F_terms_[species - 1], t);
    const auto prev = restrict_free(disc_->dof_map(), p_prev);
    std::vector<double> mp(prev.size());
    spmv(disc_->mass(), prev, mp, config_.exec);
    axpy(1.0 / tau, mp, rhs, config_.exec);
    return rhs;
}

void PNPSolver::np_matrix(int species, const CsrMatrix& drift, double tau, CsrMatrix& out) const
{
    if (out.val.size() != disc_->mass().val.size())
        out = disc_->mass();
    if (data_.drift) {
        const CsrMatrix* mats[] = {&disc_->mass(), &disc_->stiffness(), &drift};
        const double coeffs[] = {1.0 / tau, 1.0, config_.q[species - 1]};
        combine(mats, coeffs, out, config_.exec);
    } else {
        const CsrMatrix* mats[] = {&disc_->mass(), &disc_->stiffness()};
        const double coeffs[] = {1.0 / tau, 1.0};
        combine(mats, coeffs, out, config_.exec);
    }
}

std::vector<double> PNPSolver::poisson_solve(const std::array<std::vector<double>, 2>& p, double t,
                                             const std::vector<double>* guess) const
{
    const auto& map = disc_->dof_map();
    const auto rhs = poisson_rhs(p, t);
    auto x = guess ? restrict_free(map, *guess) : std::vector<double>(map.num_free(), 0.0);
    solve_linear(disc_->stiffness(), rhs, x, true, solver_options(poisson_pc_.get()));
    return expand_free(map, x);
}

std::vector<double> PNPSolver::np_solve(int species, const std::vector<double>& p_prev,
                                        const std::vector<double>& phi, double t, double tau,
                                        const std::vector<double>* guess) const
{
    if (species != 1 && species != 2)
        throw Error("species must be 1 or 2");
    const auto& map = disc_->dof_map();
    CsrMatrix drift = disc_->assembler().pattern();
    if (data_.drift)
        disc_->drift_matrix(phi, drift, config_.exec);
    CsrMatrix s;
    np_matrix(species, drift, tau, s);
    const auto rhs = np_rhs(species, p_prev, t, tau);
    auto x = guess ? restrict_free(map, *guess) : restrict_free(map, p_prev);
    const auto pc = np_preconditioner(tau);
    solve_linear(s, rhs, x, !data_.drift, solver_options(pc.get()));
    return expand_free(map, x);
}

PNPState PNPSolver::gummel_step(const PNPState& prev, double tau, int step, StepRecord* record) const
{
    const auto& map = disc_->dof_map();
    const double t = prev.t + tau;
    const auto pc = np_preconditioner(tau);
    const auto opt = solver_options(pc.get());

    PNPState cur = prev;
    cur.t = t;
    auto p_free = std::array{restrict_free(map, prev.p[0]), restrict_free(map, prev.p[1])};
    const std::array<std::vector<double>, 2> rhs{np_rhs(1, prev.p[0], t, tau), np_rhs(2, prev.p[1], t, tau)};
    CsrMatrix drift = disc_->assembler().pattern();
    CsrMatrix system;
    std::vector<double> increments;

    for (int m = 1; m <= config_.gummel_max_iters; ++m) {
        cur.phi = poisson_solve(cur.p, t, &cur.phi);
        if (data_.drift)
            disc_->drift_matrix(cur.phi, drift, config_.exec);
        double inc = 0.0;
        for (int i = 0; i < 2; ++i) {
            np_matrix(i + 1, drift, tau, system);
            auto x = p_free[i];
            solve_linear(system, rhs[i], x, !data_.drift, opt);
            inc = std::max(inc, sup_diff(x, p_free[i]));
            p_free[i] = std::move(x);
            cur.p[i] = expand_free(map, p_free[i]);
        }
        increments.push_back(inc);
        if (inc < config_.gummel_tol) {
            if (record) {
                const auto r = residuals(prev, cur, tau);
                record->step = step;
                record->t = t;
                record->gummel_iters = m;
                record->poisson_residual = r[0];
                record->np_residual = {r[1], r[2]};
                record->increments = increments;
            }
            return cur;
        }
    }
    throw GummelNonconvergence(step, increments);
}

std::array<double, 3> PNPSolver::residuals(const PNPState& prev, const PNPState& state, double tau) const
{
    const auto& map = disc_->dof_map();
    std::array<double, 3> out{};
    out[0] = relative_residual(disc_->stiffness(), poisson_rhs(state.p, state.t), restrict_free(map, state.phi),
                               config_.exec);
    CsrMatrix drift = disc_->assembler().pattern();
    if (data_.drift)
        disc_->drift_matrix(state.phi, drift, config_.exec);
    CsrMatrix system;
    for (int i = 0; i < 2; ++i) {
        np_matrix(i + 1, drift, tau, system);
        out[i + 1] = relative_residual(system, np_rhs(i + 1, prev.p[i], state.t, tau),
                                       restrict_free(map, state.p[i]), config_.exec);
    }
    return out;
}

RunResult PNPSolver::run() const
{
    RunResult result;
    PNPState state = initial_state();
    const auto steps = time_steps(config_.T, config_.tau);
    result.log.reserve(steps.size());
    for (std::size_t n = 0; n < steps.size(); ++n) {
        StepRecord rec;
        PNPState next = gummel_step(state, steps[n], static_cast<int>(n + 1), &rec);
        if (n + 1 == steps.size())
            next.t = config_.T;
        state = std::move(next);
        result.log.push_back(std::move(rec));
    }
    result.state = std::move(state);
    return result;
}

void write_step_log(std::ostream& os, const std::vector<StepRecord>& log)
{
    os << "step,t,gummel_iters,poisson_residual,np1_residual,np2_residual\n";
    const auto old = os.precision(17);
    for (const auto& r : log)
        os << r.step << ',' << r.t << ',' << r.gummel_iters << ',' << r.poisson_residual << ','
           << r.np_residual[0] << ',' << r.np_residual[1] << '\n';
    os.precision(old);
}

double mass_norm(const Discretization& disc, const std::vector<double>& p)
{
    const auto x = restrict_free(disc.dof_map(), p);
    std::vector<double> mx(x.size());
    spmv(disc.mass(), x, mx);
    return std::sqrt(std::max(0.0, dot(x, mx)));
}

} // namespace pnpvem
