#pragma once

#include "pnpvem/assembly.hpp"
#include "pnpvem/dof_map.hpp"
#include "pnpvem/linear_solvers.hpp"
#include "pnpvem/manufactured.hpp"
#include "pnpvem/mesh.hpp"
#include "pnpvem/sparse.hpp"
#include "pnpvem/vem_local.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <vector>

namespace pnpvem {

/// Mesh-level data that does not change in time: local spaces, the dof map and
/// the assembled stiffness A, mass M and charge-coupling matrix C, all on the
/// free dofs. C[r][c] = int (Pi0_{k-1} phi_c)(Pi0_{k-1} phi_r), so the charge
/// form of species i is -q_i C.
class Discretization
{
public:
    Discretization(const PolygonalMesh& mesh, int k, Exec exec = Exec::parallel);

    const PolygonalMesh& mesh() const { return *mesh_; }
    int order() const { return k_; }
    const std::vector<LocalSpace>& spaces() const { return spaces_; }
    const DofMap& dof_map() const { return map_; }
    const Assembler& assembler() const { return *assembler_; }
    const CsrMatrix& stiffness() const { return stiffness_; }
    const CsrMatrix& mass() const { return mass_; }
    const CsrMatrix& charge_coupling() const { return charge_; }

    /// Drift matrix for unit charge and potential psi (full-length dof vector).
    void drift_matrix(std::span<const double> psi, CsrMatrix& out, Exec exec = Exec::parallel) const;
    /// Free-dof load vector of g(t, .). A positive quadrature_order replaces the
    /// default element rule.
    std::vector<double> load(const SpaceTimeFunction& g, double t, Exec exec = Exec::parallel,
                             int quadrature_order = 0) const;
    /// Free-dof load vector of a time-independent s(x, y).
    std::vector<double> load(const std::function<double(double, double)>& s, Exec exec = Exec::parallel,
                             int quadrature_order = 0) const;

    /// Global dof vector of a smooth field.
    std::vector<double> interpolate(const std::function<double(Point)>& field) const;

private:
    const PolygonalMesh* mesh_;
    int k_;
    std::vector<LocalSpace> spaces_;
    DofMap map_;
    std::unique_ptr<Assembler> assembler_;
    CsrMatrix stiffness_;
    CsrMatrix mass_;
    CsrMatrix charge_;
};

/// Preconditioner of the Krylov solves. `factorized` uses a sparse Cholesky of the
/// stiffness for Poisson and of M / tau + A for Nernst-Planck, computed once per
/// run (per distinct tau) and reused across steps and Gummel iterations.
enum class Preconditioning { jacobi, factorized };

struct SolverConfig
{
    double tau = 0.01;
    double T = 1.0;
    double gummel_tol = 1e-10;
    int gummel_max_iters = 50;
    double linear_tol = 1e-12;
    std::array<double, 2> q{1.0, -1.0};
    int load_quadrature_order = 0;   // 0: the element's default rule
    Preconditioning preconditioning = Preconditioning::factorized;
    Exec exec = Exec::parallel;
};

/// Source term: separable terms are loaded once and recombined per step; a
/// closure is reassembled at every step.
struct Source
{
    SeparableSource separable;
    SpaceTimeFunction closure;

    bool empty() const { return separable.terms.empty() && !closure; }
};

struct ProblemData
{
    Source f;
    std::array<Source, 2> F;
    std::function<double(Point)> phi0;
    std::array<std::function<double(Point)>, 2> p0;
    /// Include the drift form b_i; off only for decoupled diagnostics.
    bool drift = true;

    /// Data of the manufactured solution (zero initial state).
    static ProblemData manufactured(const ManufacturedCase& mc);
};

/// Full-length global dof vectors; Dirichlet entries are exactly zero.
struct PNPState
{
    std::vector<double> phi;
    std::array<std::vector<double>, 2> p;
    double t = 0.0;
};

struct StepRecord
{
    int step = 0;
    double t = 0.0;
    int gummel_iters = 0;
    double poisson_residual = 0.0;
    std::array<double, 2> np_residual{};
    std::vector<double> increments;
};

struct RunResult
{
    PNPState state;
    std::vector<StepRecord> log;
};

/// Time grid for [0, T] with nominal step tau: N = round(T / tau) equal steps
/// when T / tau is integral within 1e-9, otherwise steps of tau with a shorter
/// last one.
std::vector<double> time_steps(double T, double tau);

/// Backward Euler in time with Gummel decoupling at each step:
/// phi from the Poisson equation with the current densities, then each density
/// from its linearized Nernst-Planck equation with that phi, until the sup-norm
/// change of the densities falls below gummel_tol.
class PNPSolver
{
public:
    PNPSolver(const Discretization& disc, ProblemData data, SolverConfig config);

    const SolverConfig& config() const { return config_; }
    PNPState initial_state() const;

    /// Potential for densities p (full vectors) at time t.
    std::vector<double> poisson_solve(const std::array<std::vector<double>, 2>& p, double t,
                                      const std::vector<double>* guess = nullptr) const;
    /// Density of species i (1 or 2) at t = t_prev + tau given phi.
    std::vector<double> np_solve(int species, const std::vector<double>& p_prev, const std::vector<double>& phi,
                                 double t, double tau, const std::vector<double>* guess = nullptr) const;

    /// One time step from prev; throws GummelNonconvergence.
    PNPState gummel_step(const PNPState& prev, double tau, int step, StepRecord* record = nullptr) const;

    /// Relative free-dof residuals of the Poisson equation and of both NP equations
    /// for the triple in `state`, which was reached from `prev` in one step of tau.
    std::array<double, 3> residuals(const PNPState& prev, const PNPState& state, double tau) const;

    RunResult run() const;

private:
    std::vector<double> source_load(const Source& s, const std::vector<std::vector<double>>& cache,
                                    double t) const;
    std::vector<double> poisson_rhs(const std::array<std::vector<double>, 2>& p, double t) const;
    std::vector<double> np_rhs(int species, const std::vector<double>& p_prev, double t, double tau) const;
    void np_matrix(int species, const CsrMatrix& drift, double tau, CsrMatrix& out) const;
    SolverOptions solver_options(const Preconditioner* pc) const;
    std::shared_ptr<const Preconditioner> np_preconditioner(double tau) const;

    const Discretization* disc_;
    ProblemData data_;
    SolverConfig config_;
    std::vector<std::vector<double>> f_terms_;
    std::array<std::vector<std::vector<double>>, 2> F_terms_;

    std::shared_ptr<const Preconditioner> poisson_pc_;
    struct NpCache
    {
        std::mutex lock;
        double tau = 0.0;
        std::shared_ptr<const Preconditioner> pc;
    };
    std::shared_ptr<NpCache> np_cache_ = std::make_shared<NpCache>();
};

/// CSV with header step,t,gummel_iters,poisson_residual,np1_residual,np2_residual.
void write_step_log(std::ostream& os, const std::vector<StepRecord>& log);

/// Mass-matrix norm sqrt(p^T M p) of a full-length vector.
double mass_norm(const Discretization& disc, const std::vector<double>& p);

} // namespace pnpvem
