#pragma once

#include "pnpvem/sparse.hpp"

#include <memory>
#include <span>

namespace pnpvem {

/// z = P^{-1} r for an approximation P of the system matrix.
class Preconditioner
{
public:
    virtual ~Preconditioner() = default;
    virtual void apply(std::span<const double> r, std::span<double> z) const = 0;
};

/// Sparse Cholesky factorization (AMD ordering) of a symmetric positive definite matrix.
class FactorizedPreconditioner final : public Preconditioner
{
public:
    explicit FactorizedPreconditioner(const CsrMatrix& spd);
    ~FactorizedPreconditioner() override;
    void apply(std::span<const double> r, std::span<double> z) const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct SolverOptions
{
    double tol = 1e-12;       // relative residual ||b - Ax|| / ||b||
    int max_iterations = 0;   // 0: 10 n
    Exec exec = Exec::parallel;
    bool dense_fallback = true;
    int dense_limit = 2000;   // fallback only below this many unknowns
    const Preconditioner* preconditioner = nullptr;   // null: Jacobi
};

struct SolveStats
{
    int iterations = 0;
    double residual = 0.0;    // true relative residual of the returned x
    bool converged = false;
    bool used_dense = false;
};

/// Preconditioned conjugate gradients; x holds the initial guess on entry.
SolveStats conjugate_gradient(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                              const SolverOptions& opt);

/// BiCGStab with right preconditioning; x holds the initial guess.
SolveStats bicgstab(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                    const SolverOptions& opt);

/// LU with partial pivoting on the densified matrix.
SolveStats dense_solve(const CsrMatrix& a, std::span<const double> b, std::span<double> x);

/// CG for symmetric systems, BiCGStab otherwise; on failure a dense solve for small
/// systems, else SolverFailure with the final residual.
SolveStats solve_linear(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                        bool symmetric, const SolverOptions& opt = {});

/// ||b - Ax|| / ||b|| (0 when b = 0 and Ax = 0).
double relative_residual(const CsrMatrix& a, std::span<const double> b, std::span<const double> x,
                         Exec exec = Exec::parallel);

} // namespace pnpvem
