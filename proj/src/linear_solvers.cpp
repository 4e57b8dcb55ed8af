#include "pnpvem/linear_solvers.hpp"

#include "pnpvem/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <vector>

namespace pnpvem {

namespace {

using Vec = std::vector<double>;

std::vector<double> inverse_diagonal(const CsrMatrix& a)
{
    auto d = a.diagonal();
    for (double& v : d)
        v = v != 0.0 ? 1.0 / v : 1.0;
    return d;
}

/// opt.preconditioner, or the inverse diagonal of a.
class Precondition
{
public:
    Precondition(const CsrMatrix& a, const SolverOptions& opt) : pc_(opt.preconditioner)
    {
        if (!pc_)
            dinv_ = inverse_diagonal(a);
    }
    void operator()(std::span<const double> r, std::span<double> z) const
    {
        if (pc_)
            pc_->apply(r, z);
        else
            for (std::size_t i = 0; i < r.size(); ++i)
                z[i] = dinv_[i] * r[i];
    }

private:
    const Preconditioner* pc_;
    std::vector<double> dinv_;
};

void residual(const CsrMatrix& a, std::span<const double> b, std::span<const double> x, Vec& r, Exec exec)
{
    spmv(a, x, r, exec);
    for (int i = 0; i < a.n; ++i)
        r[i] = b[i] - r[i];
}

/// Outer loop shared by the Krylov methods: run `inner` until the true residual
/// meets the tolerance, restarting from the current iterate when the recursive
/// residual has drifted from the true one.
template <class Inner>
SolveStats with_restarts(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                         const SolverOptions& opt, Inner&& inner)
{
    SolveStats st;
    const double bnorm = norm2(b, opt.exec);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        st.converged = true;
        return st;
    }
    const int budget = opt.max_iterations > 0 ? opt.max_iterations : 10 * std::max(a.n, 1);
    for (int restart = 0; restart < 4 && st.iterations < budget; ++restart) {
        const bool broke_down = !inner(budget - st.iterations, bnorm, st.iterations);
        st.residual = relative_residual(a, b, x, opt.exec);
        if (st.residual <= opt.tol) {
            st.converged = true;
            return st;
        }
        if (broke_down && restart > 0)
            break;
    }
    return st;
}

} // namespace

struct FactorizedPreconditioner::Impl
{
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
};

FactorizedPreconditioner::FactorizedPreconditioner(const CsrMatrix& spd) : impl_(std::make_unique<Impl>())
{
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(spd.val.size());
    for (int r = 0; r < spd.n; ++r)
        for (int p = spd.row_ptr[r]; p < spd.row_ptr[r + 1]; ++p)
            t.emplace_back(r, spd.col[p], spd.val[p]);
    Eigen::SparseMatrix<double> m(spd.n, spd.n);
    m.setFromTriplets(t.begin(), t.end());
    impl_->llt.compute(m);
    if (impl_->llt.info() != Eigen::Success)
        throw Error("factorized preconditioner: matrix is not positive definite");
}

FactorizedPreconditioner::~FactorizedPreconditioner() = default;

void FactorizedPreconditioner::apply(std::span<const double> r, std::span<double> z) const
{
    const Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(r.size()));
    Eigen::Map<Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size())) = impl_->llt.solve(rv);
}

double relative_residual(const CsrMatrix& a, std::span<const double> b, std::span<const double> x, Exec exec)
{
    Vec r(a.n);
    residual(a, b, x, r, exec);
    const double bn = norm2(b, exec), rn = norm2(r, exec);
    return bn > 0.0 ? rn / bn : rn;
}

SolveStats conjugate_gradient(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                              const SolverOptions& opt)
{
    const int n = a.n;
    const Precondition precond(a, opt);
    Vec r(n), z(n), p(n), q(n);
    return with_restarts(a, b, x, opt, [&](int budget, double bnorm, int& iters) {
        residual(a, b, x, r, opt.exec);
        precond(r, z);
        p = z;
        double rz = dot(r, z, opt.exec);
        for (int it = 0; it < budget; ++it) {
            if (norm2(r, opt.exec) <= 0.5 * opt.tol * bnorm)
                return true;
            spmv(a, p, q, opt.exec);
            const double pq = dot(p, q, opt.exec);
            if (!(pq > 0.0))
                return false;
            const double alpha = rz / pq;
            axpy(alpha, p, x, opt.exec);
            axpy(-alpha, q, r, opt.exec);
            precond(r, z);
            const double rz_new = dot(r, z, opt.exec);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (int i = 0; i < n; ++i)
                p[i] = z[i] + beta * p[i];
            ++iters;
        }
        return true;
    });
}

SolveStats bicgstab(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                    const SolverOptions& opt)
{
    const int n = a.n;
    const Precondition precond(a, opt);
    Vec r(n), rhat(n), p(n), v(n), s(n), t(n), phat(n), shat(n);
    return with_restarts(a, b, x, opt, [&](int budget, double bnorm, int& iters) {
        residual(a, b, x, r, opt.exec);
        rhat = r;
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        double rho = 1.0, alpha = 1.0, omega = 1.0;
        const double target = 0.5 * opt.tol * bnorm;
        for (int it = 0; it < budget; ++it) {
            if (norm2(r, opt.exec) <= target)
                return true;
            const double rho_new = dot(rhat, r, opt.exec);
            if (rho_new == 0.0 || omega == 0.0)
                return false;
            const double beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for (int i = 0; i < n; ++i)
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            precond(p, phat);
            spmv(a, phat, v, opt.exec);
            const double rv = dot(rhat, v, opt.exec);
            if (rv == 0.0)
                return false;
            alpha = rho / rv;
            for (int i = 0; i < n; ++i)
                s[i] = r[i] - alpha * v[i];
            ++iters;
            if (norm2(s, opt.exec) <= target) {
                axpy(alpha, phat, x, opt.exec);
                return true;
            }
            precond(s, shat);
            spmv(a, shat, t, opt.exec);
            const double tt = dot(t, t, opt.exec);
            if (tt == 0.0)
                return false;
            omega = dot(t, s, opt.exec) / tt;
            for (int i = 0; i < n; ++i) {
                x[i] += alpha * phat[i] + omega * shat[i];
                r[i] = s[i] - omega * t[i];
            }
        }
        return true;
    });
}

SolveStats dense_solve(const CsrMatrix& a, std::span<const double> b, std::span<double> x)
{
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a.n, a.n);
    for (int r = 0; r < a.n; ++r)
        for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p)
            d(r, a.col[p]) = a.val[p];
    const Eigen::Map<const Eigen::VectorXd> bv(b.data(), a.n);
    Eigen::Map<Eigen::VectorXd>(x.data(), a.n) = d.partialPivLu().solve(bv);
    SolveStats st;
    st.used_dense = true;
    st.residual = relative_residual(a, b, x, Exec::serial);
    st.converged = std::isfinite(st.residual);
    return st;
}

SolveStats solve_linear(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                        bool symmetric, const SolverOptions& opt)
{
    if (static_cast<int>(b.size()) != a.n || static_cast<int>(x.size()) != a.n)
        throw Error("solve_linear: size mismatch");
    if (a.n == 0)
        return {0, 0.0, true, false};
    SolveStats st = symmetric ? conjugate_gradient(a, b, x, opt) : bicgstab(a, b, x, opt);
    if (st.converged)
        return st;
    if (opt.dense_fallback && a.n < opt.dense_limit) {
        const int iters = st.iterations;
        st = dense_solve(a, b, x);
        st.iterations = iters;
        if (st.converged && st.residual <= std::max(opt.tol, 1e-13))
            return st;
    }
    throw SolverFailure(symmetric ? "conjugate gradient failed" : "BiCGStab failed", st.residual,
                        st.iterations);
}

} // namespace pnpvem
