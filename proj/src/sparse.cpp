#include "pnpvem/sparse.hpp"

#include "pnpvem/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pnpvem {

int CsrMatrix::find(int r, int c) const
{
    const auto first = col.begin() + row_ptr[r];
    const auto last = col.begin() + row_ptr[r + 1];
    const auto it = std::lower_bound(first, last, c);
    return it != last && *it == c ? static_cast<int>(it - col.begin()) : -1;
}

double CsrMatrix::at(int r, int c) const
{
    const int p = find(r, c);
    return p < 0 ? 0.0 : val[p];
}

std::vector<double> CsrMatrix::diagonal() const
{
    std::vector<double> d(n, 0.0);
    for (int r = 0; r < n; ++r)
        d[r] = at(r, r);
    return d;
}

CsrMatrix CsrMatrix::zeros_like() const
{
    CsrMatrix z = *this;
    std::fill(z.val.begin(), z.val.end(), 0.0);
    return z;
}

CsrMatrix csr_from_pattern(int n, std::vector<std::vector<int>> rows)
{
    if (static_cast<int>(rows.size()) != n)
        throw Error("csr_from_pattern: row count mismatch");
    CsrMatrix a;
    a.n = n;
    a.row_ptr.assign(n + 1, 0);
    for (int r = 0; r < n; ++r) {
        auto& cols = rows[r];
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        for (int c : cols)
            if (c < 0 || c >= n)
                throw Error("csr_from_pattern: column index out of range");
        a.col.insert(a.col.end(), cols.begin(), cols.end());
        a.row_ptr[r + 1] = static_cast<int>(a.col.size());
    }
    a.val.assign(a.col.size(), 0.0);
    return a;
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y, Exec exec)
{
    const int* rp = a.row_ptr.data();
    const int* ci = a.col.data();
    const double* v = a.val.data();
    if (exec == Exec::serial) {
        for (int r = 0; r < a.n; ++r) {
            double s = 0.0;
            for (int p = rp[r]; p < rp[r + 1]; ++p)
                s += v[p] * x[ci[p]];
            y[r] = s;
        }
        return;
    }
#pragma omp parallel for schedule(static)
    for (int r = 0; r < a.n; ++r) {
        double s = 0.0;
        for (int p = rp[r]; p < rp[r + 1]; ++p)
            s += v[p] * x[ci[p]];
        y[r] = s;
    }
}

double dot(std::span<const double> x, std::span<const double> y, Exec exec)
{
    const long n = static_cast<long>(x.size());
    double s = 0.0;
    if (exec == Exec::serial) {
        for (long i = 0; i < n; ++i)
            s += x[i] * y[i];
        return s;
    }
#pragma omp parallel for reduction(+ : s) schedule(static)
    for (long i = 0; i < n; ++i)
        s += x[i] * y[i];
    return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y, Exec exec)
{
    const long n = static_cast<long>(x.size());
    if (exec == Exec::serial) {
        for (long i = 0; i < n; ++i)
            y[i] += alpha * x[i];
        return;
    }
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        y[i] += alpha * x[i];
}

double norm2(std::span<const double> x, Exec exec)
{
    return std::sqrt(dot(x, x, exec));
}

void combine(std::span<const CsrMatrix* const> mats, std::span<const double> coeffs, CsrMatrix& out,
             Exec exec)
{
    const long nnz = static_cast<long>(out.val.size());
    for (const CsrMatrix* m : mats)
        if (static_cast<long>(m->val.size()) != nnz)
            throw Error("combine: pattern mismatch");
    auto body = [&](long p) {
        double s = 0.0;
        for (std::size_t i = 0; i < mats.size(); ++i)
            s += coeffs[i] * mats[i]->val[p];
        out.val[p] = s;
    };
    if (exec == Exec::serial) {
        for (long p = 0; p < nnz; ++p)
            body(p);
        return;
    }
#pragma omp parallel for schedule(static)
    for (long p = 0; p < nnz; ++p)
        body(p);
}

} // namespace pnpvem
