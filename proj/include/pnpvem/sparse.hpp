#pragma once

#include <span>
#include <vector>

namespace pnpvem {

/// Kernel variant: the OpenMP path is the default, the serial one is kept as a
/// reference for tests and benchmarks.
enum class Exec { serial, parallel };

/// Square matrix in compressed row storage with sorted column indices.
struct CsrMatrix
{
    int n = 0;
    std::vector<int> row_ptr{0};
    std::vector<int> col;
    std::vector<double> val;

    int nnz() const { return static_cast<int>(col.size()); }
    /// Position of (r, c) in val, or -1 when outside the pattern.
    int find(int r, int c) const;
    double at(int r, int c) const;
    std::vector<double> diagonal() const;

    /// Same pattern, values set to zero.
    CsrMatrix zeros_like() const;
};

/// Pattern from per-row column sets (columns need not be sorted or unique).
CsrMatrix csr_from_pattern(int n, std::vector<std::vector<int>> rows);

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y, Exec exec = Exec::parallel);
double dot(std::span<const double> x, std::span<const double> y, Exec exec = Exec::parallel);
/// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y, Exec exec = Exec::parallel);
double norm2(std::span<const double> x, Exec exec = Exec::parallel);

/// out.val = sum_i coeffs[i] * mats[i].val; all matrices share one pattern.
void combine(std::span<const CsrMatrix* const> mats, std::span<const double> coeffs, CsrMatrix& out,
             Exec exec = Exec::parallel);

} // namespace pnpvem
