#pragma once

#include "pnpvem/dof_map.hpp"
#include "pnpvem/sparse.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace pnpvem {

/// Fills the local matrix (or vector) of element e. Called concurrently for
/// different elements under Exec::parallel.
using ElementMatrixFn = std::function<void(int e, Eigen::MatrixXd& local)>;
using ElementVectorFn = std::function<void(int e, Eigen::VectorXd& local)>;

/// Scatter-add of local contributions into free-dof storage. Dirichlet rows and
/// columns are dropped, which for homogeneous data is symmetric elimination.
///
/// The sparsity pattern and the position of every local entry in it are fixed at
/// construction. Elements are greedily colored so that no two elements of one
/// color share a dof; colors are processed in turn with the elements of a color
/// in parallel. The summation order then depends only on the coloring, so results
/// do not change with the thread count (they may differ from the serial path in
/// the last bits).
class Assembler
{
public:
    explicit Assembler(const DofMap& map);

    const DofMap& dof_map() const { return *map_; }
    const CsrMatrix& pattern() const { return pattern_; }
    int num_colors() const { return static_cast<int>(colors_.size()); }
    const std::vector<std::vector<int>>& colors() const { return colors_; }

    CsrMatrix assemble_matrix(const ElementMatrixFn& fn, Exec exec = Exec::parallel) const;
    /// Reassemble into existing storage with this assembler's pattern.
    void assemble_matrix(const ElementMatrixFn& fn, CsrMatrix& out, Exec exec = Exec::parallel) const;
    /// Free-dof vector.
    std::vector<double> assemble_vector(const ElementVectorFn& fn, Exec exec = Exec::parallel) const;

private:
    void scatter_matrix(int e, const Eigen::MatrixXd& local, CsrMatrix& out) const;

    const DofMap* map_;
    CsrMatrix pattern_;
    std::vector<int> plan_offsets_{0};
    std::vector<int> plan_;
    std::vector<std::vector<int>> colors_;
};

} // namespace pnpvem
