#include "pnpvem/assembly.hpp"

#include "pnpvem/errors.hpp"

#include <algorithm>
#include <exception>

namespace pnpvem {

namespace {

/// Run body(i) for i in group in parallel; the first exception is rethrown.
template <class Local, class Body>
void parallel_over(const std::vector<int>& group, Body&& body)
{
    const int n = static_cast<int>(group.size());
    std::exception_ptr error;
#pragma omp parallel
    {
        Local local;
#pragma omp for schedule(dynamic, 16)
        for (int i = 0; i < n; ++i) {
            try {
                body(group[i], local);
            } catch (...) {
#pragma omp critical(pnpvem_assembly_error)
                if (!error)
                    error = std::current_exception();
            }
        }
    }
    if (error)
        std::rethrow_exception(error);
}

} // namespace

Assembler::Assembler(const DofMap& map) : map_(&map)
{
    const int ne = map.num_elements();
    std::vector<std::vector<int>> rows(map.num_free());
    for (int e = 0; e < ne; ++e) {
        const auto dofs = map.element_dofs(e);
        for (int r : dofs) {
            const int fr = map.free_index(r);
            if (fr < 0)
                continue;
            for (int c : dofs)
                if (const int fc = map.free_index(c); fc >= 0)
                    rows[fr].push_back(fc);
        }
    }
    pattern_ = csr_from_pattern(map.num_free(), std::move(rows));

    for (int e = 0; e < ne; ++e) {
        const auto dofs = map.element_dofs(e);
        for (int r : dofs)
            for (int c : dofs) {
                const int fr = map.free_index(r), fc = map.free_index(c);
                plan_.push_back(fr < 0 || fc < 0 ? -1 : pattern_.find(fr, fc));
            }
        plan_offsets_.push_back(static_cast<int>(plan_.size()));
    }

    // Greedy coloring on the element-dof incidence.
    std::vector<std::vector<int>> elements_of_dof(map.num_dofs());
    for (int e = 0; e < ne; ++e)
        for (int d : map.element_dofs(e))
            elements_of_dof[d].push_back(e);
    std::vector<int> color(ne, -1);
    std::vector<int> seen;
    for (int e = 0; e < ne; ++e) {
        seen.clear();
        for (int d : map.element_dofs(e))
            for (int other : elements_of_dof[d])
                if (color[other] >= 0)
                    seen.push_back(color[other]);
        std::sort(seen.begin(), seen.end());
        int c = 0;
        for (int s : seen)
            if (s == c)
                ++c;
            else if (s > c)
                break;
        color[e] = c;
        if (c >= static_cast<int>(colors_.size()))
            colors_.resize(c + 1);
        colors_[c].push_back(e);
    }
}

void Assembler::scatter_matrix(int e, const Eigen::MatrixXd& local, CsrMatrix& out) const
{
    const auto signs = map_->element_signs(e);
    const int n = static_cast<int>(signs.size());
    if (local.rows() != n || local.cols() != n)
        throw Error("assemble: local matrix of element " + std::to_string(e) + " has wrong size");
    const int* plan = plan_.data() + plan_offsets_[e];
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (const int p = plan[r * n + c]; p >= 0)
                out.val[p] += signs[r] * signs[c] * local(r, c);
}

CsrMatrix Assembler::assemble_matrix(const ElementMatrixFn& fn, Exec exec) const
{
    CsrMatrix out = pattern_;
    assemble_matrix(fn, out, exec);
    return out;
}

void Assembler::assemble_matrix(const ElementMatrixFn& fn, CsrMatrix& out, Exec exec) const
{
    if (out.col.size() != pattern_.col.size())
        out = pattern_;
    std::fill(out.val.begin(), out.val.end(), 0.0);
    if (exec == Exec::serial) {
        Eigen::MatrixXd local;
        for (int e = 0; e < map_->num_elements(); ++e) {
            fn(e, local);
            scatter_matrix(e, local, out);
        }
        return;
    }
    for (const auto& group : colors_)
        parallel_over<Eigen::MatrixXd>(group, [&](int e, Eigen::MatrixXd& local) {
            fn(e, local);
            scatter_matrix(e, local, out);
        });
}

std::vector<double> Assembler::assemble_vector(const ElementVectorFn& fn, Exec exec) const
{
    std::vector<double> out(map_->num_free(), 0.0);
    auto scatter = [&](int e, const Eigen::VectorXd& local) {
        const auto dofs = map_->element_dofs(e);
        const auto signs = map_->element_signs(e);
        if (local.size() != static_cast<Eigen::Index>(dofs.size()))
            throw Error("assemble: local vector of element " + std::to_string(e) + " has wrong size");
        for (std::size_t r = 0; r < dofs.size(); ++r)
            if (const int f = map_->free_index(dofs[r]); f >= 0)
                out[f] += signs[r] * local[r];
    };
    if (exec == Exec::serial) {
        Eigen::VectorXd local;
        for (int e = 0; e < map_->num_elements(); ++e) {
            fn(e, local);
            scatter(e, local);
        }
        return out;
    }
    for (const auto& group : colors_)
        parallel_over<Eigen::VectorXd>(group, [&](int e, Eigen::VectorXd& local) {
            fn(e, local);
            scatter(e, local);
        });
    return out;
}

} // namespace pnpvem
