#include "pnpvem/dof_map.hpp"

#include "pnpvem/errors.hpp"
#include "pnpvem/quadrature.hpp"
#include "pnpvem/vem_local.hpp"

namespace pnpvem {

int DofMap::internal_dof(int e, int a) const
{
    return num_vertices_ + num_edges_ * (k_ - 1) + e * poly_dim(k_ - 2) + a;
}

DofMap build_dof_map(const PolygonalMesh& mesh, int k)
{
    if (k < min_supported_order || k > max_supported_order)
        throw Error("unsupported VEM order k = " + std::to_string(k));
    DofMap m;
    m.k_ = k;
    m.num_vertices_ = mesh.num_vertices();
    m.num_edges_ = mesh.num_edges();
    const int n_internal = poly_dim(k - 2);
    m.num_dofs_ = m.num_vertices_ + m.num_edges_ * (k - 1) + mesh.num_elements() * n_internal;

    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto verts = mesh.element(e);
        const int nv = static_cast<int>(verts.size());
        for (int v : verts) {
            m.indices_.push_back(m.vertex_dof(v));
            m.signs_.push_back(1.0);
        }
        for (int j = 0; j < nv; ++j) {
            const bool forward = mesh.element_edge_forward(e, j);
            for (int d = 0; d < k - 1; ++d) {
                m.indices_.push_back(m.edge_dof(mesh.element_edge(e, j), d));
                m.signs_.push_back(forward || d % 2 == 0 ? 1.0 : -1.0);
            }
        }
        for (int a = 0; a < n_internal; ++a) {
            m.indices_.push_back(m.internal_dof(e, a));
            m.signs_.push_back(1.0);
        }
        m.offsets_.push_back(static_cast<int>(m.indices_.size()));
    }

    m.dirichlet_.assign(m.num_dofs_, 0);
    for (int v = 0; v < m.num_vertices_; ++v)
        m.dirichlet_[v] = mesh.is_boundary_vertex(v) ? 1 : 0;
    for (int i = 0; i < m.num_edges_; ++i)
        if (mesh.edge(i).on_boundary())
            for (int d = 0; d < k - 1; ++d)
                m.dirichlet_[m.edge_dof(i, d)] = 1;

    m.free_index_.assign(m.num_dofs_, -1);
    for (int d = 0; d < m.num_dofs_; ++d)
        if (!m.dirichlet_[d]) {
            m.free_index_[d] = static_cast<int>(m.free_dofs_.size());
            m.free_dofs_.push_back(d);
        }
    return m;
}

void gather(const DofMap& map, int e, std::span<const double> global, std::span<double> local)
{
    const auto dofs = map.element_dofs(e);
    const auto signs = map.element_signs(e);
    for (std::size_t i = 0; i < dofs.size(); ++i)
        local[i] = signs[i] * global[dofs[i]];
}

std::vector<double> expand_free(const DofMap& map, std::span<const double> free_values)
{
    std::vector<double> full(map.num_dofs(), 0.0);
    const auto& fd = map.free_dofs();
    for (std::size_t i = 0; i < fd.size(); ++i)
        full[fd[i]] = free_values[i];
    return full;
}

std::vector<double> restrict_free(const DofMap& map, std::span<const double> full)
{
    const auto& fd = map.free_dofs();
    std::vector<double> r(fd.size());
    for (std::size_t i = 0; i < fd.size(); ++i)
        r[i] = full[fd[i]];
    return r;
}

} // namespace pnpvem
