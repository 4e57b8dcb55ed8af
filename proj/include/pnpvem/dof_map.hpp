#pragma once

#include "pnpvem/mesh.hpp"

#include <span>
#include <vector>

namespace pnpvem {

/// Global numbering of the order-k space: vertex dofs first, then k-1 moments per
/// edge, then the internal moments of each element. Edge moments are taken along
/// the edge's stored direction; an element traversing the edge the other way sees
/// moment j multiplied by (-1)^j.
class DofMap
{
public:
    int order() const { return k_; }
    int num_dofs() const { return num_dofs_; }
    int num_free() const { return static_cast<int>(free_dofs_.size()); }
    int num_elements() const { return static_cast<int>(offsets_.size()) - 1; }

    std::span<const int> element_dofs(int e) const
    {
        return {indices_.data() + offsets_[e], static_cast<std::size_t>(offsets_[e + 1] - offsets_[e])};
    }
    std::span<const double> element_signs(int e) const
    {
        return {signs_.data() + offsets_[e], static_cast<std::size_t>(offsets_[e + 1] - offsets_[e])};
    }

    bool is_dirichlet(int dof) const { return dirichlet_[dof] != 0; }
    const std::vector<char>& dirichlet_mask() const { return dirichlet_; }
    /// Position among the free dofs, or -1 for Dirichlet dofs.
    int free_index(int dof) const { return free_index_[dof]; }
    const std::vector<int>& free_dofs() const { return free_dofs_; }

    /// Global dof of vertex v, of moment j on edge i, of internal moment a of element e.
    int vertex_dof(int v) const { return v; }
    int edge_dof(int edge, int j) const { return num_vertices_ + edge * (k_ - 1) + j; }
    int internal_dof(int e, int a) const;

    friend DofMap build_dof_map(const PolygonalMesh& mesh, int k);

private:
    int k_ = 1;
    int num_vertices_ = 0;
    int num_edges_ = 0;
    int num_dofs_ = 0;
    std::vector<int> offsets_{0};
    std::vector<int> indices_;
    std::vector<double> signs_;
    std::vector<char> dirichlet_;
    std::vector<int> free_index_;
    std::vector<int> free_dofs_;
};

DofMap build_dof_map(const PolygonalMesh& mesh, int k);

/// Local dof vector of element e gathered from a global vector (signs applied).
void gather(const DofMap& map, int e, std::span<const double> global, std::span<double> local);

/// Full-length vector from values on the free dofs (Dirichlet entries zero).
std::vector<double> expand_free(const DofMap& map, std::span<const double> free_values);
/// Restriction of a full-length vector to the free dofs.
std::vector<double> restrict_free(const DofMap& map, std::span<const double> full);

} // namespace pnpvem
