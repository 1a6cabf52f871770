#pragma once

#include <array>
#include <vector>

#include "tpflow/mesh.hpp"

namespace tpflow {

/// Mesh-derived data of the scheme: per-element basis gradients, lumped
/// masses m_i = |Delta_i|/3, the nonnegative coupling coefficients
/// c_ij = sum_K int_K |grad phi_i . grad phi_j| over undirected edges, their
/// per-element contributions, node adjacency, and patch lists. Immutable
/// after construction; safe to share across threads.
class Geometry {
public:
    SimplicialMesh mesh;

    std::vector<double> elem_area;
    std::vector<double> elem_diam;
    std::vector<Vec2> elem_centroid;
    std::vector<std::array<Vec2, 3>> elem_grad;  // basis gradient per local node

    // node -> incident elements (CSR, element ids ascending)
    std::vector<int> patch_off;
    std::vector<int> patch_elem;

    std::vector<double> lumped_mass;  // m_i
    double domain_area = 0.0;
    double mesh_size = 0.0;  // max element diameter

    // undirected edges, lexicographically sorted (i < j)
    std::vector<std::array<int, 2>> edge_nodes;
    std::vector<double> edge_c;    // c_ij
    std::vector<double> edge_len;  // |x_j - x_i|
    // per-edge element contributions (CSR over edges)
    std::vector<int> edge_elem_off;
    std::vector<int> edge_elem;
    std::vector<double> edge_cK;

    // node -> neighbor nodes (CSR, ascending) with the connecting edge id
    std::vector<int> nbr_off;
    std::vector<int> nbr_node;
    std::vector<int> nbr_edge;

    int node_count() const { return mesh.node_count(); }
    int element_count() const { return mesh.element_count(); }
    int edge_count() const { return static_cast<int>(edge_nodes.size()); }

    /// Edge id connecting i and j, or -1 when not adjacent.
    int edge_index(int i, int j) const;
};

/// Build all coefficients. With strict_acute (the default) an angle-condition
/// violation is rejected with the offending elements listed; otherwise the
/// geometry is built anyway (the discrete identities then lose their meaning).
/// Every c_ij,K is cross-checked against the face-normal formula
/// |F_i||F_j||n_i.n_j| / (4|K|) to 1e-12 relative.
Geometry build_geometry(SimplicialMesh mesh, bool strict_acute = true);

/// Porosity-weighted lumped masses m~_i = (1/3) sum_{K in Delta_i} phi_K |K|.
std::vector<double> lumped_mass_weighted(const Geometry& geom, const std::vector<double>& phi_elem);

}  // namespace tpflow
