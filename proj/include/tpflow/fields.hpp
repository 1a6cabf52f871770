#pragma once

#include <stdexcept>
#include <vector>

#include "tpflow/geometry.hpp"

namespace tpflow {

/// P1 function identified with its nodal values. Fields can only be combined
/// when they reference the same Geometry instance.
struct NodalField {
    const Geometry* geom = nullptr;
    std::vector<double> v;

    NodalField() = default;
    NodalField(const Geometry& g, double fill = 0.0)
        : geom(&g), v(static_cast<std::size_t>(g.node_count()), fill) {}

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }
};

/// Piecewise-constant function, one value per element.
struct ElementField {
    const Geometry* geom = nullptr;
    std::vector<double> v;

    ElementField() = default;
    ElementField(const Geometry& g, double fill = 0.0)
        : geom(&g), v(static_cast<std::size_t>(g.element_count()), fill) {}

    double& operator[](std::size_t k) { return v[k]; }
    double operator[](std::size_t k) const { return v[k]; }
};

/// Symmetric per-edge values W~(i,j) = W~(j,i): one entry per undirected edge.
struct EdgeField {
    const Geometry* geom = nullptr;
    std::vector<double> v;

    EdgeField() = default;
    EdgeField(const Geometry& g, double fill = 0.0)
        : geom(&g), v(static_cast<std::size_t>(g.edge_count()), fill) {}

    double value(int i, int j) const {
        const int e = geom->edge_index(i, j);
        if (e < 0) throw std::invalid_argument("nodes are not adjacent");
        return v[static_cast<std::size_t>(e)];
    }
};

/// Antisymmetric per-edge values F(i,j) = -F(j,i); stored on the canonical
/// (min,max) orientation of each edge.
struct DirectedEdgeField {
    const Geometry* geom = nullptr;
    std::vector<double> v;

    DirectedEdgeField() = default;
    DirectedEdgeField(const Geometry& g, double fill = 0.0)
        : geom(&g), v(static_cast<std::size_t>(g.edge_count()), fill) {}

    double value(int i, int j) const {
        const int e = geom->edge_index(i, j);
        if (e < 0) throw std::invalid_argument("nodes are not adjacent");
        return i < j ? v[static_cast<std::size_t>(e)] : -v[static_cast<std::size_t>(e)];
    }
};

inline void require_same_mesh(const NodalField& a, const NodalField& b) {
    if (a.geom == nullptr || a.geom != b.geom)
        throw std::invalid_argument("fields reference different meshes");
}

inline void require_mesh(const NodalField& a, const Geometry& g) {
    if (a.geom != &g) throw std::invalid_argument("field does not belong to this mesh");
}

}  // namespace tpflow
