#pragma once

#include "tpflow/fields.hpp"
#include "tpflow/upwind.hpp"

// Plain serial versions of the hot kernels. They use the obvious loop order
// with a single accumulator and exist as the reference side for the kernel
// tests and the benchmark; the library kernels are the blocked OpenMP ones.

namespace tpflow::ref {

inline double inner_h_serial(const NodalField& u, const NodalField& v) {
    require_same_mesh(u, v);
    const Geometry& g = *u.geom;
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += g.lumped_mass[i] * u[i] * v[i];
    return s;
}

inline double stiffness_pairing_serial(const NodalField& u, const NodalField& v) {
    require_same_mesh(u, v);
    const Geometry& g = *u.geom;
    double s = 0.0;
    for (int k = 0; k < g.element_count(); ++k) {
        const std::size_t ku = static_cast<std::size_t>(k);
        const auto& e = g.mesh.elements[ku];
        Vec2 gu{0, 0}, gv{0, 0};
        for (int l = 0; l < 3; ++l) {
            gu = gu + u[static_cast<std::size_t>(e[l])] * g.elem_grad[ku][l];
            gv = gv + v[static_cast<std::size_t>(e[l])] * g.elem_grad[ku][l];
        }
        s += g.elem_area[ku] * dot(gu, gv);
    }
    return s;
}

inline NodalField apply_upwind_form_serial(const Geometry& g, const EdgeField& w,
                                           const NodalField& v) {
    NodalField out(g);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double acc = 0.0;
        for (int p = g.nbr_off[i]; p < g.nbr_off[i + 1]; ++p) {
            const int j = g.nbr_node[static_cast<std::size_t>(p)];
            const int e = g.nbr_edge[static_cast<std::size_t>(p)];
            acc += g.edge_c[static_cast<std::size_t>(e)] * w.v[static_cast<std::size_t>(e)] *
                   (v[static_cast<std::size_t>(j)] - v[i]);
        }
        out[i] = acc;
    }
    return out;
}

inline double form_value_serial(const Geometry& g, const EdgeField& w, const NodalField& v,
                                const NodalField& u) {
    double s = 0.0;
    for (std::size_t e = 0; e < w.v.size(); ++e) {
        const int i = g.edge_nodes[e][0], j = g.edge_nodes[e][1];
        s += g.edge_c[e] * w.v[e] *
             (v[static_cast<std::size_t>(j)] - v[static_cast<std::size_t>(i)]) *
             (u[static_cast<std::size_t>(i)] - u[static_cast<std::size_t>(j)]);
    }
    return s;
}

inline double energy_serial(const Geometry& g, const TimeState& state, const FluidModel& model) {
    const EdgeField sw = upwind_saturations(state.S, state.Pw, Phase::wetting);
    const EdgeField so = upwind_saturations(state.S, state.Po, Phase::nonwetting);
    double s = 0.0;
    for (std::size_t e = 0; e < sw.v.size(); ++e) {
        const int i = g.edge_nodes[e][0], j = g.edge_nodes[e][1];
        const double dpw =
            state.Pw[static_cast<std::size_t>(i)] - state.Pw[static_cast<std::size_t>(j)];
        const double dpo =
            state.Po[static_cast<std::size_t>(i)] - state.Po[static_cast<std::size_t>(j)];
        s += g.edge_c[e] * (model.eta_w(sw.v[e]) * dpw * dpw + model.eta_o(so.v[e]) * dpo * dpo);
    }
    return 2.0 * s;
}

inline double consistent_l2_norm_serial(const Geometry& g, const std::vector<double>& nodal) {
    double sq = 0.0;
    for (int k = 0; k < g.element_count(); ++k) {
        const std::size_t ku = static_cast<std::size_t>(k);
        const auto& e = g.mesh.elements[ku];
        const double a = nodal[static_cast<std::size_t>(e[0])];
        const double b = nodal[static_cast<std::size_t>(e[1])];
        const double c = nodal[static_cast<std::size_t>(e[2])];
        const double s = a + b + c;
        sq += g.elem_area[ku] / 12.0 * (a * a + b * b + c * c + s * s);
    }
    return std::sqrt(std::max(0.0, sq));
}

}  // namespace tpflow::ref
