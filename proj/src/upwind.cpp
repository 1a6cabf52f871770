#include "tpflow/upwind.hpp"

#include <algorithm>

#include "tpflow/parallel.hpp"

namespace tpflow {

EdgeField upwind_saturations(const NodalField& s, const NodalField& p, Phase phase) {
    require_same_mesh(s, p);
    const Geometry& g = *s.geom;
    EdgeField out(g);
    par::parallel_for(out.v.size(), [&](std::size_t e) {
        const int i = g.edge_nodes[e][0], j = g.edge_nodes[e][1];
        const double pi = p[static_cast<std::size_t>(i)], pj = p[static_cast<std::size_t>(j)];
        const double si = s[static_cast<std::size_t>(i)], sj = s[static_cast<std::size_t>(j)];
        double up;
        if (pi > pj) {
            up = si;
        } else if (pi < pj) {
            up = sj;
        } else {
            up = phase == Phase::wetting ? std::max(si, sj) : std::min(si, sj);
        }
        out.v[e] = up;
    });
    return out;
}

EdgeField edge_values_from_function(const Geometry& geom, const SpaceFn& f) {
    EdgeField out(geom);
    par::parallel_for(out.v.size(), [&](std::size_t e) {
        const Vec2 a = geom.mesh.nodes[geom.edge_nodes[e][0]];
        const Vec2 b = geom.mesh.nodes[geom.edge_nodes[e][1]];
        out.v[e] = f(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
    });
    return out;
}

NodalField apply_upwind_form(const Geometry& geom, const EdgeField& w, const NodalField& v) {
    require_mesh(v, geom);
    if (w.geom != &geom) throw std::invalid_argument("edge values belong to a different mesh");
    NodalField out(geom);
    par::parallel_for(out.size(), [&](std::size_t i) {
        double acc = 0.0;
        for (int p = geom.nbr_off[i]; p < geom.nbr_off[i + 1]; ++p) {
            const int j = geom.nbr_node[static_cast<std::size_t>(p)];
            const int e = geom.nbr_edge[static_cast<std::size_t>(p)];
            acc += geom.edge_c[static_cast<std::size_t>(e)] * w.v[static_cast<std::size_t>(e)] *
                   (v[static_cast<std::size_t>(j)] - v[i]);
        }
        out[i] = acc;
    });
    return out;
}

double form_value(const Geometry& geom, const EdgeField& w, const NodalField& v,
                  const NodalField& u) {
    require_mesh(v, geom);
    require_mesh(u, geom);
    if (w.geom != &geom) throw std::invalid_argument("edge values belong to a different mesh");
    // sum over undirected edges of c W~ (V_j - V_i)(U_i - U_j) equals the
    // double sum over ordered pairs
    return par::det_sum(w.v.size(), [&](std::size_t e) {
        const int i = geom.edge_nodes[e][0], j = geom.edge_nodes[e][1];
        const double dv = v[static_cast<std::size_t>(j)] - v[static_cast<std::size_t>(i)];
        const double du = u[static_cast<std::size_t>(i)] - u[static_cast<std::size_t>(j)];
        return geom.edge_c[e] * w.v[e] * dv * du;
    });
}

DirectedEdgeField total_flux(const Geometry& geom, const TimeState& state, const FluidModel& model) {
    const EdgeField sw = upwind_saturations(state.S, state.Pw, Phase::wetting);
    const EdgeField so = upwind_saturations(state.S, state.Po, Phase::nonwetting);
    DirectedEdgeField out(geom);
    par::parallel_for(out.v.size(), [&](std::size_t e) {
        const int i = geom.edge_nodes[e][0], j = geom.edge_nodes[e][1];
        const double dpw = state.Pw[static_cast<std::size_t>(j)] - state.Pw[static_cast<std::size_t>(i)];
        const double dpo = state.Po[static_cast<std::size_t>(j)] - state.Po[static_cast<std::size_t>(i)];
        out.v[e] = -model.eta_w(sw.v[e]) * dpw - model.eta_o(so.v[e]) * dpo;
    });
    return out;
}

double energy_diagnostic(const Geometry& geom, const TimeState& state, const FluidModel& model) {
    const EdgeField sw = upwind_saturations(state.S, state.Pw, Phase::wetting);
    const EdgeField so = upwind_saturations(state.S, state.Po, Phase::nonwetting);
    // ordered-pair sum = twice the undirected-edge sum
    return 2.0 * par::det_sum(sw.v.size(), [&](std::size_t e) {
        const int i = geom.edge_nodes[e][0], j = geom.edge_nodes[e][1];
        const double dpw = state.Pw[static_cast<std::size_t>(i)] - state.Pw[static_cast<std::size_t>(j)];
        const double dpo = state.Po[static_cast<std::size_t>(i)] - state.Po[static_cast<std::size_t>(j)];
        return geom.edge_c[e] *
               (model.eta_w(sw.v[e]) * dpw * dpw + model.eta_o(so.v[e]) * dpo * dpo);
    });
}

std::pair<NodalField, NodalField> aux_pressure_fields(const Geometry& geom,
                                                      const TimeState& state,
                                                      const FluidModel& model) {
    NodalField uw(geom), uo(geom);
    par::parallel_for(uw.size(), [&](std::size_t i) {
        uw[i] = state.Pw[i] + model.eval_aux(AuxFn::p_wg, state.S[i]);
        uo[i] = state.Po[i] - model.eval_aux(AuxFn::p_og, state.S[i]);
    });
    return {std::move(uw), std::move(uo)};
}

}  // namespace tpflow
