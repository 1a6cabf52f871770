#include "tpflow/fem_core.hpp"

#include <cmath>

#include "tpflow/parallel.hpp"

namespace tpflow {

double inner_h(const NodalField& u, const NodalField& v, const ElementField* weight) {
    require_same_mesh(u, v);
    const Geometry& g = *u.geom;
    if (weight == nullptr) {
        return par::det_sum(u.size(), [&](std::size_t i) {
            return g.lumped_mass[i] * u[i] * v[i];
        });
    }
    if (weight->geom != &g) throw std::invalid_argument("weight references a different mesh");
    return par::det_sum(u.size(), [&](std::size_t i) {
        double mw = 0.0;
        for (int p = g.patch_off[i]; p < g.patch_off[i + 1]; ++p) {
            const int k = g.patch_elem[static_cast<std::size_t>(p)];
            mw += (*weight)[static_cast<std::size_t>(k)] * g.elem_area[static_cast<std::size_t>(k)];
        }
        return (mw / 3.0) * u[i] * v[i];
    });
}

double norm_h(const NodalField& u, const ElementField* weight) {
    return std::sqrt(inner_h(u, u, weight));
}

NodalField interpolate_nodal(const Geometry& geom, const SpaceFn& f) {
    NodalField out(geom);
    par::parallel_for(out.size(), [&](std::size_t i) {
        out[i] = f(geom.mesh.nodes[i].x, geom.mesh.nodes[i].y);
    });
    return out;
}

NodalField project_patch_average(const Geometry& geom, const SpaceFn& f) {
    NodalField out(geom);
    const auto& rule = quad::tri_midpoint();
    par::parallel_for(out.size(), [&](std::size_t i) {
        double integral = 0.0;
        double patch_area = 0.0;
        for (int p = geom.patch_off[i]; p < geom.patch_off[i + 1]; ++p) {
            const int k = geom.patch_elem[static_cast<std::size_t>(p)];
            const auto& e = geom.mesh.elements[static_cast<std::size_t>(k)];
            integral += quad::integrate_tri(rule, geom.mesh.nodes[e[0]], geom.mesh.nodes[e[1]],
                                            geom.mesh.nodes[e[2]],
                                            geom.elem_area[static_cast<std::size_t>(k)], f);
            patch_area += geom.elem_area[static_cast<std::size_t>(k)];
        }
        out[i] = integral / patch_area;
    });
    return out;
}

ElementField project_elementwise(const Geometry& geom, const SpaceFn& f) {
    ElementField out(geom);
    const auto& rule = quad::tri_midpoint();
    par::parallel_for(out.v.size(), [&](std::size_t k) {
        const auto& e = geom.mesh.elements[k];
        out[k] = quad::integrate_tri(rule, geom.mesh.nodes[e[0]], geom.mesh.nodes[e[1]],
                                     geom.mesh.nodes[e[2]], geom.elem_area[k], f) /
                 geom.elem_area[k];
    });
    return out;
}

double project_time(const TimeFn& f, double tau, int n) {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    const double t0 = tau * (n - 1);
    double s = 0.0;
    for (const auto& q : quad::gauss3()) s += q.w * f(t0 + tau * q.x);
    return s;
}

double stiffness_pairing(const NodalField& u, const NodalField& v, const ElementField* weight) {
    require_same_mesh(u, v);
    const Geometry& g = *u.geom;
    if (weight != nullptr && weight->geom != &g)
        throw std::invalid_argument("weight references a different mesh");
    return par::det_sum(static_cast<std::size_t>(g.element_count()), [&](std::size_t k) {
        const auto& e = g.mesh.elements[k];
        Vec2 gu{0.0, 0.0}, gv{0.0, 0.0};
        for (int l = 0; l < 3; ++l) {
            gu = gu + u[static_cast<std::size_t>(e[l])] * g.elem_grad[k][l];
            gv = gv + v[static_cast<std::size_t>(e[l])] * g.elem_grad[k][l];
        }
        const double w = weight ? (*weight)[k] : 1.0;
        return w * g.elem_area[k] * dot(gu, gv);
    });
}

double consistent_l2_norm(const Geometry& geom, const std::vector<double>& nodal) {
    if (nodal.size() != static_cast<std::size_t>(geom.node_count()))
        throw std::invalid_argument("nodal vector size does not match mesh");
    // per-element e^T M_K e with M_K = |K|/12 (I + ones)
    const double sq = par::det_sum(static_cast<std::size_t>(geom.element_count()), [&](std::size_t k) {
        const auto& e = geom.mesh.elements[k];
        const double a = nodal[static_cast<std::size_t>(e[0])];
        const double b = nodal[static_cast<std::size_t>(e[1])];
        const double c = nodal[static_cast<std::size_t>(e[2])];
        const double s = a + b + c;
        return geom.elem_area[k] / 12.0 * (a * a + b * b + c * c + s * s);
    });
    return std::sqrt(std::max(0.0, sq));
}

double integrate_deg5(const Geometry& geom, const SpaceFn& f) {
    const auto& rule = quad::tri_deg5();
    return par::det_sum(static_cast<std::size_t>(geom.element_count()), [&](std::size_t k) {
        const auto& e = geom.mesh.elements[k];
        return quad::integrate_tri(rule, geom.mesh.nodes[e[0]], geom.mesh.nodes[e[1]],
                                   geom.mesh.nodes[e[2]], geom.elem_area[k], f);
    });
}

}  // namespace tpflow
