#include "tpflow/identities.hpp"

#include <algorithm>
#include <cmath>

#include "tpflow/parallel.hpp"

namespace tpflow {

namespace {

bool strictly_acute(const SimplicialMesh& mesh, double margin) {
    for (const auto& e : mesh.elements) {
        const Vec2 p[3] = {mesh.nodes[e[0]], mesh.nodes[e[1]], mesh.nodes[e[2]]};
        for (int v = 0; v < 3; ++v) {
            const Vec2 a = p[(v + 1) % 3] - p[v];
            const Vec2 b = p[(v + 2) % 3] - p[v];
            if (dot(a, b) < margin * norm(a) * norm(b)) return false;
        }
    }
    return true;
}

}  // namespace

SimplicialMesh random_acute_mesh(std::mt19937_64& rng, int n_min, int n_max) {
    std::uniform_int_distribution<int> pick_n(n_min, n_max);
    std::uniform_real_distribution<double> pick_scale(0.5, 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int nx = pick_n(rng);
    const int ny = pick_n(rng);
    const double ax = pick_scale(rng);
    const double ay = pick_scale(rng);
    const bool diag_up = unit(rng) < 0.5;
    SimplicialMesh base = generate_structured_rect(nx, ny, {0.0, 0.0}, {ax, ay}, diag_up);

    // try a few interior jitters; keep one only when strictly acute
    const double hx = ax / nx, hy = ay / ny;
    const double amp = 0.15 * std::min(hx, hy);
    for (int attempt = 0; attempt < 8; ++attempt) {
        SimplicialMesh jittered = base;
        for (std::size_t i = 0; i < jittered.nodes.size(); ++i) {
            if (jittered.is_boundary[i]) continue;
            jittered.nodes[i].x += amp * (2.0 * unit(rng) - 1.0);
            jittered.nodes[i].y += amp * (2.0 * unit(rng) - 1.0);
        }
        if (strictly_acute(jittered, 1e-6)) return jittered;
    }
    return base;
}

namespace {

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

/// sum_i U_i sum_j c_ij W~_ij (V_j - V_i): node-major accumulation, not the
/// edge-factored shortcut, so cancellations are genuinely tested.
double form_node_route(const Geometry& g, const EdgeField& w, const NodalField& v,
                       const NodalField& u) {
    const NodalField r = apply_upwind_form(g, w, v);
    return par::det_sum(r.size(), [&](std::size_t i) { return u[i] * r[i]; });
}

void update(IdentityCheck& c, double defect) {
    c.worst = std::max(c.worst, defect);
    if (defect > c.tol) c.ok = false;
}

}  // namespace

IdentityReport run_identity_suite(std::uint64_t seed, int n_meshes) {
    IdentityReport report;
    report.meshes = n_meshes;
    const double tol = 1e-12;
    auto add = [&](const char* name) {
        report.checks.push_back({name, 0.0, tol, true});
        return report.checks.size() - 1;
    };
    const std::size_t i_pair_node = add("gradient_pairing_node_sum");
    const std::size_t i_pair_edge = add("gradient_pairing_edge_sum");
    const std::size_t i_normgrad = add("gradient_norm_formula");
    const std::size_t i_weighted = add("weighted_pairing_per_element");
    const std::size_t i_sum0 = add("symmetric_weight_double_sum_vanishes");
    const std::size_t i_up1 = add("upwind_form_vanishes_on_constants");
    const std::size_t i_up2 = add("upwind_form_quadratic_identity");
    const std::size_t i_cij = add("coupling_coefficients_match_signed_sums");

    std::mt19937_64 rng(seed);
    for (int mesh_idx = 0; mesh_idx < n_meshes; ++mesh_idx) {
        const Geometry g = build_geometry(random_acute_mesh(rng));
        const std::size_t m = static_cast<std::size_t>(g.node_count());
        const std::size_t ne = static_cast<std::size_t>(g.edge_count());

        NodalField u(g), v(g), s(g), p(g);
        u.v = random_values(rng, m, -1.0, 1.0);
        v.v = random_values(rng, m, -1.0, 1.0);
        s.v = random_values(rng, m, 0.0, 1.0);
        p.v = random_values(rng, m, -1.0, 1.0);
        EdgeField w_sym(g);
        w_sym.v = random_values(rng, ne, 0.0, 2.0);
        EdgeField ones_edges(g, 1.0);
        ElementField w_elem(g);
        w_elem.v = random_values(rng, static_cast<std::size_t>(g.element_count()), 0.2, 1.7);

        const double c_total = par::det_sum(ne, [&](std::size_t e) { return g.edge_c[e]; });
        auto nf_max = [](const NodalField& f) {
            double m0 = 0.0;
            for (double x : f.v) m0 = std::max(m0, std::abs(x));
            return m0;
        };
        const double scale_uv = std::max(1e-30, c_total * nf_max(u) * nf_max(v));

        // element-route pairing vs both coupling-coefficient sums
        const double lhs = stiffness_pairing(u, v);
        const double rhs_node = -form_node_route(g, ones_edges, v, u);
        const double rhs_edge = par::det_sum(ne, [&](std::size_t e) {
            const auto [i, j] = g.edge_nodes[e];
            return g.edge_c[e] * (u[static_cast<std::size_t>(j)] - u[static_cast<std::size_t>(i)]) *
                   (v[static_cast<std::size_t>(j)] - v[static_cast<std::size_t>(i)]);
        });
        const double denom_uv = std::max({std::abs(lhs), std::abs(rhs_node), scale_uv * 1e-6});
        update(report.checks[i_pair_node], std::abs(lhs - rhs_node) / denom_uv);
        update(report.checks[i_pair_edge], std::abs(lhs - rhs_edge) / denom_uv);

        // gradient norm
        const double grad_sq = stiffness_pairing(u, u);
        const double grad_sq_edges = par::det_sum(ne, [&](std::size_t e) {
            const auto [i, j] = g.edge_nodes[e];
            const double du = u[static_cast<std::size_t>(j)] - u[static_cast<std::size_t>(i)];
            return g.edge_c[e] * du * du;
        });
        update(report.checks[i_normgrad],
               std::abs(grad_sq - grad_sq_edges) / std::max(std::abs(grad_sq), 1e-30));

        // weighted pairing against per-element coupling contributions
        {
            const double wl = stiffness_pairing(u, v, &w_elem);
            const double wr = -par::det_sum(m, [&](std::size_t i) {
                double acc = 0.0;
                for (int q = g.nbr_off[i]; q < g.nbr_off[i + 1]; ++q) {
                    const int j = g.nbr_node[static_cast<std::size_t>(q)];
                    const int e = g.nbr_edge[static_cast<std::size_t>(q)];
                    double cw = 0.0;
                    for (int r = g.edge_elem_off[e]; r < g.edge_elem_off[e + 1]; ++r)
                        cw += g.edge_cK[static_cast<std::size_t>(r)] *
                              w_elem[static_cast<std::size_t>(g.edge_elem[static_cast<std::size_t>(r)])];
                    acc += cw * (v[static_cast<std::size_t>(j)] - v[i]);
                }
                return u[i] * acc;
            });
            update(report.checks[i_weighted],
                   std::abs(wl - wr) / std::max({std::abs(wl), std::abs(wr), scale_uv * 1e-6}));
        }

        // double sum with a symmetric weight vanishes (node-major route)
        {
            const NodalField r = apply_upwind_form(g, w_sym, v);
            const double total = par::det_sum(m, [&](std::size_t i) { return r[i]; });
            const double scale = std::max(1e-30, c_total * nf_max(v) * 2.0);
            update(report.checks[i_sum0], std::abs(total) / scale);
        }

        // upwind form against constants and against its own argument, with a
        // mobility-like symmetric weight from the upwind saturations
        {
            const EdgeField sw = upwind_saturations(s, p, Phase::wetting);
            EdgeField eta(g);
            for (std::size_t e = 0; e < ne; ++e) eta.v[e] = sw.v[e] * sw.v[e];
            NodalField ones(g, 1.0);
            const double v1 = form_node_route(g, eta, v, ones);
            update(report.checks[i_up1], std::abs(v1) / std::max(1e-30, c_total * nf_max(v)));

            const double lhs2 = form_node_route(g, eta, v, v);
            const double rhs2 = -par::det_sum(ne, [&](std::size_t e) {
                const auto [i, j] = g.edge_nodes[e];
                const double dv = v[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(j)];
                return g.edge_c[e] * eta.v[e] * dv * dv;
            });
            update(report.checks[i_up2],
                   std::abs(lhs2 - rhs2) / std::max({std::abs(lhs2), std::abs(rhs2), 1e-30}));
        }

        // c_ij from the abs-valued per-element route vs independent signed sums
        {
            double worst = 0.0;
            for (std::size_t e = 0; e < ne; ++e) {
                const auto [i, j] = g.edge_nodes[e];
                double signed_sum = 0.0;
                for (int r = g.edge_elem_off[e]; r < g.edge_elem_off[e + 1]; ++r) {
                    const int k = g.edge_elem[static_cast<std::size_t>(r)];
                    const auto& el = g.mesh.elements[static_cast<std::size_t>(k)];
                    int li = -1, lj = -1;
                    for (int t = 0; t < 3; ++t) {
                        if (el[t] == i) li = t;
                        if (el[t] == j) lj = t;
                    }
                    signed_sum -= g.elem_area[static_cast<std::size_t>(k)] *
                                  dot(g.elem_grad[static_cast<std::size_t>(k)][li],
                                      g.elem_grad[static_cast<std::size_t>(k)][lj]);
                }
                const double denom = std::max(std::abs(g.edge_c[e]), 1e-3);
                worst = std::max(worst, std::abs(g.edge_c[e] - signed_sum) / denom);
            }
            update(report.checks[i_cij], worst);
        }
    }
    report.all_ok = true;
    for (const auto& c : report.checks) report.all_ok = report.all_ok && c.ok;
    return report;
}

double consistency_gap(const Geometry& geom, const SpaceFn& w, const SpaceFn& u,
                       const SpaceFn& u_x, const SpaceFn& u_y, const SpaceFn& v,
                       const SpaceFn& v_x, const SpaceFn& v_y) {
    const double continuous = integrate_deg5(geom, [&](double x, double y) {
        return w(x, y) * (u_x(x, y) * v_x(x, y) + u_y(x, y) * v_y(x, y));
    });
    const NodalField uh = interpolate_nodal(geom, u);
    const NodalField vh = interpolate_nodal(geom, v);
    const EdgeField wh = edge_values_from_function(geom, w);
    return std::abs(continuous + form_value(geom, wh, vh, uh));
}

}  // namespace tpflow
