#include "tpflow/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tpflow/parallel.hpp"

namespace tpflow {

namespace {

struct EdgeSel {
    double sw = 0.0;  // wetting upwind saturation
    int nw = -1;      // node the wetting value was taken from
    double so = 0.0;
    int no = -1;
};

/// Upwind selection for every edge from nodal saturation and phase pressures.
/// Pressure ties pick the larger (wetting) / smaller (nonwetting) saturation;
/// saturation ties resolve to the smaller node id.
std::vector<EdgeSel> select_upwind(const Geometry& g, const std::vector<double>& s,
                                   const std::vector<double>& pw, const std::vector<double>& po) {
    std::vector<EdgeSel> sel(static_cast<std::size_t>(g.edge_count()));
    par::parallel_for(sel.size(), [&](std::size_t e) {
        const int i = g.edge_nodes[e][0], j = g.edge_nodes[e][1];
        const auto iu = static_cast<std::size_t>(i), ju = static_cast<std::size_t>(j);
        EdgeSel& out = sel[e];
        if (pw[iu] > pw[ju]) {
            out.sw = s[iu];
            out.nw = i;
        } else if (pw[iu] < pw[ju]) {
            out.sw = s[ju];
            out.nw = j;
        } else if (s[iu] >= s[ju]) {
            out.sw = s[iu];
            out.nw = i;
        } else {
            out.sw = s[ju];
            out.nw = j;
        }
        if (po[iu] > po[ju]) {
            out.so = s[iu];
            out.no = i;
        } else if (po[iu] < po[ju]) {
            out.so = s[ju];
            out.no = j;
        } else if (s[iu] <= s[ju]) {
            out.so = s[iu];
            out.no = i;
        } else {
            out.so = s[ju];
            out.no = j;
        }
    });
    return sel;
}

std::vector<double> nodal_po(const FluidModel& model, const std::vector<double>& s,
                             const std::vector<double>& pw) {
    std::vector<double> po(s.size());
    par::parallel_for(s.size(), [&](std::size_t i) { po[i] = pw[i] + model.pc(s[i]); });
    return po;
}

double linf(const std::vector<double>& v) {
    return par::det_max(v.size(), [&](std::size_t i) { return std::abs(v[i]); });
}

/// Per-node source terms on the right-hand side of the two equations.
struct SourceTerms {
    std::vector<double> wet, nonwet;
};

SourceTerms source_terms(const Problem& prob, const DiscreteSources& src,
                         const std::vector<double>& s_for_fractional) {
    const Geometry& g = *prob.geom;
    const FluidModel& model = *prob.model;
    const std::size_t m = static_cast<std::size_t>(g.node_count());
    SourceTerms out;
    out.wet.resize(m);
    out.nonwet.resize(m);
    if (prob.src.mode == SourceMode::manufactured) {
        par::parallel_for(m, [&](std::size_t i) {
            out.wet[i] = g.lumped_mass[i] * src.f1[i];
            out.nonwet[i] = g.lumped_mass[i] * src.f2[i];
        });
    } else {
        par::parallel_for(m, [&](std::size_t i) {
            const double fwin = model.f_w(src.s_in[i]);
            const double fw = model.f_w(s_for_fractional[i]);
            out.wet[i] = g.lumped_mass[i] * (fwin * src.qbar[i] - fw * src.qunder[i]);
            out.nonwet[i] =
                g.lumped_mass[i] * ((1.0 - fwin) * src.qbar[i] - (1.0 - fw) * src.qunder[i]);
        });
    }
    return out;
}

bool is_dirichlet(const Problem& prob) { return prob.src.bc == BcMode::dirichlet; }

}  // namespace

Problem make_problem(const Geometry& geom, const FluidModel& model, SourceModel src,
                     const SpaceFn& porosity) {
    Problem p;
    p.geom = &geom;
    p.model = &model;
    p.src = std::move(src);
    p.phi_elem.resize(static_cast<std::size_t>(geom.element_count()));
    par::parallel_for(p.phi_elem.size(), [&](std::size_t k) {
        const Vec2 c = geom.elem_centroid[k];
        const double v = porosity(c.x, c.y);
        p.phi_elem[k] = v;
    });
    for (double v : p.phi_elem)
        if (!(v > 0.0)) throw DataError("porosity must be positive on every element");
    p.mass_phi = lumped_mass_weighted(geom, p.phi_elem);
    if (p.src.mode == SourceMode::manufactured && (!p.src.f1 || !p.src.f2))
        throw DataError("manufactured mode requires f1 and f2");
    if (p.src.mode == SourceMode::wells && (!p.src.qbar || !p.src.qunder || !p.src.s_in))
        throw DataError("wells mode requires qbar, qunder and s_in");
    if (p.src.bc == BcMode::dirichlet && (!p.src.trace_S || !p.src.trace_Pw))
        throw DataError("dirichlet mode requires trace_S and trace_Pw");
    return p;
}

DiscreteSources build_discrete_sources(const Problem& prob, double tau, int n) {
    const Geometry& g = *prob.geom;
    const std::size_t m = static_cast<std::size_t>(g.node_count());
    DiscreteSources out;
    if (prob.src.mode == SourceMode::manufactured) {
        const double t = tau * n;
        out.f1.resize(m);
        out.f2.resize(m);
        par::parallel_for(m, [&](std::size_t i) {
            const Vec2 x = g.mesh.nodes[i];
            out.f1[i] = prob.src.f1(t, x.x, x.y);
            out.f2[i] = prob.src.f2(t, x.x, x.y);
        });
        return out;
    }

    // wells: time-average of the corrected patch averages over the slab
    out.qbar.assign(m, 0.0);
    out.qunder.assign(m, 0.0);
    out.s_in.assign(m, 0.0);
    const double t0 = tau * (n - 1);
    auto accumulate = [&](const SpaceTimeFn& q, const TimeFn& mean_fn, std::vector<double>& dst,
                          bool correct) {
        for (const auto& gp : quad::gauss3()) {
            const double t = t0 + tau * gp.x;
            auto at_t = [&](double x, double y) { return q(t, x, y); };
            const NodalField rh = project_patch_average(g, at_t);
            double shift = 0.0;
            if (correct) {
                const double int_rh = par::det_sum(m, [&](std::size_t i) {
                    return g.lumped_mass[i] * rh[i];
                });
                const double int_q = mean_fn ? mean_fn(t) : integrate_deg5(g, at_t);
                shift = (int_rh - int_q) / g.domain_area;
            }
            for (std::size_t i = 0; i < m; ++i) dst[i] += gp.w * (rh[i] - shift);
        }
    };
    accumulate(prob.src.qbar, prob.src.qbar_mean, out.qbar, true);
    accumulate(prob.src.qunder, prob.src.qunder_mean, out.qunder, true);
    accumulate(prob.src.s_in, nullptr, out.s_in, false);
    for (std::size_t i = 0; i < m; ++i) {
        if (out.qbar[i] < -1e-12 || out.qunder[i] < -1e-12)
            throw DataError("well correction produced a negative rate beyond -1e-12");
    }
    return out;
}

namespace {

/// Shared assembly of the linearized system: mobilities upwinded at the
/// linearization state, capillary pressure expanded to first order about it,
/// mass term anchored at the previous level. The plain time-extrapolated
/// scheme is the case lin == previous level.
AssembledSystem assemble_linearized(const Problem& prob, const std::vector<double>& anchor_s,
                                    const std::vector<double>& lin_s,
                                    const std::vector<double>& lin_pw,
                                    const DiscreteSources& srcs, double tau, double t_next) {
    const Geometry& g = *prob.geom;
    const FluidModel& model = *prob.model;
    const int m = g.node_count();
    const std::size_t mu = static_cast<std::size_t>(m);

    const std::vector<double> lin_po = nodal_po(model, lin_s, lin_pw);
    const std::vector<EdgeSel> sel = select_upwind(g, lin_s, lin_pw, lin_po);
    std::vector<double> pc_lin(mu), pcp_lin(mu);
    par::parallel_for(mu, [&](std::size_t i) {
        pc_lin[i] = model.pc(lin_s[i]);
        pcp_lin[i] = model.pc_prime(lin_s[i]);
    });
    const SourceTerms st = source_terms(prob, srcs, lin_s);

    const bool dirichlet = is_dirichlet(prob);
    AssembledSystem sys;
    sys.size = 2 * m;
    sys.rhs.assign(static_cast<std::size_t>(2 * m), 0.0);

    std::vector<std::vector<Triplet>> rows(static_cast<std::size_t>(2 * m));
    par::parallel_for(mu, [&](std::size_t i) {
        const int ii = static_cast<int>(i);
        const bool bdry = g.mesh.is_boundary[i] != 0;
        auto& wet = rows[i];
        auto& nonwet = rows[mu + i];
        if (dirichlet && bdry) {
            const Vec2 x = g.mesh.nodes[i];
            wet.push_back({ii, ii, 1.0});
            sys.rhs[i] = prob.src.trace_S(t_next, x.x, x.y);
            nonwet.push_back({m + ii, m + ii, 1.0});
            sys.rhs[mu + i] = prob.src.trace_Pw(t_next, x.x, x.y);
            return;
        }
        const double mass = prob.mass_phi[i] / tau;
        wet.push_back({ii, ii, mass});
        double rhs_w = mass * anchor_s[i] + st.wet[i];
        nonwet.push_back({m + ii, ii, -mass});
        double rhs_o = -mass * anchor_s[i] + st.nonwet[i];
        double diag_pw_w = 0.0, diag_pw_o = 0.0, diag_s_o = 0.0;
        for (int p = g.nbr_off[i]; p < g.nbr_off[i + 1]; ++p) {
            const int j = g.nbr_node[static_cast<std::size_t>(p)];
            const int e = g.nbr_edge[static_cast<std::size_t>(p)];
            const std::size_t eu = static_cast<std::size_t>(e), ju = static_cast<std::size_t>(j);
            const double c = g.edge_c[eu];
            if (c == 0.0) continue;
            const double cw = c * model.eta_w(sel[eu].sw);
            const double co = c * model.eta_o(sel[eu].so);
            // wetting: -cw (P_j - P_i)
            diag_pw_w += cw;
            wet.push_back({ii, m + j, -cw});
            // nonwetting: -co (P_j - P_i) - co (pc*_j - pc*_i)
            diag_pw_o += co;
            nonwet.push_back({m + ii, m + j, -co});
            diag_s_o += co * pcp_lin[i];
            nonwet.push_back({m + ii, j, -co * pcp_lin[ju]});
            const double kappa_j = pc_lin[ju] - pcp_lin[ju] * lin_s[ju];
            const double kappa_i = pc_lin[i] - pcp_lin[i] * lin_s[i];
            rhs_o += co * (kappa_j - kappa_i);
        }
        wet.push_back({ii, m + ii, diag_pw_w});
        nonwet.push_back({m + ii, m + ii, diag_pw_o});
        nonwet.push_back({m + ii, ii, diag_s_o});
        sys.rhs[i] = rhs_w;
        sys.rhs[mu + i] = rhs_o;
    });

    if (!dirichlet) {
        // replace the last wetting row with the zero-mean pressure constraint
        const std::size_t last = mu - 1;
        rows[last].clear();
        rows[last].reserve(mu);
        for (int k = 0; k < m; ++k)
            rows[last].push_back({static_cast<int>(last), m + k,
                                  g.lumped_mass[static_cast<std::size_t>(k)]});
        sys.rhs[last] = 0.0;
    }

    std::size_t total = 0;
    for (const auto& r : rows) total += r.size();
    sys.triplets.reserve(total);
    for (const auto& r : rows) sys.triplets.insert(sys.triplets.end(), r.begin(), r.end());
    return sys;
}

TimeState make_state(const Problem& prob, int n, double t, std::vector<double> s,
                     std::vector<double> pw) {
    TimeState st;
    st.n = n;
    st.t = t;
    st.S = NodalField(*prob.geom);
    st.Pw = NodalField(*prob.geom);
    st.Po = NodalField(*prob.geom);
    st.S.v = std::move(s);
    st.Pw.v = std::move(pw);
    st.Po.v = nodal_po(*prob.model, st.S.v, st.Pw.v);
    return st;
}

void enforce_dirichlet_exact(const Problem& prob, double t, std::vector<double>& s,
                             std::vector<double>& pw) {
    const Geometry& g = *prob.geom;
    for (int b : g.mesh.boundary_nodes) {
        const Vec2 x = g.mesh.nodes[static_cast<std::size_t>(b)];
        s[static_cast<std::size_t>(b)] = prob.src.trace_S(t, x.x, x.y);
        pw[static_cast<std::size_t>(b)] = prob.src.trace_Pw(t, x.x, x.y);
    }
}

}  // namespace

AssembledSystem assemble_semi_implicit(const Problem& prob, const TimeState& state_n, double tau) {
    require_mesh(state_n.S, *prob.geom);
    const DiscreteSources srcs = build_discrete_sources(prob, tau, state_n.n + 1);
    const double t_next = state_n.t + tau;
    return assemble_linearized(prob, state_n.S.v, state_n.S.v, state_n.Pw.v, srcs, tau, t_next);
}

TimeState step_semi_implicit(const Problem& prob, const TimeState& state_n,
                             const SolverConfig& cfg) {
    const Geometry& g = *prob.geom;
    if (prob.src.bc == BcMode::no_flux && !cfg.pressure_constraint)
        throw SolverError(
            "no-flux system is singular: constant pressure nullspace requires the zero-mean "
            "constraint row");
    AssembledSystem sys = assemble_semi_implicit(prob, state_n, cfg.tau);
    std::vector<double> x;
    try {
        x = solve_sparse(sys.size, sys.triplets, sys.rhs, cfg.linear);
    } catch (const SolverError& err) {
        throw SolverError(std::string("time-extrapolated step failed: ") + err.what());
    }
    const std::size_t m = static_cast<std::size_t>(g.node_count());
    std::vector<double> s(x.begin(), x.begin() + static_cast<long>(m));
    std::vector<double> pw(x.begin() + static_cast<long>(m), x.end());
    const double t_next = state_n.t + cfg.tau;
    if (is_dirichlet(prob)) {
        enforce_dirichlet_exact(prob, t_next, s, pw);
    } else {
        const double mean =
            par::det_sum(m, [&](std::size_t i) { return g.lumped_mass[i] * pw[i]; }) /
            g.domain_area;
        par::parallel_for(m, [&](std::size_t i) { pw[i] -= mean; });
    }
    return make_state(prob, state_n.n + 1, t_next, std::move(s), std::move(pw));
}

namespace {

std::vector<double> residual_core(const Problem& prob, const std::vector<double>& s,
                                  const std::vector<double>& pw,
                                  const std::vector<double>& anchor_s,
                                  const DiscreteSources& srcs, double tau, double t_next,
                                  bool replace_rows) {
    const Geometry& g = *prob.geom;
    const FluidModel& model = *prob.model;
    const std::size_t m = static_cast<std::size_t>(g.node_count());
    const std::vector<double> po = nodal_po(model, s, pw);
    const std::vector<EdgeSel> sel = select_upwind(g, s, pw, po);
    const SourceTerms st = source_terms(prob, srcs, s);
    const bool dirichlet = is_dirichlet(prob);

    std::vector<double> r(2 * m, 0.0);
    par::parallel_for(m, [&](std::size_t i) {
        const bool bdry = g.mesh.is_boundary[i] != 0;
        if (replace_rows && dirichlet && bdry) {
            const Vec2 x = g.mesh.nodes[i];
            r[i] = s[i] - prob.src.trace_S(t_next, x.x, x.y);
            r[m + i] = pw[i] - prob.src.trace_Pw(t_next, x.x, x.y);
            return;
        }
        const double mass = prob.mass_phi[i] / tau;
        double flux_w = 0.0, flux_o = 0.0;
        for (int p = g.nbr_off[i]; p < g.nbr_off[i + 1]; ++p) {
            const int j = g.nbr_node[static_cast<std::size_t>(p)];
            const int e = g.nbr_edge[static_cast<std::size_t>(p)];
            const std::size_t eu = static_cast<std::size_t>(e), ju = static_cast<std::size_t>(j);
            const double c = g.edge_c[eu];
            if (c == 0.0) continue;
            flux_w += c * model.eta_w(sel[eu].sw) * (pw[ju] - pw[i]);
            flux_o += c * model.eta_o(sel[eu].so) * (po[ju] - po[i]);
        }
        r[i] = mass * (s[i] - anchor_s[i]) - flux_w - st.wet[i];
        r[m + i] = -mass * (s[i] - anchor_s[i]) - flux_o - st.nonwet[i];
    });
    if (replace_rows && !dirichlet) {
        r[m - 1] = par::det_sum(m, [&](std::size_t i) { return g.lumped_mass[i] * pw[i]; });
    }
    return r;
}

}  // namespace

std::vector<double> residual_implicit(const Problem& prob, const TimeState& guess,
                                      const TimeState& state_n, double tau) {
    require_mesh(guess.S, *prob.geom);
    require_mesh(state_n.S, *prob.geom);
    const DiscreteSources srcs = build_discrete_sources(prob, tau, state_n.n + 1);
    return residual_core(prob, guess.S.v, guess.Pw.v, state_n.S.v, srcs, tau, state_n.t + tau,
                         true);
}

double redundant_wetting_row(const Problem& prob, const TimeState& guess,
                             const TimeState& state_n, double tau) {
    const DiscreteSources srcs = build_discrete_sources(prob, tau, state_n.n + 1);
    const std::vector<double> full = residual_core(prob, guess.S.v, guess.Pw.v, state_n.S.v, srcs,
                                                   tau, state_n.t + tau, false);
    return full[static_cast<std::size_t>(prob.geom->node_count()) - 1];
}

namespace {

std::vector<Triplet> jacobian_core(const Problem& prob, const std::vector<double>& s,
                                   const std::vector<double>& pw,
                                   const DiscreteSources& srcs, double tau) {
    const Geometry& g = *prob.geom;
    const FluidModel& model = *prob.model;
    const int m = g.node_count();
    const std::size_t mu = static_cast<std::size_t>(m);
    const std::vector<double> po = nodal_po(model, s, pw);
    const std::vector<EdgeSel> sel = select_upwind(g, s, pw, po);
    std::vector<double> pcp(mu);
    par::parallel_for(mu, [&](std::size_t i) { pcp[i] = model.pc_prime(s[i]); });
    const bool dirichlet = is_dirichlet(prob);
    const bool wells = prob.src.mode == SourceMode::wells;

    std::vector<std::vector<Triplet>> rows(2 * mu);
    par::parallel_for(mu, [&](std::size_t i) {
        const int ii = static_cast<int>(i);
        const bool bdry = g.mesh.is_boundary[i] != 0;
        auto& wet = rows[i];
        auto& nonwet = rows[mu + i];
        const bool last_no_flux = !dirichlet && ii == m - 1;
        if (dirichlet && bdry) {
            wet.push_back({ii, ii, 1.0});
            nonwet.push_back({m + ii, m + ii, 1.0});
            return;
        }
        if (last_no_flux) {
            wet.reserve(mu);
            for (int k = 0; k < m; ++k)
                wet.push_back({ii, m + k, g.lumped_mass[static_cast<std::size_t>(k)]});
        }
        const double mass = prob.mass_phi[i] / tau;
        double w_si = mass, o_si = -mass;  // dR/dS_i
        if (wells) {
            const double dfw = model.f_w_prime(s[i]) * g.lumped_mass[i] * srcs.qunder[i];
            w_si += dfw;
            o_si -= dfw;
        }
        double w_pi = 0.0, o_pi = 0.0;
        for (int p = g.nbr_off[i]; p < g.nbr_off[i + 1]; ++p) {
            const int j = g.nbr_node[static_cast<std::size_t>(p)];
            const int e = g.nbr_edge[static_cast<std::size_t>(p)];
            const std::size_t eu = static_cast<std::size_t>(e), ju = static_cast<std::size_t>(j);
            const double c = g.edge_c[eu];
            if (c == 0.0) continue;
            const double ew = model.eta_w(sel[eu].sw);
            const double eo = model.eta_o(sel[eu].so);
            const double dpw = pw[ju] - pw[i];
            const double dpo = po[ju] - po[i];

            if (!last_no_flux) {
                // wetting row: -c eta_w(S_w^sel) (P_j - P_i)
                w_pi += c * ew;
                wet.push_back({ii, m + j, -c * ew});
                const double dw = -c * model.eta_w_prime(sel[eu].sw) * dpw;
                if (dw != 0.0) wet.push_back({ii, sel[eu].nw, dw});
            }
            // nonwetting row: -c eta_o(S_o^sel) (Po_j - Po_i), Po = P + pc(S)
            o_pi += c * eo;
            nonwet.push_back({m + ii, m + j, -c * eo});
            const double dod = -c * model.eta_o_prime(sel[eu].so) * dpo;
            if (dod != 0.0) nonwet.push_back({m + ii, sel[eu].no, dod});
            o_si += c * eo * pcp[i];
            nonwet.push_back({m + ii, j, -c * eo * pcp[ju]});
        }
        if (!last_no_flux) {
            wet.push_back({ii, ii, w_si});
            wet.push_back({ii, m + ii, w_pi});
        }
        nonwet.push_back({m + ii, ii, o_si});
        nonwet.push_back({m + ii, m + ii, o_pi});
    });

    std::vector<Triplet> triplets;
    std::size_t total = 0;
    for (const auto& r : rows) total += r.size();
    triplets.reserve(total);
    for (const auto& r : rows) triplets.insert(triplets.end(), r.begin(), r.end());
    return triplets;
}

}  // namespace

std::vector<Triplet> jacobian_implicit(const Problem& prob, const TimeState& guess,
                                       const TimeState& state_n, double tau) {
    const DiscreteSources srcs = build_discrete_sources(prob, tau, state_n.n + 1);
    return jacobian_core(prob, guess.S.v, guess.Pw.v, srcs, tau);
}

TimeState step_implicit(const Problem& prob, const TimeState& state_n, const SolverConfig& cfg,
                        StepStats* stats) {
    const Geometry& g = *prob.geom;
    if (prob.src.bc == BcMode::no_flux && !cfg.pressure_constraint)
        throw SolverError(
            "no-flux system is singular: constant pressure nullspace requires the zero-mean "
            "constraint row");
    const int m = g.node_count();
    const std::size_t mu = static_cast<std::size_t>(m);
    const int n_next = state_n.n + 1;
    const double t_next = state_n.t + cfg.tau;
    const DiscreteSources srcs = build_discrete_sources(prob, cfg.tau, n_next);

    std::vector<double> s = state_n.S.v;
    std::vector<double> pw = state_n.Pw.v;
    auto eval = [&](const std::vector<double>& sv, const std::vector<double>& pv) {
        return residual_core(prob, sv, pv, state_n.S.v, srcs, cfg.tau, t_next, true);
    };

    std::vector<double> r = eval(s, pw);
    double rnorm = linf(r);
    int iters = 0;
    int picard = 0;
    while (rnorm > cfg.newton_tol) {
        if (iters >= cfg.newton_max_iters) {
            std::ostringstream msg;
            msg << "Newton did not converge in " << cfg.newton_max_iters
                << " iterations (residual " << rnorm << "); reduce tau";
            throw SolverError(msg.str());
        }
        const std::vector<Triplet> jac = jacobian_core(prob, s, pw, srcs, cfg.tau);
        std::vector<double> neg_r(r.size());
        for (std::size_t k = 0; k < r.size(); ++k) neg_r[k] = -r[k];
        std::vector<double> delta;
        try {
            delta = solve_sparse(2 * m, jac, neg_r, cfg.linear);
        } catch (const SolverError& err) {
            throw SolverError(std::string("Newton linear solve failed: ") + err.what());
        }
        bool accepted = false;
        double alpha = 1.0;
        std::vector<double> st(mu), pt(mu);
        while (alpha >= cfg.min_line_search_step) {
            for (std::size_t k = 0; k < mu; ++k) {
                st[k] = s[k] + alpha * delta[k];
                pt[k] = pw[k] + alpha * delta[mu + k];
            }
            std::vector<double> rt = eval(st, pt);
            const double nt = linf(rt);
            if (nt <= (1.0 - 1e-4 * alpha) * rnorm) {
                s.swap(st);
                pw.swap(pt);
                r.swap(rt);
                rnorm = nt;
                accepted = true;
                break;
            }
            alpha *= cfg.damping_factor;
        }
        if (!accepted) {
            // frozen-mobility sweep: relinearize about the current iterate
            AssembledSystem sys =
                assemble_linearized(prob, state_n.S.v, s, pw, srcs, cfg.tau, t_next);
            std::vector<double> x;
            try {
                x = solve_sparse(sys.size, sys.triplets, sys.rhs, cfg.linear);
            } catch (const SolverError& err) {
                throw SolverError(std::string("fixed-point fallback failed: ") + err.what());
            }
            std::copy(x.begin(), x.begin() + static_cast<long>(mu), s.begin());
            std::copy(x.begin() + static_cast<long>(mu), x.end(), pw.begin());
            r = eval(s, pw);
            rnorm = linf(r);
            ++picard;
        }
        ++iters;
    }
    if (stats != nullptr) {
        stats->newton_iters = iters;
        stats->picard_sweeps = picard;
        stats->residual_norm = rnorm;
    }
    if (is_dirichlet(prob)) enforce_dirichlet_exact(prob, t_next, s, pw);
    return make_state(prob, n_next, t_next, std::move(s), std::move(pw));
}

double flux_imbalance(const Problem& prob, const TimeState& state, const DiscreteSources& srcs) {
    const Geometry& g = *prob.geom;
    const DirectedEdgeField flux = total_flux(g, state, *prob.model);
    const bool dirichlet = is_dirichlet(prob);
    const bool wells = prob.src.mode == SourceMode::wells;
    return par::det_max(static_cast<std::size_t>(g.node_count()), [&](std::size_t i) {
        if (dirichlet && g.mesh.is_boundary[i]) return 0.0;
        double acc = 0.0;
        for (int p = g.nbr_off[i]; p < g.nbr_off[i + 1]; ++p) {
            const int j = g.nbr_node[static_cast<std::size_t>(p)];
            const int e = g.nbr_edge[static_cast<std::size_t>(p)];
            const double sign = static_cast<int>(i) < j ? 1.0 : -1.0;
            acc += g.edge_c[static_cast<std::size_t>(e)] * sign * flux.v[static_cast<std::size_t>(e)];
        }
        const double rhs = wells ? g.lumped_mass[i] * (srcs.qbar[i] - srcs.qunder[i])
                                 : g.lumped_mass[i] * (srcs.f1[i] + srcs.f2[i]);
        return std::abs(acc - rhs);
    });
}

RunResult run(const Problem& prob, TimeState initial, const SolverConfig& cfg,
              const RunHooks& hooks) {
    const Geometry& g = *prob.geom;
    require_mesh(initial.S, g);
    if (!(cfg.tau > 0.0) || !(cfg.T >= cfg.tau))
        throw std::invalid_argument("solver needs tau > 0 and T >= tau");
    const int nsteps = static_cast<int>(std::llround(cfg.T / cfg.tau));

    RunResult out;
    out.state = std::move(initial);
    double energy_acc = 0.0;
    auto diagnostics = [&](const TimeState& st, int iters) {
        RunLogRow row;
        row.step = st.n;
        row.t = st.t;
        row.min_s = par::det_min(st.S.size(), [&](std::size_t i) { return st.S[i]; });
        row.max_s = par::det_max(st.S.size(), [&](std::size_t i) { return st.S[i]; });
        row.mean_pw = par::det_sum(st.Pw.size(), [&](std::size_t i) {
                          return g.lumped_mass[i] * st.Pw[i];
                      }) /
                      g.domain_area;
        row.energy_acc = energy_acc;
        row.newton_iters = iters;
        if (st.n > 0) {
            const DiscreteSources srcs = build_discrete_sources(prob, cfg.tau, st.n);
            row.flux_imbalance = flux_imbalance(prob, st, srcs);
        }
        return row;
    };
    {
        RunLogRow row0 = diagnostics(out.state, 0);
        out.log.rows.push_back(row0);
        if (hooks.on_step) hooks.on_step(out.state, row0);
    }
    for (int n = 1; n <= nsteps; ++n) {
        StepStats stats;
        try {
            if (cfg.scheme == Scheme::implicit) {
                out.state = step_implicit(prob, out.state, cfg, &stats);
            } else {
                out.state = step_semi_implicit(prob, out.state, cfg);
            }
        } catch (const SolverError& err) {
            throw SolverError("step " + std::to_string(n) + ": " + err.what());
        }
        energy_acc += cfg.tau * energy_diagnostic(g, out.state, *prob.model);
        RunLogRow row = diagnostics(out.state, stats.newton_iters);
        out.log.rows.push_back(row);
        if (hooks.on_step) hooks.on_step(out.state, row);
    }
    return out;
}

}  // namespace tpflow
