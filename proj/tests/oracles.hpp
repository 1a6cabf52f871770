#pragma once

// Test-side oracles, independent of the library's computation paths: dense
// mass matrices from quadrature, nested finite differences for manufactured
// sources and Jacobians, and little helpers shared across the suites.

#include <cmath>
#include <random>
#include <vector>

#include "tpflow/fem_core.hpp"
#include "tpflow/mms.hpp"
#include "tpflow/stepper.hpp"

namespace oracle {

using namespace tpflow;

/// Dense consistent P1 mass matrix assembled by quadrature on each element
/// (midpoint rule, exact for products of linears).
inline std::vector<std::vector<double>> dense_mass_matrix(const Geometry& g) {
    const int m = g.node_count();
    std::vector<std::vector<double>> mass(static_cast<std::size_t>(m),
                                          std::vector<double>(static_cast<std::size_t>(m), 0.0));
    const auto& rule = quad::tri_midpoint();
    for (int k = 0; k < g.element_count(); ++k) {
        const auto& e = g.mesh.elements[static_cast<std::size_t>(k)];
        const Vec2 p[3] = {g.mesh.nodes[e[0]], g.mesh.nodes[e[1]], g.mesh.nodes[e[2]]};
        const double area = g.elem_area[static_cast<std::size_t>(k)];
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                double acc = 0.0;
                for (const auto& q : rule) {
                    const double bary[3] = {q.b0, q.b1, q.b2};
                    acc += q.w * bary[a] * bary[b];
                }
                mass[static_cast<std::size_t>(e[a])][static_cast<std::size_t>(e[b])] += area * acc;
                (void)p;
            }
        }
    }
    return mass;
}

inline double dense_l2_norm(const Geometry& g, const std::vector<double>& nodal) {
    const auto mass = dense_mass_matrix(g);
    double sq = 0.0;
    for (std::size_t i = 0; i < nodal.size(); ++i)
        for (std::size_t j = 0; j < nodal.size(); ++j) sq += nodal[i] * mass[i][j] * nodal[j];
    return std::sqrt(std::max(0.0, sq));
}

/// L2 norm of (I_h f - f) by degree-5 quadrature.
inline double interp_error_l2(const Geometry& g, const SpaceFn& f) {
    const NodalField fh = interpolate_nodal(g, f);
    const auto& rule = quad::tri_deg5();
    double sq = 0.0;
    for (int k = 0; k < g.element_count(); ++k) {
        const std::size_t ku = static_cast<std::size_t>(k);
        const auto& e = g.mesh.elements[ku];
        const Vec2 p[3] = {g.mesh.nodes[e[0]], g.mesh.nodes[e[1]], g.mesh.nodes[e[2]]};
        for (const auto& q : rule) {
            const double x = q.b0 * p[0].x + q.b1 * p[1].x + q.b2 * p[2].x;
            const double y = q.b0 * p[0].y + q.b1 * p[1].y + q.b2 * p[2].y;
            const double interp = q.b0 * fh[static_cast<std::size_t>(e[0])] +
                                  q.b1 * fh[static_cast<std::size_t>(e[1])] +
                                  q.b2 * fh[static_cast<std::size_t>(e[2])];
            const double d = interp - f(x, y);
            sq += q.w * g.elem_area[ku] * d * d;
        }
    }
    return std::sqrt(sq);
}

/// Nested central differences of the two strong-form right-hand sides; fully
/// independent of the chain-rule expansion under test.
inline double fd_f1(const FluidModel& model, const SpaceFn& phi, const ExactSolution& ex,
                    double t, double x, double y, double d = 1e-4) {
    auto phis = [&](double tt, double xx, double yy) { return phi(xx, yy) * ex.s(tt, xx, yy); };
    const double dt_phis = (phis(t + d, x, y) - phis(t - d, x, y)) / (2 * d);
    auto flux_x = [&](double xx, double yy) {
        const double px = (ex.pw(t, xx + d, yy) - ex.pw(t, xx - d, yy)) / (2 * d);
        return model.eta_w(ex.s(t, xx, yy)) * px;
    };
    auto flux_y = [&](double xx, double yy) {
        const double py = (ex.pw(t, xx, yy + d) - ex.pw(t, xx, yy - d)) / (2 * d);
        return model.eta_w(ex.s(t, xx, yy)) * py;
    };
    const double div = (flux_x(x + d, y) - flux_x(x - d, y)) / (2 * d) +
                       (flux_y(x, y + d) - flux_y(x, y - d)) / (2 * d);
    return dt_phis - div;
}

inline double fd_f2(const FluidModel& model, const SpaceFn& phi, const ExactSolution& ex,
                    double t, double x, double y, double d = 1e-4) {
    auto phis = [&](double tt, double xx, double yy) { return phi(xx, yy) * ex.s(tt, xx, yy); };
    const double dt_phis = (phis(t + d, x, y) - phis(t - d, x, y)) / (2 * d);
    auto po = [&](double xx, double yy) {
        return ex.pw(t, xx, yy) + model.pc(ex.s(t, xx, yy));
    };
    auto flux_x = [&](double xx, double yy) {
        const double px = (po(xx + d, yy) - po(xx - d, yy)) / (2 * d);
        return model.eta_o(ex.s(t, xx, yy)) * px;
    };
    auto flux_y = [&](double xx, double yy) {
        const double py = (po(xx, yy + d) - po(xx, yy - d)) / (2 * d);
        return model.eta_o(ex.s(t, xx, yy)) * py;
    };
    const double div = (flux_x(x + d, y) - flux_x(x - d, y)) / (2 * d) +
                       (flux_y(x, y + d) - flux_y(x, y - d)) / (2 * d);
    return -dt_phis - div;
}

/// Dense central-difference Jacobian of residual_implicit.
inline std::vector<std::vector<double>> fd_jacobian(const Problem& prob, const TimeState& guess,
                                                    const TimeState& state_n, double tau,
                                                    double delta = 1e-6) {
    const int m = prob.geom->node_count();
    const int n = 2 * m;
    std::vector<std::vector<double>> jac(static_cast<std::size_t>(n),
                                         std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int col = 0; col < n; ++col) {
        TimeState plus = guess, minus = guess;
        auto& vp = col < m ? plus.S.v : plus.Pw.v;
        auto& vm = col < m ? minus.S.v : minus.Pw.v;
        const std::size_t idx = static_cast<std::size_t>(col < m ? col : col - m);
        const double d = delta * std::max(1.0, std::abs(vp[idx]));
        vp[idx] += d;
        vm[idx] -= d;
        const auto rp = residual_implicit(prob, plus, state_n, tau);
        const auto rm = residual_implicit(prob, minus, state_n, tau);
        for (int row = 0; row < n; ++row)
            jac[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] =
                (rp[static_cast<std::size_t>(row)] - rm[static_cast<std::size_t>(row)]) / (2 * d);
    }
    return jac;
}

inline std::vector<std::vector<double>> dense_from_triplets(int n,
                                                            const std::vector<Triplet>& ts) {
    std::vector<std::vector<double>> a(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (const auto& t : ts)
        a[static_cast<std::size_t>(t.row)][static_cast<std::size_t>(t.col)] += t.value;
    return a;
}

/// Wells problem on the unit square: degree-4 polynomial injection bump,
/// constant balanced production, constant input saturation.
inline SourceModel polynomial_wells(double amp, double s_in_value) {
    SourceModel src;
    src.mode = SourceMode::wells;
    src.bc = BcMode::no_flux;
    src.qbar = [amp](double, double x, double y) {
        return amp * 16.0 * x * (1.0 - x) * y * (1.0 - y);
    };
    src.qbar_mean = [amp](double) { return amp * 16.0 / 36.0; };
    src.qunder = [amp](double, double, double) { return amp * 16.0 / 36.0; };
    src.qunder_mean = [amp](double) { return amp * 16.0 / 36.0; };
    src.s_in = [s_in_value](double, double, double) { return s_in_value; };
    return src;
}

inline double rate(double err_coarse, double err_fine, double h_ratio = 2.0) {
    return std::log(err_coarse / err_fine) / std::log(h_ratio);
}

}  // namespace oracle
