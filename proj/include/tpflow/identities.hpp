#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tpflow/fem_core.hpp"
#include "tpflow/upwind.hpp"

namespace tpflow {

/// Random mesh satisfying the angle condition: an anisotropically scaled
/// criss lattice (angles <= pi/2 by construction), optionally jittered in the
/// interior when the jitter keeps every angle strictly below pi/2.
SimplicialMesh random_acute_mesh(std::mt19937_64& rng, int n_min = 2, int n_max = 10);

struct IdentityCheck {
    std::string name;
    double worst = 0.0;  // worst normalized defect over all meshes
    double tol = 0.0;
    bool ok = true;
};

struct IdentityReport {
    std::vector<IdentityCheck> checks;
    int meshes = 0;
    bool all_ok = true;
};

/// Property suite for the discrete gradient/upwind-form identities on
/// randomized acute meshes with random fields:
///   - the two gradient-pairing equalities and the gradient-norm formula,
///   - the weighted pairing against the per-element coupling contributions,
///   - vanishing of the symmetric-weight double sum and of the upwind form
///     against constants, the quadratic-form sign identity,
///   - agreement of each c_ij with the independently signed element sums.
/// All defects are normalized and compared against 1e-12.
IdentityReport run_identity_suite(std::uint64_t seed, int n_meshes = 20);

/// | int_Omega w grad u . grad v  +  sum_ij U_i c_ij w(mid_ij) (V_j - V_i) |
/// with U = I_h u, V = I_h v; the continuous integral uses the analytic
/// gradients and degree-5 quadrature.
double consistency_gap(const Geometry& geom, const SpaceFn& w, const SpaceFn& u,
                       const SpaceFn& u_x, const SpaceFn& u_y, const SpaceFn& v,
                       const SpaceFn& v_x, const SpaceFn& v_y);

}  // namespace tpflow
