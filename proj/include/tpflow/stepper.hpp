#pragma once

#include <functional>
#include <vector>

#include "tpflow/constitutive.hpp"
#include "tpflow/linear_solver.hpp"
#include "tpflow/state.hpp"
#include "tpflow/upwind.hpp"

namespace tpflow {

using SpaceTimeFn = std::function<double(double, double, double)>;  // (t, x, y)

enum class SourceMode { wells, manufactured };
enum class BcMode { no_flux, dirichlet };
enum class Scheme { semi_implicit, implicit };

struct SourceModel {
    SourceMode mode = SourceMode::wells;
    BcMode bc = BcMode::no_flux;

    // wells mode: injection/production rates (>= 0) and input saturation
    SpaceTimeFn qbar, qunder, s_in;
    // optional analytic domain integrals of the rates; quadrature otherwise
    TimeFn qbar_mean, qunder_mean;

    // manufactured mode: right-hand sides of the two equations
    SpaceTimeFn f1, f2;

    // dirichlet mode: boundary traces
    SpaceTimeFn trace_S, trace_Pw;
};

struct SolverConfig {
    double tau = 0.01;
    double T = 1.0;
    Scheme scheme = Scheme::semi_implicit;
    double newton_tol = 1e-10;
    int newton_max_iters = 50;
    double damping_factor = 0.5;
    double min_line_search_step = 1.0 / 1048576.0;  // 2^-20
    LinearSolverOptions linear;
    bool strict_acute = true;
    bool pressure_constraint = true;  // mean-zero row in no-flux mode
};

/// Geometry + fluid model + sources + porosity, bundled for the steppers.
/// Porosity is sampled at element centroids.
struct Problem {
    const Geometry* geom = nullptr;
    const FluidModel* model = nullptr;
    SourceModel src;
    std::vector<double> phi_elem;
    std::vector<double> mass_phi;  // m~_i(phi)
};

Problem make_problem(const Geometry& geom, const FluidModel& model, SourceModel src,
                     const SpaceFn& porosity);

/// Nodal source data for one time slab. Wells are run through the
/// patch-average and time-average projections and corrected so the discrete
/// injection/production means balance; manufactured sources are evaluated at
/// the nodes at the target time.
struct DiscreteSources {
    std::vector<double> qbar, qunder, s_in;  // wells
    std::vector<double> f1, f2;              // manufactured
};

DiscreteSources build_discrete_sources(const Problem& prob, double tau, int n);

struct AssembledSystem {
    int size = 0;
    std::vector<Triplet> triplets;
    std::vector<double> rhs;
};

/// Linear system of the time-extrapolated scheme: upwind mobilities frozen at
/// the previous level, capillary pressure replaced by its first-order Taylor
/// expansion about the previous saturation. Unknown layout [S_0..S_{M-1},
/// P_0..P_{M-1}].
AssembledSystem assemble_semi_implicit(const Problem& prob, const TimeState& state_n, double tau);

TimeState step_semi_implicit(const Problem& prob, const TimeState& state_n,
                             const SolverConfig& cfg);

/// Residual of the fully implicit scheme at `guess` (nonwetting pressure
/// eliminated through the capillary relation). Layout: wetting rows at slots
/// 0..M-1, nonwetting rows at M..2M-1. In no-flux mode the wetting slot of
/// the last node carries the zero-mean pressure constraint instead; in
/// dirichlet mode boundary slots carry the trace constraints.
std::vector<double> residual_implicit(const Problem& prob, const TimeState& guess,
                                      const TimeState& state_n, double tau);

/// The wetting-equation residual of the last node, which the no-flux system
/// omits; vanishes for any vector satisfying the remaining rows with balanced
/// discrete sources.
double redundant_wetting_row(const Problem& prob, const TimeState& guess,
                             const TimeState& state_n, double tau);

/// Analytic Jacobian of residual_implicit; upwind switches use the active
/// branch, ties the branch of the selected node.
std::vector<Triplet> jacobian_implicit(const Problem& prob, const TimeState& guess,
                                       const TimeState& state_n, double tau);

struct StepStats {
    int newton_iters = 0;
    int picard_sweeps = 0;
    double residual_norm = 0.0;
};

/// Damped Newton with backtracking line search; falls back to a frozen-
/// mobility fixed-point sweep when a step cannot reduce the residual.
TimeState step_implicit(const Problem& prob, const TimeState& state_n, const SolverConfig& cfg,
                        StepStats* stats = nullptr);

struct RunLogRow {
    int step = 0;
    double t = 0.0;
    double min_s = 0.0, max_s = 0.0;
    double mean_pw = 0.0;
    double energy_acc = 0.0;
    double flux_imbalance = 0.0;
    int newton_iters = 0;
};

struct RunLog {
    std::vector<RunLogRow> rows;
};

struct RunHooks {
    std::function<void(const TimeState&, const RunLogRow&)> on_step;
};

struct RunResult {
    TimeState state;
    RunLog log;
};

/// Time loop from t=0 to T with per-step diagnostics (saturation range, mean
/// wetting pressure, accumulated weighted energy, flux imbalance).
RunResult run(const Problem& prob, TimeState initial, const SolverConfig& cfg,
              const RunHooks& hooks = {});

/// max_i |sum_j c_ij F_ij - m_i (rhs_i)| over the nodes where both scheme
/// rows are imposed; diagnostic only.
double flux_imbalance(const Problem& prob, const TimeState& state, const DiscreteSources& src);

}  // namespace tpflow
