#pragma once

#include <string>
#include <vector>

#include "tpflow/stepper.hpp"

namespace tpflow {

/// Analytic solution pair with the derivatives needed to manufacture sources:
/// first space derivatives, Laplacians, and the first time derivative.
struct ExactSolution {
    SpaceTimeFn pw, pw_x, pw_y, pw_lap, pw_t;
    SpaceTimeFn s, s_x, s_y, s_lap, s_t;
};

/// Built-in solution pair of the convergence study:
///   P_w = 2 + x^2 y - y^2 + x^2 sin(t + y)
///   S   = 0.2 (2 + 2 x y + cos(t + x))
/// S stays inside (0,1) on the unit square for t in [0,1].
ExactSolution mms_exact_solution();

/// Right-hand sides obtained by substituting the exact fields into the strong
/// equations:
///   f1 =  d_t(phi S) - div(eta_w(S) grad P_w)
///   f2 = -d_t(phi S) - div(eta_o(S) grad (P_w + p_c(S)))
/// Requires the model's analytic eta' and p_c'' (chain rule expansion).
/// Throws DataError when the sampled exact saturation leaves (0,1).
std::pair<SpaceTimeFn, SpaceTimeFn> manufactured_sources(const FluidModel& model,
                                                         const SpaceFn& porosity,
                                                         const ExactSolution& exact);

/// L2 norm of the P1 interpolant of the nodal error (consistent mass matrix).
double l2_error(const NodalField& field, const SpaceFn& exact_at_time);

struct ConvergenceRow {
    double h = 0.0;
    int n_df = 0;
    double err_pw = 0.0;
    double rate_pw = 0.0;  // NaN on the first row
    double err_s = 0.0;
    double rate_s = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
};

struct StudyConfig {
    std::vector<int> levels = {5, 10, 20, 40, 80};  // h = 1/n, tau = h
    double final_time = 1.0;
    Scheme scheme = Scheme::semi_implicit;
    SolverConfig solver;  // tau/T overridden per level
};

struct StudyResult {
    ConvergenceTable table;
    bool completed = true;
    std::string error;  // first failing level's message when not completed
};

/// Dirichlet-bounded manufactured run per level with tau = h and initial data
/// interpolated from the exact solution; errors measured at the final time.
/// A failing level aborts the study and leaves the partial table.
StudyResult convergence_study(const StudyConfig& study, const FluidModel& model,
                              const SpaceFn& porosity, const ExactSolution& exact);

std::string table_to_csv(const ConvergenceTable& table);
std::string table_to_text(const ConvergenceTable& table);

}  // namespace tpflow
