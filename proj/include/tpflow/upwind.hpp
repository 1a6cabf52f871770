#pragma once

#include "tpflow/constitutive.hpp"
#include "tpflow/fem_core.hpp"
#include "tpflow/state.hpp"

namespace tpflow {

enum class Phase { wetting, nonwetting };

/// Phase-potential upwind saturation per edge: the value from the node with
/// the higher phase pressure; on an exact pressure tie, max (wetting) or min
/// (nonwetting) of the endpoint values. Ties use exact floating-point
/// equality so the residual stays piecewise smooth.
EdgeField upwind_saturations(const NodalField& s, const NodalField& p, Phase phase);

/// Edge values f(midpoint of edge (i,j)); symmetric by construction.
EdgeField edge_values_from_function(const Geometry& geom, const SpaceFn& f);

/// Node residual contributions r_i = sum_j c_ij W~_ij (V_j - V_i).
NodalField apply_upwind_form(const Geometry& geom, const EdgeField& w, const NodalField& v);

/// The upwinded form value sum_ij U_i c_ij W~_ij (V_j - V_i).
double form_value(const Geometry& geom, const EdgeField& w, const NodalField& v,
                  const NodalField& u);

/// Antisymmetric upwinded total flux
/// F_ij = -eta_w(S_w^ij)(Pw_j - Pw_i) - eta_o(S_o^ij)(Po_j - Po_i).
DirectedEdgeField total_flux(const Geometry& geom, const TimeState& state, const FluidModel& model);

/// sum_ij c_ij [eta_w(S_w^ij)(Pw_i - Pw_j)^2 + eta_o(S_o^ij)(Po_i - Po_j)^2]
/// for the current level (the time accumulation is done by the stepper).
double energy_diagnostic(const Geometry& geom, const TimeState& state, const FluidModel& model);

/// Diagnostic auxiliary pressures U_w = P_w + I_h(p_wg(S)) and
/// U_o = P_o - I_h(p_og(S)); their gradients stay bounded under refinement.
std::pair<NodalField, NodalField> aux_pressure_fields(const Geometry& geom,
                                                      const TimeState& state,
                                                      const FluidModel& model);

}  // namespace tpflow
