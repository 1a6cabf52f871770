#pragma once

#include <functional>
#include <optional>

#include "tpflow/fields.hpp"
#include "tpflow/quadrature.hpp"

namespace tpflow {

using SpaceFn = std::function<double(double, double)>;
using TimeFn = std::function<double(double)>;

/// Lumped (trapezoidal) scalar product: sum_i m_i U_i V_i, or with a
/// piecewise-constant weight, sum_i m~_i(w) U_i V_i.
double inner_h(const NodalField& u, const NodalField& v,
               const ElementField* weight = nullptr);

double norm_h(const NodalField& u, const ElementField* weight = nullptr);

/// Lagrange interpolation: values are f at the nodes.
NodalField interpolate_nodal(const Geometry& geom, const SpaceFn& f);

/// Patch-average operator: value at node i is the mean of f over the support
/// patch Delta_i (3-point degree-2 rule per element; positive weights, so
/// bounds on f are preserved).
NodalField project_patch_average(const Geometry& geom, const SpaceFn& f);

/// Element-by-element mean of f (same 3-point rule).
ElementField project_elementwise(const Geometry& geom, const SpaceFn& f);

/// Mean of f over the time slab [t_{n-1}, t_n] with 3-point Gauss.
double project_time(const TimeFn& f, double tau, int n);

/// int_Omega w grad U . grad V from the constant per-element gradients.
/// Serves as the independent side of the discrete gradient identities.
double stiffness_pairing(const NodalField& u, const NodalField& v,
                         const ElementField* weight = nullptr);

/// Exact L2 norm of the P1 interpolant of the nodal error values (consistent
/// mass matrix, assembled per element).
double consistent_l2_norm(const Geometry& geom, const std::vector<double>& nodal);

/// Composite degree-5 quadrature of a smooth function over the mesh.
double integrate_deg5(const Geometry& geom, const SpaceFn& f);

}  // namespace tpflow
