#pragma once

#include <array>
#include <cstddef>
#include <functional>

#include "tpflow/common.hpp"

namespace tpflow::quad {

/// Quadrature point on a triangle in barycentric coordinates; weights sum to 1
/// (multiply by |K| for the physical integral).
struct TriPoint {
    double b0, b1, b2;
    double w;
};

/// Edge-midpoint rule, exact for polynomials of degree 2. All weights are
/// positive, so patch averages of data in [0,1] stay in [0,1].
const std::array<TriPoint, 3>& tri_midpoint();

/// 7-point rule, exact for polynomials of degree 5.
const std::array<TriPoint, 7>& tri_deg5();

/// 3-point Gauss-Legendre on [0,1] (degree 5).
struct GaussPoint {
    double x, w;
};
const std::array<GaussPoint, 3>& gauss3();

/// Integrate f over the triangle (p0,p1,p2) with the given rule.
template <std::size_t N>
double integrate_tri(const std::array<TriPoint, N>& rule, Vec2 p0, Vec2 p1, Vec2 p2, double area,
                     const std::function<double(double, double)>& f) {
    double s = 0.0;
    for (const auto& q : rule) {
        const double x = q.b0 * p0.x + q.b1 * p1.x + q.b2 * p2.x;
        const double y = q.b0 * p0.y + q.b1 * p1.y + q.b2 * p2.y;
        s += q.w * f(x, y);
    }
    return s * area;
}

/// Adaptive Simpson on [a,b], absolute tolerance. Throws ModelError when the
/// recursion depth limit is hit before the tolerance is met.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace tpflow::quad
