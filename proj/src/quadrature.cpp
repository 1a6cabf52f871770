#include "tpflow/quadrature.hpp"

#include <cmath>

namespace tpflow::quad {

const std::array<TriPoint, 3>& tri_midpoint() {
    static const std::array<TriPoint, 3> rule = {{
        {0.5, 0.5, 0.0, 1.0 / 3.0},
        {0.0, 0.5, 0.5, 1.0 / 3.0},
        {0.5, 0.0, 0.5, 1.0 / 3.0},
    }};
    return rule;
}

const std::array<TriPoint, 7>& tri_deg5() {
    constexpr double a = 0.059715871789770;
    constexpr double b = 0.470142064105115;
    constexpr double wa = 0.132394152788506;
    constexpr double c = 0.797426985353087;
    constexpr double d = 0.101286507323456;
    constexpr double wc = 0.125939180544827;
    static const std::array<TriPoint, 7> rule = {{
        {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
        {a, b, b, wa},
        {b, a, b, wa},
        {b, b, a, wa},
        {c, d, d, wc},
        {d, c, d, wc},
        {d, d, c, wc},
    }};
    return rule;
}

const std::array<GaussPoint, 3>& gauss3() {
    const double r = std::sqrt(0.6);
    static const std::array<GaussPoint, 3> rule = {{
        {0.5 * (1.0 - r), 5.0 / 18.0},
        {0.5, 8.0 / 18.0},
        {0.5 * (1.0 + r), 5.0 / 18.0},
    }};
    return rule;
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa, double b, double fb,
             double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double err = left + right - whole;
    if (std::abs(err) <= 15.0 * tol || (b - a) < 1e-15) return left + right + err / 15.0;
    if (depth <= 0) throw ModelError("adaptive quadrature: depth limit before tolerance was met");
    return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = simpson(a, fa, b, fb, fm);
    return adapt(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

}  // namespace tpflow::quad
