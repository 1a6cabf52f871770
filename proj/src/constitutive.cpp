#include "tpflow/constitutive.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "tpflow/quadrature.hpp"

namespace tpflow {

namespace {

constexpr int kCells = 8192;
constexpr int kProbe = 2048;

double clamp01(double s) { return std::clamp(s, 0.0, 1.0); }

bool inside01(double s) { return s >= 0.0 && s <= 1.0; }

}  // namespace

MonotoneTable MonotoneTable::build(std::vector<double> xs, std::vector<double> ys) {
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n) throw std::invalid_argument("table needs >= 2 knots");
    MonotoneTable t;
    t.x = std::move(xs);
    t.y = std::move(ys);
    t.m.assign(n, 0.0);
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = t.x[k + 1] - t.x[k];
        d[k] = (t.y[k + 1] - t.y[k]) / h[k];
    }
    t.m[0] = d[0];
    t.m[n - 1] = d[n - 2];
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (d[k - 1] == 0.0 || d[k] == 0.0 || (d[k - 1] > 0.0) != (d[k] > 0.0)) {
            t.m[k] = 0.0;
        } else {
            const double w1 = 2.0 * h[k] + h[k - 1];
            const double w2 = h[k] + 2.0 * h[k - 1];
            t.m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
        }
    }
    return t;
}

double MonotoneTable::operator()(double s) const {
    const std::size_t n = x.size();
    if (s <= x.front()) return y.front();
    if (s >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - x.begin()) - 1;
    const double h = x[k + 1] - x[k];
    const double t = (s - x[k]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    (void)n;
    return h00 * y[k] + h10 * h * m[k] + h01 * y[k + 1] + h11 * h * m[k + 1];
}

namespace {

std::vector<double> graded_grid(const std::vector<double>& breakpoints) {
    constexpr double pi = 3.14159265358979323846;
    std::vector<double> xs;
    xs.reserve(kCells + 1 + breakpoints.size());
    for (int k = 0; k <= kCells; ++k) {
        // cosine grading: clusters knots at both endpoints
        xs.push_back(0.5 * (1.0 - std::cos(pi * double(k) / kCells)));
    }
    for (double b : breakpoints) {
        if (b > 1e-12 && b < 1.0 - 1e-12) xs.push_back(b);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-13; }),
             xs.end());
    xs.front() = 0.0;
    xs.back() = 1.0;
    return xs;
}

/// Integrand that receives the point and its exact distances to both
/// endpoints: f(s, s-from-0, 1-minus-s). The distances stay accurate inside
/// the substituted endpoint cells where 1-s would cancel.
using EndpointFn = std::function<double(double, double, double)>;

/// Integral of f over one grid cell. Cells touching an endpoint use the
/// square substitution so integrable endpoint singularities (s^{b-1}, b>1/2)
/// are handled; the evaluation point is kept off the exact endpoint, and the
/// clamp is tightened once to verify the singular mass was actually resolved.
double cell_integral(const EndpointFn& f, double a, double b, double tol) {
    const bool at_zero = a == 0.0;
    const bool at_one = b == 1.0;
    if (!at_zero && !at_one)
        return quad::adaptive_simpson([&](double s) { return f(s, s, 1.0 - s); }, a, b, tol);

    auto substituted = [&](double tiny) {
        const double r = std::sqrt(at_zero ? b : 1.0 - a);
        return quad::adaptive_simpson(
            [&](double t) {
                const double tc = std::max(t, tiny);
                const double u = tc * tc;
                return at_zero ? 2.0 * tc * f(u, u, 1.0 - u)
                               : 2.0 * tc * f(1.0 - u, 1.0 - u, u);
            },
            0.0, r, tol);
    };
    const double coarse = substituted(1e-12);
    const double fine = substituted(1e-16);
    if (std::abs(fine - coarse) > 1e-8 * std::max(1.0, std::abs(fine)))
        throw ModelError(
            std::string("quadrature cannot resolve the integrand singularity at s = ") +
            (at_zero ? "0" : "1") + " to the cache tolerance");
    return fine;
}

MonotoneTable cumulative_table(const std::vector<double>& xs, const EndpointFn& integrand) {
    const double tol = std::max(1e-14, 1e-10 / double(xs.size()));
    std::vector<double> ys(xs.size(), 0.0);
    for (std::size_t k = 0; k + 1 < xs.size(); ++k)
        ys[k + 1] = ys[k] + cell_integral(integrand, xs[k], xs[k + 1], tol);
    return MonotoneTable::build(xs, std::move(ys));
}

}  // namespace

FluidModel::FluidModel(Callbacks cb) : cb_(std::move(cb)) {
    if (!cb_.eta_w || !cb_.eta_o || !cb_.eta_w_prime || !cb_.eta_o_prime || !cb_.pc ||
        !cb_.pc_prime)
        throw ModelError("model requires eta_w, eta_o, their derivatives, pc and pc_prime");

    // probe the structural assumptions
    double min_sum = 1e300;
    double prev_w = cb_.eta_w(0.0), prev_o = cb_.eta_o(0.0), prev_pc = cb_.pc(0.0);
    double prev_fw = prev_w / (prev_w + prev_o);
    for (int k = 0; k <= kProbe; ++k) {
        const double s = double(k) / kProbe;
        const double ew = cb_.eta_w(s), eo = cb_.eta_o(s);
        if (ew < -1e-12 || eo < -1e-12) throw ModelError("mobilities must be nonnegative");
        min_sum = std::min(min_sum, ew + eo);
        if (k > 0) {
            const double scale = 1e-10 * (1.0 + std::abs(ew) + std::abs(eo));
            if (ew < prev_w - scale) throw ModelError("eta_w must be increasing");
            if (eo > prev_o + scale) throw ModelError("eta_o must be decreasing");
            const double pcv = cb_.pc(s);
            if (!(pcv < prev_pc)) throw ModelError("pc must be strictly decreasing");
            const double fw = ew / (ew + eo);
            if (fw < prev_fw - 1e-10) throw ModelError("f_w must be increasing");
            prev_pc = pcv;
            prev_fw = fw;
        }
        prev_w = ew;
        prev_o = eo;
    }
    if (!(min_sum > 1e-14)) throw ModelError("eta_w + eta_o must be bounded away from zero");
    eta_star_ = min_sum;

    const std::vector<double> xs = graded_grid(cb_.breakpoints);
    auto fw = [this](double s) {
        const double ew = cb_.eta_w(s), eo = cb_.eta_o(s);
        return ew / (ew + eo);
    };
    auto pcp = [this](double s, double d0, double d1) {
        return cb_.pc_prime_endpoint ? cb_.pc_prime_endpoint(d0, d1) : cb_.pc_prime(s);
    };
    pwg_ = cumulative_table(xs, [&](double s, double d0, double d1) {
        return (1.0 - fw(s)) * pcp(s, d0, d1);
    });
    pog_ = cumulative_table(xs, [&](double s, double d0, double d1) {
        return fw(s) * pcp(s, d0, d1);
    });
    g_ = cumulative_table(xs, [&](double s, double d0, double d1) {
        const double ew = cb_.eta_w(s), eo = cb_.eta_o(s);
        return -(ew * eo / (ew + eo)) * pcp(s, d0, d1);
    });
    big_g_ = cumulative_table(xs, [&](double s, double, double) { return 2.0 * fw(s) - 1.0; });
    // g_c(x) = int_x^1 pc = C(1) - C(x) with C the cumulative of pc from 0
    MonotoneTable cpc =
        cumulative_table(xs, [&](double s, double, double) { return cb_.pc(s); });
    {
        std::vector<double> ys(cpc.y.size());
        const double total = cpc.y.back();
        for (std::size_t k = 0; k < ys.size(); ++k) ys[k] = total - cpc.y[k];
        gc_ = MonotoneTable::build(cpc.x, std::move(ys));
    }
}

double FluidModel::eta_w(double s) const { return cb_.eta_w(clamp01(s)); }
double FluidModel::eta_o(double s) const { return cb_.eta_o(clamp01(s)); }
double FluidModel::eta_w_prime(double s) const { return inside01(s) ? cb_.eta_w_prime(s) : 0.0; }
double FluidModel::eta_o_prime(double s) const { return inside01(s) ? cb_.eta_o_prime(s) : 0.0; }

double FluidModel::f_w(double s) const {
    const double c = clamp01(s);
    const double ew = cb_.eta_w(c), eo = cb_.eta_o(c);
    return ew / (ew + eo);
}
double FluidModel::f_o(double s) const { return 1.0 - f_w(s); }

double FluidModel::f_w_prime(double s) const {
    if (!inside01(s)) return 0.0;
    const double ew = cb_.eta_w(s), eo = cb_.eta_o(s);
    const double sum = ew + eo;
    return (cb_.eta_w_prime(s) * eo - ew * cb_.eta_o_prime(s)) / (sum * sum);
}

double FluidModel::pc(double s) const { return cb_.pc(clamp01(s)); }
double FluidModel::pc_prime(double s) const { return inside01(s) ? cb_.pc_prime(s) : 0.0; }

double FluidModel::pc_second(double s) const {
    if (!cb_.pc_second) throw ModelError("model does not provide pc_second");
    return inside01(s) ? cb_.pc_second(s) : 0.0;
}

double FluidModel::eval(PrimaryFn which, double s) const {
    switch (which) {
        case PrimaryFn::eta_w: return eta_w(s);
        case PrimaryFn::eta_o: return eta_o(s);
        case PrimaryFn::f_w: return f_w(s);
        case PrimaryFn::f_o: return f_o(s);
        case PrimaryFn::pc: return pc(s);
        case PrimaryFn::pc_prime: return pc_prime(s);
    }
    throw std::invalid_argument("unknown primary function");
}

double FluidModel::eval_aux(AuxFn which, double s) const {
    const double c = clamp01(s);
    switch (which) {
        case AuxFn::g: return g_(c);
        case AuxFn::p_wg: return pwg_(c);
        case AuxFn::p_og: return pog_(c);
        case AuxFn::g_c: return gc_(c);
        case AuxFn::G: return big_g_(c);
    }
    throw std::invalid_argument("unknown auxiliary function");
}

FluidModel validation_model() {
    FluidModel::Callbacks cb;
    const double a_const = 50.0;
    const double s_switch = 0.05;
    const double root = std::pow(s_switch, -0.5);
    cb.eta_w = [](double s) { return 4.0 * s * s; };
    cb.eta_o = [](double s) { return 0.4 * (1.0 - s) * (1.0 - s); };
    cb.eta_w_prime = [](double s) { return 8.0 * s; };
    cb.eta_o_prime = [](double s) { return -0.8 * (1.0 - s); };
    cb.pc = [=](double s) {
        return s > s_switch ? a_const / std::sqrt(s) : a_const * (1.5 - 10.0 * s) * root;
    };
    cb.pc_prime = [=](double s) {
        return s > s_switch ? -0.5 * a_const * std::pow(s, -1.5) : -10.0 * a_const * root;
    };
    cb.pc_second = [=](double s) {
        return s > s_switch ? 0.75 * a_const * std::pow(s, -2.5) : 0.0;
    };
    cb.breakpoints = {s_switch};
    cb.name = "validation";
    return FluidModel(std::move(cb));
}

std::function<double(double, double)> validation_porosity() {
    return [](double x, double y) { return 0.2 * (1.0 + x * y); };
}

FluidModel make_power_law_model(double theta_w, double theta_o, double alpha_w, double alpha_o,
                                double beta3, double beta4, double alpha3,
                                std::optional<double> k_w, std::optional<double> k_o,
                                double pc_scale_factor, double pc_offset) {
    if (!(theta_w >= 1.0) || !(theta_o >= 1.0))
        throw std::invalid_argument("theta_w, theta_o must be >= 1");
    if (!(alpha_w > 0.0 && alpha_w <= 1.0) || !(alpha_o > 0.0 && alpha_o <= 1.0) ||
        !(alpha3 > 0.0 && alpha3 <= 1.0))
        throw std::invalid_argument("alpha parameters must lie in (0,1]");
    if (!(beta3 > 0.0) || !(beta4 > 0.0)) throw std::invalid_argument("beta3, beta4 must be positive");

    const double kw = k_w.value_or(1.0 / (alpha_w * theta_w));
    const double ko = k_o.value_or(1.0 / (alpha_o * theta_o));
    const double c = pc_scale_factor > 0.0 ? pc_scale_factor : 1.0;
    // derivative bracketing: alpha x^{theta-1} <= eta' <= x^{theta-1}/alpha
    if (kw * theta_w < alpha_w - 1e-14 || kw * theta_w > 1.0 / alpha_w + 1e-14)
        throw std::invalid_argument("k_w incompatible with alpha_w bracketing");
    if (ko * theta_o < alpha_o - 1e-14 || ko * theta_o > 1.0 / alpha_o + 1e-14)
        throw std::invalid_argument("k_o incompatible with alpha_o bracketing");
    if (c < alpha3 - 1e-14 || c > 1.0 / alpha3 + 1e-14)
        throw std::invalid_argument("pc scale incompatible with alpha3 bracketing");

    FluidModel::Callbacks cb;
    cb.eta_w = [=](double s) { return kw * std::pow(s, theta_w); };
    cb.eta_o = [=](double s) { return ko * std::pow(1.0 - s, theta_o); };
    cb.eta_w_prime = [=](double s) { return kw * theta_w * std::pow(s, theta_w - 1.0); };
    cb.eta_o_prime = [=](double s) { return -ko * theta_o * std::pow(1.0 - s, theta_o - 1.0); };
    auto pc_deriv_acc = [=](double d0, double d1) {
        return -c * std::pow(d0, beta3 - 1.0) * std::pow(d1, beta4 - 1.0);
    };
    auto pc_deriv = [=](double s) { return pc_deriv_acc(s, 1.0 - s); };
    // pc anchored at pc(1) = pc_offset; tabulated from its own derivative
    auto grid = graded_grid({});
    const double tol = std::max(1e-14, 1e-10 / double(grid.size()));
    std::vector<double> ys(grid.size(), 0.0);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k)
        ys[k + 1] = ys[k] + cell_integral([&](double, double d0, double d1) {
                        return pc_deriv_acc(d0, d1);
                    },
                                          grid[k], grid[k + 1], tol);
    const double at_one = ys.back();
    for (std::size_t k = 0; k < ys.size(); ++k) ys[k] = pc_offset + (ys[k] - at_one);
    auto pc_table = std::make_shared<MonotoneTable>(MonotoneTable::build(grid, std::move(ys)));
    cb.pc = [pc_table](double s) { return (*pc_table)(s); };
    cb.pc_prime = pc_deriv;
    cb.pc_prime_endpoint = pc_deriv_acc;
    cb.pc_second = [=](double s) {
        if (s <= 0.0 || s >= 1.0) return 0.0;
        const double base = std::pow(s, beta3 - 2.0) * std::pow(1.0 - s, beta4 - 2.0);
        return -c * base * ((beta3 - 1.0) * (1.0 - s) - (beta4 - 1.0) * s);
    };
    cb.name = "power_law";
    return FluidModel(std::move(cb));
}

}  // namespace tpflow
