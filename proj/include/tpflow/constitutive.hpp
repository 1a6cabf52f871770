#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tpflow/common.hpp"

namespace tpflow {

using ScalarFn = std::function<double(double)>;

/// Monotone (Fritsch-Carlson) cubic interpolation table. Preserves the
/// monotonicity of the data between knots; evaluation clamps to the knot range.
struct MonotoneTable {
    std::vector<double> x, y, m;
    static MonotoneTable build(std::vector<double> xs, std::vector<double> ys);
    double operator()(double s) const;
};

enum class PrimaryFn { eta_w, eta_o, f_w, f_o, pc, pc_prime };
enum class AuxFn { g, p_wg, p_og, g_c, G };

/// Two-phase constitutive model: mobilities, fractional flows, capillary
/// pressure and the derived integral transforms
///   g_c(x)  = int_x^1 p_c,
///   p_wg(x) = int_0^x f_o p_c',    p_og(x) = int_0^x f_w p_c',
///   g(x)    = -int_0^x (eta_w eta_o / (eta_w + eta_o)) p_c',
///   G(x)    = int_0^x (f_w - f_o).
/// All functions are extended by constants outside [0,1] (derivatives by
/// zero). The transforms are evaluated once at construction by adaptive
/// quadrature (abs tol 1e-10) onto graded monotone-cubic tables and are
/// immutable afterwards.
class FluidModel {
public:
    struct Callbacks {
        ScalarFn eta_w, eta_o;
        ScalarFn eta_w_prime, eta_o_prime;
        ScalarFn pc, pc_prime;
        ScalarFn pc_second;  // optional; needed for manufactured sources
        // optional pc'(s) taking the exact distances (s, 1-s); lets the cache
        // quadrature handle endpoint singularities without cancellation
        std::function<double(double, double)> pc_prime_endpoint;
        std::vector<double> breakpoints;  // interior knots the caches must respect
        std::string name = "custom";
    };

    explicit FluidModel(Callbacks cb);

    double eta_w(double s) const;
    double eta_o(double s) const;
    double eta_w_prime(double s) const;
    double eta_o_prime(double s) const;
    double f_w(double s) const;
    double f_o(double s) const;
    double f_w_prime(double s) const;
    double pc(double s) const;
    double pc_prime(double s) const;
    double pc_second(double s) const;

    /// Positive lower bound of eta_w + eta_o observed on the probe grid.
    double eta_star() const { return eta_star_; }

    double eval(PrimaryFn which, double s) const;
    double eval_aux(AuxFn which, double s) const;

    const std::string& name() const { return cb_.name; }
    bool has_pc_second() const { return static_cast<bool>(cb_.pc_second); }

private:
    Callbacks cb_;
    double eta_star_ = 0.0;
    MonotoneTable g_, pwg_, pog_, gc_, big_g_;
};

/// Mobilities 4 s^2 and 0.4 (1-s)^2 with the Brooks-Corey capillary pressure
/// A s^{-1/2} (A = 50), extended linearly below s = 0.05 with matching slope.
FluidModel validation_model();

/// Porosity 0.2 (1 + x y) used together with the validation model.
std::function<double(double, double)> validation_porosity();

/// Power-law model family: eta_w = k_w s^theta_w, eta_o = k_o (1-s)^theta_o,
/// p_c'(s) = -pc_scale s^{beta3-1} (1-s)^{beta4-1}, p_c(1) = pc_offset.
/// Defaults: k_alpha = 1/(alpha_alpha theta_alpha), pc_scale = 1. Supplied
/// coefficients are validated against the derivative bracketing implied by
/// the alphas.
FluidModel make_power_law_model(double theta_w, double theta_o, double alpha_w, double alpha_o,
                                double beta3, double beta4, double alpha3,
                                std::optional<double> k_w = std::nullopt,
                                std::optional<double> k_o = std::nullopt,
                                double pc_scale_factor = 0.0,  // 0 -> default 1
                                double pc_offset = 0.0);

}  // namespace tpflow
