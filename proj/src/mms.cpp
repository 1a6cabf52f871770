#include "tpflow/mms.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "tpflow/fem_core.hpp"

namespace tpflow {

ExactSolution mms_exact_solution() {
    ExactSolution e;
    e.pw = [](double t, double x, double y) {
        return 2.0 + x * x * y - y * y + x * x * std::sin(t + y);
    };
    e.pw_x = [](double t, double x, double y) { return 2.0 * x * y + 2.0 * x * std::sin(t + y); };
    e.pw_y = [](double t, double x, double y) {
        return x * x - 2.0 * y + x * x * std::cos(t + y);
    };
    e.pw_lap = [](double t, double x, double y) {
        // d2/dx2 = 2y + 2 sin(t+y); d2/dy2 = -2 - x^2 sin(t+y)
        return 2.0 * y + 2.0 * std::sin(t + y) - 2.0 - x * x * std::sin(t + y);
    };
    e.pw_t = [](double t, double x, double y) { return x * x * std::cos(t + y); };
    e.s = [](double t, double x, double y) {
        return 0.2 * (2.0 + 2.0 * x * y + std::cos(t + x));
    };
    e.s_x = [](double t, double x, double y) { return 0.2 * (2.0 * y - std::sin(t + x)); };
    e.s_y = [](double t, double x, double y) {
        (void)t;
        (void)y;
        return 0.4 * x;
    };
    e.s_lap = [](double t, double x, double y) {
        (void)y;
        return -0.2 * std::cos(t + x);
    };
    e.s_t = [](double t, double x, double y) {
        (void)y;
        return -0.2 * std::sin(t + x);
    };
    return e;
}

std::pair<SpaceTimeFn, SpaceTimeFn> manufactured_sources(const FluidModel& model,
                                                         const SpaceFn& porosity,
                                                         const ExactSolution& exact) {
    if (!model.has_pc_second())
        throw DataError("manufactured sources need the model's second capillary derivative");
    // sample the saturation range once; the constitutive functions must be on
    // their physical branch
    for (int it = 0; it <= 20; ++it) {
        for (int ix = 0; ix <= 20; ++ix) {
            for (int iy = 0; iy <= 20; ++iy) {
                const double sv = exact.s(it / 20.0, ix / 20.0, iy / 20.0);
                if (!(sv > 0.0 && sv < 1.0))
                    throw DataError("exact saturation leaves (0,1); sources are undefined");
            }
        }
    }
    auto f1 = [&model, porosity, exact](double t, double x, double y) {
        const double s = exact.s(t, x, y);
        const double div_w = model.eta_w_prime(s) * (exact.s_x(t, x, y) * exact.pw_x(t, x, y) +
                                                     exact.s_y(t, x, y) * exact.pw_y(t, x, y)) +
                             model.eta_w(s) * exact.pw_lap(t, x, y);
        return porosity(x, y) * exact.s_t(t, x, y) - div_w;
    };
    auto f2 = [&model, porosity, exact](double t, double x, double y) {
        const double s = exact.s(t, x, y);
        const double sx = exact.s_x(t, x, y), sy = exact.s_y(t, x, y);
        const double pcp = model.pc_prime(s), pcpp = model.pc_second(s);
        const double po_x = exact.pw_x(t, x, y) + pcp * sx;
        const double po_y = exact.pw_y(t, x, y) + pcp * sy;
        const double po_lap =
            exact.pw_lap(t, x, y) + pcpp * (sx * sx + sy * sy) + pcp * exact.s_lap(t, x, y);
        const double div_o =
            model.eta_o_prime(s) * (sx * po_x + sy * po_y) + model.eta_o(s) * po_lap;
        return -porosity(x, y) * exact.s_t(t, x, y) - div_o;
    };
    return {SpaceTimeFn(f1), SpaceTimeFn(f2)};
}

double l2_error(const NodalField& field, const SpaceFn& exact_at_time) {
    const Geometry& g = *field.geom;
    std::vector<double> err(field.v.size());
    for (std::size_t i = 0; i < err.size(); ++i)
        err[i] = field[i] - exact_at_time(g.mesh.nodes[i].x, g.mesh.nodes[i].y);
    return consistent_l2_norm(g, err);
}

StudyResult convergence_study(const StudyConfig& study, const FluidModel& model,
                              const SpaceFn& porosity, const ExactSolution& exact) {
    StudyResult result;
    ConvergenceTable& table = result.table;
    auto [f1, f2] = manufactured_sources(model, porosity, exact);
    for (std::size_t level = 0; level + 1 < study.levels.size(); ++level)
        if (study.levels[level] >= study.levels[level + 1])
            throw std::invalid_argument("levels must be sorted by decreasing mesh size");
    for (std::size_t level = 0; level < study.levels.size(); ++level) {
        const int n = study.levels[level];
        if (n < 1) throw std::invalid_argument("levels must be positive");
        const double h = 1.0 / n;
        const Geometry geom = build_geometry(generate_structured_unit_square(n));

        SourceModel src;
        src.mode = SourceMode::manufactured;
        src.bc = BcMode::dirichlet;
        src.f1 = f1;
        src.f2 = f2;
        src.trace_S = exact.s;
        src.trace_Pw = exact.pw;
        const Problem prob = make_problem(geom, model, std::move(src), porosity);

        SolverConfig cfg = study.solver;
        cfg.tau = h;
        cfg.T = study.final_time;
        cfg.scheme = study.scheme;

        TimeState init;
        init.n = 0;
        init.t = 0.0;
        init.S = interpolate_nodal(geom, [&](double x, double y) { return exact.s(0.0, x, y); });
        init.Pw = interpolate_nodal(geom, [&](double x, double y) { return exact.pw(0.0, x, y); });
        init.Po = NodalField(geom);
        for (std::size_t i = 0; i < init.Po.size(); ++i)
            init.Po[i] = init.Pw[i] + model.pc(init.S[i]);

        RunResult run_result;
        try {
            run_result = run(prob, std::move(init), cfg);
        } catch (const SolverError& err) {
            result.completed = false;
            result.error = "level n=" + std::to_string(n) + ": " + err.what();
            return result;
        }
        const double tf = run_result.state.t;

        ConvergenceRow row;
        row.h = h;
        row.n_df = geom.node_count();
        row.err_pw =
            l2_error(run_result.state.Pw, [&](double x, double y) { return exact.pw(tf, x, y); });
        row.err_s =
            l2_error(run_result.state.S, [&](double x, double y) { return exact.s(tf, x, y); });
        if (level == 0) {
            row.rate_pw = std::nan("");
            row.rate_s = std::nan("");
        } else {
            const ConvergenceRow& prev = table.rows.back();
            const double denom = std::log(prev.h / row.h);
            row.rate_pw = std::log(prev.err_pw / row.err_pw) / denom;
            row.rate_s = std::log(prev.err_s / row.err_s) / denom;
        }
        table.rows.push_back(row);
    }
    return result;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

}  // namespace

std::string table_to_csv(const ConvergenceTable& table) {
    std::ostringstream out;
    out << "h,n_df,err_pw,rate_pw,err_s,rate_s\n";
    for (const auto& r : table.rows) {
        out << fmt(r.h) << "," << r.n_df << "," << fmt(r.err_pw) << ","
            << (std::isnan(r.rate_pw) ? "" : fmt(r.rate_pw)) << "," << fmt(r.err_s) << ","
            << (std::isnan(r.rate_s) ? "" : fmt(r.rate_s)) << "\n";
    }
    return out.str();
}

std::string table_to_text(const ConvergenceTable& table) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%10s %8s %12s %8s %12s %8s\n", "h", "n_df", "err_Pw",
                  "rate", "err_S", "rate");
    out << line;
    for (const auto& r : table.rows) {
        char rate_pw[16] = "-";
        char rate_s[16] = "-";
        if (!std::isnan(r.rate_pw)) std::snprintf(rate_pw, sizeof(rate_pw), "%.2f", r.rate_pw);
        if (!std::isnan(r.rate_s)) std::snprintf(rate_s, sizeof(rate_s), "%.2f", r.rate_s);
        std::snprintf(line, sizeof(line), "%10.5g %8d %12s %8s %12s %8s\n", r.h, r.n_df,
                      fmt_short(r.err_pw).c_str(), rate_pw, fmt_short(r.err_s).c_str(), rate_s);
        out << line;
    }
    return out.str();
}

}  // namespace tpflow
