// Acceptance suite: each criterion prints one PASS/FAIL line with its key
// measured quantities. Run all criteria (default) or a single one with
// --criterion N. Exit code 0 only if every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tpflow/export.hpp"
#include "tpflow/identities.hpp"

using namespace tpflow;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// criterion 1: manufactured-solution convergence, five levels, tau = h, T = 1
// ---------------------------------------------------------------------------

StudyResult run_reference_study() {
    StudyConfig study;
    study.levels = {5, 10, 20, 40, 80};
    study.final_time = 1.0;
    study.scheme = Scheme::semi_implicit;
    const FluidModel model = validation_model();
    return convergence_study(study, model, validation_porosity(), mms_exact_solution());
}

Outcome criterion1() {
    Outcome out;
    const auto t0 = Clock::now();
    const StudyResult result = run_reference_study();
    if (!result.completed) {
        out.pass = false;
        out.detail = "study aborted: " + result.error;
        return out;
    }
    const auto& rows = result.table.rows;
    const std::vector<double> published_pw = {8.50e-3, 4.15e-3, 2.08e-3, 1.04e-3, 5.23e-4};
    const std::vector<double> published_s = {4.21e-3, 2.30e-3, 1.14e-3, 5.57e-4, 2.75e-4};
    std::ostringstream detail;
    bool monotone = true, rates_ok = true, magnitude_ok = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (k > 0 && !(rows[k].err_pw < rows[k - 1].err_pw && rows[k].err_s < rows[k - 1].err_s))
            monotone = false;
        if (k >= 2) {  // the three finest refinements
            if (rows[k].rate_pw < 0.85 || rows[k].rate_pw > 1.15) rates_ok = false;
            if (rows[k].rate_s < 0.85 || rows[k].rate_s > 1.15) rates_ok = false;
        }
        const double ratio_pw = rows[k].err_pw / published_pw[k];
        const double ratio_s = rows[k].err_s / published_s[k];
        if (ratio_pw < 0.1 || ratio_pw > 10.0 || ratio_s < 0.1 || ratio_s > 10.0)
            magnitude_ok = false;
    }
    out.pass = monotone && rates_ok && magnitude_ok;
    detail << "rates Pw/S on finest levels:";
    for (std::size_t k = 2; k < rows.size(); ++k) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), " %.2f/%.2f", rows[k].rate_pw, rows[k].rate_s);
        detail << buf;
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "; err_pw(h=0.0125)=%.2e; monotone=%d magnitudes=%d; %.1fs",
                  rows.back().err_pw, monotone ? 1 : 0, magnitude_ok ? 1 : 0, seconds_since(t0));
    detail << buf;
    out.detail = detail.str();
    return out;
}

// ---------------------------------------------------------------------------
// criterion 2: discrete identities on randomized acute meshes at 1e-12
// ---------------------------------------------------------------------------

Outcome criterion2() {
    Outcome out;
    const auto t0 = Clock::now();
    const IdentityReport report = run_identity_suite(/*seed=*/20240501ULL, /*n_meshes=*/20);
    double worst = 0.0;
    for (const auto& c : report.checks) {
        worst = std::max(worst, c.worst);
        if (!c.ok) out.pass = false;
    }
    const double elapsed = seconds_since(t0);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%zu identities on %d meshes, worst defect %.2e, %.2fs",
                  report.checks.size(), report.meshes, worst, elapsed);
    out.detail = buf;
    if (elapsed >= 10.0) {
        out.pass = false;
        out.detail += " (over the 10 s budget)";
    }
    return out;
}

// ---------------------------------------------------------------------------
// criterion 3: consistency gap decays at rate >= 0.9 between n=8,16,32
// ---------------------------------------------------------------------------

Outcome criterion3() {
    Outcome out;
    constexpr double pi = 3.14159265358979323846;
    auto u = [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
    auto ux = [](double x, double y) { return pi * std::cos(pi * x) * std::sin(pi * y); };
    auto uy = [](double x, double y) { return pi * std::sin(pi * x) * std::cos(pi * y); };
    auto w = [](double x, double y) { return 1.0 + x * y; };
    std::vector<double> gaps;
    for (int n : {8, 16, 32}) {
        const Geometry g = build_geometry(generate_structured_unit_square(n));
        gaps.push_back(consistency_gap(g, w, u, ux, uy, u, ux, uy));
    }
    const double r1 = oracle::rate(gaps[0], gaps[1]);
    const double r2 = oracle::rate(gaps[1], gaps[2]);
    out.pass = r1 >= 0.9 && r2 >= 0.9;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "gaps %.3e -> %.3e -> %.3e, rates %.2f, %.2f (need >= 0.9)",
                  gaps[0], gaps[1], gaps[2], r1, r2);
    out.detail = buf;
    return out;
}

// ---------------------------------------------------------------------------
// criterion 4: maximum principle over 20 randomized implicit no-flux runs
// ---------------------------------------------------------------------------

Outcome criterion4() {
    Outcome out;
    const auto t0 = Clock::now();
    const FluidModel model = validation_model();
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> mesh_n(3, 6);
    std::uniform_real_distribution<double> amp_dist(0.5, 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst_low = 1e300, worst_high = -1e300;
    for (int run_idx = 0; run_idx < 20; ++run_idx) {
        const Geometry g = build_geometry(generate_structured_unit_square(mesh_n(rng)));
        const Problem prob = make_problem(
            g, model, oracle::polynomial_wells(amp_dist(rng), unit(rng)),
            [](double, double) { return 0.2; });
        SolverConfig cfg;
        cfg.tau = 0.01;
        cfg.T = 0.5;  // 50 steps
        cfg.scheme = Scheme::implicit;
        cfg.newton_tol = 1e-12;
        TimeState init;
        init.S = NodalField(g);
        for (auto& v : init.S.v) v = unit(rng);
        init.Pw = NodalField(g, 0.0);
        init.Po = NodalField(g);
        for (std::size_t i = 0; i < init.Po.size(); ++i)
            init.Po[i] = model.pc(init.S[i]);
        try {
            const RunResult res = run(prob, std::move(init), cfg);
            for (const auto& row : res.log.rows) {
                worst_low = std::min(worst_low, row.min_s);
                worst_high = std::max(worst_high, row.max_s);
            }
        } catch (const SolverError& err) {
            out.pass = false;
            out.detail = std::string("run ") + std::to_string(run_idx) + " failed: " + err.what();
            return out;
        }
    }
    out.pass = worst_low >= -1e-12 && worst_high <= 1.0 + 1e-12;
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "20 runs x 50 steps: S within [%.6f, %.6f] (bounds 0-1e-12, 1+1e-12), %.1fs",
                  worst_low, worst_high, seconds_since(t0));
    out.detail = buf;
    return out;
}

// ---------------------------------------------------------------------------
// criterion 5: per-step constraint and balance identities
// ---------------------------------------------------------------------------

Outcome criterion5() {
    Outcome out;
    const FluidModel model = validation_model();
    const Geometry g = build_geometry(generate_structured_unit_square(5));
    const Problem prob = make_problem(g, model, oracle::polynomial_wells(1.4, 0.85),
                                      [](double, double) { return 0.2; });
    SolverConfig cfg;
    cfg.tau = 0.01;
    cfg.scheme = Scheme::implicit;
    cfg.newton_tol = 1e-12;
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    TimeState prev;
    prev.S = NodalField(g);
    for (auto& v : prev.S.v) v = unit(rng);
    prev.Pw = NodalField(g, 0.0);
    prev.Po = NodalField(g);
    for (std::size_t i = 0; i < prev.Po.size(); ++i) prev.Po[i] = model.pc(prev.S[i]);

    double worst_mean = 0.0, worst_redundant = 0.0, worst_source = 0.0, worst_mass = 0.0;
    for (int step = 1; step <= 50; ++step) {
        const TimeState next = step_implicit(prob, prev, cfg);
        double mean = 0.0;
        for (std::size_t i = 0; i < next.Pw.size(); ++i) mean += g.lumped_mass[i] * next.Pw[i];
        worst_mean = std::max(worst_mean, std::abs(mean));
        worst_redundant =
            std::max(worst_redundant, std::abs(redundant_wetting_row(prob, next, prev, cfg.tau)));
        const DiscreteSources srcs = build_discrete_sources(prob, cfg.tau, next.n);
        double in_mean = 0.0, out_mean = 0.0, mass_lhs = 0.0, mass_rhs = 0.0;
        for (std::size_t i = 0; i < next.S.size(); ++i) {
            in_mean += g.lumped_mass[i] * srcs.qbar[i];
            out_mean += g.lumped_mass[i] * srcs.qunder[i];
            mass_lhs += prob.mass_phi[i] * (next.S[i] - prev.S[i]);
            mass_rhs += cfg.tau * g.lumped_mass[i] *
                        (model.f_w(srcs.s_in[i]) * srcs.qbar[i] -
                         model.f_w(next.S[i]) * srcs.qunder[i]);
        }
        worst_source = std::max(worst_source, std::abs(in_mean - out_mean));
        worst_mass = std::max(worst_mass, std::abs(mass_lhs - mass_rhs));
        prev = next;
    }
    out.pass = worst_mean <= 1e-10 && worst_redundant <= 1e-10 && worst_source <= 1e-12 &&
               worst_mass <= 1e-10;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "50 steps: |(Pw,1)_h|<=%.1e, redundant row<=%.1e, source balance<=%.1e, "
                  "mass balance<=%.1e",
                  worst_mean, worst_redundant, worst_source, worst_mass);
    out.detail = buf;
    return out;
}

// ---------------------------------------------------------------------------
// criterion 6: analytic Jacobian vs dense finite differences, tie-free state
// ---------------------------------------------------------------------------

Outcome criterion6() {
    Outcome out;
    const FluidModel model = validation_model();
    const Geometry g = build_geometry(generate_structured_unit_square(2));
    const Problem prob = make_problem(g, model, oracle::polynomial_wells(1.1, 0.7),
                                      [](double, double) { return 0.2; });
    const double tau = 0.05;
    std::mt19937_64 rng(66);
    std::uniform_real_distribution<double> s_dist(0.2, 0.8);
    std::uniform_real_distribution<double> jitter(-2e-3, 2e-3);
    const std::size_t m = static_cast<std::size_t>(g.node_count());
    TimeState prev;
    prev.S = NodalField(g);
    prev.Pw = NodalField(g);
    prev.Po = NodalField(g);
    for (auto& v : prev.S.v) v = s_dist(rng);
    for (std::size_t i = 0; i < m; ++i) prev.Pw[i] = 0.0;
    for (std::size_t i = 0; i < m; ++i) prev.Po[i] = model.pc(prev.S[i]);

    // tie-free guess: pressures pairwise separated by >= 1e-2, saturations
    // away from the capillary branch switch and the unit interval ends
    TimeState guess = prev;
    for (std::size_t i = 0; i < m; ++i) {
        guess.S[i] = s_dist(rng);
        guess.Pw[i] = 0.05 * static_cast<double>(i) + jitter(rng);
        guess.Po[i] = guess.Pw[i] + model.pc(guess.S[i]);
    }

    const auto triplets = jacobian_implicit(prob, guess, prev, tau);
    const auto analytic = oracle::dense_from_triplets(2 * static_cast<int>(m), triplets);
    const auto fd = oracle::fd_jacobian(prob, guess, prev, tau);
    double worst = 0.0;
    for (std::size_t r = 0; r < 2 * m; ++r)
        for (std::size_t c = 0; c < 2 * m; ++c)
            worst = std::max(worst, std::abs(analytic[r][c] - fd[r][c]) /
                                        std::max(1.0, std::abs(analytic[r][c])));
    out.pass = worst <= 1e-6;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "18x18 system, worst relative entry defect %.2e", worst);
    out.detail = buf;
    return out;
}

// ---------------------------------------------------------------------------
// criterion 7: two executions of the study produce bitwise-identical CSVs
// ---------------------------------------------------------------------------

Outcome criterion7() {
    Outcome out;
    const auto t0 = Clock::now();
    const std::string provenance = provenance_line("acceptance determinism study");
    const auto tmp = std::filesystem::temp_directory_path();
    std::vector<std::string> files;
    for (int rep = 0; rep < 2; ++rep) {
        const StudyResult result = run_reference_study();
        if (!result.completed) {
            out.pass = false;
            out.detail = "study aborted: " + result.error;
            return out;
        }
        const std::string path =
            (tmp / ("tpflow_determinism_" + std::to_string(rep) + ".csv")).string();
        write_file(path, provenance + "\n" + table_to_csv(result.table));
        files.push_back(path);
    }
    std::ifstream a(files[0], std::ios::binary), b(files[1], std::ios::binary);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    out.pass = sa.str() == sb.str() && !sa.str().empty();
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%zu bytes compared%s, %.1fs", sa.str().size(),
                  out.pass ? ", identical" : ", DIFFER", seconds_since(t0));
    out.detail = buf;
    return out;
}

const char* kDescriptions[7] = {
    "manufactured-solution convergence (5 levels, tau=h, T=1)",
    "discrete identities on 20 randomized acute meshes at 1e-12",
    "consistency gap decay rate >= 0.9",
    "maximum principle over 20 randomized implicit no-flux runs",
    "per-step constraint and balance identities",
    "analytic Jacobian vs dense finite differences",
    "bitwise-identical CSV across repeated studies",
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
    }
    Outcome (*criteria[7])() = {criterion1, criterion2, criterion3, criterion4,
                                criterion5, criterion6, criterion7};
    bool all_pass = true;
    for (int k = 1; k <= 7; ++k) {
        if (only != 0 && only != k) continue;
        const Outcome o = criteria[k - 1]();
        std::printf("[%s] criterion %d: %s — %s\n", o.pass ? "PASS" : "FAIL", k,
                    kDescriptions[k - 1], o.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && o.pass;
    }
    return all_pass ? 0 : 1;
}
