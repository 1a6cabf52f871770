#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace tpflow;

TEST_CASE("manufactured sources match the nested finite-difference oracle") {
    const FluidModel model = validation_model();
    const SpaceFn phi = validation_porosity();
    const ExactSolution ex = mms_exact_solution();
    auto [f1, f2] = manufactured_sources(model, phi, ex);
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const double t = unit(rng), x = unit(rng), y = unit(rng);
        const double a1 = f1(t, x, y);
        const double b1 = oracle::fd_f1(model, phi, ex, t, x, y);
        CHECK(std::abs(a1 - b1) <= 1e-5 * std::max(1.0, std::abs(a1)));
        const double a2 = f2(t, x, y);
        const double b2 = oracle::fd_f2(model, phi, ex, t, x, y);
        CHECK(std::abs(a2 - b2) <= 1e-5 * std::max(1.0, std::abs(a2)));
    }
}

TEST_CASE("constant exact fields produce zero sources") {
    ExactSolution ex;
    auto zero = [](double, double, double) { return 0.0; };
    ex.pw = [](double, double, double) { return 3.0; };
    ex.pw_x = zero;
    ex.pw_y = zero;
    ex.pw_lap = zero;
    ex.pw_t = zero;
    ex.s = [](double, double, double) { return 0.5; };
    ex.s_x = zero;
    ex.s_y = zero;
    ex.s_lap = zero;
    ex.s_t = zero;
    const FluidModel model = validation_model();
    auto [f1, f2] = manufactured_sources(model, validation_porosity(), ex);
    CHECK(f1(0.3, 0.2, 0.7) == 0.0);
    CHECK(f2(0.3, 0.2, 0.7) == 0.0);
}

TEST_CASE("time terms cancel in f1 + f2") {
    const FluidModel model = validation_model();
    const ExactSolution ex = mms_exact_solution();
    ExactSolution frozen = ex;
    frozen.s_t = [](double, double, double) { return 0.0; };
    auto [f1, f2] = manufactured_sources(model, validation_porosity(), ex);
    auto [g1, g2] = manufactured_sources(model, validation_porosity(), frozen);
    std::mt19937_64 rng(52);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const double t = unit(rng), x = unit(rng), y = unit(rng);
        const double sum = f1(t, x, y) + f2(t, x, y);
        const double sum_frozen = g1(t, x, y) + g2(t, x, y);
        CHECK(sum == doctest::Approx(sum_frozen).epsilon(1e-13));
    }
}

TEST_CASE("exact saturation outside (0,1) is refused") {
    ExactSolution ex = mms_exact_solution();
    ex.s = [](double, double, double) { return 1.2; };
    CHECK_THROWS_AS(manufactured_sources(validation_model(), validation_porosity(), ex),
                    DataError);
}

TEST_CASE("l2_error: zero for the interpolant, constant shifts, dense oracle") {
    const Geometry g = build_geometry(generate_structured_unit_square(5));
    auto f = [](double x, double y) { return std::sin(3 * x) + y * y; };
    const NodalField fh = interpolate_nodal(g, f);
    CHECK(l2_error(fh, f) == 0.0);

    NodalField shifted = fh;
    for (auto& v : shifted.v) v += 0.25;
    CHECK(l2_error(shifted, f) == doctest::Approx(0.25).epsilon(1e-13));

    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    NodalField noisy = fh;
    std::vector<double> delta(noisy.size());
    for (std::size_t i = 0; i < noisy.size(); ++i) {
        delta[i] = unit(rng);
        noisy.v[i] += delta[i];
    }
    CHECK(l2_error(noisy, f) == doctest::Approx(oracle::dense_l2_norm(g, delta)).epsilon(1e-13));
}

TEST_CASE("convergence study: errors fall and rates match the recomputed formula") {
    StudyConfig study;
    study.levels = {4, 8, 16};
    study.final_time = 0.25;
    const FluidModel model = validation_model();
    const StudyResult result =
        convergence_study(study, model, validation_porosity(), mms_exact_solution());
    REQUIRE(result.completed);
    REQUIRE(result.table.rows.size() == 3);
    const auto& rows = result.table.rows;
    CHECK(std::isnan(rows[0].rate_pw));
    for (std::size_t k = 1; k < rows.size(); ++k) {
        CHECK(rows[k].err_pw < rows[k - 1].err_pw);
        CHECK(rows[k].err_s < rows[k - 1].err_s);
        const double expected_rate =
            std::log(rows[k - 1].err_pw / rows[k].err_pw) / std::log(rows[k - 1].h / rows[k].h);
        CHECK(rows[k].rate_pw == doctest::Approx(expected_rate).epsilon(1e-14));
        CHECK(rows[k].rate_pw > 0.5);
        CHECK(rows[k].rate_pw < 2.2);
    }
    CHECK(rows[0].n_df == 25);
    CHECK(rows[1].n_df == 81);
}

TEST_CASE("synthetic halving errors give a unit rate through the study formula") {
    // the published-rate convention: log(e_{k-1}/e_k) / log(h_{k-1}/h_k)
    CHECK(oracle::rate(1e-2, 5e-3) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("table serialization: csv header and text layout") {
    ConvergenceTable t;
    t.rows.push_back({0.2, 25, 8.5e-3, std::nan(""), 4.2e-3, std::nan("")});
    t.rows.push_back({0.1, 81, 4.2e-3, 1.02, 2.1e-3, 1.0});
    const std::string csv = table_to_csv(t);
    CHECK(csv.rfind("h,n_df,err_pw,rate_pw,err_s,rate_s\n", 0) == 0);
    CHECK(csv.find(",,") != std::string::npos);  // empty rate cells on the first row
    const std::string text = table_to_text(t);
    CHECK(text.find("err_Pw") != std::string::npos);
    CHECK(text.find('-') != std::string::npos);
}
