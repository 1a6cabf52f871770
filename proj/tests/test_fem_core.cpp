#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tpflow/identities.hpp"

using namespace tpflow;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("inner_h: constants integrate the domain") {
    const Geometry g = build_geometry(generate_structured_unit_square(4));
    NodalField ones(g, 1.0);
    CHECK(inner_h(ones, ones) == doctest::Approx(1.0).epsilon(1e-13));
    ElementField phi(g, 0.3);
    CHECK(inner_h(ones, ones, &phi) == doctest::Approx(0.3).epsilon(1e-13));
}

TEST_CASE("inner_h: random fields against the dense loop") {
    const Geometry g = build_geometry(generate_structured_unit_square(4));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    NodalField u(g), v(g);
    for (auto& x : u.v) x = unit(rng);
    for (auto& x : v.v) x = unit(rng);
    double expected = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) expected += g.lumped_mass[i] * u[i] * v[i];
    CHECK(inner_h(u, v) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("inner_h: mesh mismatch is rejected") {
    const Geometry g1 = build_geometry(generate_structured_unit_square(2));
    const Geometry g2 = build_geometry(generate_structured_unit_square(2));
    NodalField a(g1), b(g2);
    CHECK_THROWS_AS(inner_h(a, b), std::invalid_argument);
}

TEST_CASE("norm_h: constants and hats") {
    const Geometry g = build_geometry(generate_structured_unit_square(2));
    NodalField c(g, -2.5);
    CHECK(norm_h(c) == doctest::Approx(2.5).epsilon(1e-14));
    // interior node of the 3x3 lattice is index 4
    NodalField hat(g, 0.0);
    hat[4] = 1.0;
    CHECK(norm_h(hat) == doctest::Approx(std::sqrt(g.lumped_mass[4])).epsilon(1e-14));
}

TEST_CASE("lumped/consistent norm ratio stays in [1,4]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int n : {4, 8, 16}) {
        const Geometry g = build_geometry(generate_structured_unit_square(n));
        for (int rep = 0; rep < 50; ++rep) {
            NodalField u(g);
            for (auto& x : u.v) x = unit(rng);
            const double lumped = inner_h(u, u);
            const double consistent = consistent_l2_norm(g, u.v);
            const double ratio = lumped / (consistent * consistent);
            CHECK(ratio >= 1.0 - 1e-12);
            CHECK(ratio <= 4.0 + 1e-12);
        }
    }
}

TEST_CASE("consistent L2 norm matches the dense quadrature mass matrix") {
    const Geometry g = build_geometry(generate_structured_unit_square(3));
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> e(static_cast<std::size_t>(g.node_count()));
    for (auto& x : e) x = unit(rng);
    CHECK(consistent_l2_norm(g, e) == doctest::Approx(oracle::dense_l2_norm(g, e)).epsilon(1e-13));
}

TEST_CASE("interpolation: exact on constants and linears") {
    const Geometry g = build_geometry(generate_structured_unit_square(3));
    const NodalField ones = interpolate_nodal(g, [](double, double) { return 1.0; });
    for (double v : ones.v) CHECK(v == 1.0);
    const NodalField xs = interpolate_nodal(g, [](double x, double) { return x; });
    for (int i = 0; i < g.node_count(); ++i)
        CHECK(xs[static_cast<std::size_t>(i)] == g.mesh.nodes[static_cast<std::size_t>(i)].x);
}

TEST_CASE("interpolation error decays at second order") {
    auto f = [](double x, double y) { return std::sin(x + y); };
    double prev = 0.0;
    int level = 0;
    for (int n : {4, 8, 16}) {
        const Geometry g = build_geometry(generate_structured_unit_square(n));
        const double err = oracle::interp_error_l2(g, f);
        if (level > 0) {
            const double rate = oracle::rate(prev, err);
            CHECK(rate > 1.8);
            CHECK(rate < 2.2);
        }
        prev = err;
        ++level;
    }
}

TEST_CASE("patch average: constants, centroid value, bound preservation") {
    const Geometry g = build_geometry(generate_structured_unit_square(4));
    const NodalField c = project_patch_average(g, [](double, double) { return 0.7; });
    for (double v : c.v) CHECK(v == doctest::Approx(0.7).epsilon(1e-14));

    SimplicialMesh ref;
    ref.nodes = {{0, 0}, {1, 0}, {0, 1}};
    ref.elements = {{0, 1, 2}};
    ref.boundary_nodes = {0, 1, 2};
    ref.is_boundary = {1, 1, 1};
    const Geometry gr = build_geometry(ref);
    const NodalField px = project_patch_average(gr, [](double x, double) { return x; });
    for (double v : px.v) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-14));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        const double a = unit(rng), b = unit(rng), cc = unit(rng);
        auto f = [=](double x, double y) {
            return 0.5 * (1.0 + std::sin(7.0 * (a * x + b * y + cc)));
        };
        const NodalField r = project_patch_average(g, f);
        for (double v : r.v) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("elementwise projection: constants, centroid value, linearity") {
    const Geometry g = build_geometry(generate_structured_unit_square(3));
    const ElementField c = project_elementwise(g, [](double, double) { return 2.0; });
    for (double v : c.v) CHECK(v == doctest::Approx(2.0).epsilon(1e-14));

    auto f = [](double x, double y) { return std::sin(x) + y; };
    auto h = [](double x, double y) { return std::cos(3 * y) * x; };
    const ElementField pf = project_elementwise(g, f);
    const ElementField ph = project_elementwise(g, h);
    const ElementField combo =
        project_elementwise(g, [&](double x, double y) { return 2.0 * f(x, y) - 3.0 * h(x, y); });
    for (std::size_t k = 0; k < combo.v.size(); ++k)
        CHECK(combo[k] == doctest::Approx(2.0 * pf[k] - 3.0 * ph[k]).epsilon(1e-13));
}

TEST_CASE("time projection: constants, linear midpoint, exact quadratic") {
    CHECK(project_time([](double) { return 3.0; }, 0.25, 4) == doctest::Approx(3.0));
    const double tau = 0.2;
    const int n = 3;
    const double mid = 0.5 * (tau * (n - 1) + tau * n);
    CHECK(project_time([](double t) { return t; }, tau, n) == doctest::Approx(mid).epsilon(1e-14));
    CHECK(project_time([](double t) { return t * t; }, 0.7, 1) ==
          doctest::Approx(0.7 * 0.7 / 3.0).epsilon(1e-14));
}

TEST_CASE("stiffness pairing: constants have zero gradient") {
    const Geometry g = build_geometry(generate_structured_unit_square(4));
    NodalField c(g, 5.0);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    NodalField v(g);
    for (auto& x : v.v) x = unit(rng);
    CHECK(std::abs(stiffness_pairing(c, v)) < 1e-13);
}

TEST_CASE("stiffness pairing: hat diagonal equals the coupling row sum") {
    const Geometry g = build_geometry(generate_structured_unit_square(2));
    const std::size_t center = 4;
    NodalField hat(g, 0.0);
    hat[center] = 1.0;
    double row_sum = 0.0;
    for (int p = g.nbr_off[center]; p < g.nbr_off[center + 1]; ++p)
        row_sum += g.edge_c[static_cast<std::size_t>(g.nbr_edge[static_cast<std::size_t>(p)])];
    const double diag = stiffness_pairing(hat, hat);
    CHECK(diag == doctest::Approx(row_sum).epsilon(1e-13));
    // and the edge-difference identity with V = U
    double edge_route = 0.0;
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto [i, j] = g.edge_nodes[static_cast<std::size_t>(e)];
        const double du = hat[static_cast<std::size_t>(j)] - hat[static_cast<std::size_t>(i)];
        edge_route += g.edge_c[static_cast<std::size_t>(e)] * du * du;
    }
    CHECK(diag == doctest::Approx(edge_route).epsilon(1e-13));
}

TEST_CASE("consistency gap decays at first order or better") {
    auto u = [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); };
    auto ux = [](double x, double y) { return kPi * std::cos(kPi * x) * std::sin(kPi * y); };
    auto uy = [](double x, double y) { return kPi * std::sin(kPi * x) * std::cos(kPi * y); };
    auto w = [](double x, double y) { return 1.0 + x * y; };
    double prev = 0.0;
    int level = 0;
    for (int n : {8, 16}) {
        const Geometry g = build_geometry(generate_structured_unit_square(n));
        const double gap = consistency_gap(g, w, u, ux, uy, u, ux, uy);
        if (level > 0) CHECK(oracle::rate(prev, gap) >= 0.9);
        prev = gap;
        ++level;
    }
}
