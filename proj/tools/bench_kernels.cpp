// Timing comparison of the blocked OpenMP kernels against the plain serial
// reference implementations on a large structured mesh.

#include <chrono>
#include <cstdio>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tpflow/fem_core.hpp"
#include "tpflow/reference.hpp"
#include "tpflow/upwind.hpp"

using namespace tpflow;

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double time_ms(int reps, F&& f) {
    // one warmup
    f();
    const auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) f();
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_ms, double parallel_ms, double rel_diff) {
    std::printf("%-24s %10.3f ms %10.3f ms %7.2fx   max rel diff %.2e\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms, rel_diff);
}

}  // namespace

int main(int argc, char** argv) {
    int n = 512;
    int reps = 5;
    if (argc > 1) n = std::atoi(argv[1]);
    if (argc > 2) reps = std::atoi(argv[2]);

#ifdef _OPENMP
    std::printf("OpenMP threads: %d, mesh n=%d, reps=%d\n", omp_get_max_threads(), n, reps);
#else
    std::printf("serial build, mesh n=%d, reps=%d\n", n, reps);
#endif

    const Geometry geom = build_geometry(generate_structured_unit_square(n));
    std::printf("nodes %d, elements %d, edges %d\n\n", geom.node_count(), geom.element_count(),
                geom.edge_count());

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    NodalField u(geom), v(geom);
    for (auto& x : u.v) x = unit(rng);
    for (auto& x : v.v) x = unit(rng);
    EdgeField w(geom);
    for (auto& x : w.v) x = unit(rng);

    std::printf("%-24s %13s %13s %9s\n", "kernel", "serial ref", "OpenMP", "speedup");

    {
        double a = 0.0, b = 0.0;
        const double ts = time_ms(reps, [&] { a = ref::inner_h_serial(u, v); });
        const double tp = time_ms(reps, [&] { b = inner_h(u, v); });
        report("lumped inner product", ts, tp, std::abs(a - b) / std::abs(a));
    }
    {
        double a = 0.0, b = 0.0;
        const double ts = time_ms(reps, [&] { a = ref::stiffness_pairing_serial(u, v); });
        const double tp = time_ms(reps, [&] { b = stiffness_pairing(u, v); });
        report("stiffness pairing", ts, tp, std::abs(a - b) / std::max(1e-30, std::abs(a)));
    }
    {
        NodalField a, b;
        const double ts = time_ms(reps, [&] { a = ref::apply_upwind_form_serial(geom, w, v); });
        const double tp = time_ms(reps, [&] { b = apply_upwind_form(geom, w, v); });
        double diff = 0.0, scale = 1e-30;
        for (std::size_t i = 0; i < a.size(); ++i) {
            diff = std::max(diff, std::abs(a[i] - b[i]));
            scale = std::max(scale, std::abs(a[i]));
        }
        report("upwind form residual", ts, tp, diff / scale);
    }
    {
        double a = 0.0, b = 0.0;
        const double ts = time_ms(reps, [&] { a = ref::form_value_serial(geom, w, v, u); });
        const double tp = time_ms(reps, [&] { b = form_value(geom, w, v, u); });
        report("upwind form value", ts, tp, std::abs(a - b) / std::max(1e-30, std::abs(a)));
    }
    {
        const FluidModel model = validation_model();
        TimeState st;
        st.S = u;
        st.Pw = v;
        st.Po = NodalField(geom);
        for (std::size_t i = 0; i < st.Po.size(); ++i) st.Po[i] = v[i] + model.pc(u[i]);
        double a = 0.0, b = 0.0;
        const double ts = time_ms(reps, [&] { a = ref::energy_serial(geom, st, model); });
        const double tp = time_ms(reps, [&] { b = energy_diagnostic(geom, st, model); });
        report("energy diagnostic", ts, tp, std::abs(a - b) / std::max(1e-30, std::abs(a)));
    }
    {
        std::vector<double> err(u.v);
        double a = 0.0, b = 0.0;
        const double ts = time_ms(reps, [&] { a = ref::consistent_l2_norm_serial(geom, err); });
        const double tp = time_ms(reps, [&] { b = consistent_l2_norm(geom, err); });
        report("consistent L2 norm", ts, tp, std::abs(a - b) / std::max(1e-30, std::abs(a)));
    }
    return 0;
}
