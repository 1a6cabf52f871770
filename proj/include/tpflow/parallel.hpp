#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace tpflow::par {

// Reductions are blocked with a fixed chunk size and the per-chunk partials
// are combined in index order, so results are bitwise identical for any
// thread count (including the serial build).
inline constexpr std::size_t chunk = 1024;

template <class F>
double det_sum(std::size_t n, F&& f) {
    if (n == 0) return 0.0;
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    std::vector<double> partial(nchunks);
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += f(i);
        partial[static_cast<std::size_t>(c)] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

template <class F>
void parallel_for(std::size_t n, F&& f) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) f(static_cast<std::size_t>(i));
}

/// Max of f(i) over [0,n). Exact reduction, order independent.
template <class F>
double det_max(std::size_t n, F&& f) {
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    std::vector<double> partial(nchunks, -1e300);
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        double m = -1e300;
        for (std::size_t i = lo; i < hi; ++i) m = std::max(m, f(i));
        partial[static_cast<std::size_t>(c)] = m;
    }
    double m = -1e300;
    for (double p : partial) m = std::max(m, p);
    return m;
}

template <class F>
double det_min(std::size_t n, F&& f) {
    return -det_max(n, [&](std::size_t i) { return -f(i); });
}

}  // namespace tpflow::par
