#pragma once

// Thin FFTW3 wrapper: cached complex n-d plans, executed through the
// new-array interface so a single plan serves every buffer of its shape.

#include <fftw3.h>

#include <array>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>

#include "errors.hpp"

namespace lplab::fft {

enum class Direction { forward, backward };

namespace detail {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

using PlanKey = std::tuple<int, int, Direction>;

// FFTW's planner is not thread-safe; execution of an existing plan is.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

inline std::map<PlanKey, PlanHandle>& plan_cache() {
    static std::map<PlanKey, PlanHandle> cache;
    return cache;
}

inline fftw_plan plan_for(int dim, int n, Direction dir) {
    std::lock_guard lock(planner_mutex());
    auto& cache = plan_cache();
    const PlanKey key{dim, n, dir};
    if (auto it = cache.find(key); it != cache.end()) return it->second.get();

    std::array<int, 3> shape{n, n, n};
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(n);
    auto* scratch = fftw_alloc_complex(total);
    if (!scratch) throw NumericalError("fftw_alloc_complex failed");
    const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan plan = fftw_plan_dft(dim, shape.data(), scratch, scratch, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (!plan) throw NumericalError("fftw_plan_dft failed");
    cache.emplace(key, PlanHandle(plan));
    return plan;
}

} // namespace detail

/// In-place unnormalized DFT over a row-major dim-dimensional cube of side n.
/// forward: X_k = sum_j x_j e^{-2 pi i jk/n}; backward uses the + sign.
inline void transform(std::span<std::complex<double>> data, int dim, int n, Direction dir) {
    fftw_plan plan = detail::plan_for(dim, n, dir);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, ptr, ptr);
}

} // namespace lplab::fft
