// Subordinating the heat semigroup with the stable-1/2 subordinator yields the
// Cauchy-Poisson semigroup; the moment E[R^{-u/2}] controls its smoothing.

#include <cstdio>

#include "lplab.hpp"

using namespace lplab;

int main() {
    const Grid grid(1, 4096, 200.0);
    for (double t : {0.5, 1.0, 2.0}) {
        const auto d = stable_half_density(t);
        const auto p = subordinate_kernel(d, grid);
        const double err = (p - closed_form_kernel(cauchy_poisson(), t, grid)).max_abs();
        const double periodized = (p - periodized_cauchy_kernel(t, grid)).max_abs();
        std::printf("t = %g  mass %.8f  vs Cauchy %.2e  vs periodized Cauchy %.2e\n", t, integrate(p), err,
                    periodized);
        for (double u : {0.5, 1.0, 2.0}) {
            const auto k = subordinator_moment(d, u);
            std::printf("    u = %g  K_t = %.10f  closed form %.10f\n", u, k.value, stable_half_moment(t, u));
        }
    }
}
