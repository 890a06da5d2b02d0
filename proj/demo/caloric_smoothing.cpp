// Smoothing rate of generalized Gauss-Weierstrass semigroups: the kernel norm
// ||p_t | B^u_{1,inf}|| decays like t^{-u/2m} as t -> 0.

#include <cstdio>

#include "lplab.hpp"

using namespace lplab;

int main() {
    const Grid grid(1, 8192, 20.0);
    const auto res = build_resolution(grid);
    const double u = 1.0;
    for (double m : {1.0, 2.0}) {
        const KernelFamily fam(generalized_gw(m), grid);
        const double t_lo = m == 1.0 ? 1e-4 : 1e-7;
        const double step = std::pow(std::pow(2.0, 2.0 * m), 0.25);  // four points per log-period
        std::vector<double> ts, norms;
        std::printf("m = %g\n%12s %14s %14s\n", m, "t", "||p_t|B^u||", "||grad p_t||_1");
        for (int i = 0; i < 13; ++i) {
            const double t = t_lo * std::pow(step, i);
            ts.push_back(t);
            norms.push_back(kernel_smoothing_norm(fam, t, u, res));
            std::printf("%12.4e %14.6e %14.6e\n", t, norms.back(), gradient_l1(*fam.kernel(t)));
        }
        const auto fit = fit_power_law(ts, norms);
        std::printf("fitted exponent %.4f, expected %.4f\n\n", fit.exponent, -u / (2.0 * m));
    }
}
