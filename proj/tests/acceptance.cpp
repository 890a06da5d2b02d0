// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lplab.hpp"

using namespace lplab;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

std::vector<double> geometric_times(double lo, double factor, int count) {
    std::vector<double> ts;
    for (int i = 0; i < count; ++i) ts.push_back(lo * std::pow(factor, i));
    return ts;
}

CorpusSpec corpus(std::uint64_t seed, std::size_t count) {
    CorpusSpec s;
    s.seed = seed;
    s.count = count;
    s.band_limit = 16.0;
    return s;
}

/// Trapezoid rule in y = log x over [a, b] with `count` points.
template <typename F>
double log_trapezoid(F&& f, double a, double b, std::size_t count) {
    const double dy = (b - a) / static_cast<double>(count - 1);
    std::vector<double> terms(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double x = std::exp(a + dy * static_cast<double>(i));
        terms[i] = f(x) * x * dy * ((i == 0 || i + 1 == count) ? 0.5 : 1.0);
    }
    return pairwise_sum(terms);
}

// 1. Gradient integral of the heat kernel at t = 1.
Outcome ac1() {
    constexpr double tol = 1e-4, time_limit = 1.0;
    const auto start = std::chrono::steady_clock::now();
    const KernelFamily fam(gauss_weierstrass(), Grid(1, 4096, 40.0));
    const double g = gradient_l1(*fam.kernel(1.0));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double err = std::abs(g - 1.0 / std::sqrt(pi));
    return {err <= tol && secs < time_limit,
            fmt("gradient_l1=%.10f |err|=%.2e tol=%.0e time=%.3fs", g, err, tol, secs)};
}

// 2. Mass of p_t^{(m)} constant in t.
Outcome ac2() {
    constexpr double tol = 1e-3;
    const Grid grid(1, 4096, 40.0);
    double worst = 0.0;
    for (double m : {1.0, 1.5, 2.0, 3.0}) {
        const KernelFamily fam(generalized_gw(m), grid);
        const double ref = fam.kernel_l1(0.25);
        for (double t : {0.5, 1.0, 2.0}) worst = std::max(worst, std::abs(fam.kernel_l1(t) / ref - 1.0));
    }
    return {worst <= tol, fmt("max relative mass drift=%.2e tol=%.0e", worst, tol)};
}

// 3. Gradient rate -1/(2m).
Outcome ac3() {
    constexpr double tol = 0.02;
    const Grid grid(1, 4096, 40.0);
    std::ostringstream os;
    bool ok = true;
    for (double m : {1.0, 2.0, 3.0}) {
        const KernelFamily fam(generalized_gw(m), grid);
        std::vector<double> ts, gs;
        for (int e = -6; e <= 0; ++e) {
            ts.push_back(std::ldexp(1.0, e));
            gs.push_back(gradient_l1(*fam.kernel(ts.back())));
        }
        const double slope = fit_power_law(ts, gs).exponent;
        const double target = -1.0 / (2.0 * m);
        ok = ok && std::abs(slope - target) <= tol;
        os << fmt("m=%g slope=%.4f target=%.4f; ", m, slope, target);
    }
    os << fmt("tol=%.2f", tol);
    return {ok, os.str()};
}

// Slope of ||p_t | B^u_{1,inf}|| over three log-periods, four points per period.
double kernel_norm_slope(const SemigroupSpec& spec, const Grid& grid, double u, double t_lo, double period) {
    const KernelFamily fam(spec, grid);
    const auto res = build_resolution(grid);
    const auto ts = geometric_times(t_lo, std::pow(period, 0.25), 13);
    std::vector<double> vs(ts.size());
    parallel_for(ts.size(), [&](std::size_t i) { vs[i] = kernel_smoothing_norm(fam, ts[i], u, res); });
    return fit_power_law(ts, vs).exponent;
}

// 4. Kernel-norm smoothing rate -u/(2m).
Outcome ac4() {
    constexpr double tol = 0.05;
    const Grid grid(1, 8192, 20.0);
    struct Row { double m, u, t_lo; };
    std::ostringstream os;
    bool ok = true;
    for (const Row r : {Row{1, 0.5, 1e-4}, Row{1, 1, 1e-4}, Row{2, 1, 1e-7}}) {
        const double slope = kernel_norm_slope(generalized_gw(r.m), grid, r.u, r.t_lo, std::pow(2.0, 2.0 * r.m));
        const double target = -r.u / (2.0 * r.m);
        ok = ok && std::abs(slope - target) <= tol;
        os << fmt("(m,u)=(%g,%g) slope=%.4f target=%.4f; ", r.m, r.u, slope, target);
    }
    os << fmt("tol=%.2f", tol);
    return {ok, os.str()};
}

// 5. Stable semigroups with u = alpha / 2 gain at rate -1/2.
Outcome ac5() {
    constexpr double tol = 0.05;
    struct Row { double alpha; std::size_t N; double t_lo; };
    std::ostringstream os;
    bool ok = true;
    for (const Row r : {Row{0.75, 65536, 0.05}, Row{1.5, 8192, 0.01}}) {
        const double slope =
            kernel_norm_slope(stable(r.alpha), Grid(1, r.N, 20.0), 0.5 * r.alpha, r.t_lo, std::pow(2.0, r.alpha));
        ok = ok && std::abs(slope + 0.5) <= tol;
        os << fmt("alpha=%g slope=%.4f; ", r.alpha, slope);
    }
    os << fmt("target=-0.5 tol=%.2f", tol);
    return {ok, os.str()};
}

// 6. Chapman-Kolmogorov at t = s = 1/2.
Outcome ac6() {
    constexpr double tol = 1e-8;
    const Grid grid(1, 4096, 40.0);
    const double gw = chapman_kolmogorov_residual(KernelFamily(gauss_weierstrass(), grid), 0.5, 0.5);
    const double m2 = chapman_kolmogorov_residual(KernelFamily(generalized_gw(2.0), grid), 0.5, 0.5);
    return {gw <= tol && m2 <= tol, fmt("residual gw=%.2e m=2=%.2e tol=%.0e", gw, m2, tol)};
}

struct Conv1Config { double p1, p2, p, q, s; };

const std::vector<Conv1Config>& conv1_matrix() {
    static const std::vector<Conv1Config> m{{1, 1, 1, 1, 0.5},   {2, 1, 2, 2, 0.5},         {1, 2, 2, 2, 1},
                                            {1.5, 1.5, 3, 1.5, 0}, {2, 4.0 / 3.0, 4, inf, -0.5}, {4, 1, 4, 3, 1.5}};
    return m;
}

// 7 and 8. Convolution with an L_{p2} function, constant 1.
Outcome conv1_criterion(Scale scale, double tol) {
    const Grid grid(1, 2048, 20.0);
    const auto res = build_resolution(grid);
    const auto fs = generate_corpus(corpus(7, 50), grid);
    const auto gs = generate_corpus(corpus(8, 50), grid);
    double worst = 0.0;
    std::size_t evaluated = 0;
    bool ok = true;
    for (const auto& m : conv1_matrix()) {
        InequalityCase c;
        c.kind = CaseKind::conv1;
        c.scale = scale;
        c.s = m.s;
        c.p = m.p;
        c.q = c.q1 = m.q;
        c.p1 = m.p1;
        c.p2 = m.p2;
        c.constant_claim = conv1_constant(m.p1, 1);
        c.tolerance = tol;
        const auto rep = check_inequality(c, fs, gs, res);
        worst = std::max(worst, rep.max_ratio);
        evaluated += rep.ratios.size();
        ok = ok && rep.verdict == Verdict::pass && rep.ratios.size() == 50;
    }
    return {ok, fmt("max ratio=%.8f over %zu pairs bound=1+%.0e", worst, evaluated, tol)};
}

Outcome ac7() { return conv1_criterion(Scale::B, 1e-6); }
Outcome ac8() { return conv1_criterion(Scale::F, 1e-4); }

// 9. Smoothing convolution: finite constant stable under N-doubling.
Outcome ac9() {
    constexpr double tol = 0.05;
    struct Row { CaseKind kind; Scale scale; double s, u, p, q, p1, q1, p2, q2; };
    const std::vector<Row> rows{{CaseKind::conv3, Scale::B, 0.5, 0.5, 1, 1, 1, 2, 1, 2},
                                {CaseKind::conv_eq23, Scale::B, 0.5, 1, 2, 2, 2, 2, 1, inf},
                                {CaseKind::conv3, Scale::F, 0, 0.5, 2, 1, 2, 2, 1, 2},
                                {CaseKind::conv_eq23, Scale::F, 0.25, 0.5, 1.5, 2, 1.5, 2, 1, inf}};
    std::ostringstream os;
    bool ok = true;
    for (const auto& r : rows) {
        InequalityCase c;
        c.kind = r.kind;
        c.scale = r.scale;
        c.s = r.s;
        c.u = r.u;
        c.p = r.p;
        c.q = r.q;
        c.p1 = r.p1;
        c.q1 = r.q1;
        c.p2 = r.p2;
        c.q2 = r.q2;
        const auto rep = check_inequality_refined(c, corpus(7, 50), corpus(8, 50), Grid(1, 2048, 20.0));
        const double delta = rep.refinement_delta.value_or(inf);
        ok = ok && std::isfinite(rep.empirical_C) && delta <= tol && rep.verdict == Verdict::pass;
        os << fmt("%s-%s C=%.4f delta=%.2e; ", to_string(r.kind), to_string(r.scale), rep.empirical_C, delta);
    }
    os << fmt("tol=%.2f", tol);
    return {ok, os.str()};
}

// 10. sqrt-subordinated heat kernel against the Cauchy kernel.
Outcome ac10() {
    constexpr double tol = 1e-4;
    constexpr std::size_t nodes = 4096;
    const Grid grid(1, 4096, 200.0);
    const auto p = subordinate_kernel(stable_half_density(1.0, default_nodes(1.0, nodes)), grid);
    const double err = (p - closed_form_kernel(cauchy_poisson(), 1.0, grid)).max_abs();
    return {err <= tol, fmt("sup error=%.2e nodes=%zu tol=%.0e", err, nodes, tol)};
}

// 11. Moments of the stable-1/2 subordinator.
Outcome ac11() {
    constexpr double tol = 1e-5, oracle_tol = 1e-8;
    double worst = 0.0, oracle_worst = 0.0, laplace_worst = 0.0;
    for (double t : {0.5, 1.0, 2.0}) {
        const auto d = stable_half_density(t);
        for (const auto& [lambda, r] : d.laplace_residuals) laplace_worst = std::max(laplace_worst, r);
        for (double u : {0.5, 1.0, 2.0}) {
            const double closed = std::pow(2.0, u) * std::tgamma(0.5 * (u + 1.0)) * std::pow(t, -u) / std::sqrt(pi);
            const double oracle = log_trapezoid(
                [&](double r) {
                    return std::pow(r, -0.5 * u) * t / (2.0 * std::sqrt(pi)) * std::pow(r, -1.5) *
                           std::exp(-t * t / (4.0 * r));
                },
                std::log(1e-6 * t * t), std::log(1e24 * t * t), 200001);
            oracle_worst = std::max(oracle_worst, std::abs(oracle / closed - 1.0));
            worst = std::max(worst, std::abs(subordinator_moment(d, u).value / closed - 1.0));
        }
    }
    const bool ok = worst <= tol && oracle_worst <= oracle_tol && laplace_worst <= laplace_tolerance;
    return {ok, fmt("max relative error=%.2e tol=%.0e; oracle vs closed form=%.2e; laplace residual=%.2e", worst, tol,
                    oracle_worst, laplace_worst)};
}

// 12. ||f | B^0_{1,inf}|| <= C ||f||_1 with the resolution's own constant.
Outcome ac12() {
    const Grid grid(1, 2048, 20.0);
    const auto res = build_resolution(grid);
    const double c = resolution_l1_constant(res);
    std::size_t violations = 0, checked = 0;
    for (std::uint64_t seed : {7, 8}) {
        for (const auto& f : generate_corpus(corpus(seed, 50), grid)) {
            ++checked;
            if (besov_norm(f, res, besov(0.0, 1.0, inf)).value > c * lp_norm(f, 1.0) * (1.0 + 1e-12)) ++violations;
        }
    }
    return {violations == 0, fmt("C=%.5f violations=%zu of %zu", c, violations, checked)};
}

// 13. Two transition profiles give equivalent norms with a stable constant.
Outcome ac13() {
    constexpr double tol = 0.05;
    std::ostringstream os;
    bool ok = true;
    for (const auto& sp : {besov(0.5, 1, 1), besov(1, 2, 2), besov(0, 1, inf)}) {
        std::array<double, 2> c{};
        for (std::size_t i = 0; i < 2; ++i) {
            const Grid grid(1, i == 0 ? 2048 : 4096, 20.0);
            const auto fields = generate_corpus(corpus(11, 50), grid);
            c[i] = norm_equivalence(fields, build_resolution(grid, default_profile()),
                                    build_resolution(grid, steep_profile()), sp)
                       .c;
        }
        const double delta = std::abs(c[1] / c[0] - 1.0);
        ok = ok && std::isfinite(c[0]) && delta <= tol;
        os << fmt("B(%g,%g,%g) c=%.4f->%.4f; ", sp.s, sp.p, sp.q, c[0], c[1]);
    }
    os << fmt("tol=%.2f", tol);
    return {ok, os.str()};
}

// 14. Second derivative of the heat kernel against the squared gradient at t/2.
Outcome ac14() {
    constexpr double slack = 1e-6;
    const KernelFamily fam(gauss_weierstrass(), Grid(1, 4096, 40.0));
    std::ostringstream os;
    bool ok = true;
    for (double t : {0.5, 1.0, 2.0}) {
        const double lhs = derivative_l1(*fam.kernel(t), {2, 0, 0});
        const double rhs = std::pow(gradient_l1(*fam.kernel(0.5 * t)), 2);
        ok = ok && lhs <= rhs + slack;
        os << fmt("t=%g %.6f<=%.6f; ", t, lhs, rhs);
    }
    os << fmt("slack=%.0e", slack);
    return {ok, os.str()};
}

} // namespace

int main() {
    const std::vector<std::function<Outcome()>> criteria{ac1, ac2, ac3, ac4,  ac5,  ac6,  ac7,
                                                         ac8, ac9, ac10, ac11, ac12, ac13, ac14};
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("AC%zu %s %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
