#pragma once

// Bernstein functions, subordinator laws rho_t sampled on log-spaced radial
// nodes, subordinate heat kernels p_t = int (torus heat kernel at r) rho_t(dr)
// and the negative moments int r^{-u/2} rho_t(dr).

#include <cmath>
#include <array>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kernels.hpp"

namespace lplab {

enum class BernsteinVariant { power, log, user };

struct BernsteinSpec {
    BernsteinVariant variant = BernsteinVariant::power;
    double alpha = 0.5;
    std::function<double(double)> g;
    std::function<double(double)> g_inverse;  // optional for user functions
    std::string name;
};

inline BernsteinSpec power_bernstein(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("power Bernstein exponent must lie in (0, 1]");
    std::ostringstream os;
    os << "lambda^" << alpha;
    return {BernsteinVariant::power, alpha, [alpha](double l) { return std::pow(l, alpha); },
            [alpha](double y) { return std::pow(y, 1.0 / alpha); }, os.str()};
}

inline BernsteinSpec log_bernstein() {
    return {BernsteinVariant::log, 0.0, [](double l) { return std::log1p(l); },
            [](double y) { return std::expm1(y); }, "log(1+lambda)"};
}

inline BernsteinSpec user_bernstein(std::string name, std::function<double(double)> g,
                                    std::function<double(double)> g_inverse = {}) {
    if (!g) throw ValidationError("Bernstein function must be callable");
    if (g(0.0) != 0.0) throw ValidationError("Bernstein function must satisfy g(0) = 0");
    return {BernsteinVariant::user, 0.0, std::move(g), std::move(g_inverse), std::move(name)};
}

inline double bernstein_eval(const BernsteinSpec& spec, double lambda) {
    if (!(lambda >= 0.0)) throw ValidationError("Bernstein functions are evaluated at lambda >= 0");
    return spec.g(lambda);
}

/// g^{-1}(y), closed form when available, otherwise bracketing plus bisection
/// to 1e-10 relative.
inline double bernstein_inverse(const BernsteinSpec& spec, double y) {
    if (!(y >= 0.0) || !std::isfinite(y)) throw ValidationError("g^{-1} needs a finite y >= 0");
    if (y == 0.0) return 0.0;
    if (spec.g_inverse) return spec.g_inverse(y);
    double lo = 0.0, hi = 1.0;
    while (spec.g(hi) < y) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw ValidationError("g^{-1}: g stays below y; g is bounded or constant");
    }
    if (spec.g(hi) == spec.g(lo)) throw ValidationError("g^{-1}: g is constant on the bracket");
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        (spec.g(mid) < y ? lo : hi) = mid;
    }
    const double x = 0.5 * (lo + hi);
    if (!(spec.g(x * (1.0 + 1e-6)) > y) || !(spec.g(x * (1.0 - 1e-6)) < y))
        throw ValidationError("g^{-1}: g is constant around the preimage of y");
    return x;
}

struct BernsteinSweep {
    bool nondecreasing = true;
    bool concave = true;
    std::size_t samples = 0;
};

/// Finite-difference monotonicity and concavity on log-spaced points of
/// (1e-3, 1e6), log10 step 1e-3.
inline BernsteinSweep sweep_bernstein(const BernsteinSpec& spec) {
    BernsteinSweep out;
    std::vector<double> x, y;
    for (double e = -3.0; e <= 6.0 + 1e-12; e += 1e-3) {
        x.push_back(std::pow(10.0, e));
        y.push_back(spec.g(x.back()));
    }
    out.samples = x.size();
    double prev_slope = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double slope = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
        if (y[i] < y[i - 1]) out.nondecreasing = false;
        if (slope > prev_slope * (1.0 + 1e-9) + 1e-300) out.concave = false;
        prev_slope = slope;
    }
    return out;
}

/// Log-spaced nodes r_i and trapezoid weights in log r (w_i = r_i du, halved at the ends).
struct RadialQuadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline RadialQuadrature log_nodes(double r_min, double r_max, std::size_t count) {
    if (!(r_min > 0.0) || !(r_max > r_min)) throw ValidationError("node range must satisfy 0 < r_min < r_max");
    if (count < 512) throw ValidationError("subordinator quadrature needs at least 512 nodes");
    RadialQuadrature q;
    q.nodes.resize(count);
    q.weights.resize(count);
    const double a = std::log(r_min), b = std::log(r_max);
    const double du = (b - a) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        q.nodes[i] = std::exp(a + du * static_cast<double>(i));
        q.weights[i] = q.nodes[i] * du * ((i == 0 || i + 1 == count) ? 0.5 : 1.0);
    }
    return q;
}

/// Default nodes for time t: [1e-4 t^2, 1e14 t^2], 4096 points. The upper end
/// leaves tail mass ~ 3e-8 for the r^{-3/2} decay of the alpha = 1/2 law.
inline RadialQuadrature default_nodes(double t, std::size_t count = 4096) {
    require_positive_time(t);
    return log_nodes(1e-4 * t * t, 1e14 * t * t, count);
}

struct SubordinatorDensity {
    double t = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> density;
    BernsteinSpec bernstein;
    std::vector<std::pair<double, double>> laplace_residuals;  // (lambda, residual)
    double mass = 0.0;
};

inline constexpr double laplace_tolerance = 1e-5;
inline constexpr double mass_tolerance = 1e-6;

/// |sum w_i e^{-lambda r_i} rho_i - e^{-t g(lambda)}| per lambda.
inline std::vector<std::pair<double, double>> laplace_check(const SubordinatorDensity& d,
                                                            std::span<const double> lambdas) {
    std::vector<std::pair<double, double>> out;
    std::vector<double> terms(d.nodes.size());
    for (double l : lambdas) {
        for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = d.weights[i] * std::exp(-l * d.nodes[i]) * d.density[i];
        out.emplace_back(l, std::abs(pairwise_sum(terms) - std::exp(-d.t * bernstein_eval(d.bernstein, l))));
    }
    return out;
}

/// Wraps caller-provided density samples and validates them: mass 1 and the
/// Laplace identity at lambda in {0.1, 1, 10}. Throws NumericalError on failure.
inline SubordinatorDensity make_density(double t, const RadialQuadrature& q, std::vector<double> density,
                                        BernsteinSpec bernstein) {
    require_positive_time(t);
    if (density.size() != q.nodes.size()) throw ValidationError("density and node counts differ");
    SubordinatorDensity d{t, q.nodes, q.weights, std::move(density), std::move(bernstein), {}, 0.0};
    std::vector<double> terms(d.nodes.size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = d.weights[i] * d.density[i];
    d.mass = pairwise_sum(terms);
    const std::array<double, 3> lambdas{0.1, 1.0, 10.0};
    d.laplace_residuals = laplace_check(d, lambdas);
    if (std::abs(d.mass - 1.0) > mass_tolerance)
        throw NumericalError("subordinator density mass " + std::to_string(d.mass) + " is not 1; widen the node range");
    for (const auto& [l, r] : d.laplace_residuals) {
        if (r > laplace_tolerance) {
            std::ostringstream os;
            os << "Laplace identity fails at lambda = " << l << " (residual " << r << "); check the node range";
            throw NumericalError(os.str());
        }
    }
    return d;
}

/// rho_t(r) = t / (2 sqrt(pi)) r^{-3/2} e^{-t^2/(4r)}: the law with Laplace
/// exponent g(lambda) = sqrt(lambda).
inline double stable_half_density_value(double t, double r) {
    return t / (2.0 * std::sqrt(std::numbers::pi)) * std::pow(r, -1.5) * std::exp(-t * t / (4.0 * r));
}

inline SubordinatorDensity stable_half_density(double t, const RadialQuadrature& q) {
    std::vector<double> rho(q.nodes.size());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = stable_half_density_value(t, q.nodes[i]);
    return make_density(t, q, std::move(rho), power_bernstein(0.5));
}

inline SubordinatorDensity stable_half_density(double t) { return stable_half_density(t, default_nodes(t)); }

/// Node carrying the largest density value.
inline double density_mode(const SubordinatorDensity& d) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < d.density.size(); ++i)
        if (d.density[i] > d.density[best]) best = i;
    return d.nodes[best];
}

/// Throws unless the nodes cover [1e-4, 1e4] t^2.
inline void require_node_coverage(const SubordinatorDensity& d) {
    const double s = d.t * d.t;
    if (d.nodes.front() > 1e-4 * s * (1.0 + 1e-9) || d.nodes.back() < 1e4 * s * (1.0 - 1e-9)) {
        std::ostringstream os;
        os << "subordinator nodes [" << d.nodes.front() << ", " << d.nodes.back() << "] do not cover [1e-4, 1e4] t^2";
        throw ValidationError(os.str());
    }
}

/// sum_i w_i rho_t(r_i) q_{r_i}, q_r the torus heat kernel at time r, assembled
/// in frequency: F p = (2 pi)^{-n/2} sum_i w_i rho_i e^{-r_i |xi|^2}.
inline SampledField subordinate_kernel(const SubordinatorDensity& d, const Grid& grid) {
    require_node_coverage(d);
    const auto norms = lattice_frequency_norms(grid);
    const double c = detail::unitary_factor(grid.dim());
    std::vector<double> mixture(norms.size());
    parallel_for(norms.size(), [&](std::size_t j) {
        const double xi2 = norms[j] * norms[j];
        std::vector<double> terms(d.nodes.size());
        for (std::size_t i = 0; i < terms.size(); ++i)
            terms[i] = d.weights[i] * d.density[i] * std::exp(-d.nodes[i] * xi2);
        mixture[j] = c * pairwise_sum(terms);
    });
    std::vector<cplx> spec(mixture.begin(), mixture.end());
    const SampledField p = inverse_transform(SampledField(grid, std::move(spec), Domain::frequency));
    auto re = p.real_part();
    return SampledField(grid, std::vector<cplx>(re.begin(), re.end()), Domain::space);
}

/// Semigroup spec with psi(xi) = g(|xi|^2), the exponent of the subordinate semigroup.
inline SemigroupSpec subordinate_exponent(const BernsteinSpec& b) {
    auto g = b.g;
    return char_exponent("g(|xi|^2), g = " + b.name, [g](std::span<const double> xi) {
        double r2 = 0.0;
        for (double v : xi) r2 += v * v;
        return cplx(g(r2));
    });
}

struct MomentResult {
    double value = 0.0;
    double tail_ratio = 0.0;  // (|first term| + |last term|) / value
};

inline constexpr double moment_tail_tolerance = 1e-6;

/// sum_i w_i r_i^{-u/2} rho_t(r_i). Throws when the end terms are not negligible.
inline MomentResult subordinator_moment(const SubordinatorDensity& d, double u) {
    if (!(u >= 0.0)) throw ValidationError("moment order u must be >= 0");
    std::vector<double> terms(d.nodes.size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = d.weights[i] * std::pow(d.nodes[i], -0.5 * u) * d.density[i];
    MomentResult m;
    m.value = pairwise_sum(terms);
    m.tail_ratio = (std::abs(terms.front()) + std::abs(terms.back())) / m.value;
    if (m.tail_ratio > moment_tail_tolerance) {
        std::ostringstream os;
        os << "moment quadrature unresolved: end-term ratio " << m.tail_ratio;
        throw NumericalError(os.str());
    }
    return m;
}

/// 2^u Gamma((u+1)/2) t^{-u} / sqrt(pi) for the g = sqrt(lambda) law.
inline double stable_half_moment(double t, double u) {
    return std::pow(2.0, u) * std::tgamma(0.5 * (u + 1.0)) * std::pow(t, -u) / std::sqrt(std::numbers::pi);
}

} // namespace lplab
