#pragma once

// Convolution semigroup kernels p_t with F p_t = (2 pi)^{-n/2} e^{-t psi}:
// closed forms (heat, Cauchy), spectral synthesis for any characteristic
// exponent, derivative L1 functionals and the semigroup checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "grid.hpp"

namespace lplab {

enum class SemigroupVariant { gauss_weierstrass, generalized_gw, cauchy_poisson, char_exponent };

/// psi as a function of the frequency vector.
using CharacteristicExponent = std::function<cplx(std::span<const double>)>;

struct SemigroupSpec {
    SemigroupVariant variant = SemigroupVariant::gauss_weierstrass;
    double m = 1.0;               // order for generalized_gw
    CharacteristicExponent psi;   // set for every variant by the factories
    std::string symbol_name;
    bool re_nonneg = true;        // caller's claim for char_exponent; checked on the lattice
    bool symmetric = true;        // psi(-xi) = conj psi(xi): kernels are real
    bool markovian = true;        // kernels are probability densities
};

namespace detail {

inline double norm_of(std::span<const double> xi) {
    double r2 = 0.0;
    for (double v : xi) r2 += v * v;
    return std::sqrt(r2);
}

} // namespace detail

/// psi(xi) = |xi|^{2m}. m > 1 gives signed kernels.
inline SemigroupSpec generalized_gw(double m) {
    if (!(m > 0.0) || !std::isfinite(m)) throw ValidationError("generalized Gauss-Weierstrass order m must be > 0");
    SemigroupSpec s;
    s.variant = m == 1.0 ? SemigroupVariant::gauss_weierstrass : SemigroupVariant::generalized_gw;
    s.m = m;
    s.psi = [m](std::span<const double> xi) {
        double r2 = 0.0;
        for (double v : xi) r2 += v * v;
        return cplx(m == 1.0 ? r2 : std::pow(r2, m));
    };
    std::ostringstream os;
    os << "|xi|^" << 2.0 * m;
    s.symbol_name = os.str();
    s.markovian = m <= 1.0;
    return s;
}

inline SemigroupSpec gauss_weierstrass() { return generalized_gw(1.0); }

inline SemigroupSpec cauchy_poisson() {
    SemigroupSpec s;
    s.variant = SemigroupVariant::cauchy_poisson;
    s.psi = [](std::span<const double> xi) { return cplx(detail::norm_of(xi)); };
    s.symbol_name = "|xi|";
    return s;
}

inline SemigroupSpec char_exponent(std::string name, CharacteristicExponent psi, bool re_nonneg = true,
                                   bool symmetric = true, bool markovian = true) {
    if (!psi) throw ValidationError("characteristic exponent must be callable");
    SemigroupSpec s;
    s.variant = SemigroupVariant::char_exponent;
    s.psi = std::move(psi);
    s.symbol_name = std::move(name);
    s.re_nonneg = re_nonneg;
    s.symmetric = symmetric;
    s.markovian = markovian;
    return s;
}

/// Isotropic alpha-stable exponent |xi|^alpha, 0 < alpha <= 2.
inline SemigroupSpec stable(double alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw ValidationError("stable index must lie in (0, 2]");
    std::ostringstream os;
    os << "|xi|^" << alpha;
    return char_exponent(os.str(), [alpha](std::span<const double> xi) {
        return cplx(std::pow(detail::norm_of(xi), alpha));
    });
}

/// Gamma semigroup, psi(xi) = log(1 + |xi|).
inline SemigroupSpec gamma_semigroup() {
    return char_exponent("log(1+|xi|)", [](std::span<const double> xi) {
        return cplx(std::log1p(detail::norm_of(xi)));
    });
}

inline const char* variant_name(SemigroupVariant v) {
    switch (v) {
    case SemigroupVariant::gauss_weierstrass: return "gauss_weierstrass";
    case SemigroupVariant::generalized_gw: return "generalized_gw";
    case SemigroupVariant::cauchy_poisson: return "cauchy_poisson";
    case SemigroupVariant::char_exponent: return "char_exponent";
    }
    return "unknown";
}

inline void require_positive_time(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("time t must be positive and finite");
}

/// (4 pi t)^{-n/2} e^{-|x|^2/4t} or, for n = 1, t / (pi (x^2 + t^2)).
inline SampledField closed_form_kernel(const SemigroupSpec& spec, double t, const Grid& grid) {
    require_positive_time(t);
    if (spec.variant == SemigroupVariant::gauss_weierstrass) {
        const double c = std::pow(4.0 * std::numbers::pi * t, -0.5 * grid.dim());
        return sample(grid, [&](std::span<const double> x) {
            double r2 = 0.0;
            for (double v : x) r2 += v * v;
            return c * std::exp(-r2 / (4.0 * t));
        });
    }
    if (spec.variant == SemigroupVariant::cauchy_poisson) {
        if (grid.dim() != 1) throw ValidationError("closed-form Cauchy kernel is one-dimensional");
        return sample(grid, [t](double x) { return t / (std::numbers::pi * (x * x + t * t)); });
    }
    throw ValidationError("no closed form for variant " + std::string(variant_name(spec.variant)));
}

/// sum_j p_t(x + 2Lj) for the Cauchy kernel in closed form: the torus kernel
/// the spectral construction approximates.
inline SampledField periodized_cauchy_kernel(double t, const Grid& grid) {
    require_positive_time(t);
    if (grid.dim() != 1) throw ValidationError("periodized Cauchy kernel is one-dimensional");
    const double L = grid.half_width();
    const double a = std::numbers::pi * t / L;
    return sample(grid, [&](double x) {
        return std::sinh(a) / (2.0 * L * (std::cosh(a) - std::cos(std::numbers::pi * x / L)));
    });
}

/// Spectral tail threshold: e^{-t re psi} on the outer lattice shell must not exceed this.
inline constexpr double under_resolution_threshold = 1e-12;

/// max of e^{-t re psi} over lattice points with some axis index -N/2.
inline double spectral_tail(const SemigroupSpec& spec, double t, const Grid& grid) {
    const auto half = -static_cast<long>(grid.samples_per_axis() / 2);
    std::array<double, 3> xi{};
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto idx = grid.unravel(i);
        bool shell = false;
        for (int d = 0; d < grid.dim(); ++d) {
            const auto j = idx[static_cast<std::size_t>(d)];
            shell = shell || grid.frequency_index(j) == half;
            xi[static_cast<std::size_t>(d)] = grid.frequency(j);
        }
        if (!shell) continue;
        const double re = spec.psi(std::span<const double>(xi.data(), static_cast<std::size_t>(grid.dim()))).real();
        worst = std::max(worst, std::exp(-t * re));
    }
    return worst;
}

/// Smallest t >= 0 for which spectral_kernel accepts the grid (radial psi:
/// evaluated on the axis point of the outer shell).
inline double min_resolvable_time(const SemigroupSpec& spec, const Grid& grid) {
    std::array<double, 3> xi{grid.nyquist(), 0.0, 0.0};
    const double re = spec.psi(std::span<const double>(xi.data(), static_cast<std::size_t>(grid.dim()))).real();
    return re > 0.0 ? -std::log(under_resolution_threshold) / re : std::numeric_limits<double>::infinity();
}

/// p_t = F^{-1}((2 pi)^{-n/2} e^{-t psi}) on the lattice.
inline SampledField spectral_kernel(const SemigroupSpec& spec, double t, const Grid& grid) {
    require_positive_time(t);
    if (!spec.psi) throw ValidationError("semigroup spec has no characteristic exponent");
    const double c = detail::unitary_factor(grid.dim());
    double min_re = 0.0;
    Spectrum spectrum = sample_spectrum(grid, [&](std::span<const double> xi) {
        const cplx psi = spec.psi(xi);
        min_re = std::min(min_re, psi.real());
        return c * std::exp(-t * psi);
    });
    if (min_re < 0.0) {
        std::ostringstream os;
        os << "re psi < 0 on the lattice (min " << min_re << ") for " << spec.symbol_name;
        throw ValidationError(os.str());
    }
    const double tail = spectral_tail(spec, t, grid);
    if (tail > under_resolution_threshold) {
        std::ostringstream os;
        os << "kernel under-resolved at this t: e^{-t re psi} = " << tail << " on the outer lattice shell (t = "
           << t << ", " << grid.describe() << ")";
        throw UnderResolvedError(os.str());
    }
    SampledField p = inverse_transform(spectrum);
    if (!spec.symmetric) return p;
    if (p.max_imag() > 1e-8 * p.max_abs())
        throw NumericalError("symmetric exponent produced a complex kernel; psi is not even");
    auto re = p.real_part();
    return SampledField(grid, std::vector<cplx>(re.begin(), re.end()), Domain::space);
}

/// integral of |d^alpha p|.
inline double derivative_l1(const SampledField& p, const std::array<int, 3>& alpha) {
    const SampledField d = spectral_derivative(p, alpha);
    std::vector<double> mag(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) mag[i] = std::abs(d[i]);
    return p.grid().cell_volume() * pairwise_sum(mag);
}

/// integral of |grad p| (Euclidean norm of the spectral gradient).
inline double gradient_l1(const SampledField& p) {
    require_domain(p, Domain::space, "gradient_l1");
    const Grid& g = p.grid();
    std::vector<double> sq(p.size(), 0.0);
    for (int d = 0; d < g.dim(); ++d) {
        std::array<int, 3> alpha{0, 0, 0};
        alpha[static_cast<std::size_t>(d)] = 1;
        const SampledField dp = spectral_derivative(p, alpha);
        for (std::size_t i = 0; i < sq.size(); ++i) sq[i] += std::norm(dp[i]);
    }
    for (auto& v : sq) v = std::sqrt(v);
    return g.cell_volume() * pairwise_sum(sq);
}

inline double l1_norm(const SampledField& f) {
    std::vector<double> mag(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) mag[i] = std::abs(f[i]);
    return f.grid().cell_volume() * pairwise_sum(mag);
}

struct KernelDiagnostics {
    double t = 0.0;
    double mass = 0.0;      // integral of p_t
    double l1_norm = 0.0;
    double gradient_l1 = 0.0;
    double min_value = 0.0;
};

inline KernelDiagnostics diagnose_kernel(const SampledField& p, double t) {
    KernelDiagnostics d;
    d.t = t;
    d.mass = integrate(p);
    d.l1_norm = l1_norm(p);
    d.gradient_l1 = gradient_l1(p);
    d.min_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i) d.min_value = std::min(d.min_value, p[i].real());
    return d;
}

inline nlohmann::json to_json(const KernelDiagnostics& d) {
    return {{"t", d.t}, {"mass", d.mass}, {"l1_norm", d.l1_norm}, {"gradient_l1", d.gradient_l1},
            {"min_value", d.min_value}};
}

/// Spectral kernels of one semigroup on one grid, built on demand and cached.
/// Many readers, one writer per insertion; results do not depend on cache hits.
class KernelFamily {
public:
    KernelFamily(SemigroupSpec spec, Grid grid) : spec_(std::move(spec)), grid_(std::move(grid)) {}

    const SemigroupSpec& spec() const noexcept { return spec_; }
    const Grid& grid() const noexcept { return grid_; }

    std::shared_ptr<const SampledField> kernel(double t) const {
        {
            std::shared_lock lock(mutex_);
            if (auto it = cache_.find(t); it != cache_.end()) return it->second;
        }
        auto built = std::make_shared<const SampledField>(spectral_kernel(spec_, t, grid_));
        const double mass = l1_norm(*built);
        std::unique_lock lock(mutex_);
        auto [it, inserted] = cache_.emplace(t, std::move(built));
        if (inserted) masses_.emplace(t, mass);
        return it->second;
    }

    /// ||p_t | L_1|| for every t built so far.
    std::map<double, double> mass_record() const {
        std::shared_lock lock(mutex_);
        return masses_;
    }

    double kernel_l1(double t) const {
        kernel(t);
        std::shared_lock lock(mutex_);
        return masses_.at(t);
    }

private:
    SemigroupSpec spec_;
    Grid grid_;
    mutable std::shared_mutex mutex_;
    mutable std::map<double, std::shared_ptr<const SampledField>> cache_;
    mutable std::map<double, double> masses_;
};

/// sup |p_{t+s} - p_t * p_s| / sup |p_{t+s}| for arbitrary fields.
inline double chapman_kolmogorov_residual(const SampledField& p_t, const SampledField& p_s,
                                          const SampledField& p_ts) {
    const SampledField diff = p_ts - convolve(p_t, p_s);
    return diff.max_abs() / p_ts.max_abs();
}

inline double chapman_kolmogorov_residual(const KernelFamily& fam, double t, double s) {
    require_positive_time(t);
    require_positive_time(s);
    return chapman_kolmogorov_residual(*fam.kernel(t), *fam.kernel(s), *fam.kernel(t + s));
}

/// P_t f = f * p_t.
inline SampledField apply_semigroup(const KernelFamily& fam, double t, const SampledField& f) {
    require_same_grid(fam.grid(), f.grid());
    return convolve(f, *fam.kernel(t));
}

struct HartmanWintnerPoint {
    double r = 0.0;
    double ratio = 0.0;  // min over the sphere |xi| = r of re psi / log r
};

struct HartmanWintnerProfile {
    std::vector<HartmanWintnerPoint> points;
    bool increasing = false;
    bool satisfied = false;  // increasing and last ratio above the threshold
    std::string verdict;
};

namespace detail {

inline std::vector<std::array<double, 3>> sphere_directions(int dim) {
    std::vector<std::array<double, 3>> dirs;
    if (dim == 1) return {{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}};
    constexpr int count = 64;
    if (dim == 2) {
        for (int i = 0; i < count; ++i) {
            const double a = 2.0 * std::numbers::pi * i / count;
            dirs.push_back({std::cos(a), std::sin(a), 0.0});
        }
        return dirs;
    }
    // Fibonacci sphere.
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / count;
        const double rho = std::sqrt(1.0 - z * z);
        dirs.push_back({rho * std::cos(golden * i), rho * std::sin(golden * i), z});
    }
    return dirs;
}

} // namespace detail

/// Ratio profile re psi(xi) / log|xi| on spheres of the given radii. A numerical
/// surrogate for the Hartman-Wintner growth condition, never a limit claim.
inline HartmanWintnerProfile hartman_wintner_profile(const SemigroupSpec& spec, int dim,
                                                     std::span<const double> radii, double threshold = 10.0) {
    if (radii.empty()) throw ValidationError("hartman_wintner_profile needs radii");
    HartmanWintnerProfile out;
    const auto dirs = detail::sphere_directions(dim);
    for (double r : radii) {
        if (!(r > 1.0)) throw ValidationError("Hartman-Wintner radii must exceed 1");
        double best = std::numeric_limits<double>::infinity();
        for (const auto& e : dirs) {
            std::array<double, 3> xi{r * e[0], r * e[1], r * e[2]};
            best = std::min(best, spec.psi(std::span<const double>(xi.data(), static_cast<std::size_t>(dim))).real());
        }
        out.points.push_back({r, best / std::log(r)});
    }
    out.increasing = true;
    for (std::size_t i = 1; i < out.points.size(); ++i)
        out.increasing = out.increasing && out.points[i].ratio > out.points[i - 1].ratio;
    out.satisfied = out.increasing && out.points.back().ratio > threshold;
    out.verdict = out.satisfied ? "HW satisfied numerically" : "HW not satisfied numerically";
    return out;
}

inline HartmanWintnerProfile hartman_wintner_profile(const SemigroupSpec& spec, const Grid& grid,
                                                     std::span<const double> radii, double threshold = 10.0) {
    for (double r : radii)
        if (r > grid.nyquist()) throw ValidationError("Hartman-Wintner radius beyond the lattice");
    return hartman_wintner_profile(spec, grid.dim(), radii, threshold);
}

} // namespace lplab
