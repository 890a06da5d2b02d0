#pragma once

// Seeded test corpora and the inequality engine: Young, the two convolution
// theorems (with the p = p1, q = q1, p2 = 1, q2 = inf specialization),
// power-law fits, smoothing sweeps and the gradient bound for kernel norms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kernels.hpp"
#include "norms.hpp"

namespace lplab {

enum class CorpusFamily { gaussian_mix, band_limited_random, mollified_step, oscillatory_packet };

inline const char* to_string(CorpusFamily f) {
    switch (f) {
    case CorpusFamily::gaussian_mix: return "gaussian_mix";
    case CorpusFamily::band_limited_random: return "band_limited_random";
    case CorpusFamily::mollified_step: return "mollified_step";
    case CorpusFamily::oscillatory_packet: return "oscillatory_packet";
    }
    return "unknown";
}

inline CorpusFamily corpus_family_by_name(const std::string& name) {
    for (auto f : {CorpusFamily::gaussian_mix, CorpusFamily::band_limited_random, CorpusFamily::mollified_step,
                   CorpusFamily::oscillatory_packet})
        if (name == to_string(f)) return f;
    throw ValidationError("unknown corpus family '" + name + "'");
}

inline std::vector<CorpusFamily> all_corpus_families() {
    return {CorpusFamily::gaussian_mix, CorpusFamily::band_limited_random, CorpusFamily::mollified_step,
            CorpusFamily::oscillatory_packet};
}

struct CorpusSpec {
    std::uint64_t seed = 7;
    std::size_t count = 10;
    std::vector<CorpusFamily> families = all_corpus_families();
    double band_limit = 16.0;
};

namespace detail {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Spectrum of x -> a e^{-|x - c|^2 / (2 sigma^2)}.
inline cplx gaussian_spectrum(std::span<const double> xi, double a, double sigma, std::span<const double> c) {
    double r2 = 0.0, phase = 0.0;
    for (std::size_t d = 0; d < xi.size(); ++d) {
        r2 += xi[d] * xi[d];
        phase += c[d] * xi[d];
    }
    return a * std::pow(sigma, static_cast<double>(xi.size())) * std::exp(-0.5 * sigma * sigma * r2) *
           std::polar(1.0, -phase);
}

// Spectrum of 1_{[a,b]} mollified by a Gaussian of width sigma, one axis.
inline cplx step_spectrum(double xi, double a, double b, double sigma) {
    const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    const cplx core = xi == 0.0 ? cplx(b - a)
                                : (std::polar(1.0, -a * xi) - std::polar(1.0, -b * xi)) / cplx(0.0, xi);
    return c * core * std::exp(-0.5 * sigma * sigma * xi * xi);
}

inline std::array<double, 3> random_point(Rng& rng, int dim, double half) {
    std::array<double, 3> c{};
    for (int d = 0; d < dim; ++d) c[static_cast<std::size_t>(d)] = uniform(rng, -half, half);
    return c;
}

// One corpus member as a spectrum on the lattice, before band limiting.
inline Spectrum corpus_spectrum(CorpusFamily family, Rng& rng, const Grid& grid, double band_limit) {
    const int n = grid.dim();
    const double L = grid.half_width();
    const auto nd = static_cast<std::size_t>(n);
    switch (family) {
    case CorpusFamily::gaussian_mix: {
        const int components = 1 + static_cast<int>(rng() % 3);
        std::vector<double> amp, sig;
        std::vector<std::array<double, 3>> ctr;
        for (int j = 0; j < components; ++j) {
            amp.push_back(j == 0 ? uniform(rng, 0.5, 1.0) : uniform(rng, -1.0, 1.0));
            sig.push_back(uniform(rng, 0.3, 1.5));
            ctr.push_back(random_point(rng, n, 0.25 * L));
        }
        return sample_spectrum(grid, [&](std::span<const double> xi) {
            cplx v = 0.0;
            for (int j = 0; j < components; ++j)
                v += gaussian_spectrum(xi, amp[static_cast<std::size_t>(j)], sig[static_cast<std::size_t>(j)],
                                       std::span<const double>(ctr[static_cast<std::size_t>(j)].data(), nd));
            return v;
        });
    }
    case CorpusFamily::band_limited_random: {
        // Coefficients drawn in lexicographic order of m in [-M, M]^n, so the
        // field depends on (L, band_limit, seed) but not on N.
        const long M = static_cast<long>(std::floor(band_limit * L / std::numbers::pi));
        const long side = 2 * M + 1;
        std::size_t total = 1;
        for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(side);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<cplx> coeff(total);
        for (auto& c : coeff) {
            const double re = normal(rng);
            const double im = normal(rng);
            c = cplx(re, im);
        }
        const double decay = uniform(rng, 0.5, 1.5);
        const double dxi = grid.frequency_spacing();
        return sample_spectrum(grid, [&](std::span<const double> xi) {
            std::size_t flat = 0;
            double r2 = 0.0;
            for (int d = 0; d < n; ++d) {
                const long m = std::lround(xi[static_cast<std::size_t>(d)] / dxi);
                if (m < -M || m > M) return cplx(0.0);
                flat = flat * static_cast<std::size_t>(side) + static_cast<std::size_t>(m + M);
                r2 += xi[static_cast<std::size_t>(d)] * xi[static_cast<std::size_t>(d)];
            }
            return coeff[flat] * std::pow(1.0 + r2, -0.5 * decay);
        });
    }
    case CorpusFamily::mollified_step: {
        std::array<double, 3> a{}, b{};
        for (int d = 0; d < n; ++d) {
            a[static_cast<std::size_t>(d)] = uniform(rng, -0.25 * L, -0.5);
            b[static_cast<std::size_t>(d)] = uniform(rng, 0.5, 0.25 * L);
        }
        const double sigma = uniform(rng, 0.01, 0.05);
        const double sign = rng() % 2 ? 1.0 : -1.0;
        return sample_spectrum(grid, [&](std::span<const double> xi) {
            cplx v = sign;
            for (int d = 0; d < n; ++d)
                v *= step_spectrum(xi[static_cast<std::size_t>(d)], a[static_cast<std::size_t>(d)],
                                   b[static_cast<std::size_t>(d)], sigma);
            return v;
        });
    }
    case CorpusFamily::oscillatory_packet: {
        const double sigma = uniform(rng, 0.5, 2.0);
        const auto c = random_point(rng, n, 0.25 * L);
        std::array<double, 3> omega{};
        double norm = 0.0;
        for (int d = 0; d < n; ++d) {
            omega[static_cast<std::size_t>(d)] = uniform(rng, -1.0, 1.0);
            norm += omega[static_cast<std::size_t>(d)] * omega[static_cast<std::size_t>(d)];
        }
        norm = std::max(std::sqrt(norm), 1e-3);
        const double speed = uniform(rng, 0.3, 0.7) * band_limit;
        for (int d = 0; d < n; ++d) omega[static_cast<std::size_t>(d)] *= speed / norm;
        const double theta = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        return sample_spectrum(grid, [&](std::span<const double> xi) {
            std::array<double, 3> minus{}, plus{};
            for (int d = 0; d < n; ++d) {
                minus[static_cast<std::size_t>(d)] = xi[static_cast<std::size_t>(d)] - omega[static_cast<std::size_t>(d)];
                plus[static_cast<std::size_t>(d)] = xi[static_cast<std::size_t>(d)] + omega[static_cast<std::size_t>(d)];
            }
            const std::span<const double> cs(c.data(), nd);
            return 0.5 * (std::polar(1.0, theta) * gaussian_spectrum(std::span<const double>(minus.data(), nd), 1.0, sigma, cs) +
                          std::polar(1.0, -theta) * gaussian_spectrum(std::span<const double>(plus.data(), nd), 1.0, sigma, cs));
        });
    }
    }
    throw ValidationError("unknown corpus family");
}

// Zero beyond the band limit, symmetrize to a real field, L1-normalize.
inline SampledField finish_corpus_field(const Spectrum& raw, double band_limit) {
    const Grid& g = raw.grid();
    const auto norms = lattice_frequency_norms(g);
    std::vector<cplx> v(raw.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (norms[i] > band_limit) continue;
        auto idx = g.unravel(i);
        for (int d = 0; d < g.dim(); ++d)
            idx[static_cast<std::size_t>(d)] = g.storage_index(-g.frequency_index(idx[static_cast<std::size_t>(d)]));
        v[i] = 0.5 * (raw[i] + std::conj(raw[g.ravel(idx)]));
    }
    const SampledField f = inverse_transform(SampledField(g, std::move(v), Domain::frequency));
    auto re = f.real_part();
    double l1 = 0.0;
    {
        std::vector<double> mag(re.size());
        for (std::size_t i = 0; i < re.size(); ++i) mag[i] = std::abs(re[i]);
        l1 = g.cell_volume() * pairwise_sum(mag);
    }
    if (!(l1 > 0.0)) throw NumericalError("corpus field vanished after band limiting");
    for (auto& x : re) x /= l1;
    return SampledField(g, std::vector<cplx>(re.begin(), re.end()), Domain::space);
}

} // namespace detail

/// Deterministic corpus: member i uses family families[i mod size] and an
/// mt19937_64 seeded from (seed, i). Fields are real, band-limited (spectrum
/// zero for |xi| > band_limit) and have unit L1 norm.
inline std::vector<SampledField> generate_corpus(const CorpusSpec& spec, const Grid& grid) {
    if (spec.families.empty()) throw ValidationError("corpus needs at least one family");
    if (!(spec.band_limit > 0.0)) throw ValidationError("band limit must be positive");
    const int kmax = resolution_k_max(grid);
    if (spec.band_limit > std::ldexp(1.0, kmax - 1))
        throw ValidationError("band limit " + std::to_string(spec.band_limit) + " exceeds 2^{K_max - 1} = " +
                              std::to_string(std::ldexp(1.0, kmax - 1)));
    std::vector<std::optional<SampledField>> out(spec.count);
    parallel_for(spec.count, [&](std::size_t i) {
        std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                          static_cast<std::uint32_t>(i)};
        detail::Rng rng(seq);
        const CorpusFamily family = spec.families[i % spec.families.size()];
        out[i] = detail::finish_corpus_field(detail::corpus_spectrum(family, rng, grid, spec.band_limit),
                                             spec.band_limit);
    });
    std::vector<SampledField> fields;
    fields.reserve(out.size());
    for (auto& f : out) fields.push_back(std::move(*f));
    return fields;
}

enum class CaseKind { young, conv1, conv3, conv_eq23 };

inline const char* to_string(CaseKind k) {
    switch (k) {
    case CaseKind::young: return "young";
    case CaseKind::conv1: return "conv1";
    case CaseKind::conv3: return "conv3";
    case CaseKind::conv_eq23: return "conv_eq23";
    }
    return "unknown";
}

inline CaseKind case_kind_by_name(const std::string& name) {
    for (auto k : {CaseKind::young, CaseKind::conv1, CaseKind::conv3, CaseKind::conv_eq23})
        if (name == to_string(k)) return k;
    throw ValidationError("unknown inequality case '" + name + "'");
}

/// ||f * g | A^{s+u}_{p,q}|| <= C ||f | A^s_{p1,q1}|| ||g | A^u_{p2,q2}|| and its
/// relatives. young: L_p norms only. conv1: g in L_{p2}, q1 = q, u = 0.
/// conv_eq23: p1 = p, q1 = q, p2 = 1, q2 = inf.
struct InequalityCase {
    CaseKind kind = CaseKind::young;
    Scale scale = Scale::B;
    double s = 0.0, u = 0.0;
    double p = 1.0, q = 1.0;
    double p1 = 1.0, q1 = 1.0;
    double p2 = 1.0, q2 = 1.0;
    std::optional<double> constant_claim;
    double tolerance = 1e-12;  // relative slack on the claimed constant

    SpaceParams left() const { return {scale, s + u, p, q}; }
    SpaceParams right_f() const { return {scale, s, p1, q1}; }
    SpaceParams right_g() const { return {scale, u, p2, q2}; }
};

inline double reciprocal(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

/// Checks the exponent relations and theorem hypotheses. Throws ValidationError.
inline void validate_case(const InequalityCase& c) {
    for (double v : {c.p, c.p1, c.p2})
        if (!(v >= 1.0)) throw ValidationError("integrability exponents must be >= 1");
    for (double v : {c.q, c.q1, c.q2})
        if (!(v > 0.0)) throw ValidationError("summability exponents must be > 0");
    if (std::abs(1.0 + reciprocal(c.p) - reciprocal(c.p1) - reciprocal(c.p2)) > 1e-12)
        throw ValidationError("exponent relation 1 + 1/p = 1/p1 + 1/p2 violated");
    if (c.kind == CaseKind::young) return;
    if (c.kind == CaseKind::conv1) {
        if (c.q1 != c.q) throw ValidationError("conv1 uses the same q on both sides");
        if (c.u != 0.0) throw ValidationError("conv1 has no smoothness gain (u = 0)");
    }
    if (c.kind == CaseKind::conv3 || c.kind == CaseKind::conv_eq23) {
        if (reciprocal(c.q) > reciprocal(c.q1) + reciprocal(c.q2) + 1e-12)
            throw ValidationError("summability relation 1/q <= 1/q1 + 1/q2 violated");
    }
    if (c.kind == CaseKind::conv_eq23) {
        if (c.p1 != c.p || c.q1 != c.q || c.p2 != 1.0 || !std::isinf(c.q2))
            throw ValidationError("conv_eq23 requires p1 = p, q1 = q, p2 = 1, q2 = inf");
    }
    if (c.scale == Scale::F) {
        const bool uses_q2 = c.kind != CaseKind::conv1;
        if (c.q < 1.0 || c.q1 < 1.0 || (uses_q2 && c.q2 < 1.0))
            throw ValidationError("F-scale convolution theorems need q, q1, q2 >= 1");
    }
}

/// Constant of the L_{p2} convolution bound: 1 if p1 < inf, 2^n otherwise.
inline double conv1_constant(double p1, int dim) { return std::isinf(p1) ? std::ldexp(1.0, dim) : 1.0; }

enum class Verdict { pass, fail, incomplete };

inline const char* to_string(Verdict v) {
    return v == Verdict::pass ? "pass" : (v == Verdict::fail ? "fail" : "incomplete");
}

struct VerificationReport {
    InequalityCase inequality;
    std::vector<double> ratios;              // per evaluated pair, in pair order
    std::size_t skipped = 0;                 // pairs with right-hand side below 1e-12
    double max_ratio = 0.0;
    double empirical_C = 0.0;
    std::optional<double> refined_C;         // same check at 2N
    std::optional<double> refinement_delta;  // |refined_C / empirical_C - 1|
    double stability_tolerance = 0.05;
    Verdict verdict = Verdict::incomplete;
    std::vector<std::string> notes;
};

inline constexpr double degenerate_rhs = 1e-12;

namespace detail {

inline bool f_scale_cube_lhs(const InequalityCase& c) { return c.scale == Scale::F && std::isinf(c.p); }

inline void settle_verdict(VerificationReport& r) {
    if (r.ratios.empty()) {
        r.verdict = Verdict::incomplete;
        r.notes.push_back("no pair with a non-degenerate right-hand side");
        return;
    }
    if (r.inequality.constant_claim) {
        const double bound = *r.inequality.constant_claim * (1.0 + r.inequality.tolerance);
        r.verdict = r.max_ratio <= bound ? Verdict::pass : Verdict::fail;
        if (r.refined_C && *r.refined_C > bound) r.verdict = Verdict::fail;
        return;
    }
    if (!std::isfinite(r.empirical_C)) {
        r.verdict = Verdict::fail;
        return;
    }
    if (!r.refinement_delta) {
        r.verdict = Verdict::incomplete;
        return;
    }
    r.verdict = *r.refinement_delta <= r.stability_tolerance ? Verdict::pass : Verdict::fail;
}

} // namespace detail

/// Evaluates the case on the pairs (corpus_f[i], corpus_g[i]).
inline VerificationReport check_inequality(const InequalityCase& c, const std::vector<SampledField>& corpus_f,
                                           const std::vector<SampledField>& corpus_g, const DyadicResolution& res) {
    validate_case(c);
    if (corpus_f.size() != corpus_g.size()) throw ValidationError("corpora must have equal length");
    VerificationReport rep;
    rep.inequality = c;
    if (detail::f_scale_cube_lhs(c))
        rep.notes.push_back("left side uses the lattice cube norm, a lower bound; the check is a necessary condition");
    std::vector<double> lhs(corpus_f.size()), rhs(corpus_f.size());
    parallel_for(corpus_f.size(), [&](std::size_t i) {
        const SampledField& f = corpus_f[i];
        const SampledField& g = corpus_g[i];
        const SampledField fg = convolve(f, g);
        if (c.kind == CaseKind::young) {
            lhs[i] = lp_norm(fg, c.p);
            rhs[i] = lp_norm(f, c.p1) * lp_norm(g, c.p2);
            return;
        }
        lhs[i] = space_norm(fg, res, c.left()).value;
        const double nf = space_norm(f, res, c.right_f()).value;
        const double ng = c.kind == CaseKind::conv1 ? lp_norm(g, c.p2) : space_norm(g, res, c.right_g()).value;
        rhs[i] = nf * ng;
    });
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        if (rhs[i] < degenerate_rhs) {
            ++rep.skipped;
            continue;
        }
        rep.ratios.push_back(lhs[i] / rhs[i]);
    }
    for (double r : rep.ratios) rep.max_ratio = std::max(rep.max_ratio, r);
    rep.empirical_C = rep.max_ratio;
    detail::settle_verdict(rep);
    return rep;
}

/// Runs the case on corpora generated at N and at 2N (same seed, same L) and
/// records the change of the empirical constant.
inline VerificationReport check_inequality_refined(const InequalityCase& c, const CorpusSpec& corpus_f,
                                                   const CorpusSpec& corpus_g, const Grid& grid,
                                                   const TransitionProfile& profile = default_profile()) {
    auto run = [&](const Grid& g) {
        const auto res = build_resolution(g, profile);
        return check_inequality(c, generate_corpus(corpus_f, g), generate_corpus(corpus_g, g), res);
    };
    VerificationReport coarse = run(grid);
    const Grid fine(grid.dim(), 2 * grid.samples_per_axis(), grid.half_width());
    const VerificationReport refined = run(fine);
    coarse.refined_C = refined.empirical_C;
    if (coarse.empirical_C > 0.0)
        coarse.refinement_delta = std::abs(refined.empirical_C / coarse.empirical_C - 1.0);
    detail::settle_verdict(coarse);
    return coarse;
}

inline nlohmann::json to_json(const InequalityCase& c) {
    nlohmann::json j = {{"case", to_string(c.kind)},
                        {"A", to_string(c.scale)},
                        {"s", c.s},
                        {"u", c.u},
                        {"p", exponent_json(c.p)},
                        {"q", exponent_json(c.q)},
                        {"p1", exponent_json(c.p1)},
                        {"q1", exponent_json(c.q1)},
                        {"p2", exponent_json(c.p2)},
                        {"q2", exponent_json(c.q2)},
                        {"tolerance", c.tolerance}};
    j["constant_claim"] = c.constant_claim ? nlohmann::json(*c.constant_claim) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json to_json(const VerificationReport& r) {
    nlohmann::json j = {{"case", to_json(r.inequality)},
                        {"pairs_evaluated", r.ratios.size()},
                        {"pairs_skipped", r.skipped},
                        {"max_ratio", r.max_ratio},
                        {"empirical_C", r.empirical_C},
                        {"stability_tolerance", r.stability_tolerance},
                        {"verdict", to_string(r.verdict)},
                        {"notes", r.notes}};
    j["refined_C"] = r.refined_C ? nlohmann::json(*r.refined_C) : nlohmann::json(nullptr);
    j["refinement_delta"] = r.refinement_delta ? nlohmann::json(*r.refinement_delta) : nlohmann::json(nullptr);
    return j;
}

struct PowerLawFit {
    double exponent = 0.0;
    double intercept = 0.0;  // log of the prefactor
    double r_squared = 0.0;
    double t_min = 0.0, t_max = 0.0;
};

inline nlohmann::json to_json(const PowerLawFit& f) {
    return {{"exponent", f.exponent}, {"intercept", f.intercept}, {"r_squared", f.r_squared},
            {"t_range", {f.t_min, f.t_max}}};
}

/// Least squares for log value = intercept + exponent * log t.
inline PowerLawFit fit_power_law(std::span<const double> ts, std::span<const double> values) {
    if (ts.size() != values.size()) throw ValidationError("fit_power_law: length mismatch");
    if (ts.size() < 4) throw ValidationError("fit_power_law needs at least 4 points");
    const auto n = static_cast<double>(ts.size());
    double sx = 0, sy = 0;
    std::vector<double> x(ts.size()), y(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!(ts[i] > 0.0) || !(values[i] > 0.0)) throw ValidationError("fit_power_law needs positive data");
        x[i] = std::log(ts[i]);
        y[i] = std::log(values[i]);
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw ValidationError("fit_power_law needs distinct t values");
    PowerLawFit fit;
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
    fit.t_min = *std::min_element(ts.begin(), ts.end());
    fit.t_max = *std::max_element(ts.begin(), ts.end());
    return fit;
}

inline PowerLawFit fit_power_law(const std::vector<double>& ts, const std::vector<double>& values) {
    return fit_power_law(std::span<const double>(ts), std::span<const double>(values));
}

/// ||p_t | B^u_{1,inf}||: the kernel factor that carries the smoothing rate.
inline double kernel_smoothing_norm(const KernelFamily& fam, double t, double u, const DyadicResolution& res) {
    return besov_norm(*fam.kernel(t), res, besov(u, 1.0, inf)).value;
}

struct SmoothingSweep {
    std::vector<double> ts;
    std::vector<double> curve;         // ||P_t f | A^{s+u}_{p,q}||
    std::vector<double> kernel_curve;  // ||p_t | B^u_{1,inf}||
    std::vector<double> bound_curve;   // ||p_t | L_1|| ||f | A^s_{p,q}|| (the u = 0 bound)
    PowerLawFit fit;
    PowerLawFit kernel_fit;
    double base_norm = 0.0;            // ||f | A^s_{p,q}||
};

inline SmoothingSweep smoothing_sweep(const KernelFamily& fam, const SampledField& f, const SpaceParams& base,
                                      double u, std::span<const double> ts, const DyadicResolution& res) {
    if (!(u >= 0.0)) throw ValidationError("smoothing gain u must be >= 0");
    if (ts.size() < 4) throw ValidationError("smoothing sweep needs at least 4 times");
    SmoothingSweep out;
    out.ts.assign(ts.begin(), ts.end());
    out.curve.resize(ts.size());
    out.kernel_curve.resize(ts.size());
    out.bound_curve.resize(ts.size());
    out.base_norm = space_norm(f, res, base).value;
    SpaceParams gained = base;
    gained.s += u;
    for (double t : ts) fam.kernel(t);  // surface under-resolution before any work
    parallel_for(ts.size(), [&](std::size_t i) {
        out.curve[i] = space_norm(apply_semigroup(fam, ts[i], f), res, gained).value;
        out.kernel_curve[i] = kernel_smoothing_norm(fam, ts[i], u, res);
        out.bound_curve[i] = fam.kernel_l1(ts[i]) * out.base_norm;
    });
    out.fit = fit_power_law(out.ts, out.curve);
    out.kernel_fit = fit_power_law(out.ts, out.kernel_curve);
    return out;
}

struct Semi11Row {
    double t = 0.0;
    double lhs = 0.0;          // ||p_t | B^u_{1,inf}||
    double rhs = 0.0;          // max over the r-window of (||p_r||_1 + ||grad p_{r/2}||_1)^u
    double ratio = 0.0;
    bool window_monotone = true;
};

struct Semi11Report {
    double u = 0.0;
    std::vector<Semi11Row> rows;
    double empirical_C = 0.0;
    std::optional<double> refined_C;
    std::optional<double> refinement_delta;
    PowerLawFit lhs_fit, rhs_fit;
    Verdict verdict = Verdict::incomplete;
};

/// r-window [t / (floor(u) + 1), t / max(floor(u), 1)] sampled at its ends and midpoint.
inline std::array<double, 3> semi11_window(double t, double u) {
    const double fl = std::floor(u);
    const double lo = t / (fl + 1.0), hi = t / std::max(fl, 1.0);
    return {lo, 0.5 * (lo + hi), hi};
}

inline Semi11Report theorem_semi11_bound_check(const KernelFamily& fam, double u, std::span<const double> ts,
                                               const DyadicResolution& res) {
    if (!(u > 0.0)) throw ValidationError("kernel bound check needs u > 0");
    if (ts.empty()) throw ValidationError("kernel bound check needs times");
    Semi11Report rep;
    rep.u = u;
    rep.rows.resize(ts.size());
    parallel_for(ts.size(), [&](std::size_t i) {
        Semi11Row row;
        row.t = ts[i];
        row.lhs = kernel_smoothing_norm(fam, ts[i], u, res);
        std::array<double, 3> vals{};
        const auto window = semi11_window(ts[i], u);
        for (std::size_t j = 0; j < 3; ++j) {
            const double r = window[j];
            vals[j] = std::pow(fam.kernel_l1(r) + gradient_l1(*fam.kernel(0.5 * r)), u);
        }
        row.window_monotone = (vals[0] >= vals[1] && vals[1] >= vals[2]) || (vals[0] <= vals[1] && vals[1] <= vals[2]);
        row.rhs = *std::max_element(vals.begin(), vals.end());
        row.ratio = row.lhs / row.rhs;
        rep.rows[i] = row;
    });
    for (const auto& r : rep.rows) rep.empirical_C = std::max(rep.empirical_C, r.ratio);
    if (ts.size() >= 4) {
        std::vector<double> t(ts.begin(), ts.end()), l, r;
        for (const auto& row : rep.rows) {
            l.push_back(row.lhs);
            r.push_back(row.rhs);
        }
        rep.lhs_fit = fit_power_law(t, l);
        rep.rhs_fit = fit_power_law(t, r);
    }
    rep.verdict = std::isfinite(rep.empirical_C) ? Verdict::incomplete : Verdict::fail;
    return rep;
}

/// The same check on grid and on its N-doubled refinement; pass iff C_u is
/// finite and changes by at most stability_tolerance.
inline Semi11Report theorem_semi11_bound_check_refined(const SemigroupSpec& spec, const Grid& grid, double u,
                                                       std::span<const double> ts, double stability_tolerance = 0.05) {
    const KernelFamily coarse_fam(spec, grid);
    Semi11Report rep = theorem_semi11_bound_check(coarse_fam, u, ts, build_resolution(grid));
    const Grid fine(grid.dim(), 2 * grid.samples_per_axis(), grid.half_width());
    const KernelFamily fine_fam(spec, fine);
    const Semi11Report refined = theorem_semi11_bound_check(fine_fam, u, ts, build_resolution(fine));
    rep.refined_C = refined.empirical_C;
    rep.refinement_delta = std::abs(refined.empirical_C / rep.empirical_C - 1.0);
    rep.verdict = std::isfinite(rep.empirical_C) && *rep.refinement_delta <= stability_tolerance ? Verdict::pass
                                                                                                 : Verdict::fail;
    return rep;
}

/// max_k ||phi_k(D) delta | L_1||, the explicit constant in
/// ||f | B^0_{1,inf}|| <= C ||f | L_1||.
inline double resolution_l1_constant(const DyadicResolution& res) {
    double c = 0.0;
    for (int k = 0; k <= res.k_max(); ++k) c = std::max(c, l1_norm(block_kernel(res, k)));
    return c;
}

struct EquivalenceReport {
    std::vector<double> ratios;  // norm under res_a / norm under res_b
    double c = 1.0;              // max(max ratio, 1 / min ratio)
};

/// Besov norms of every corpus field under two resolutions.
inline EquivalenceReport norm_equivalence(const std::vector<SampledField>& corpus, const DyadicResolution& res_a,
                                          const DyadicResolution& res_b, const SpaceParams& sp) {
    require_same_grid(res_a.grid(), res_b.grid());
    EquivalenceReport rep;
    rep.ratios.resize(corpus.size());
    parallel_for(corpus.size(), [&](std::size_t i) {
        rep.ratios[i] = space_norm(corpus[i], res_a, sp).value / space_norm(corpus[i], res_b, sp).value;
    });
    for (double r : rep.ratios) rep.c = std::max({rep.c, r, 1.0 / r});
    return rep;
}

} // namespace lplab
