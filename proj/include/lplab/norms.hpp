#pragma once

// (Quasi-)norms built from Littlewood-Paley blocks: L_p, Besov B^s_{p,q},
// Triebel-Lizorkin F^s_{p,q} (p < inf pointwise, p = inf via dyadic cubes),
// Bessel potential H^s_1, Sobolev W^m_1 and the local Hardy norm h_1.
// All block norms are norms of the band-limited projection kept by the
// resolution (frequencies up to 3 * 2^{K_max - 1}).

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "littlewood_paley.hpp"

namespace lplab {

inline constexpr double inf = std::numeric_limits<double>::infinity();

enum class Scale { B, F };

inline const char* to_string(Scale s) { return s == Scale::B ? "B" : "F"; }

struct SpaceParams {
    Scale scale = Scale::B;
    double s = 0.0;
    double p = 1.0;
    double q = 1.0;

    void validate() const {
        if (!(p >= 1.0)) throw ValidationError("integrability p must be >= 1");
        if (!(q > 0.0)) throw ValidationError("summability q must be > 0");
        if (!std::isfinite(s)) throw ValidationError("smoothness s must be finite");
    }
    /// Hypothesis of the convolution theorems: q >= 1 on the F-scale.
    bool theorem_eligible() const noexcept { return scale == Scale::B || q >= 1.0; }
};

inline SpaceParams besov(double s, double p, double q) { return {Scale::B, s, p, q}; }
inline SpaceParams triebel(double s, double p, double q) { return {Scale::F, s, p, q}; }

inline nlohmann::json exponent_json(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

inline nlohmann::json to_json(const SpaceParams& sp) {
    return {{"A", to_string(sp.scale)}, {"s", sp.s}, {"p", exponent_json(sp.p)}, {"q", exponent_json(sp.q)}};
}

enum class Reduction { lq_of_block_norms, pointwise, cube_average };

struct NormResult {
    double value = 0.0;
    std::vector<double> block_terms;  // 2^{ks} ||phi_k(D) f | L_p||
    int truncation_k = 0;
    double tail_ratio = 0.0;          // block_terms[K_max] / value
    SpaceParams space;
    Reduction reduction = Reduction::lq_of_block_norms;
};

inline nlohmann::json to_json(const NormResult& r) {
    return {{"value", r.value},
            {"block_terms", r.block_terms},
            {"truncation_k", r.truncation_k},
            {"tail_ratio", r.tail_ratio},
            {"space", to_json(r.space)}};
}

/// (sum |a_k|^q)^{1/q}, or max |a_k| for q = inf.
inline double lq_reduce(std::span<const double> terms, double q) {
    if (std::isinf(q)) {
        double m = 0.0;
        for (double t : terms) m = std::max(m, std::abs(t));
        return m;
    }
    std::vector<double> powed(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) powed[i] = std::pow(std::abs(terms[i]), q);
    return std::pow(pairwise_sum(powed), 1.0 / q);
}

inline double lp_norm(const SampledField& f, double p) {
    require_domain(f, Domain::space, "lp_norm");
    if (!(p >= 1.0)) throw ValidationError("lp_norm requires p >= 1");
    if (std::isinf(p)) return f.max_abs();
    std::vector<double> powed(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double a = std::abs(f[i]);
        powed[i] = p == 1.0 ? a : (p == 2.0 ? a * a : std::pow(a, p));
    }
    return std::pow(f.grid().cell_volume() * pairwise_sum(powed), 1.0 / p);
}

namespace detail {

inline NormResult finish(std::vector<double> terms, double value, SpaceParams sp, Reduction red) {
    NormResult r;
    r.truncation_k = static_cast<int>(terms.size()) - 1;
    r.tail_ratio = value > 0.0 ? terms.back() / value : 0.0;
    r.block_terms = std::move(terms);
    r.value = value;
    r.space = sp;
    r.reduction = red;
    return r;
}

inline std::vector<double> weighted_block_lp(const std::vector<SampledField>& blocks, double s, double p) {
    std::vector<double> terms(blocks.size());
    for (std::size_t k = 0; k < blocks.size(); ++k)
        terms[k] = std::pow(2.0, static_cast<double>(k) * s) * lp_norm(blocks[k], p);
    return terms;
}

} // namespace detail

/// Besov norm from a precomputed block decomposition.
inline NormResult besov_norm(const std::vector<SampledField>& blocks, const SpaceParams& sp) {
    sp.validate();
    auto terms = detail::weighted_block_lp(blocks, sp.s, sp.p);
    const double value = lq_reduce(terms, sp.q);
    return detail::finish(std::move(terms), value, sp, Reduction::lq_of_block_norms);
}

/// ||f | B^s_{p,q}|| = || 2^{ks} phi_k(D) f | L_p | l_q ||. Any q in (0, inf] is accepted.
inline NormResult besov_norm(const SampledField& f, const DyadicResolution& res, const SpaceParams& sp) {
    if (sp.scale != Scale::B) throw ValidationError("besov_norm expects scale B");
    return besov_norm(block_decomposition(res, f), sp);
}

inline NormResult triebel_norm(const std::vector<SampledField>& blocks, const SpaceParams& sp) {
    sp.validate();
    if (std::isinf(sp.p)) throw ValidationError("p = inf on the F-scale goes through triebel_infty_norm");
    const std::size_t npts = blocks.front().size();
    const Grid& g = blocks.front().grid();
    std::vector<double> weights(blocks.size());
    for (std::size_t k = 0; k < blocks.size(); ++k) weights[k] = std::pow(2.0, static_cast<double>(k) * sp.s);
    std::vector<double> pointwise(npts);
    std::vector<double> col(blocks.size());
    for (std::size_t i = 0; i < npts; ++i) {
        for (std::size_t k = 0; k < blocks.size(); ++k) col[k] = weights[k] * std::abs(blocks[k][i]);
        pointwise[i] = lq_reduce(col, sp.q);
    }
    std::vector<cplx> gvals(pointwise.begin(), pointwise.end());
    const double value = lp_norm(SampledField(g, std::move(gvals), Domain::space), sp.p);
    return detail::finish(detail::weighted_block_lp(blocks, sp.s, sp.p), value, sp, Reduction::pointwise);
}

/// ||f | F^s_{p,q}|| = || 2^{ks} phi_k(D) f | l_q | L_p ||, p < inf.
inline NormResult triebel_norm(const SampledField& f, const DyadicResolution& res, const SpaceParams& sp) {
    if (sp.scale != Scale::F) throw ValidationError("triebel_norm expects scale F");
    return triebel_norm(block_decomposition(res, f), sp);
}

/// Largest J with cube side 2^{-J} >= h.
inline int cube_level_max(const Grid& g) { return static_cast<int>(std::floor(std::log2(1.0 / g.spacing()))); }

namespace detail {

// Suffix sums T_J(x) = sum_{k >= J} (2^{ks} |phi_k(D) f(x)|)^q for J = 0..K_max+1.
inline std::vector<std::vector<double>> tail_sums(const std::vector<SampledField>& blocks, double s, double q) {
    const std::size_t npts = blocks.front().size();
    const std::size_t nk = blocks.size();
    std::vector<std::vector<double>> tails(nk + 1, std::vector<double>(npts, 0.0));
    for (std::size_t k = nk; k-- > 0;) {
        const double w = std::pow(2.0, static_cast<double>(k) * s);
        for (std::size_t i = 0; i < npts; ++i)
            tails[k][i] = tails[k + 1][i] + std::pow(w * std::abs(blocks[k][i]), q);
    }
    return tails;
}

} // namespace detail

/// F^s_{inf,q} through lattice-aligned dyadic cubes Q_{J,M} = 2^{-J} M + [0, 2^{-J})^n
/// lying fully inside the box, 0 <= J <= J_max. The finite cube family makes
/// this a lower bound for the whole-space supremum. q = inf is B^s_{inf,inf}.
inline NormResult triebel_infty_norm(const std::vector<SampledField>& blocks, double s, double q) {
    const SpaceParams sp{Scale::F, s, inf, q};
    sp.validate();
    if (std::isinf(q)) {
        NormResult r = besov_norm(blocks, besov(s, inf, inf));
        r.space = sp;
        return r;
    }
    const Grid& g = blocks.front().grid();
    const int jmax = cube_level_max(g);
    if (jmax < 0) throw ValidationError("grid spacing exceeds unit cube side; no dyadic cubes fit");
    const auto tails = detail::tail_sums(blocks, s, q);
    const double L = g.half_width();
    const std::size_t n = g.samples_per_axis();
    double best = 0.0;
    for (int J = 0; J <= jmax; ++J) {
        const std::size_t level = std::min<std::size_t>(static_cast<std::size_t>(J), blocks.size());
        const auto& tail = tails[level];
        const double side = std::ldexp(1.0, -J);
        const long mlo = static_cast<long>(std::ceil(-L / side));
        const long mhi = static_cast<long>(std::floor(L / side)) - 1;  // (M+1) side <= L
        if (mhi < mlo) continue;
        const auto per_axis = static_cast<std::size_t>(mhi - mlo + 1);
        std::size_t ncubes = 1;
        for (int d = 0; d < g.dim(); ++d) ncubes *= per_axis;
        std::vector<double> sums(ncubes, 0.0);
        std::vector<std::size_t> counts(ncubes, 0);
        std::vector<long> axis_bin(n);
        for (std::size_t j = 0; j < n; ++j) {
            const long m = static_cast<long>(std::floor(g.coordinate(j) / side));
            axis_bin[j] = (m < mlo || m > mhi) ? -1 : m - mlo;
        }
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto idx = g.unravel(i);
            std::size_t cube = 0;
            bool inside = true;
            for (int d = 0; d < g.dim(); ++d) {
                const long b = axis_bin[idx[static_cast<std::size_t>(d)]];
                if (b < 0) {
                    inside = false;
                    break;
                }
                cube = cube * per_axis + static_cast<std::size_t>(b);
            }
            if (!inside) continue;
            sums[cube] += tail[i];
            ++counts[cube];
        }
        for (std::size_t c = 0; c < ncubes; ++c)
            if (counts[c] > 0) best = std::max(best, sums[c] / static_cast<double>(counts[c]));
    }
    std::vector<double> terms(blocks.size());
    for (std::size_t k = 0; k < blocks.size(); ++k)
        terms[k] = std::pow(2.0, static_cast<double>(k) * s) * blocks[k].max_abs();
    return detail::finish(std::move(terms), std::pow(best, 1.0 / q), sp, Reduction::cube_average);
}

inline NormResult triebel_infty_norm(const SampledField& f, const DyadicResolution& res, double s, double q) {
    return triebel_infty_norm(block_decomposition(res, f), s, q);
}

/// Dispatches on scale and p.
inline NormResult space_norm(const std::vector<SampledField>& blocks, const SpaceParams& sp) {
    if (sp.scale == Scale::B) return besov_norm(blocks, sp);
    if (std::isinf(sp.p)) return triebel_infty_norm(blocks, sp.s, sp.q);
    return triebel_norm(blocks, sp);
}

inline NormResult space_norm(const SampledField& f, const DyadicResolution& res, const SpaceParams& sp) {
    return space_norm(block_decomposition(res, f), sp);
}

/// Mean over the lattice samples in the cube corner + [0, 2^{-J})^n of
/// sum_{k >= J} (2^{ks} |phi_k(D) f|)^q. Used to probe shifted cubes.
inline double cube_tail_average(const std::vector<SampledField>& blocks, double s, double q, int J,
                                std::span<const double> corner) {
    const Grid& g = blocks.front().grid();
    const auto tails = detail::tail_sums(blocks, s, q);
    const auto& tail = tails[std::min<std::size_t>(static_cast<std::size_t>(J), blocks.size())];
    const double side = std::ldexp(1.0, -J);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto idx = g.unravel(i);
        bool inside = true;
        for (int d = 0; d < g.dim(); ++d) {
            const double x = g.coordinate(idx[static_cast<std::size_t>(d)]);
            const double c = corner[static_cast<std::size_t>(d)];
            if (x < c || x >= c + side) inside = false;
        }
        if (!inside) continue;
        sum += tail[i];
        ++count;
    }
    if (count == 0) throw ValidationError("cube contains no lattice samples");
    return sum / static_cast<double>(count);
}

/// ||F^{-1}((1 + |xi|^2)^{s/2} F f) | L_1||.
inline double bessel_norm(const SampledField& f, double s) {
    if (!(s >= 0.0)) throw ValidationError("bessel_norm requires s >= 0");
    const auto norms = lattice_frequency_norms(f.grid());
    std::vector<double> m(norms.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::pow(1.0 + norms[i] * norms[i], 0.5 * s);
    return lp_norm(apply_multiplier(forward_transform(f), m), 1.0);
}

/// Multi-indices alpha in N^n with |alpha| <= m.
inline std::vector<std::array<int, 3>> multi_indices(int dim, int m) {
    std::vector<std::array<int, 3>> out;
    for (int a = 0; a <= m; ++a)
        for (int b = 0; b <= (dim > 1 ? m - a : 0); ++b)
            for (int c = 0; c <= (dim > 2 ? m - a - b : 0); ++c) out.push_back({a, b, c});
    return out;
}

/// ||sum_{|alpha| <= m} |d^alpha f| | L_1|| with spectral derivatives.
inline double sobolev_w1m_norm(const SampledField& f, int m) {
    if (m < 0) throw ValidationError("sobolev order must be >= 0");
    std::vector<double> acc(f.size(), 0.0);
    for (const auto& alpha : multi_indices(f.grid().dim(), m)) {
        const bool zero = alpha == std::array<int, 3>{0, 0, 0};
        const SampledField d = zero ? f : spectral_derivative(f, alpha);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += std::abs(d[i]);
    }
    return f.grid().cell_volume() * pairwise_sum(acc);
}

/// 32 log-spaced nodes in [1e-3, 0.99].
inline std::vector<double> default_hardy_nodes(std::size_t count = 32) {
    if (count < 2) return {0.5};
    std::vector<double> t(count);
    const double a = std::log(1e-3), b = std::log(0.99);
    for (std::size_t i = 0; i < count; ++i)
        t[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    return t;
}

/// || max_{t in nodes} |phi(tD) f| | L_1|| with phi(D) the e^{-|xi|^2} multiplier.
/// Discretizing the sup over t makes this a lower approximation of the h_1 norm.
inline double hardy_norm(const SampledField& f, std::span<const double> t_nodes) {
    if (t_nodes.empty()) throw ValidationError("hardy_norm needs at least one node");
    for (std::size_t i = 0; i < t_nodes.size(); ++i) {
        if (!(t_nodes[i] > 0.0 && t_nodes[i] < 1.0)) throw ValidationError("hardy nodes must lie in (0,1)");
        if (i > 0 && t_nodes[i] < t_nodes[i - 1]) throw ValidationError("hardy nodes must be sorted");
    }
    const Spectrum spec = forward_transform(f);
    const auto norms = lattice_frequency_norms(f.grid());
    std::vector<double> envelope(f.size(), 0.0);
    std::vector<double> m(norms.size());
    for (double t : t_nodes) {
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::exp(-t * t * norms[i] * norms[i]);
        const SampledField smoothed = apply_multiplier(spec, m);
        for (std::size_t i = 0; i < envelope.size(); ++i) envelope[i] = std::max(envelope[i], std::abs(smoothed[i]));
    }
    return f.grid().cell_volume() * pairwise_sum(envelope);
}

} // namespace lplab
