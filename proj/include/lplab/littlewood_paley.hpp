#pragma once

// Dyadic resolutions of unity sampled on the frequency lattice.
//
// phi_0 equals 1 on B(0,1), vanishes outside B(0,3/2) and follows a smooth
// ramp in between; phi_k(xi) = phi_0(2^{-k} xi) - phi_0(2^{-(k-1)} xi).
// Blocks whose support would reach past the Nyquist frequency are dropped,
// so K_max = floor(log2(nyquist)) - 1 and sum_k phi_k = 1 on |xi| <= 2^{K_max}.

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "field_io.hpp"
#include "grid.hpp"

namespace lplab {

/// Smooth monotone ramp [0,1] -> [0,1] with flat ends.
struct TransitionProfile {
    std::string name;
    std::function<double(double)> ramp;
};

namespace detail {

// e^{-1/t^a} / (e^{-1/t^a} + e^{-1/(1-t)^a}), written to avoid overflow.
inline double exp_ramp(double t, double power) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = 1.0 / std::pow(t, power);
    const double b = 1.0 / std::pow(1.0 - t, power);
    return 1.0 / (1.0 + std::exp(a - b));
}

} // namespace detail

inline TransitionProfile default_profile() {
    return {"exp", [](double t) { return detail::exp_ramp(t, 1.0); }};
}

/// A second admissible profile with a different shape, used for norm-equivalence checks.
inline TransitionProfile steep_profile() {
    return {"exp2", [](double t) { return detail::exp_ramp(t, 2.0); }};
}

inline TransitionProfile profile_by_name(const std::string& name) {
    if (name == "exp") return default_profile();
    if (name == "exp2") return steep_profile();
    throw ValidationError("unknown transition profile '" + name + "'");
}

/// phi_0 as a function of |xi|.
inline double base_bump(const TransitionProfile& profile, double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 1.5) return 0.0;
    return 1.0 - profile.ramp((r - 1.0) / 0.5);
}

class DyadicResolution {
public:
    /// Wraps precomputed blocks. Used for derived families (squared blocks)
    /// and negative controls; build_resolution is the normal entry point.
    DyadicResolution(Grid grid, std::vector<std::vector<double>> blocks, TransitionProfile profile,
                     bool admissible_general)
        : grid_(std::move(grid)), blocks_(std::move(blocks)), profile_(std::move(profile)),
          admissible_general_(admissible_general), norms_(lattice_frequency_norms(grid_)) {
        if (blocks_.empty()) throw ValidationError("resolution needs at least one block");
        for (const auto& b : blocks_)
            if (b.size() != grid_.size()) throw ValidationError("block size does not match grid");
        const double limit = std::ldexp(1.0, k_max());
        partition_min_ = std::numeric_limits<double>::infinity();
        partition_max_ = -partition_min_;
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            if (norms_[i] > limit) continue;
            double s = 0.0;
            for (const auto& b : blocks_) s += b[i];
            partition_min_ = std::min(partition_min_, s);
            partition_max_ = std::max(partition_max_, s);
        }
    }

    const Grid& grid() const noexcept { return grid_; }
    int k_max() const noexcept { return static_cast<int>(blocks_.size()) - 1; }
    const std::vector<double>& block(int k) const { return blocks_.at(static_cast<std::size_t>(k)); }
    const TransitionProfile& profile() const noexcept { return profile_; }
    bool admissible_general() const noexcept { return admissible_general_; }
    /// min / max of sum_k phi_k over lattice points with |xi| <= 2^{K_max}.
    double partition_min() const noexcept { return partition_min_; }
    double partition_max() const noexcept { return partition_max_; }
    const std::vector<double>& frequency_norms() const noexcept { return norms_; }

private:
    Grid grid_;
    std::vector<std::vector<double>> blocks_;
    TransitionProfile profile_;
    bool admissible_general_;
    std::vector<double> norms_;
    double partition_min_ = 0.0;
    double partition_max_ = 0.0;
};

inline int resolution_k_max(const Grid& grid) {
    return static_cast<int>(std::floor(std::log2(grid.nyquist()))) - 1;
}

inline DyadicResolution build_resolution(const Grid& grid,
                                         const TransitionProfile& profile = default_profile()) {
    if (grid.nyquist() < 4.0)
        throw ValidationError("nyquist frequency " + std::to_string(grid.nyquist()) +
                              " is below 4; no dyadic blocks beyond k = 1 fit");
    const int kmax = resolution_k_max(grid);
    const auto norms = lattice_frequency_norms(grid);
    std::vector<std::vector<double>> blocks(static_cast<std::size_t>(kmax) + 1,
                                            std::vector<double>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double previous = base_bump(profile, norms[i]);
        blocks[0][i] = previous;
        for (int k = 1; k <= kmax; ++k) {
            const double current = base_bump(profile, std::ldexp(norms[i], -k));
            blocks[static_cast<std::size_t>(k)][i] = current - previous;
            previous = current;
        }
    }
    return DyadicResolution(grid, std::move(blocks), profile, false);
}

/// (phi_k^2): again an admissible (relaxed-class) dyadic resolution.
inline DyadicResolution squared_resolution(const DyadicResolution& res) {
    std::vector<std::vector<double>> blocks;
    for (int k = 0; k <= res.k_max(); ++k) {
        auto b = res.block(k);
        for (auto& v : b) v *= v;
        blocks.push_back(std::move(b));
    }
    TransitionProfile p = res.profile();
    p.name += "^2";
    return DyadicResolution(res.grid(), std::move(blocks), std::move(p), true);
}

struct ValidationReport {
    double partition_min = 0.0;
    double partition_max = 0.0;
    std::vector<std::size_t> support_violations;   // per block
    std::size_t total_support_violations = 0;
    double first_derivative_proxy = 0.0;            // max_k max_xi 2^k |D phi_k|
    double second_derivative_proxy = 0.0;           // max_k max_xi 4^k |D^2 phi_k|
};

/// Report-only admissibility audit: partition sum range, annulus supports and
/// scaled finite-difference derivatives along each lattice axis.
inline ValidationReport validate_resolution(const DyadicResolution& res) {
    const Grid& g = res.grid();
    const auto& norms = res.frequency_norms();
    const double dxi = g.frequency_spacing();
    const long half = static_cast<long>(g.samples_per_axis() / 2);
    ValidationReport rep;
    rep.partition_min = res.partition_min();
    rep.partition_max = res.partition_max();
    rep.support_violations.assign(static_cast<std::size_t>(res.k_max()) + 1, 0);

    for (int k = 0; k <= res.k_max(); ++k) {
        const auto& b = res.block(k);
        const double lo = k == 0 ? 0.0 : std::ldexp(1.0, k - 1);
        const double hi = k == 0 ? 2.0 : std::ldexp(1.0, k + 1);
        const double scale = std::ldexp(1.0, k);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (b[i] != 0.0 && (norms[i] < lo || norms[i] >= hi))
                ++rep.support_violations[static_cast<std::size_t>(k)];
            const auto idx = g.unravel(i);
            for (int d = 0; d < g.dim(); ++d) {
                const long m = g.frequency_index(idx[static_cast<std::size_t>(d)]);
                if (m - 1 < -half || m + 1 >= half) continue;
                auto up = idx, down = idx;
                up[static_cast<std::size_t>(d)] = g.storage_index(m + 1);
                down[static_cast<std::size_t>(d)] = g.storage_index(m - 1);
                const double bu = b[g.ravel(up)], bd = b[g.ravel(down)];
                rep.first_derivative_proxy =
                    std::max(rep.first_derivative_proxy, scale * std::abs(bu - bd) / (2.0 * dxi));
                rep.second_derivative_proxy = std::max(
                    rep.second_derivative_proxy, scale * scale * std::abs(bu - 2.0 * b[i] + bd) / (dxi * dxi));
            }
        }
        rep.total_support_violations += rep.support_violations[static_cast<std::size_t>(k)];
    }
    return rep;
}

inline void require_block_index(const DyadicResolution& res, int k) {
    if (k < 0 || k > res.k_max())
        throw ValidationError("block index " + std::to_string(k) + " outside [0, " +
                              std::to_string(res.k_max()) + "]");
}

/// phi_k(D) f = F^{-1}(phi_k F f).
inline SampledField apply_block(const DyadicResolution& res, int k, const SampledField& f) {
    require_block_index(res, k);
    require_same_grid(res.grid(), f.grid());
    return apply_multiplier(forward_transform(f), res.block(k));
}

/// All blocks phi_0(D) f, ..., phi_{K_max}(D) f from one forward transform.
inline std::vector<SampledField> block_decomposition(const DyadicResolution& res, const SampledField& f) {
    require_same_grid(res.grid(), f.grid());
    const Spectrum spec = forward_transform(f);
    std::vector<SampledField> out;
    out.reserve(static_cast<std::size_t>(res.k_max()) + 1);
    for (int k = 0; k <= res.k_max(); ++k) out.push_back(apply_multiplier(spec, res.block(k)));
    return out;
}

/// phi_k(D) applied to the unit-mass lattice delta: the convolution kernel of
/// block k, (2 pi)^{-n/2} F^{-1} phi_k.
inline SampledField block_kernel(const DyadicResolution& res, int k) {
    require_block_index(res, k);
    const Grid& g = res.grid();
    std::vector<cplx> spec(g.size(), cplx(detail::unitary_factor(g.dim())));
    return apply_multiplier(SampledField(g, std::move(spec), Domain::frequency), res.block(k));
}

/// Writes <prefix>_block_<k>.csv (storage index, lattice index, value) per
/// block and <prefix>.json with {profile, K_max, c, C}.
inline void export_resolution(const DyadicResolution& res, const std::string& prefix) {
    const Grid& g = res.grid();
    for (int k = 0; k <= res.k_max(); ++k) {
        std::ostringstream os;
        os << "index";
        for (int d = 0; d < g.dim(); ++d) os << ",m" << d;
        os << ",value\n";
        const auto& b = res.block(k);
        for (std::size_t i = 0; i < g.size(); ++i) {
            os << i;
            const auto idx = g.unravel(i);
            for (int d = 0; d < g.dim(); ++d) os << ',' << g.frequency_index(idx[static_cast<std::size_t>(d)]);
            os << ',' << io::format_double(b[i]) << '\n';
        }
        io::write_text_atomically(prefix + "_block_" + std::to_string(k) + ".csv", os.str());
    }
    nlohmann::json meta = io::grid_json(g);
    meta["profile"] = res.profile().name;
    meta["K_max"] = res.k_max();
    meta["c"] = res.partition_min();
    meta["C"] = res.partition_max();
    meta["admissible_general"] = res.admissible_general();
    io::write_text_atomically(prefix + ".json", meta.dump(2) + "\n");
}

} // namespace lplab
