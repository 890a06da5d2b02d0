#pragma once

// Periodic-box discretization of R^n: the box [-L, L)^n sampled with N points
// per axis, the frequency lattice xi_j = pi j / L, and the unitary
// angular-frequency Fourier transform
//
//     F f(xi) = (2 pi)^{-n/2} h^n sum_x e^{-i x.xi} f(x).
//
// Everything here treats fields as 2L-periodic.

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "parallel.hpp"

namespace lplab {

using cplx = std::complex<double>;

class Grid {
public:
    Grid(int dim, std::size_t samples_per_axis, double half_width)
        : dim_(dim), n_(samples_per_axis), half_width_(half_width) {
        if (dim < 1 || dim > 3) throw ValidationError("grid dimension must be 1, 2 or 3");
        if (samples_per_axis < 64 || !std::has_single_bit(samples_per_axis))
            throw ValidationError("samples per axis must be a power of two >= 64, got " +
                                  std::to_string(samples_per_axis));
        if (!(half_width > 0.0) || !std::isfinite(half_width))
            throw ValidationError("half width must be positive and finite");
        size_ = 1;
        for (int d = 0; d < dim; ++d) size_ *= n_;
    }

    int dim() const noexcept { return dim_; }
    std::size_t samples_per_axis() const noexcept { return n_; }
    double half_width() const noexcept { return half_width_; }
    std::size_t size() const noexcept { return size_; }

    double spacing() const noexcept { return 2.0 * half_width_ / static_cast<double>(n_); }
    double cell_volume() const noexcept { return std::pow(spacing(), dim_); }
    double frequency_spacing() const noexcept { return std::numbers::pi / half_width_; }
    double nyquist() const noexcept {
        return std::numbers::pi * static_cast<double>(n_) / (2.0 * half_width_);
    }
    /// Largest positive lattice frequency, pi (N/2 - 1) / L.
    double max_frequency() const noexcept {
        return std::numbers::pi * (static_cast<double>(n_ / 2) - 1.0) / half_width_;
    }

    double coordinate(std::size_t j) const noexcept {
        return -half_width_ + static_cast<double>(j) * spacing();
    }
    /// Signed lattice index in [-N/2, N/2) for storage index j (FFT order).
    long frequency_index(std::size_t j) const noexcept {
        const auto jj = static_cast<long>(j);
        const auto n = static_cast<long>(n_);
        return jj < n / 2 ? jj : jj - n;
    }
    double frequency(std::size_t j) const noexcept {
        return frequency_spacing() * static_cast<double>(frequency_index(j));
    }
    /// Storage index of signed lattice index m.
    std::size_t storage_index(long m) const noexcept {
        const auto n = static_cast<long>(n_);
        return static_cast<std::size_t>(((m % n) + n) % n);
    }

    std::array<std::size_t, 3> unravel(std::size_t flat) const noexcept {
        std::array<std::size_t, 3> idx{0, 0, 0};
        for (int d = dim_ - 1; d >= 0; --d) {
            idx[static_cast<std::size_t>(d)] = flat % n_;
            flat /= n_;
        }
        return idx;
    }
    std::size_t ravel(const std::array<std::size_t, 3>& idx) const noexcept {
        std::size_t flat = 0;
        for (int d = 0; d < dim_; ++d) flat = flat * n_ + idx[static_cast<std::size_t>(d)];
        return flat;
    }

    friend bool operator==(const Grid& a, const Grid& b) noexcept {
        return a.dim_ == b.dim_ && a.n_ == b.n_ && a.half_width_ == b.half_width_;
    }

    std::string describe() const {
        std::ostringstream os;
        os << "Grid(dim=" << dim_ << ", N=" << n_ << ", L=" << half_width_ << ")";
        return os.str();
    }

private:
    int dim_;
    std::size_t n_;
    double half_width_;
    std::size_t size_ = 0;
};

inline Grid make_grid(int dim, std::size_t samples_per_axis, double half_width) {
    return Grid(dim, samples_per_axis, half_width);
}

inline void require_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b))
        throw ValidationError("grid mismatch: " + a.describe() + " vs " + b.describe());
}

enum class Domain { space, frequency };

inline const char* to_string(Domain d) { return d == Domain::space ? "space" : "frequency"; }

/// Values on the grid, either point samples (space) or lattice Fourier
/// coefficients in FFT storage order (frequency).
class SampledField {
public:
    SampledField(Grid grid, std::vector<cplx> values, Domain domain)
        : grid_(std::move(grid)), values_(std::move(values)), domain_(domain) {
        if (values_.size() != grid_.size())
            throw ValidationError("field size does not match grid");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i].real()) || !std::isfinite(values_[i].imag()))
                throw NumericalError("non-finite field value at flat index " + std::to_string(i));
        }
    }

    static SampledField zeros(const Grid& grid, Domain domain = Domain::space) {
        return SampledField(grid, std::vector<cplx>(grid.size()), domain);
    }

    const Grid& grid() const noexcept { return grid_; }
    Domain domain() const noexcept { return domain_; }
    std::span<const cplx> values() const noexcept { return values_; }
    const cplx& operator[](std::size_t i) const noexcept { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }

    double max_abs() const noexcept {
        double m = 0.0;
        for (const auto& v : values_) m = std::max(m, std::abs(v));
        return m;
    }
    double max_imag() const noexcept {
        double m = 0.0;
        for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
        return m;
    }
    /// Imaginary parts below rel_tol * max|values| count as negligible.
    bool is_real(double rel_tol = 1e-10) const noexcept {
        return max_imag() <= rel_tol * max_abs();
    }
    std::vector<double> real_part() const {
        std::vector<double> out(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i].real();
        return out;
    }

    /// Elementwise arithmetic for fields on the same grid and domain.
    SampledField operator+(const SampledField& o) const { return combine(o, 1.0); }
    SampledField operator-(const SampledField& o) const { return combine(o, -1.0); }
    SampledField scaled(cplx a) const {
        std::vector<cplx> v(values_);
        for (auto& x : v) x *= a;
        return SampledField(grid_, std::move(v), domain_);
    }

private:
    SampledField combine(const SampledField& o, double sign) const {
        require_same_grid(grid_, o.grid_);
        if (domain_ != o.domain_) throw ValidationError("domain mismatch in field arithmetic");
        std::vector<cplx> v(values_);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += sign * o.values_[i];
        return SampledField(grid_, std::move(v), domain_);
    }

    Grid grid_;
    std::vector<cplx> values_;
    Domain domain_;
};

using Spectrum = SampledField;

inline void require_domain(const SampledField& f, Domain d, const char* op) {
    if (f.domain() != d)
        throw ValidationError(std::string(op) + " expects a " + to_string(d) + "-domain field");
}

namespace detail {

inline double unitary_factor(int dim) { return std::pow(2.0 * std::numbers::pi, -0.5 * dim); }

// (-1)^{j_1 + ... + j_n}: the phase e^{i L xi} from the box offset x_0 = -L.
inline double lattice_sign(const Grid& g, std::size_t flat) {
    const auto idx = g.unravel(flat);
    std::size_t parity = 0;
    for (int d = 0; d < g.dim(); ++d) parity += idx[static_cast<std::size_t>(d)];
    return (parity & 1U) ? -1.0 : 1.0;
}

} // namespace detail

/// Samples expr at x_j = -L + j h. expr takes std::span<const double> (length
/// dim), or a plain double on 1-d grids, and returns a real or complex value.
template <typename Expr>
SampledField sample(const Grid& grid, Expr&& expr) {
    std::vector<cplx> values(grid.size());
    std::array<double, 3> x{};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto idx = grid.unravel(i);
        for (int d = 0; d < grid.dim(); ++d)
            x[static_cast<std::size_t>(d)] = grid.coordinate(idx[static_cast<std::size_t>(d)]);
        cplx v;
        if constexpr (std::is_invocable_v<Expr&, double>) {
            if (grid.dim() != 1) throw ValidationError("scalar expression needs a 1-d grid");
            v = cplx(expr(x[0]));
        } else {
            v = cplx(expr(std::span<const double>(x.data(), static_cast<std::size_t>(grid.dim()))));
        }
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            std::ostringstream os;
            os << "expression is non-finite at lattice point (";
            for (int d = 0; d < grid.dim(); ++d) os << (d ? ", " : "") << x[static_cast<std::size_t>(d)];
            os << ")";
            throw NumericalError(os.str());
        }
        values[i] = v;
    }
    return SampledField(grid, std::move(values), Domain::space);
}

/// Builds a spectrum from a function of the lattice frequency vector.
template <typename Expr>
Spectrum sample_spectrum(const Grid& grid, Expr&& expr) {
    std::vector<cplx> values(grid.size());
    std::array<double, 3> xi{};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto idx = grid.unravel(i);
        for (int d = 0; d < grid.dim(); ++d)
            xi[static_cast<std::size_t>(d)] = grid.frequency(idx[static_cast<std::size_t>(d)]);
        values[i] = cplx(expr(std::span<const double>(xi.data(), static_cast<std::size_t>(grid.dim()))));
    }
    return SampledField(grid, std::move(values), Domain::frequency);
}

/// |xi| at every lattice point, in storage order.
inline std::vector<double> lattice_frequency_norms(const Grid& grid) {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto idx = grid.unravel(i);
        double r2 = 0.0;
        for (int d = 0; d < grid.dim(); ++d) {
            const double xi = grid.frequency(idx[static_cast<std::size_t>(d)]);
            r2 += xi * xi;
        }
        out[i] = std::sqrt(r2);
    }
    return out;
}

inline Spectrum forward_transform(const SampledField& f) {
    require_domain(f, Domain::space, "forward_transform");
    const Grid& g = f.grid();
    std::vector<cplx> data(f.values().begin(), f.values().end());
    fft::transform(data, g.dim(), static_cast<int>(g.samples_per_axis()), fft::Direction::forward);
    const double scale = detail::unitary_factor(g.dim()) * g.cell_volume();
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= scale * detail::lattice_sign(g, i);
    return SampledField(g, std::move(data), Domain::frequency);
}

inline SampledField inverse_transform(const Spectrum& spec) {
    require_domain(spec, Domain::frequency, "inverse_transform");
    const Grid& g = spec.grid();
    std::vector<cplx> data(spec.values().begin(), spec.values().end());
    const double scale = 1.0 / (detail::unitary_factor(g.dim()) * g.cell_volume() *
                                static_cast<double>(g.size()));
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= scale * detail::lattice_sign(g, i);
    fft::transform(data, g.dim(), static_cast<int>(g.samples_per_axis()), fft::Direction::backward);
    return SampledField(g, std::move(data), Domain::space);
}

/// f -> F^{-1}(m . F f) for a real multiplier sampled on the lattice.
inline SampledField apply_multiplier(const Spectrum& spec, std::span<const double> multiplier) {
    require_domain(spec, Domain::frequency, "apply_multiplier");
    if (multiplier.size() != spec.size()) throw ValidationError("multiplier size mismatch");
    std::vector<cplx> data(spec.values().begin(), spec.values().end());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= multiplier[i];
    return inverse_transform(SampledField(spec.grid(), std::move(data), Domain::frequency));
}

/// Rectangle rule h^n sum f. Throws when the imaginary mass is not negligible.
inline double integrate(const SampledField& f) {
    require_domain(f, Domain::space, "integrate");
    std::vector<double> re(f.size()), im(f.size()), mag(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        re[i] = f[i].real();
        im[i] = f[i].imag();
        mag[i] = std::abs(f[i]);
    }
    const double h = f.grid().cell_volume();
    const double real_part = h * pairwise_sum(re);
    const double imag_part = h * pairwise_sum(im);
    const double scale = std::max(std::abs(real_part), h * pairwise_sum(mag));
    if (std::abs(imag_part) > 1e-8 * scale)
        throw NumericalError("integrate: imaginary residual " + std::to_string(imag_part) +
                             " is not negligible");
    return real_part;
}

/// Periodic convolution h^n sum_y f(x - y) g(y), computed as
/// F^{-1}((2 pi)^{n/2} F f . F g).
inline SampledField convolve(const SampledField& f, const SampledField& g) {
    require_same_grid(f.grid(), g.grid());
    require_domain(f, Domain::space, "convolve");
    require_domain(g, Domain::space, "convolve");
    const Spectrum ff = forward_transform(f);
    const Spectrum gg = forward_transform(g);
    const double factor = 1.0 / detail::unitary_factor(f.grid().dim());
    std::vector<cplx> prod(ff.size());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = factor * ff[i] * gg[i];
    return inverse_transform(SampledField(f.grid(), std::move(prod), Domain::frequency));
}

/// Spectral partial derivative d^alpha f via the (i xi)^alpha multiplier. For
/// odd orders the unpaired Nyquist mode is zeroed so real fields stay real.
inline SampledField spectral_derivative(const SampledField& f, const std::array<int, 3>& alpha) {
    require_domain(f, Domain::space, "spectral_derivative");
    const Grid& g = f.grid();
    Spectrum spec = forward_transform(f);
    std::vector<cplx> data(spec.values().begin(), spec.values().end());
    const long nyq_index = -static_cast<long>(g.samples_per_axis() / 2);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto idx = g.unravel(i);
        cplx m(1.0, 0.0);
        for (int d = 0; d < g.dim(); ++d) {
            const int order = alpha[static_cast<std::size_t>(d)];
            if (order == 0) continue;
            const std::size_t j = idx[static_cast<std::size_t>(d)];
            if ((order & 1) && g.frequency_index(j) == nyq_index) {
                m = 0.0;
                break;
            }
            m *= std::pow(cplx(0.0, g.frequency(j)), order);
        }
        data[i] *= m;
    }
    return inverse_transform(SampledField(g, std::move(data), Domain::frequency));
}

/// L2 norm of a spectrum, ((pi/L)^n sum |F|^2)^{1/2}.
inline double spectral_l2_norm(const Spectrum& spec) {
    require_domain(spec, Domain::frequency, "spectral_l2_norm");
    std::vector<double> sq(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) sq[i] = std::norm(spec[i]);
    return std::sqrt(std::pow(spec.grid().frequency_spacing(), spec.grid().dim()) * pairwise_sum(sq));
}

/// Mass of |f| outside the central box [-L/2, L/2)^n relative to the total;
/// the torus surrogate is trustworthy when this is tiny.
inline double tail_mass_fraction(const SampledField& f) {
    require_domain(f, Domain::space, "tail_mass_fraction");
    const Grid& g = f.grid();
    std::vector<double> all(f.size()), outer(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto idx = g.unravel(i);
        bool inside = true;
        for (int d = 0; d < g.dim(); ++d) {
            const double x = g.coordinate(idx[static_cast<std::size_t>(d)]);
            if (x < -0.5 * g.half_width() || x >= 0.5 * g.half_width()) inside = false;
        }
        all[i] = std::abs(f[i]);
        outer[i] = inside ? 0.0 : all[i];
    }
    const double total = pairwise_sum(all);
    return total > 0.0 ? pairwise_sum(outer) / total : 0.0;
}

} // namespace lplab
