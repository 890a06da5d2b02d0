#include <gtest/gtest.h>

#include <thread>

#include "test_support.hpp"

using namespace lplab;
using namespace lplab::testing;

TEST(Grid, SpacingAndNyquist) {
    const Grid g = make_grid(1, 256, 20.0);
    EXPECT_DOUBLE_EQ(g.spacing(), 0.15625);
    EXPECT_NEAR(g.nyquist(), 20.106192982974676, 1e-12);
    EXPECT_LT(g.max_frequency(), g.nyquist());
    const Grid g2 = make_grid(2, 64, 10.0);
    EXPECT_NEAR(g2.frequency_spacing(), pi / 10.0, 1e-15);
    EXPECT_EQ(g2.size(), 64u * 64u);
}

TEST(Grid, RejectsInvalidShapes) {
    EXPECT_THROW(make_grid(1, 100, 10.0), ValidationError);
    EXPECT_THROW(make_grid(1, 32, 10.0), ValidationError);
    EXPECT_THROW(make_grid(0, 64, 10.0), ValidationError);
    EXPECT_THROW(make_grid(4, 64, 10.0), ValidationError);
    EXPECT_THROW(make_grid(1, 64, 0.0), ValidationError);
    EXPECT_THROW(make_grid(1, 64, -1.0), ValidationError);
}

TEST(Grid, StorageIndexRoundTrip) {
    const Grid g = make_grid(2, 64, 5.0);
    for (std::size_t j = 0; j < 64; ++j) EXPECT_EQ(g.storage_index(g.frequency_index(j)), j);
    for (std::size_t flat = 0; flat < g.size(); flat += 37) EXPECT_EQ(g.ravel(g.unravel(flat)), flat);
}

TEST(Sample, GaussianDensityHasUnitMass) {
    const Grid g = make_grid(1, 1024, 20.0);
    const auto f = sample(g, [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi); });
    EXPECT_NEAR(integrate(f), 1.0, 1e-12);
}

TEST(Sample, ZeroAndCompactSupport) {
    const Grid g = make_grid(1, 512, 10.0);
    const auto z = sample(g, [](double) { return 0.0; });
    EXPECT_EQ(z.max_abs(), 0.0);
    const auto bump = sample(g, [](double x) { return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; });
    for (std::size_t j = 0; j < g.samples_per_axis(); ++j) {
        if (std::abs(g.coordinate(j)) >= 1.0) {
            EXPECT_EQ(bump[j], cplx(0.0));
        }
    }
}

TEST(Sample, NonFiniteValueNamesLatticePoint) {
    const Grid g = make_grid(1, 64, 4.0);
    try {
        sample(g, [](double x) { return 1.0 / x; });
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("(0)"), std::string::npos) << e.what();
    }
}

TEST(Transform, GaussianIsSelfDual) {
    const Grid g = make_grid(1, 1024, 20.0);
    const auto f = sample(g, [](double x) { return std::exp(-0.5 * x * x); });
    const auto spec = forward_transform(f);
    const auto expected = sample_spectrum(g, [](std::span<const double> xi) { return std::exp(-0.5 * xi[0] * xi[0]); });
    EXPECT_LT(sup_diff(spec, expected), 1e-10);
}

TEST(Transform, DiscreteDeltaHasFlatSpectrum) {
    const Grid g = make_grid(1, 256, 8.0);
    std::vector<cplx> v(g.size());
    v[g.samples_per_axis() / 2] = 1.0 / g.spacing();  // x = 0
    const auto spec = forward_transform(SampledField(g, v, Domain::space));
    for (std::size_t i = 0; i < spec.size(); ++i) EXPECT_NEAR(std::abs(spec[i] - 1.0 / std::sqrt(2.0 * pi)), 0.0, 1e-10);
}

TEST(Transform, TwoDimensionalGaussian) {
    const Grid g = make_grid(2, 128, 12.0);
    const auto f = sample(g, [](std::span<const double> x) { return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])); });
    const auto expected = sample_spectrum(
        g, [](std::span<const double> xi) { return std::exp(-0.5 * (xi[0] * xi[0] + xi[1] * xi[1])); });
    EXPECT_LT(sup_diff(forward_transform(f), expected), 1e-10);
}

TEST(TransformProperty, RoundTripIsIdentity) {
    for (int dim : {1, 2, 3}) {
        const Grid g = make_grid(dim, dim == 3 ? 64 : 256, 10.0);
        for_each_trial(5, 11 + dim, [&](auto& rng, std::size_t) {
            const auto f = random_band_limited(g, rng, 0.6 * g.nyquist());
            EXPECT_LT(sup_diff(inverse_transform(forward_transform(f)), f), 1e-12 * std::max(1.0, f.max_abs()));
        });
    }
}

TEST(TransformProperty, Plancherel) {
    for (int dim : {1, 2}) {
        const Grid g = make_grid(dim, 128, 7.0);
        for_each_trial(10, 23 + dim, [&](auto& rng, std::size_t) {
            const auto f = random_band_limited(g, rng, draw(rng, 1.0, g.nyquist()));
            std::vector<double> sq(f.size());
            for (std::size_t i = 0; i < f.size(); ++i) sq[i] = std::norm(f[i]);
            const double space_l2 = std::sqrt(g.cell_volume() * pairwise_sum(sq));
            EXPECT_NEAR(spectral_l2_norm(forward_transform(f)), space_l2, 1e-12 * space_l2);
        });
    }
}

TEST(TransformProperty, RealFieldsHaveHermitianSpectra) {
    const Grid g = make_grid(2, 64, 6.0);
    for_each_trial(10, 31, [&](auto& rng, std::size_t) {
        const auto f = random_gaussian(g, rng);
        const auto spec = forward_transform(f);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto idx = g.unravel(i);
            std::array<std::size_t, 3> mirror{};
            bool edge = false;
            for (int d = 0; d < 2; ++d) {
                const long m = g.frequency_index(idx[static_cast<std::size_t>(d)]);
                if (m == -32) edge = true;
                mirror[static_cast<std::size_t>(d)] = g.storage_index(-m);
            }
            if (edge) continue;
            worst = std::max(worst, std::abs(spec[i] - std::conj(spec[g.ravel(mirror)])));
        }
        EXPECT_LT(worst, 1e-12 * std::max(1.0, spec.max_abs()));
    });
}

TEST(TransformProperty, QuadratureIsExactOnLatticeExponentials) {
    const Grid g = make_grid(1, 256, 9.0);
    for_each_trial(20, 41, [&](auto& rng, std::size_t) {
        const long m = static_cast<long>(draw(rng, -127.0, 127.0));
        const double xi = pi * static_cast<double>(m) / g.half_width();
        const auto f = sample(g, [&](double x) { return std::cos(xi * x); });
        const double expected = m == 0 ? 2.0 * g.half_width() : 0.0;
        EXPECT_NEAR(integrate(f), expected, 1e-10);
    });
}

TEST(Integrate, CauchyDensityMatchesTruncatedMass) {
    // Exact integral of the Cauchy density over [-200, 200) is (2/pi) arctan(200).
    const Grid g = make_grid(1, 32768, 200.0);
    const auto f = sample(g, [](double x) { return 1.0 / (pi * (1.0 + x * x)); });
    EXPECT_NEAR(integrate(f), 2.0 / pi * std::atan(200.0), 1e-6);
}

TEST(Integrate, ImaginaryResidualIsRejected) {
    const Grid g = make_grid(1, 64, 4.0);
    const auto f = sample(g, [](double x) { return cplx(std::exp(-x * x), 1.0); });
    EXPECT_THROW(integrate(f), NumericalError);
}

TEST(Convolve, GaussiansAddVariances) {
    const Grid g = make_grid(1, 2048, 30.0);
    auto normal = [](double var) {
        return [var](double x) { return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * pi * var); };
    };
    const auto f = sample(g, normal(1.0));
    EXPECT_LT(sup_diff(convolve(f, f), sample(g, normal(2.0))), 1e-10);
}

TEST(Convolve, DeltaIsIdentity) {
    const Grid g = make_grid(1, 256, 8.0);
    std::vector<cplx> v(g.size());
    v[g.samples_per_axis() / 2] = 1.0 / g.spacing();
    const SampledField delta(g, v, Domain::space);
    std::mt19937_64 rng(5);
    const auto f = random_band_limited(g, rng, 10.0);
    EXPECT_LT(sup_diff(convolve(f, delta), f), 1e-12 * f.max_abs());
}

TEST(ConvolveProperty, CommutesAndSatisfiesYoungL1) {
    const Grid g = make_grid(1, 512, 15.0);
    for_each_trial(50, 53, [&](auto& rng, std::size_t) {
        const auto f = random_gaussian(g, rng);
        const auto h = random_gaussian(g, rng);
        const auto fh = convolve(f, h);
        EXPECT_LT(sup_diff(fh, convolve(h, f)), 1e-14 * std::max(1.0, fh.max_abs()));
        EXPECT_LE(l1_norm(fh), l1_norm(f) * l1_norm(h) * (1.0 + 1e-12));
    });
}

TEST(Derivative, MatchesClosedForm) {
    const Grid g = make_grid(1, 1024, 20.0);
    const auto f = sample(g, [](double x) { return std::exp(-0.5 * x * x); });
    const auto df = spectral_derivative(f, {1, 0, 0});
    const auto expected = sample(g, [](double x) { return -x * std::exp(-0.5 * x * x); });
    EXPECT_LT(sup_diff(df, expected), 1e-10);
    const auto d2 = spectral_derivative(f, {2, 0, 0});
    const auto e2 = sample(g, [](double x) { return (x * x - 1.0) * std::exp(-0.5 * x * x); });
    EXPECT_LT(sup_diff(d2, e2), 1e-10);
}

TEST(FieldArithmetic, MismatchedGridsAreRejected) {
    const auto a = SampledField::zeros(make_grid(1, 64, 4.0));
    const auto b = SampledField::zeros(make_grid(1, 128, 4.0));
    EXPECT_THROW(a + b, ValidationError);
    EXPECT_THROW(convolve(a, b), ValidationError);
}

TEST(Threads, FftPlanCacheIsSafeAcrossThreads) {
    const Grid g = make_grid(1, 4096, 40.0);
    const auto f = sample(g, [](double x) { return std::exp(-x * x); });
    const auto reference = forward_transform(f);
    std::vector<std::thread> pool;
    std::vector<double> diffs(8);
    for (std::size_t i = 0; i < diffs.size(); ++i)
        pool.emplace_back([&, i] { diffs[i] = sup_diff(forward_transform(f), reference); });
    for (auto& t : pool) t.join();
    for (double d : diffs) EXPECT_EQ(d, 0.0);
}

TEST(TailMass, CentredGaussianIsNegligible) {
    const Grid g = make_grid(1, 1024, 20.0);
    EXPECT_LT(tail_mass_fraction(sample(g, [](double x) { return std::exp(-x * x); })), 1e-12);
}
