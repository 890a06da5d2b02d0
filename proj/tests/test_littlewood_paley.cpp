#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "test_support.hpp"

using namespace lplab;
using namespace lplab::testing;

TEST(Resolution, KmaxFollowsNyquist) {
    const Grid g = make_grid(1, 4096, 40.0);
    // nyquist = pi * 4096 / 80 = 160.8..., floor(log2) = 7
    EXPECT_EQ(resolution_k_max(g), 6);
    const auto res = build_resolution(g);
    EXPECT_EQ(res.k_max(), 6);
}

TEST(Resolution, PartitionOfUnityBelowTopScale) {
    const auto res = build_resolution(make_grid(1, 4096, 40.0));
    EXPECT_NEAR(res.partition_min(), 1.0, 1e-14);
    EXPECT_NEAR(res.partition_max(), 1.0, 1e-14);
    const auto& norms = res.frequency_norms();
    for (std::size_t i = 0; i < norms.size(); ++i) {
        if (norms[i] > 64.0) continue;
        double s = 0.0;
        for (int k = 0; k <= res.k_max(); ++k) s += res.block(k)[i];
        ASSERT_NEAR(s, 1.0, 1e-14) << "|xi| = " << norms[i];
    }
}

TEST(Resolution, BaseBumpAndAnnulusSupports) {
    const auto res = build_resolution(make_grid(1, 4096, 40.0));
    const auto& norms = res.frequency_norms();
    for (std::size_t i = 0; i < norms.size(); ++i) {
        const double r = norms[i];
        const double b0 = res.block(0)[i];
        if (r <= 1.0) {
            EXPECT_EQ(b0, 1.0);
        }
        if (r >= 1.5) {
            EXPECT_EQ(b0, 0.0);
        }
        EXPECT_GE(b0, 0.0);
        EXPECT_LE(b0, 1.0);
        // phi_3 = phi_0(xi/8) - phi_0(xi/4) lives on 4 < |xi| < 12.
        const double b3 = res.block(3)[i];
        if (r <= 4.0 || r >= 12.0) {
            EXPECT_EQ(b3, 0.0) << "r = " << r;
        }
        EXPECT_GE(b3, 0.0);
    }
}

TEST(Resolution, LowNyquistIsRejected) {
    EXPECT_THROW(build_resolution(make_grid(1, 64, 30.0)), ValidationError);
}

TEST(Resolution, DefaultProfilesValidate) {
    for (const auto& profile : {default_profile(), steep_profile()}) {
        const auto res = build_resolution(make_grid(2, 128, 10.0), profile);
        const auto rep = validate_resolution(res);
        EXPECT_EQ(rep.total_support_violations, 0u) << profile.name;
        EXPECT_NEAR(rep.partition_min, 1.0, 1e-14);
        EXPECT_NEAR(rep.partition_max, 1.0, 1e-14);
        EXPECT_TRUE(std::isfinite(rep.first_derivative_proxy));
        EXPECT_TRUE(std::isfinite(rep.second_derivative_proxy));
    }
}

TEST(Resolution, CorruptedBlockIsReported) {
    const auto res = build_resolution(make_grid(1, 512, 20.0));
    std::vector<std::vector<double>> blocks;
    for (int k = 0; k <= res.k_max(); ++k) blocks.push_back(res.block(k));
    blocks[2][0] = 0.5;  // xi = 0 lies outside the k = 2 annulus
    const DyadicResolution bad(res.grid(), blocks, res.profile(), false);
    const auto rep = validate_resolution(bad);
    EXPECT_EQ(rep.support_violations[2], 1u);
    EXPECT_NEAR(rep.partition_max, 1.5, 1e-14);
}

TEST(Resolution, SquaredBlocksFormRelaxedFamily) {
    const auto res = build_resolution(make_grid(1, 1024, 20.0));
    const auto sq = squared_resolution(res);
    EXPECT_TRUE(sq.admissible_general());
    EXPECT_GT(sq.partition_min(), 0.0);
    EXPECT_LE(sq.partition_max(), 1.0 + 1e-14);
    // phi_k^2 summed never falls below 1/2 (two overlapping blocks a + b = 1).
    EXPECT_GE(sq.partition_min(), 0.5 - 1e-14);
}

TEST(Profile, RampIsMonotoneWithFlatEnds) {
    for (const auto& profile : {default_profile(), steep_profile()}) {
        EXPECT_EQ(profile.ramp(0.0), 0.0);
        EXPECT_EQ(profile.ramp(1.0), 1.0);
        double prev = 0.0;
        for (double t = 1e-3; t < 1.0; t += 1e-3) {
            const double v = profile.ramp(t);
            EXPECT_GE(v, prev);
            EXPECT_NEAR(v + profile.ramp(1.0 - t), 1.0, 1e-12);
            prev = v;
        }
    }
    EXPECT_EQ(profile_by_name("exp2").name, "exp2");
    EXPECT_THROW(profile_by_name("cosine"), ValidationError);
}

TEST(Blocks, LowFrequencyFieldLivesInBlockZero) {
    const Grid g = make_grid(1, 1024, 20.0);
    const auto res = build_resolution(g);
    std::mt19937_64 rng(1);
    const auto f = random_band_limited(g, rng, 0.95);
    EXPECT_LT(sup_diff(apply_block(res, 0, f), f), 1e-13 * f.max_abs());
    for (int k = 1; k <= res.k_max(); ++k) EXPECT_LT(apply_block(res, k, f).max_abs(), 1e-14 * f.max_abs());
}

TEST(Blocks, OutOfRangeIndexIsRejected) {
    const auto res = build_resolution(make_grid(1, 256, 10.0));
    const auto f = SampledField::zeros(res.grid());
    EXPECT_THROW(apply_block(res, -1, f), ValidationError);
    EXPECT_THROW(apply_block(res, res.k_max() + 1, f), ValidationError);
}

TEST(BlocksProperty, DecompositionReconstructsBandLimitedFields) {
    for (int dim : {1, 2}) {
        const Grid g = make_grid(dim, dim == 1 ? 2048 : 128, 16.0);
        const auto res = build_resolution(g);
        const double top = std::ldexp(1.0, res.k_max());
        for_each_trial(10, 100 + dim, [&](auto& rng, std::size_t) {
            const auto f = random_band_limited(g, rng, draw(rng, 1.0, top));
            auto sum = SampledField::zeros(g);
            for (const auto& b : block_decomposition(res, f)) sum = sum + b;
            EXPECT_LT(sup_diff(sum, f), 1e-12 * f.max_abs());
        });
    }
}

TEST(BlocksProperty, DistantBlocksAreOrthogonal) {
    const Grid g = make_grid(1, 2048, 20.0);
    const auto res = build_resolution(g);
    for_each_trial(10, 7, [&](auto& rng, std::size_t) {
        const auto f = random_band_limited(g, rng, 60.0);
        for (int j = 0; j <= res.k_max(); ++j)
            for (int k = 0; k <= res.k_max(); ++k) {
                if (std::abs(j - k) < 2) continue;
                EXPECT_LT(apply_block(res, j, apply_block(res, k, f)).max_abs(), 1e-15 * f.max_abs());
            }
    });
}

TEST(BlocksProperty, BlocksCommuteWithConvolution) {
    const Grid g = make_grid(1, 1024, 15.0);
    const auto res = build_resolution(g);
    for_each_trial(10, 13, [&](auto& rng, std::size_t) {
        const auto f = random_band_limited(g, rng, 40.0);
        const auto h = random_gaussian(g, rng);
        const auto fh = convolve(f, h);
        for (int k = 0; k <= res.k_max(); ++k) {
            const auto lhs = apply_block(res, k, fh);
            const auto rhs = convolve(apply_block(res, k, f), h);
            EXPECT_LT(sup_diff(lhs, rhs), 1e-12 * std::max(1.0, fh.max_abs()));
        }
    });
}

TEST(BlocksProperty, Linearity) {
    const Grid g = make_grid(1, 512, 10.0);
    const auto res = build_resolution(g);
    for_each_trial(10, 17, [&](auto& rng, std::size_t) {
        const auto f = random_band_limited(g, rng, 30.0);
        const auto h = random_band_limited(g, rng, 30.0);
        const double a = draw(rng, -3.0, 3.0);
        const int k = static_cast<int>(draw(rng, 0.0, res.k_max() + 0.999));
        const auto lhs = apply_block(res, k, f.scaled(a) + h);
        const auto rhs = apply_block(res, k, f).scaled(a) + apply_block(res, k, h);
        EXPECT_LT(sup_diff(lhs, rhs), 1e-12 * std::max(1.0, lhs.max_abs()));
    });
}

TEST(BlockKernel, ZeroBlockKernelHasUnitMass) {
    const auto res = build_resolution(make_grid(1, 4096, 40.0));
    // integral of (2 pi)^{-1/2} F^{-1} phi_0 equals phi_0(0) = 1.
    EXPECT_NEAR(integrate(block_kernel(res, 0)), 1.0, 1e-12);
    for (int k = 1; k <= res.k_max(); ++k) EXPECT_NEAR(integrate(block_kernel(res, k)), 0.0, 1e-12);
}

TEST(Export, WritesBlocksAndMetadata) {
    const auto res = build_resolution(make_grid(1, 256, 10.0));
    const auto dir = std::filesystem::temp_directory_path() / "lplab_export";
    std::filesystem::create_directories(dir);
    const auto prefix = (dir / "res").string();
    export_resolution(res, prefix);
    for (int k = 0; k <= res.k_max(); ++k)
        EXPECT_TRUE(std::filesystem::exists(prefix + "_block_" + std::to_string(k) + ".csv"));
    std::ifstream in(prefix + ".json");
    const auto meta = nlohmann::json::parse(in);
    EXPECT_EQ(meta["profile"], "exp");
    EXPECT_EQ(meta["K_max"], res.k_max());
    EXPECT_NEAR(meta["c"].get<double>(), 1.0, 1e-14);
    EXPECT_NEAR(meta["C"].get<double>(), 1.0, 1e-14);
}
