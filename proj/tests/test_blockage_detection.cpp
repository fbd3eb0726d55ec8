#include <gtest/gtest.h>

#include <cmath>

#include "meshranger/blockage_detection.hpp"

using namespace meshranger;

namespace {

MeshConfig small_mesh() {
    MeshConfig c;
    c.tx_height = 350.0;
    c.arrays_per_position = 1;
    c.rx_per_array = 3;
    c.steering_half_count = 0;
    c.array_spacing = 1e-3;
    return c;
}

BlockageTruth one_cell(SurfaceCoefficients surface) {
    BlockageTruth t;
    t.cells.push_back({{1, 1, 1}, surface, 0});
    return t;
}

DetectionConfig quiet() {
    DetectionConfig d;
    d.noise = false;
    return d;
}

}  // namespace

TEST(BlockageDetection, Thresholds) {
    EXPECT_NEAR(np_threshold(0.1), 3.622156886994632, 1e-12);
    EXPECT_NEAR(np_threshold(std::exp(-1.0)), 0.0, 1e-12);
    EXPECT_NEAR(np_threshold(0.01), 6.632, 5e-4);
    EXPECT_THROW(np_threshold(0.0), InvalidArgument);
    EXPECT_THROW(np_threshold(1.0), InvalidArgument);
    EXPECT_GT(np_threshold(0.001), np_threshold(0.01));
}

TEST(BlockageDetection, ConfigValidation) {
    DetectionConfig d;
    d.noise_variance = 0.0;
    EXPECT_THROW(validate(d), InvalidArgument);
    d = {};
    d.pfa = 1.5;
    EXPECT_THROW(validate(d), InvalidArgument);
}

TEST(BlockageDetection, ClearLinkNotBlockedWithoutNoise) {
    const auto mesh = small_mesh();
    const auto grid = detect_grid(BlockageTruth{}, mesh, LinkModel{}, quiet());
    EXPECT_FALSE(grid.any_blocked());
    EXPECT_NEAR(grid.at({1, 0, 0}).snr_db, 5.2318, 1e-3);
}

TEST(BlockageDetection, BlockedLinkWithoutNoise) {
    const auto mesh = small_mesh();
    const auto grid = detect_grid(one_cell({0.7, 0.2}), mesh, LinkModel{}, quiet());
    EXPECT_NEAR(grid.at({1, 1, 1}).snr_db, -8.75, 0.01);
    EXPECT_TRUE(grid.at({1, 1, 1}).blocked);
    ASSERT_EQ(grid.blocked_cells().size(), 1u);
    EXPECT_EQ(grid.blocked_cells()[0], (GridIndex{1, 1, 1}));
}

TEST(BlockageDetection, TransparentSurfaceNotBlocked) {
    const auto mesh = small_mesh();
    const auto grid = detect_grid(one_cell({0.0, 1.0}), mesh, LinkModel{}, quiet());
    EXPECT_FALSE(grid.any_blocked());
}

TEST(BlockageDetection, OpaqueSurfaceGivesZeroPower) {
    const auto mesh = small_mesh();
    const auto grid = detect_grid(one_cell({1.0, 0.0}), mesh, LinkModel{}, quiet());
    EXPECT_TRUE(std::isinf(grid.at({1, 1, 1}).snr_db));
    EXPECT_TRUE(grid.at({1, 1, 1}).blocked);
}

TEST(BlockageDetection, GridIndexChecked) {
    DetectionGrid g(0, 2, 3);
    EXPECT_THROW(g.at({3, 0, 0}), InvalidArgument);
    EXPECT_THROW(g.at({1, 3, 0}), InvalidArgument);
}

TEST(BlockageDetection, FalseRateMatchesModel) {
    const double snr = LinkModel{}.clear_power(small_mesh(), 0, 1) / 1e-4;
    DetectionConfig d;
    Rng rng(2024);
    const auto r = empirical_false_rate(d, snr, 100000, rng);
    const double expected = model_false_rate(snr, d.threshold_linear());
    EXPECT_NEAR(expected, 0.152, 0.002);
    EXPECT_LE(std::abs(r.rate - expected), 3.0 * r.standard_error) << r.rate << " vs " << expected;
}

TEST(BlockageDetection, FalseRateLimits) {
    Rng rng(5);
    DetectionConfig d;
    EXPECT_EQ(empirical_false_rate(d, 1e6, 10000, rng).rate, 0.0);
    EXPECT_EQ(model_false_rate(1e6, d.threshold_linear()), 0.0);
    EXPECT_EQ(detail::flagged_fraction(3.0, 0.0, 10000, rng).rate, 0.0);
    EXPECT_EQ(model_false_rate(3.0, 0.0), 0.0);
}

TEST(BlockageDetection, MissRateOfBlockedLink) {
    const double snr = LinkModel{}.clear_power(small_mesh(), 0, 1) / 1e-4;
    DetectionConfig d;
    Rng rng(9);
    const auto r = empirical_miss_rate(d, snr, 0.04, 100000, rng);
    const double expected = 1.0 - model_false_rate(0.04 * snr, d.threshold_linear());
    EXPECT_LE(std::abs(r.rate - expected), 3.0 * r.standard_error + 1e-12);
}

TEST(BlockageDetection, SameSeedSameGrid) {
    MeshConfig mesh = small_mesh();
    mesh.rx_per_array = 11;
    mesh.arrays_per_position = 3;
    mesh.array_spacing = 1.0;
    mesh.steering_half_count = 2;
    DetectionConfig d;
    d.seed = 42;
    BlockageTruth truth;
    truth.i = -1;
    truth.cells.push_back({{2, 3, 4}, {}, 0});
    const auto a = detect_grid(truth, mesh, LinkModel{}, d);
    const auto b = detect_grid(truth, mesh, LinkModel{}, d);
    EXPECT_EQ(a, b);
    d.seed = 43;
    EXPECT_FALSE(a == detect_grid(truth, mesh, LinkModel{}, d));
}

// Property: with noise off, a cell is flagged exactly when b * SNR_clear < gamma_lin.
TEST(BlockageDetection, NoiselessDecisionProperty) {
    const auto mesh = small_mesh();
    const double snr = LinkModel{}.clear_power(mesh, 0, 1) / 1e-4;
    Rng rng(3);
    for (int n = 0; n < 500; ++n) {
        const double t2 = rng.uniform();
        const double r1 = std::sqrt(1.0 - t2 * t2) * rng.uniform();
        DetectionConfig d = quiet();
        d.pfa = 0.01 + 0.9 * rng.uniform();
        const auto grid = detect_grid(one_cell({r1, t2}), mesh, LinkModel{}, d);
        EXPECT_EQ(grid.at({1, 1, 1}).blocked, t2 * t2 * snr < d.threshold_linear()) << t2 << " " << d.pfa;
    }
}
