#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "meshranger/feature_extraction.hpp"
#include "meshranger/random.hpp"

using namespace meshranger;

namespace {

MeshConfig unit_mesh() {
    MeshConfig c;
    c.rx_per_array = 9;
    c.arrays_per_position = 4;
    c.rx_spacing = 0.5;
    c.array_spacing = 2.0;
    c.steering_step = 25.0;
    return c;
}

std::vector<GridIndex> cruciform_cells() {
    std::vector<GridIndex> cells{{1, 4, 4}};
    for (int col = 2; col <= 6; ++col) cells.push_back({2, 4, col});
    for (int col = 3; col <= 5; ++col) cells.push_back({3, 4, col});
    return cells;
}

}  // namespace

TEST(FeatureExtraction, EmptyInputIsNotDetected) {
    const auto est = extract_shape(std::span<const GridIndex>{}, unit_mesh());
    EXPECT_FALSE(est.detected);
    EXPECT_EQ(est.per_mesh_counts, (std::vector<int>{0, 0, 0, 0}));
}

TEST(FeatureExtraction, CruciformPattern) {
    const auto c = unit_mesh();
    const auto cells = cruciform_cells();
    const auto est = extract_shape(cells, c);
    ASSERT_TRUE(est.detected);
    EXPECT_EQ(est.per_mesh_counts, (std::vector<int>{1, 5, 3, 0}));
    EXPECT_EQ(est.blocked_mesh_count, 3);
    EXPECT_DOUBLE_EQ(est.central.length, 2 * c.array_spacing);
    EXPECT_DOUBLE_EQ(est.central.width, c.pitch());
    EXPECT_DOUBLE_EQ(est.central.height, c.pitch());
    ASSERT_TRUE(est.wing);
    EXPECT_DOUBLE_EQ(est.wing->span, 5 * c.pitch());
    EXPECT_DOUBLE_EQ(est.wing->width, c.pitch());
    ASSERT_TRUE(est.tail);
    EXPECT_DOUBLE_EQ(est.tail->span, 3 * c.pitch());
    EXPECT_DOUBLE_EQ(est.tail->width, c.pitch());
}

TEST(FeatureExtraction, TailAheadOfWingWhenNoneBehind) {
    const auto c = unit_mesh();
    std::vector<GridIndex> cells;
    for (int j = 1; j <= 3; ++j) cells.push_back({j, 4, 4});
    for (int col = 3; col <= 5; ++col) cells.push_back({1, 4, col});
    for (int col = 1; col <= 7; ++col) cells.push_back({3, 4, col});
    const auto est = extract_shape(cells, c);
    ASSERT_TRUE(est.wing && est.tail);
    EXPECT_DOUBLE_EQ(est.wing->span, 7 * c.pitch());
    EXPECT_DOUBLE_EQ(est.tail->span, 3 * c.pitch());
}

TEST(FeatureExtraction, SinglePoint) {
    const auto c = unit_mesh();
    const std::vector<GridIndex> cells{{2, 3, 3}};
    const auto est = extract_shape(cells, c);
    EXPECT_DOUBLE_EQ(est.central.length, 0.0);
    EXPECT_DOUBLE_EQ(est.central.width, c.pitch());
    EXPECT_DOUBLE_EQ(est.central.height, c.pitch());
    EXPECT_FALSE(est.wing);
    EXPECT_FALSE(est.tail);
}

TEST(FeatureExtraction, TwoCellColumnAcrossFourMeshes) {
    const auto c = unit_mesh();
    std::vector<GridIndex> cells;
    for (int j = 1; j <= 4; ++j) {
        cells.push_back({j, 0, 0});
        cells.push_back({j, 1, 0});
    }
    const auto est = extract_shape(cells, c);
    EXPECT_DOUBLE_EQ(est.central.length, 3 * c.array_spacing);
    EXPECT_DOUBLE_EQ(est.central.height, 2 * c.pitch());
    EXPECT_DOUBLE_EQ(est.central.width, c.pitch());
    EXPECT_FALSE(est.wing);
}

TEST(FeatureExtraction, RejectsMeshOutOfRange) {
    const std::vector<GridIndex> cells{{5, 0, 0}};
    EXPECT_THROW(extract_shape(cells, unit_mesh()), InvalidArgument);
}

TEST(FeatureExtraction, DuplicatesIgnored) {
    auto cells = cruciform_cells();
    cells.push_back(cells.front());
    EXPECT_EQ(extract_shape(cells, unit_mesh()).blocked_total, 9u);
}

// Property: the estimate is independent of input order.
TEST(FeatureExtraction, PermutationInvarianceProperty) {
    const auto c = unit_mesh();
    Rng rng(8);
    for (int n = 0; n < 200; ++n) {
        std::vector<GridIndex> cells;
        const auto count = 1 + rng.below(30);
        for (std::uint64_t k = 0; k < count; ++k)
            cells.push_back({1 + static_cast<int>(rng.below(4)), static_cast<int>(rng.below(9)),
                             static_cast<int>(rng.below(9))});
        const auto a = extract_shape(cells, c);
        for (std::size_t k = cells.size(); k > 1; --k) std::swap(cells[k - 1], cells[rng.below(k)]);
        const auto b = extract_shape(cells, c);
        EXPECT_EQ(a.per_mesh_counts, b.per_mesh_counts);
        EXPECT_EQ(a.central.length, b.central.length);
        EXPECT_EQ(a.central.width, b.central.width);
        EXPECT_EQ(a.central.height, b.central.height);
        EXPECT_EQ(a.wing.has_value(), b.wing.has_value());
        EXPECT_EQ(a.tail.has_value(), b.tail.has_value());
        if (a.wing && b.wing) {
            EXPECT_EQ(a.wing->span, b.wing->span);
        }
        if (a.tail && b.tail) {
            EXPECT_EQ(a.tail->span, b.tail->span);
        }
    }
}

// Property: for a single box inside the grid, width and height come back
// within one pitch and the length within two mesh spacings (never above truth).
TEST(FeatureExtraction, BoxFidelityProperty) {
    MeshConfig c;
    c.rx_per_array = 15;
    c.arrays_per_position = 8;
    c.rx_spacing = 1.0;
    c.array_spacing = 1.0;
    c.steering_half_count = 0;
    const auto layout = build_mesh(c);
    Rng rng(21);
    for (int n = 0; n < 300; ++n) {
        TargetSpec spec;
        spec.central = {1.0 + 5.0 * rng.uniform(), 1.0 + 5.0 * rng.uniform(), 1.0 + 5.0 * rng.uniform()};
        const Vec3 center{-3.0 + 6.0 * rng.uniform(), 3.0 + 1.0 * rng.uniform(), 4.0 + 6.0 * rng.uniform()};
        const std::vector<TargetInstance> targets{make_target(spec, center, {}, c.pitch())};
        const auto truth = occlude(targets, layout, 0, 0.0);
        std::vector<GridIndex> cells;
        for (const auto& cell : truth.cells) cells.push_back(cell.index);
        const auto est = extract_shape(cells, c);
        ASSERT_TRUE(est.detected);
        EXPECT_LE(std::abs(est.central.width - spec.central.width), c.pitch());
        EXPECT_LE(std::abs(est.central.height - spec.central.height), c.pitch());
        EXPECT_LE(est.central.length, spec.central.length);
        EXPECT_GT(est.central.length, spec.central.length - 2.0 * c.array_spacing);
        EXPECT_FALSE(est.wing);
    }
}

TEST(FeatureExtraction, KinematicsSpeed) {
    const MeshConfig c;  // dP 25, dt_s 0.5
    const std::vector<TrackPoint> pts{{{0, 0, 100}, 0.0, 100}, {{0, 25, 100}, 0.5, 100}};
    const auto k = kinematics(pts, c);
    EXPECT_DOUBLE_EQ(*k.max_velocity, 50.0);
    EXPECT_DOUBLE_EQ(*k.pitch, 0.0);
    EXPECT_DOUBLE_EQ(*k.drift, 0.0);
}

TEST(FeatureExtraction, KinematicsClimbAndDrift) {
    const MeshConfig c;
    const std::vector<TrackPoint> climb{{{0, 0, 100}, 0.0, 100}, {{0, 25, 125}, 0.5, 125}};
    EXPECT_NEAR(*kinematics(climb, c).pitch, 45.0, 1e-12);
    const std::vector<TrackPoint> dive{{{0, 0, 100}, 0.0, 100}, {{-25, 25, 75}, 0.5, 75}};
    EXPECT_NEAR(*kinematics(dive, c).pitch, -45.0, 1e-12);
    EXPECT_NEAR(*kinematics(dive, c).drift, -45.0, 1e-12);
    // a skipped dwell doubles the along-track run
    const std::vector<TrackPoint> skip{{{0, 0, 100}, 0.0, 100}, {{0, 50, 150}, 1.0, 150}};
    EXPECT_NEAR(*kinematics(skip, c).pitch, 45.0, 1e-12);
}

TEST(FeatureExtraction, KinematicsAltitude) {
    const MeshConfig c;
    const std::vector<TrackPoint> pts{{{0, 0, 100}, 0.0, 101}, {{0, 25, 100}, 0.5, 105}, {{0, 50, 100}, 1.0, 103}};
    EXPECT_DOUBLE_EQ(kinematics(pts, c).max_altitude, 105.0);
}

TEST(FeatureExtraction, KinematicsSinglePoint) {
    const MeshConfig c;
    const std::vector<TrackPoint> pts{{{0, 0, 100}, 0.0, 102}};
    const auto k = kinematics(pts, c);
    EXPECT_FALSE(k.max_velocity);
    EXPECT_FALSE(k.pitch);
    EXPECT_FALSE(k.drift);
    EXPECT_DOUBLE_EQ(k.max_altitude, 102.0);
    EXPECT_THROW(kinematics(std::span<const TrackPoint>{}, c), InvalidArgument);
}

TEST(FeatureExtraction, KinematicsRejectsNonIncreasingTimes) {
    const MeshConfig c;
    const std::vector<TrackPoint> same{{{0, 0, 100}, 0.5, 100}, {{0, 25, 100}, 0.5, 100}};
    EXPECT_THROW(kinematics(same, c), InvalidArgument);
    const std::vector<TrackPoint> back{{{0, 0, 100}, 1.0, 100}, {{0, 25, 100}, 0.5, 100}};
    EXPECT_THROW(kinematics(back, c), InvalidArgument);
}

TEST(FeatureExtraction, FeatureVectorOrderAndZeros) {
    const auto c = unit_mesh();
    const std::vector<GridIndex> cells{{2, 3, 3}};
    const auto shape = extract_shape(cells, c);
    const std::vector<TrackPoint> pts{{{0, 0, 100}, 0.0, 102}};
    const auto f = to_feature_vector(shape, kinematics(pts, c));
    ASSERT_EQ(f.size(), kFeatureCount);
    EXPECT_DOUBLE_EQ(f[1], c.pitch());
    for (std::size_t k : {3u, 4u, 5u, 6u, 7u, 8u, 9u}) EXPECT_EQ(f[k], 0.0) << k;
    EXPECT_DOUBLE_EQ(f[10], 102.0);

    const auto full = to_feature_vector(extract_shape(cruciform_cells(), c),
                                        kinematics(std::vector<TrackPoint>{{{0, 0, 100}, 0.0, 100}, {{0, 25, 125}, 0.5, 125}}, c));
    EXPECT_DOUBLE_EQ(full[3], 5 * c.pitch());
    EXPECT_DOUBLE_EQ(full[5], 3 * c.pitch());
    EXPECT_NEAR(full[8], 45.0, 1e-12);
}
