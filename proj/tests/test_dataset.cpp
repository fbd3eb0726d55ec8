#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "meshranger/dataset.hpp"

using namespace meshranger;

TEST(Dataset, ShapeAndLabels) {
    const auto set = synthesize_dataset(200, 1);
    EXPECT_EQ(set.features.rows(), 2200);
    EXPECT_EQ(set.features.cols(), 11);
    EXPECT_EQ(set.class_count(), 11u);
    for (std::size_t r = 0; r < set.size(); ++r) EXPECT_EQ(set.labels[r], r / 200);
    EXPECT_EQ(set.class_names[6], "cruise missile");
}

TEST(Dataset, NonnegativeFeaturesAndNaColumns) {
    const auto set = synthesize_dataset(300, 4);
    for (Eigen::Index r = 0; r < set.features.rows(); ++r)
        for (std::size_t f = 0; f < kFeatureCount; ++f)
            if (feature_nonnegative(f)) {
                EXPECT_GE(set.features(r, static_cast<Eigen::Index>(f)), 0.0);
            }
    // multi-rotor UAV has no wing or tail
    for (Eigen::Index r = 0; r < 300; ++r)
        for (Eigen::Index f = 3; f <= 6; ++f) EXPECT_EQ(set.features(r, f), 0.0);
    // angles may be negative
    EXPECT_LT(set.features.col(8).minCoeff(), 0.0);
}

TEST(Dataset, SameSeedSameBytes) {
    const auto a = synthesize_dataset(50, 7);
    const auto b = synthesize_dataset(50, 7);
    EXPECT_EQ(a.features, b.features);
    std::ostringstream sa, sb;
    write_training_csv(sa, a, {"seed=7"});
    write_training_csv(sb, b, {"seed=7"});
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_FALSE(a.features == synthesize_dataset(50, 8).features);
}

TEST(Dataset, ClassStreamsAreIndependentOfK) {
    // class c draws from its own sub-stream, so its first rows do not depend on other classes
    const auto small = synthesize_dataset(5, 3);
    const auto large = synthesize_dataset(9, 3);
    for (std::size_t c = 0; c < 11; ++c)
        EXPECT_EQ(small.features.row(static_cast<Eigen::Index>(c * 5)), large.features.row(static_cast<Eigen::Index>(c * 9)));
}

TEST(Dataset, CsvRoundTrip) {
    const auto set = synthesize_dataset(20, 11);
    std::stringstream ss;
    write_training_csv(ss, set, {"generator test", "k=20"});
    const auto back = read_training_csv(ss);
    EXPECT_EQ(back.features, set.features);
    EXPECT_EQ(back.labels, set.labels);
    EXPECT_EQ(back.class_names, set.class_names);
}

TEST(Dataset, CsvErrors) {
    std::istringstream missing("# only a comment\n");
    EXPECT_THROW(read_training_csv(missing), InvalidArgument);
    std::ostringstream header;
    for (auto n : kFeatureNames) header << n << ',';
    header << "label\n";
    std::istringstream bad_number(header.str() + "1,2,3,4,5,6,7,8,9,10,x,bird\n");
    EXPECT_THROW(read_training_csv(bad_number), InvalidArgument);
    std::istringstream bad_class(header.str() + "1,2,3,4,5,6,7,8,9,10,11,dragon\n");
    EXPECT_THROW(read_training_csv(bad_class), InvalidArgument);
    std::istringstream short_row(header.str() + "1,2,3\n");
    EXPECT_THROW(read_training_csv(short_row), InvalidArgument);
}

TEST(Dataset, RejectsZeroK) { EXPECT_THROW(synthesize_dataset(0, 1), InvalidArgument); }

// Oracle: resampling negatives is sampling from the normal truncated at 0,
// whose mean is mu + sigma phi(a) / (1 - Phi(a)) with a = -mu / sigma.
TEST(Dataset, TruncatedNormalMean) {
    const ClassSpec spec = class_catalog()[kCruiseMissile];
    const auto set = synthesize_dataset(std::span<const ClassSpec>(&spec, 1), 200000, 5);
    const double mu = 6.48, sigma = 2.6, a = -mu / sigma;
    const double phi = std::exp(-0.5 * a * a) / std::sqrt(2.0 * 3.14159265358979323846);
    const double tail = 0.5 * std::erfc(a / std::sqrt(2.0));
    const double expected = mu + sigma * phi / tail;
    EXPECT_NEAR(expected, 6.527, 5e-4);
    const double se = sigma / std::sqrt(200000.0);
    EXPECT_NEAR(set.features.col(0).mean(), expected, 4.0 * se);
}

TEST(Dataset, InterpolateIdentity) {
    Matrix m(3, 2);
    m << 1, 2, 3, 4, 5, 6;
    EXPECT_EQ(interpolate_eval(m, 3), m);
}

TEST(Dataset, InterpolateMidpoint) {
    Matrix m(2, 1);
    m << 0, 10;
    const auto out = interpolate_eval(m, 3);
    EXPECT_DOUBLE_EQ(out(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(out(1, 0), 5.0);
    EXPECT_DOUBLE_EQ(out(2, 0), 10.0);
}

TEST(Dataset, InterpolateSingleRowReplicates) {
    Matrix m(1, 3);
    m << 1, 2, 3;
    const auto out = interpolate_eval(m, 4);
    ASSERT_EQ(out.rows(), 4);
    for (Eigen::Index r = 0; r < 4; ++r) EXPECT_EQ(out.row(r), m.row(0));
}

TEST(Dataset, InterpolateRejectsEmpty) {
    EXPECT_THROW(interpolate_eval(Matrix(0, 11), 5), InvalidArgument);
    EXPECT_THROW(interpolate_eval(Matrix::Zero(2, 11), 0), InvalidArgument);
}

// Property: columns that are affine in the row index are reproduced exactly
// (up to rounding) at any output length.
TEST(Dataset, InterpolateAffineProperty) {
    Rng rng(12);
    for (int n = 0; n < 200; ++n) {
        const auto src = 2 + static_cast<Eigen::Index>(rng.below(20));
        const auto k = 2 + static_cast<std::size_t>(rng.below(300));
        const double a = rng.normal(0, 10), b = rng.normal(0, 10);
        Matrix m(src, 1);
        for (Eigen::Index r = 0; r < src; ++r) m(r, 0) = a + b * static_cast<double>(r);
        const auto out = interpolate_eval(m, k);
        for (std::size_t r = 0; r < k; ++r) {
            const double u = static_cast<double>(r) * static_cast<double>(src - 1) / static_cast<double>(k - 1);
            EXPECT_NEAR(out(static_cast<Eigen::Index>(r), 0), a + b * u, 1e-9 * (1.0 + std::abs(a) + std::abs(b) * src));
        }
        EXPECT_EQ(out(0, 0), m(0, 0));
        EXPECT_EQ(out(static_cast<Eigen::Index>(k - 1), 0), m(src - 1, 0));
    }
}
