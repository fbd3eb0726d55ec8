#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "meshranger/beam_optics.hpp"
#include "meshranger/random.hpp"

using namespace meshranger;

namespace {
// Reference values computed independently (double precision, same constants).
constexpr double kXr = 125.66370614359172;
constexpr double kWidth350 = 0.003891124004247702;
constexpr double kPower350 = 0.00033356376116383963;
constexpr double kSnr350 = 5.231788621651583;

const GaussianBeam kBeam{100e-9, 2e-3, 200.0};

double simpson_power(const GaussianBeam& b, double x, int n = 4000) {
    const double R = 8.0 * b.width_at(x), h = R / n;
    double sum = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double r = k * h;
        sum += incident_intensity(b, r, x) * 2.0 * kPi * r * ((k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0));
    }
    return sum * h / 3.0;
}
}  // namespace

TEST(BeamOptics, RayleighRange) {
    EXPECT_NEAR(kBeam.rayleigh_range(), kXr, 1e-9);
    const GaussianBeam glass(100e-9, 2e-3, 200.0, 1.5);
    EXPECT_NEAR(glass.rayleigh_range(), 1.5 * kXr, 1e-9);
}

TEST(BeamOptics, WidthLaw) {
    EXPECT_DOUBLE_EQ(kBeam.width_at(0.0), 2e-3);
    EXPECT_NEAR(kBeam.width_at(350.0), kWidth350, 1e-15);
    EXPECT_NEAR(kBeam.width_at(kXr), 2e-3 * std::sqrt(2.0), 1e-15);
}

TEST(BeamOptics, GeometryAtWaist) {
    const auto g = beam_geometry(kBeam, 0.0);
    EXPECT_TRUE(std::isinf(g.curvature_radius));
    EXPECT_DOUBLE_EQ(g.divergence, kPi / 2.0);
    EXPECT_DOUBLE_EQ(g.apex_angle, kPi);
    EXPECT_DOUBLE_EQ(g.gouy_phase, 0.0);
    EXPECT_NEAR(g.solid_angle, kPi, 1e-12);
}

TEST(BeamOptics, GeometryAway) {
    const auto g = beam_geometry(kBeam, kXr);
    EXPECT_NEAR(g.curvature_radius, 2.0 * kXr, 1e-9);
    EXPECT_NEAR(g.gouy_phase, kPi / 4.0, 1e-12);
    EXPECT_NEAR(g.divergence, std::atan(g.width / kXr), 1e-15);
    EXPECT_DOUBLE_EQ(g.apex_angle, 2.0 * g.divergence);
}

TEST(BeamOptics, GeometryRejectsBadDistance) {
    EXPECT_THROW(beam_geometry(kBeam, -1.0), InvalidArgument);
    EXPECT_THROW(beam_geometry(kBeam, std::numeric_limits<double>::quiet_NaN()), InvalidArgument);
    EXPECT_THROW(beam_geometry(kBeam, std::numeric_limits<double>::infinity()), InvalidArgument);
}

TEST(BeamOptics, ConstructorValidation) {
    EXPECT_THROW(GaussianBeam(0.0, 2e-3, 1.0), InvalidArgument);
    EXPECT_THROW(GaussianBeam(1e-7, -1.0, 1.0), InvalidArgument);
    EXPECT_THROW(GaussianBeam(1e-7, 2e-3, -1.0), InvalidArgument);
    EXPECT_THROW(GaussianBeam(1e-7, 2e-3, 1.0, 0.5), InvalidArgument);
}

TEST(BeamOptics, IntensityProfile) {
    const double peak = 200.0 * 200.0 / (2.0 * kFreeSpaceImpedance);
    EXPECT_NEAR(incident_intensity(kBeam, 0.0, 0.0), peak, 1e-9);
    const double wb = kBeam.width_at(350.0);
    EXPECT_NEAR(incident_intensity(kBeam, wb, 350.0), peak * std::pow(2e-3 / wb, 2) * std::exp(-2.0), 1e-9);
    EXPECT_THROW(incident_intensity(kBeam, -1e-3, 0.0), InvalidArgument);
}

TEST(BeamOptics, ReceivedPowerAndSnr) {
    const auto lb = link_budget(kBeam, 1e-2, 350.0, 1e-4);
    EXPECT_NEAR(lb.received_power, kPower350, 1e-15);
    EXPECT_NEAR(lb.snr_db, kSnr350, 1e-9);
    EXPECT_GE(lb.snr_db, 5.0);
    EXPECT_LE(lb.snr_db, 5.3);
}

TEST(BeamOptics, ZeroApertureAndAmplitude) {
    EXPECT_EQ(received_power(kBeam, 0.0, 350.0), 0.0);
    const GaussianBeam dark(100e-9, 2e-3, 0.0);
    EXPECT_EQ(received_power(dark, 1e-2, 350.0), 0.0);
    EXPECT_TRUE(std::isinf(link_snr(0.0, 1e-4)));
    EXPECT_THROW(link_snr(1.0, 0.0), InvalidArgument);
}

TEST(BeamOptics, LargeApertureCollectsTotalPower) {
    EXPECT_NEAR(received_power(kBeam, 1.0, 350.0), kBeam.total_power(), 1e-18);
}

TEST(BeamOptics, SurfaceSplit) {
    const SurfaceCoefficients s(0.7, 0.2);
    const auto split = apply_surface(10.0, s);
    EXPECT_NEAR(split.reflected, 4.9, 1e-12);
    EXPECT_NEAR(split.transmitted, 0.4, 1e-12);
    EXPECT_LE(split.reflected + split.transmitted, 10.0);
    EXPECT_THROW(SurfaceCoefficients(0.9, 0.9), InvalidArgument);
    EXPECT_THROW(SurfaceCoefficients(-0.1, 0.2), InvalidArgument);
    EXPECT_THROW(apply_surface(-1.0, s), InvalidArgument);
}

TEST(BeamOptics, BlockedLinkSnr) {
    const SurfaceCoefficients s(0.7, 0.2);
    const double blocked = kSnr350 + to_db(s.power_transmittance());
    EXPECT_NEAR(blocked, -8.75, 0.05);
}

// Property: the transverse integral of I equals the closed-form total power
// at every axial distance.
TEST(BeamOptics, PowerConservationProperty) {
    Rng rng(5);
    for (int n = 0; n < 50; ++n) {
        const GaussianBeam b(1e-7 + 2e-6 * rng.uniform(), 1e-4 + 5e-3 * rng.uniform(), 1.0 + 500.0 * rng.uniform(),
                             1.0 + rng.uniform());
        const double x = 1e4 * rng.uniform();
        EXPECT_NEAR(simpson_power(b, x) / b.total_power(), 1.0, 1e-6);
    }
}

// Property: received power grows with the aperture and never exceeds the total.
TEST(BeamOptics, ReceivedPowerMonotoneProperty) {
    Rng rng(6);
    for (int n = 0; n < 200; ++n) {
        const double d = 1000.0 * rng.uniform();
        const double r1 = 1e-2 * rng.uniform(), r2 = r1 + 1e-2 * rng.uniform();
        const double p1 = received_power(kBeam, r1, d), p2 = received_power(kBeam, r2, d);
        EXPECT_LE(p1, p2);
        EXPECT_LE(p2, kBeam.total_power() * (1.0 + 1e-15));
    }
}
