#pragma once

// The eleven aerial-target classes, their shape categories and the per-class
// Gaussian feature statistics used to synthesise training data.
//
// Feature order (fixed everywhere in the library):
//   0 central length    1 central width    2 central height
//   3 wing span         4 wing width       5 tail span        6 tail width
//   7 max velocity      8 pitch angle      9 drift angle      10 max altitude
//
// Lengths are metres, velocity m/s, angles degrees, altitude metres. The
// source table lists altitude in km; values here are already converted.

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "core.hpp"

namespace meshranger {

inline constexpr std::size_t kFeatureCount = 11;
inline constexpr std::size_t kClassCount = 11;

using Features = std::array<double, kFeatureCount>;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "central_length", "central_width", "central_height", "wing_span",  "wing_width", "tail_span",
    "tail_width",     "max_velocity",  "pitch_angle",    "drift_angle", "max_altitude"};

/// Features that are physically nonnegative (everything except the two angles).
inline constexpr bool feature_nonnegative(std::size_t f) { return f != 8 && f != 9; }

struct FeatureStats {
    double mean;
    double stddev;
};

struct ClassSpec {
    std::string_view name;
    int category;
    std::array<std::optional<FeatureStats>, kFeatureCount> features;
};

namespace detail {
inline constexpr std::optional<FeatureStats> NA = std::nullopt;
inline constexpr std::optional<FeatureStats> G(double mu, double sigma) { return FeatureStats{mu, sigma}; }
inline constexpr std::optional<FeatureStats> Gkm(double mu, double sigma) {
    return FeatureStats{mu * 1000.0, sigma * 1000.0};
}
}  // namespace detail

// clang-format off
inline const std::array<ClassSpec, kClassCount>& class_catalog() {
    using detail::G; using detail::Gkm; using detail::NA;
    static const std::array<ClassSpec, kClassCount> table = {{
        {"multi-rotor UAV", 1,
         {G(1.94, 1.3), G(2.15, 1.6), G(0.6, 0.36), NA, NA, NA, NA,
          G(20.2, 8.5), G(10, 5), G(15, 10), Gkm(4.62, 2.21)}},
        {"helicopter", 2,
         {G(21.4, 16.2), G(21.4, 16.2), G(5.35, 2.26), G(21.35, 13.99), NA, G(3.1, 1.2), G(1, 0.7),
          G(65.9, 28.14), G(15, 25), G(10, 15), Gkm(4.7, 1.9)}},
        {"fixed-wing UAV", 3,
         {G(7.8, 6.15), G(0.73, 0.5), G(2.1, 1.89), G(20.7, 17.36), G(1.03, 0.62), G(6.56, 5.5), G(1.85, 1.6),
          G(76.8, 62.3), G(20, 30), G(15, 20), Gkm(11.5, 6.9)}},
        {"small fixed-wing plane", 3,
         {G(13.63, 9.3), G(2.17, 1.04), G(3.5, 1.28), G(15.2, 7.9), G(1.93, 0.94), G(4.7, 2.8), G(1.9, 2.2),
          G(154.5, 87), G(10, 20), G(8, 15), Gkm(9.95, 5.31)}},
        {"large fixed-wing plane", 3,
         {G(56.8, 14.6), G(4.4, 1.32), G(14.6, 5.9), G(59.4, 17.4), G(7.15, 2.36), G(22, 8), G(8.33, 5.5),
          G(266.5, 17.8), G(8, 15), G(7, 15), Gkm(14, 1.15)}},
        {"fighter jet", 3,
         {G(20.26, 6.2), G(3.36, 1.1), G(4.5, 1.5), G(12, 4.44), G(3.7, 1), G(4.6, 2.02), G(1.87, 0.9),
          G(636, 99.2), G(20, 45), G(15, 40), Gkm(17.2, 1.3)}},
        {"cruise missile", 3,
         {G(6.48, 2.6), G(0.7, 0.2), G(0.7, 0.2), G(2.5, 0.52), G(0.8, 0.4), G(0.9, 0.2), G(0.3, 0.15),
          G(800, 750), G(12, 30), G(8, 10), Gkm(20, 17.5)}},
        {"bird", 3,
         {G(0.69, 0.4), NA, NA, G(1.4, 0.7), G(0.8, 0.5), G(0.41, 0.2), G(0.18, 0.12),
          G(32.2, 29.5), G(10, 30), G(5, 15), Gkm(2.8, 2)}},
        {"ballistic missile", 4,
         {G(14.1, 11.1), G(1.54, 0.91), G(1.5, 0.91), NA, NA, NA, NA,
          G(3500, 3000), G(5, 30), G(5, 20), Gkm(721, 829)}},
        {"rocket or artillery shell", 4,
         {G(3.3, 2.5), G(0.33, 0.09), G(0.23, 0.21), NA, NA, NA, NA,
          G(937.5, 593), G(5, 15), G(5, 8), Gkm(13.2, 14.63)}},
        {"HGV", 4,
         {G(5.3, 4.5), G(0.75, 0.2), G(0.75, 0.2), NA, NA, NA, NA,
          G(4000, 2500), G(10, 60), G(8, 45), Gkm(23, 10.5)}},
    }};
    return table;
}

/// Reference query: a subsonic cruise missile with tight feature spreads.
inline const ClassSpec& given_target_spec() {
    using detail::G; using detail::Gkm;
    static const ClassSpec spec{"given target", 3,
        {G(5.65, 0.05), G(0.52, 0.03), G(0.52, 0.03), G(2.67, 0.04), G(0.75, 0.02), G(0.89, 0.035),
         G(0.27, 0.022), G(350.2, 7.5), G(12, 8), G(7, 5), Gkm(30, 25)}};
    return spec;
}
// clang-format on

inline Features mean_vector(const ClassSpec& spec) {
    Features f{};
    for (std::size_t k = 0; k < kFeatureCount; ++k) f[k] = spec.features[k] ? spec.features[k]->mean : 0.0;
    return f;
}

inline std::optional<std::size_t> class_index(std::string_view name) {
    const auto& table = class_catalog();
    for (std::size_t c = 0; c < table.size(); ++c)
        if (table[c].name == name) return c;
    return std::nullopt;
}

inline std::string_view class_name(std::size_t index) { return class_catalog().at(index).name; }

inline constexpr std::size_t kCruiseMissile = 6;
inline constexpr std::size_t kFixedWingUav = 2;
inline constexpr std::size_t kSmallFixedWing = 3;
inline constexpr std::size_t kFighterJet = 5;

/// Largest class-mean maximum velocity in the catalog (m/s).
inline double max_catalog_velocity() {
    double v = 0.0;
    for (const auto& c : class_catalog())
        if (c.features[7]) v = std::max(v, c.features[7]->mean);
    return v;
}

}  // namespace meshranger
