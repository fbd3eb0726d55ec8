#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace meshranger {

inline constexpr double kPi = 3.14159265358979323846;

/// Impedance of free space used throughout the link budget (ohms).
inline constexpr double kFreeSpaceImpedance = 376.73;

/// Thrown when a configuration or argument violates a documented invariant.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

inline void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) throw InvalidArgument(std::string(name) + " must be finite");
}

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double k) const { return {x * k, y * k, z * k}; }
    constexpr bool operator==(const Vec3&) const = default;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline double to_db(double ratio) {
    if (ratio <= 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(ratio);
}

inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

inline double deg(double rad) { return rad * 180.0 / kPi; }

/// 64-bit FNV-1a; used for config provenance hashes.
inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace meshranger
