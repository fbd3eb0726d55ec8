#pragma once

// Steered laser-mesh layout.
//
// Frame: each mesh is a vertical x-z plane of M x M beam intersections with
// pitch s = dx in both x and z. The L meshes of one steering position are
// stacked along y, dy apart, and the whole stack is translated along y by
// i * dP at steering position i in [-N, N]:
//
//   x = (col - (M - 1) / 2) * s
//   y = i * dP + (j - 1) * dy
//   z = z_min + row * s
//
// so x is the lateral axis and y is the steering (along-track) axis.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>
#include <string>
#include <vector>

#include "core.hpp"

namespace meshranger {

struct MeshConfig {
    double tx_height = 350.0;       ///< h, m
    int arrays_per_position = 3;    ///< L
    int rx_per_array = 21;          ///< M
    int steering_half_count = 3;    ///< N; 2N + 1 positions
    double rx_spacing = 1.0;        ///< dx, m (also the intersection pitch s)
    double array_spacing = 1.0;     ///< dy, m
    double steering_step = 25.0;    ///< dP, m
    double steering_hop_time = 0.5; ///< dt_s, s
    double dwell_time = 0.0;        ///< s
    double grid_base_altitude = 0.0;///< z_min, m

    double pitch() const { return rx_spacing; }
    int positions() const { return 2 * steering_half_count + 1; }
    /// Time between the starts of consecutive dwells.
    double hop_period() const { return steering_hop_time + dwell_time; }

    bool operator==(const MeshConfig&) const = default;
};

inline void validate(const MeshConfig& c) {
    require(c.arrays_per_position >= 1, "mesh.L must be >= 1");
    require(c.rx_per_array >= 2, "mesh.M must be >= 2");
    require(c.steering_half_count >= 0, "mesh.N must be >= 0");
    require(std::isfinite(c.tx_height) && c.tx_height > 0.0, "mesh.h must be > 0");
    require(std::isfinite(c.rx_spacing) && c.rx_spacing > 0.0, "mesh.dx must be > 0");
    require(std::isfinite(c.array_spacing) && c.array_spacing > 0.0, "mesh.dy must be > 0");
    require(std::isfinite(c.steering_step) && c.steering_step > 0.0, "mesh.dP must be > 0");
    require(std::isfinite(c.steering_hop_time) && c.steering_hop_time > 0.0, "mesh.dt_s must be > 0");
    require(std::isfinite(c.dwell_time) && c.dwell_time >= 0.0, "mesh.t_dwell must be >= 0");
    require(std::isfinite(c.grid_base_altitude), "mesh.z_min must be finite");
}

/// Grid address of one intersection.
struct GridIndex {
    int j = 1;    ///< mesh, 1..L
    int row = 0;  ///< z index, 0..M-1
    int col = 0;  ///< x index, 0..M-1

    auto operator<=>(const GridIndex&) const = default;
};

struct MeshPoint {
    int i;  ///< steering position, -N..N
    GridIndex index;
    Vec3 position;
};

inline Vec3 intersection_position(const MeshConfig& c, int i, const GridIndex& g) {
    const double s = c.pitch();
    return {(g.col - 0.5 * (c.rx_per_array - 1)) * s,
            i * c.steering_step + (g.j - 1) * c.array_spacing,
            c.grid_base_altitude + g.row * s};
}

/// All intersection coordinates, ordered by steering position, then mesh,
/// then row-major (row = z, col = x) within a mesh.
class MeshLayout {
public:
    explicit MeshLayout(const MeshConfig& config) : config_(config) {
        validate(config_);
        const auto cells = checked_mul(static_cast<std::size_t>(config_.rx_per_array),
                                       static_cast<std::size_t>(config_.rx_per_array));
        const std::size_t count = checked_mul(checked_mul(static_cast<std::size_t>(config_.positions()),
                                        static_cast<std::size_t>(config_.arrays_per_position)),
                            cells);
        check_planes_distinct();

        points_.reserve(count);
        const int n = config_.steering_half_count;
        for (int i = -n; i <= n; ++i)
            for (int j = 1; j <= config_.arrays_per_position; ++j)
                for (int row = 0; row < config_.rx_per_array; ++row)
                    for (int col = 0; col < config_.rx_per_array; ++col) {
                        const GridIndex g{j, row, col};
                        points_.push_back({i, g, intersection_position(config_, i, g)});
                    }
    }

    const MeshConfig& config() const { return config_; }
    const std::vector<MeshPoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }

    std::size_t cells_per_position() const {
        return static_cast<std::size_t>(config_.arrays_per_position) * config_.rx_per_array * config_.rx_per_array;
    }

    /// Offset of (j, row, col) inside one steering position's block.
    std::size_t local_offset(const GridIndex& g) const {
        const std::size_t m = config_.rx_per_array;
        return (static_cast<std::size_t>(g.j - 1) * m + g.row) * m + g.col;
    }

    std::size_t flat_index(int i, const GridIndex& g) const {
        return static_cast<std::size_t>(i + config_.steering_half_count) * cells_per_position() + local_offset(g);
    }

    const MeshPoint& at(int i, const GridIndex& g) const { return points_.at(flat_index(i, g)); }

    bool contains_position(int i) const {
        return i >= -config_.steering_half_count && i <= config_.steering_half_count;
    }

    /// Axis-aligned bounds of every intersection in the layout.
    std::pair<Vec3, Vec3> bounds() const {
        const auto& c = config_;
        const double half = 0.5 * (c.rx_per_array - 1) * c.pitch();
        const double ny = c.steering_half_count * c.steering_step;
        return {{-half, -ny, c.grid_base_altitude},
                {half, ny + (c.arrays_per_position - 1) * c.array_spacing,
                 c.grid_base_altitude + (c.rx_per_array - 1) * c.pitch()}};
    }

private:
    static std::size_t checked_mul(std::size_t a, std::size_t b) {
        if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a)
            throw InvalidArgument("mesh layout point count overflows");
        return a * b;
    }

    // Intersection coordinates stay unique only if no two (i, j) planes coincide.
    void check_planes_distinct() const {
        const int n = config_.steering_half_count;
        std::vector<double> planes;
        for (int i = -n; i <= n; ++i)
            for (int j = 1; j <= config_.arrays_per_position; ++j)
                planes.push_back(i * config_.steering_step + (j - 1) * config_.array_spacing);
        std::sort(planes.begin(), planes.end());
        const double tol = 1e-9 * std::max(1.0, config_.array_spacing);
        for (std::size_t k = 1; k < planes.size(); ++k)
            if (planes[k] - planes[k - 1] <= tol)
                throw InvalidArgument("mesh planes of different steering positions coincide (dP vs dy)");
    }

    MeshConfig config_;
    std::vector<MeshPoint> points_;
};

inline MeshLayout build_mesh(const MeshConfig& config) { return MeshLayout(config); }

/// d_{i,j} = sqrt(h^2 + ((j - L/2) dy + i dP)^2); j - L/2 in real arithmetic.
inline double slant_range(const MeshConfig& c, int i, int j) {
    require(i >= -c.steering_half_count && i <= c.steering_half_count, "steering index out of range");
    require(j >= 1 && j <= c.arrays_per_position, "mesh index out of range");
    const double offset = (j - 0.5 * c.arrays_per_position) * c.array_spacing + i * c.steering_step;
    return std::hypot(c.tx_height, offset);
}

struct Dwell {
    int i;
    double start_time;
};

struct SteeringSchedule {
    std::vector<Dwell> dwells;
    double steering_speed;  ///< v_s = dP / dt_s
    bool speed_ok;          ///< v_s >= 10 v_max
};

/// Minimum ratio v_s / v_max accepted as "steering much faster than the target".
inline constexpr double kSteeringSpeedMargin = 10.0;

inline SteeringSchedule steering_schedule(const MeshConfig& c, double target_vmax) {
    require(target_vmax >= 0.0, "target_vmax must be >= 0");
    SteeringSchedule s;
    s.steering_speed = c.steering_step / c.steering_hop_time;
    s.speed_ok = s.steering_speed >= kSteeringSpeedMargin * target_vmax;
    const int n = c.steering_half_count;
    for (int i = -n; i <= n; ++i) s.dwells.push_back({i, (i + n) * c.hop_period()});
    return s;
}

struct Coverage {
    double door_area;   ///< M dx h, m^2
    double total_span;  ///< 2N dP + L dy, m
};

inline Coverage coverage(const MeshConfig& c) {
    return {c.rx_per_array * c.rx_spacing * c.tx_height,
            2.0 * c.steering_half_count * c.steering_step + c.arrays_per_position * c.array_spacing};
}

}  // namespace meshranger
