#pragma once

// Shape reconstruction from blocked intersections, plus track kinematics.
//
// Shape rules (one steering dwell, meshes identified by j):
//  * central set: the (row, col) cells whose blocked run across consecutive
//    meshes is longest. Central width/height count distinct cols/rows in it;
//    central length is (N_B - 1) * dy with N_B the number of meshes that have
//    any blocked intersection.
//  * lateral mesh: a mesh with blocked cols outside the central cols. Its
//    extent is the number of distinct blocked cols on that mesh.
//  * wing: lateral meshes of maximal extent E. span = E s,
//    width = (number of wing meshes) s.
//  * tail: lateral meshes with extent < E after the last wing mesh; when
//    there are none, those before the first wing mesh. span = (largest tail
//    extent) s, width = (number of tail meshes) s.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "blockage_detection.hpp"
#include "core.hpp"
#include "mesh_geometry.hpp"
#include "target_catalog.hpp"
#include "target_scene.hpp"

namespace meshranger {

struct ShapeEstimate {
    bool detected = false;
    CentralSection central{0.0, 0.0, 0.0};
    std::optional<LateralSection> wing;
    std::optional<LateralSection> tail;
    int blocked_mesh_count = 0;                 ///< N_B
    std::vector<int> per_mesh_counts;           ///< N_{j,B}, index j - 1
    std::size_t blocked_total = 0;
};

inline ShapeEstimate extract_shape(std::span<const GridIndex> blocked, const MeshConfig& config) {
    ShapeEstimate est;
    est.per_mesh_counts.assign(config.arrays_per_position, 0);
    if (blocked.empty()) return est;

    const double s = config.pitch();
    std::map<std::pair<int, int>, std::set<int>> meshes_by_cell;  // (row, col) -> {j}
    std::map<int, std::set<int>> cols_by_mesh;
    for (const auto& g : blocked) {
        require(g.j >= 1 && g.j <= config.arrays_per_position, "extract_shape: mesh index out of range");
        if (meshes_by_cell[{g.row, g.col}].insert(g.j).second) {
            ++est.per_mesh_counts[g.j - 1];
            ++est.blocked_total;
        }
        cols_by_mesh[g.j].insert(g.col);
    }
    est.detected = true;
    est.blocked_mesh_count = static_cast<int>(cols_by_mesh.size());

    auto longest_run = [](const std::set<int>& js) {
        int best = 0, run = 0, prev = -2;
        for (int j : js) {
            run = (j == prev + 1) ? run + 1 : 1;
            best = std::max(best, run);
            prev = j;
        }
        return best;
    };
    int max_run = 0;
    for (const auto& [cell, js] : meshes_by_cell) max_run = std::max(max_run, longest_run(js));

    std::map<int, std::set<int>> central_cols_by_row, central_rows_by_col;
    std::set<int> central_cols;
    for (const auto& [cell, js] : meshes_by_cell) {
        if (longest_run(js) != max_run) continue;
        central_cols_by_row[cell.first].insert(cell.second);
        central_rows_by_col[cell.second].insert(cell.first);
        central_cols.insert(cell.second);
    }
    std::size_t width_cells = 0, height_cells = 0;
    for (const auto& [row, cols] : central_cols_by_row) width_cells = std::max(width_cells, cols.size());
    for (const auto& [col, rows] : central_rows_by_col) height_cells = std::max(height_cells, rows.size());
    est.central = {config.array_spacing * (est.blocked_mesh_count - 1), s * static_cast<double>(width_cells),
                   s * static_cast<double>(height_cells)};

    std::map<int, std::size_t> lateral_extent;  // j -> distinct blocked cols
    for (const auto& [j, cols] : cols_by_mesh) {
        const bool lateral = std::any_of(cols.begin(), cols.end(), [&](int c) { return !central_cols.count(c); });
        if (lateral) lateral_extent[j] = cols.size();
    }
    if (lateral_extent.empty()) return est;

    std::size_t wing_extent = 0;
    for (const auto& [j, e] : lateral_extent) wing_extent = std::max(wing_extent, e);
    std::vector<int> wing_meshes;
    for (const auto& [j, e] : lateral_extent)
        if (e == wing_extent) wing_meshes.push_back(j);
    est.wing = LateralSection{s * static_cast<double>(wing_extent), s * static_cast<double>(wing_meshes.size())};

    auto tail_from = [&](auto pred) -> std::optional<LateralSection> {
        std::size_t extent = 0, count = 0;
        for (const auto& [j, e] : lateral_extent)
            if (e < wing_extent && pred(j)) {
                extent = std::max(extent, e);
                ++count;
            }
        if (count == 0) return std::nullopt;
        return LateralSection{s * static_cast<double>(extent), s * static_cast<double>(count)};
    };
    est.tail = tail_from([&](int j) { return j > wing_meshes.back(); });
    if (!est.tail) est.tail = tail_from([&](int j) { return j < wing_meshes.front(); });
    return est;
}

inline ShapeEstimate extract_shape(const DetectionGrid& grid, const MeshConfig& config) {
    const auto cells = grid.blocked_cells();
    return extract_shape(std::span<const GridIndex>(cells), config);
}

/// One localisation of a target: centre of its blocked intersections, the
/// dwell time and the highest blocked altitude.
struct TrackPoint {
    Vec3 center;
    double time;
    double max_blocked_z;
};

struct Kinematics {
    std::optional<double> max_velocity;  ///< m/s
    std::optional<double> pitch;         ///< degrees, largest magnitude over the track
    std::optional<double> drift;         ///< degrees, largest magnitude over the track
    double max_altitude = 0.0;           ///< m
};

/// Track kinematics. Angles use the steering step as the along-track run:
/// pitch = atan(dz / (n dP)), drift = atan(dx / (n dP)) for consecutive points
/// n hops apart (n = 1 when no dwell was skipped).
inline Kinematics kinematics(std::span<const TrackPoint> points, const MeshConfig& config) {
    require(!points.empty(), "kinematics: need at least one track point");
    Kinematics k;
    k.max_altitude = points.front().max_blocked_z;
    for (const auto& p : points) k.max_altitude = std::max(k.max_altitude, p.max_blocked_z);
    if (points.size() < 2) return k;

    double vmax = 0.0, pitch = 0.0, drift = 0.0;
    for (std::size_t n = 1; n < points.size(); ++n) {
        const auto& a = points[n - 1];
        const auto& b = points[n];
        const double dt = b.time - a.time;
        require(dt > 0.0, "kinematics: track times must be strictly increasing");
        const Vec3 d = b.center - a.center;
        vmax = std::max(vmax, d.norm() / dt);
        const double hops = std::max(1.0, std::round(dt / config.hop_period()));
        const double run = hops * config.steering_step;
        const double p = deg(std::atan(d.z / run));
        const double q = deg(std::atan(d.x / run));
        if (std::abs(p) > std::abs(pitch)) pitch = p;
        if (std::abs(q) > std::abs(drift)) drift = q;
    }
    k.max_velocity = vmax;
    k.pitch = pitch;
    k.drift = drift;
    return k;
}

/// Fixed-order 11-feature vector; absent sections and kinematics are 0.
inline Features to_feature_vector(const ShapeEstimate& shape, const Kinematics& kin) {
    Features f{};
    f[0] = shape.central.length;
    f[1] = shape.central.width;
    f[2] = shape.central.height;
    if (shape.wing) {
        f[3] = shape.wing->span;
        f[4] = shape.wing->width;
    }
    if (shape.tail) {
        f[5] = shape.tail->span;
        f[6] = shape.tail->width;
    }
    f[7] = kin.max_velocity.value_or(0.0);
    f[8] = kin.pitch.value_or(0.0);
    f[9] = kin.drift.value_or(0.0);
    f[10] = kin.max_altitude;
    return f;
}

}  // namespace meshranger
