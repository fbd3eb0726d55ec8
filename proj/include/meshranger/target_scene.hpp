#pragma once

// Ground-truth world: targets as unions of axis-aligned boxes moving at
// constant velocity, and the geometric occlusion of mesh intersections.
//
// Box placement for a target centred at c (orientation locked to the mesh axes):
//   central  x: width,     y: length,      z: height
//   wing     x: wing span, y: wing width,  z: one grid pitch, centred on c
//   tail     x: tail span, y: tail width,  z: one grid pitch, flush with the
//            rear end of the central box
// The rear end is the -y end for targets moving towards +y and the +y end
// otherwise.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "beam_optics.hpp"
#include "core.hpp"
#include "mesh_geometry.hpp"

namespace meshranger {

struct Box {
    Vec3 lo;
    Vec3 hi;

    /// Closed containment: points on a face count as inside.
    bool contains(const Vec3& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
    }

    Vec3 center() const { return (lo + hi) * 0.5; }
    Vec3 extent() const { return hi - lo; }

    static Box centered(const Vec3& c, const Vec3& size) {
        const Vec3 half = size * 0.5;
        return {c - half, c + half};
    }

    bool operator==(const Box&) const = default;
};

struct CentralSection {
    double length;
    double width;
    double height;
};

struct LateralSection {
    double span;
    double width;
};

struct TargetSpec {
    std::string class_name;
    int category = 4;
    CentralSection central{1.0, 1.0, 1.0};
    std::optional<LateralSection> wing;
    std::optional<LateralSection> tail;
    SurfaceCoefficients surface;
};

inline void validate(const TargetSpec& spec) {
    require(spec.category >= 1 && spec.category <= 4, "target category must be 1..4");
    const auto& c = spec.central;
    require(c.length > 0.0 && c.width > 0.0 && c.height > 0.0, "target central dimensions must be > 0");
    for (const auto* section : {&spec.wing, &spec.tail})
        if (*section) require((*section)->span > 0.0 && (*section)->width > 0.0, "target section dimensions must be > 0");
    switch (spec.category) {
        case 1:
        case 4:
            require(!spec.wing && !spec.tail, "category 1/4 targets have no wing or tail section");
            break;
        case 2:
            require(!spec.wing, "category 2 targets have no wing section");
            break;
        case 3:
            require(spec.wing && spec.tail, "category 3 targets need wing and tail sections");
            break;
    }
}

class TargetInstance {
public:
    TargetInstance(TargetSpec spec, const Vec3& center, const Vec3& velocity, double section_height)
        : spec_(std::move(spec)), origin_(center), velocity_(velocity), section_height_(section_height),
          rear_sign_(velocity.y > 0.0 ? -1.0 : 1.0) {
        validate(spec_);
        require(section_height > 0.0, "section height must be > 0");
        require(std::isfinite(center.x) && std::isfinite(center.y) && std::isfinite(center.z), "target position must be finite");
        require(std::isfinite(velocity.x) && std::isfinite(velocity.y) && std::isfinite(velocity.z), "target velocity must be finite");
    }

    const TargetSpec& spec() const { return spec_; }
    const Vec3& velocity() const { return velocity_; }
    double elapsed() const { return elapsed_; }
    Vec3 center() const { return origin_ + velocity_ * elapsed_; }

    /// The same target at absolute scene time t (t = 0 at construction).
    TargetInstance at_time(double t) const {
        TargetInstance copy = *this;
        copy.elapsed_ = t;
        return copy;
    }

    std::vector<Box> boxes() const {
        const Vec3 c = center();
        const auto& cs = spec_.central;
        std::vector<Box> out;
        out.push_back(Box::centered(c, {cs.width, cs.length, cs.height}));
        if (spec_.wing) out.push_back(Box::centered(c, {spec_.wing->span, spec_.wing->width, section_height_}));
        if (spec_.tail) {
            const double rear = c.y + rear_sign_ * 0.5 * cs.length;
            const double inner = rear - rear_sign_ * spec_.tail->width;
            Box tail;
            tail.lo = {c.x - 0.5 * spec_.tail->span, std::min(rear, inner), c.z - 0.5 * section_height_};
            tail.hi = {c.x + 0.5 * spec_.tail->span, std::max(rear, inner), c.z + 0.5 * section_height_};
            out.push_back(tail);
        }
        return out;
    }

    Box bounding_box() const {
        const auto bs = boxes();
        Box b = bs.front();
        for (const auto& x : bs) {
            b.lo = {std::min(b.lo.x, x.lo.x), std::min(b.lo.y, x.lo.y), std::min(b.lo.z, x.lo.z)};
            b.hi = {std::max(b.hi.x, x.hi.x), std::max(b.hi.y, x.hi.y), std::max(b.hi.z, x.hi.z)};
        }
        return b;
    }

    bool contains(const Vec3& p) const {
        for (const auto& b : boxes())
            if (b.contains(p)) return true;
        return false;
    }

private:
    friend TargetInstance advance(const TargetInstance&, double);

    TargetSpec spec_;
    Vec3 origin_;
    Vec3 velocity_;
    double section_height_;
    double rear_sign_;
    double elapsed_ = 0.0;
};

/// Places a target; wing and tail boxes are one grid pitch tall.
inline TargetInstance make_target(const TargetSpec& spec, const Vec3& center, const Vec3& velocity,
                                  double grid_pitch) {
    return TargetInstance(spec, center, velocity, grid_pitch);
}

/// Constant-velocity motion by dt seconds.
inline TargetInstance advance(const TargetInstance& target, double dt) {
    require(dt >= 0.0, "advance: dt must be >= 0");
    return target.at_time(target.elapsed_ + dt);
}

struct BlockedCell {
    GridIndex index;
    SurfaceCoefficients surface;
    std::size_t target;  ///< first target (list order) containing the point
};

struct BlockageTruth {
    int i = 0;
    std::vector<BlockedCell> cells;  ///< sorted by (j, row, col)

    bool empty() const { return cells.empty(); }
    std::size_t count_on_mesh(int j) const {
        return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [j](const auto& c) { return c.index.j == j; }));
    }
};

namespace detail {

/// Closed index range [lo, hi] of grid coordinates origin + k * step that can
/// fall inside [a, b], widened by one so the exact containment test decides.
inline std::pair<int, int> candidate_range(double a, double b, double origin, double step, int count) {
    const double lo = std::clamp(std::floor((a - origin) / step) - 1.0, 0.0, static_cast<double>(count));
    const double hi = std::clamp(std::ceil((b - origin) / step) + 1.0, -1.0, static_cast<double>(count - 1));
    return {static_cast<int>(lo), static_cast<int>(hi)};
}

}  // namespace detail

/// Intersections of steering position i covered by any target at scene time t.
inline BlockageTruth occlude(const std::vector<TargetInstance>& targets, const MeshLayout& layout, int i, double t) {
    require(layout.contains_position(i), "occlude: steering index out of range");
    const auto& cfg = layout.config();
    const int m = cfg.rx_per_array;
    const double s = cfg.pitch();
    const Vec3 origin = intersection_position(cfg, i, {1, 0, 0});

    std::vector<long> owner(layout.cells_per_position(), -1);
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const auto target = targets[k].at_time(t);
        for (const auto& box : target.boxes()) {
            const auto [c0, c1] = detail::candidate_range(box.lo.x, box.hi.x, origin.x, s, m);
            const auto [r0, r1] = detail::candidate_range(box.lo.z, box.hi.z, origin.z, s, m);
            const auto [j0, j1] = detail::candidate_range(box.lo.y, box.hi.y, origin.y, cfg.array_spacing,
                                                          cfg.arrays_per_position);
            for (int j = j0; j <= j1; ++j)
                for (int row = r0; row <= r1; ++row)
                    for (int col = c0; col <= c1; ++col) {
                        const GridIndex g{j + 1, row, col};
                        const auto off = layout.local_offset(g);
                        if (owner[off] >= 0) continue;
                        if (box.contains(layout.at(i, g).position)) owner[off] = static_cast<long>(k);
                    }
        }
    }

    BlockageTruth truth;
    truth.i = i;
    for (int j = 1; j <= cfg.arrays_per_position; ++j)
        for (int row = 0; row < m; ++row)
            for (int col = 0; col < m; ++col) {
                const GridIndex g{j, row, col};
                const long k = owner[layout.local_offset(g)];
                if (k >= 0) truth.cells.push_back({g, targets[k].spec().surface, static_cast<std::size_t>(k)});
            }
    return truth;
}

}  // namespace meshranger
