// Sweeps the steered mesh past one fighter-sized target and prints the track.
// Noise is off, so every decision follows the geometry.

#include <cstdio>

#include "meshranger/pipeline.hpp"

int main() {
    using namespace meshranger;
    Scenario s;
    s.mesh.tx_height = 350.0;
    s.mesh.arrays_per_position = 5;
    s.mesh.rx_per_array = 41;
    s.mesh.steering_half_count = 4;
    s.mesh.rx_spacing = 1.0;
    s.mesh.array_spacing = 4.0;
    s.mesh.steering_step = 70.0;
    s.mesh.steering_hop_time = 0.1;
    s.mesh.grid_base_altitude = 9980.0;
    s.detection.noise = false;

    TargetSpec jet;
    jet.class_name = "fighter jet";
    jet.category = 3;
    jet.central = {18.3, 3.1, 4.3};
    jet.wing = LateralSection{12.2, 3.6};
    jet.tail = LateralSection{4.8, 1.9};
    // Centred on the five-mesh stack and moving with it (70 m per 0.1 s hop), climbing slowly.
    s.targets.push_back({jet, {0.3, -272.0, 10000.3}, {0.0, 700.0, 25.0}});

    const auto report = run_sdclt(s);
    for (const auto& d : report.dwells) {
        std::printf("i=%+d t=%.2f s truth=%zu blocked=%zu", d.i, d.time, d.truth_cells, d.blocked_cells);
        for (const auto& [track, idx] : d.assignments) {
            const auto& o = report.tracks[track].observations[idx];
            std::printf("  track %zu at (%.2f, %.2f, %.2f)", track, o.center.x, o.center.y, o.center.z);
        }
        std::printf("\n");
    }
    for (const auto& t : report.targets) {
        std::printf("track %zu: %s, v_max %.1f m/s, pitch %.2f deg, altitude %.1f m\n", t.track_id, t.class_name.c_str(),
                    t.kinematics.max_velocity.value_or(0.0), t.kinematics.pitch.value_or(0.0), t.kinematics.max_altitude);
        std::printf("  central %.1f x %.1f x %.1f m", t.shape.central.length, t.shape.central.width, t.shape.central.height);
        if (t.shape.wing) std::printf(", wing %.1f m", t.shape.wing->span);
        if (t.shape.tail) std::printf(", tail %.1f m", t.shape.tail->span);
        std::printf("\n");
    }
}
