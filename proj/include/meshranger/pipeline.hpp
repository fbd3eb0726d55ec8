#pragma once

// Steering sweep: occlusion, detection, per-component shape and centroid,
// track association, and per-track classification after the sweep.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "blockage_detection.hpp"
#include "classifiers.hpp"
#include "core.hpp"
#include "dataset.hpp"
#include "feature_extraction.hpp"
#include "mesh_geometry.hpp"
#include "parallel.hpp"
#include "target_catalog.hpp"
#include "target_scene.hpp"

namespace meshranger {

struct ScenarioTarget {
    TargetSpec spec;
    Vec3 position;  ///< centre at t = 0, m
    Vec3 velocity;  ///< m/s
};

struct ClassifierConfig {
    Algorithm algorithm = Algorithm::NaiveBayes;
    std::size_t k_per_class = 200;
    std::uint64_t seed = 1;
    bool auto_tune = false;

    bool operator==(const ClassifierConfig&) const = default;
};

struct SequencingConfig {
    double dt_seq = 1e-3;  ///< s
    int ring_radius = 1;

    bool operator==(const SequencingConfig&) const = default;
};

struct Scenario {
    MeshConfig mesh;
    LinkModel link;
    DetectionConfig detection;
    std::vector<ScenarioTarget> targets;
    ClassifierConfig classifier;
    SequencingConfig sequencing;
};

/// Track gate speed: twice the largest class-mean maximum velocity.
inline double default_gate_speed() { return 2.0 * max_catalog_velocity(); }

// ---------------------------------------------------------------------------
// Connected components

using Component = std::vector<GridIndex>;

/// Connected components of the blocked cells under 26-adjacency in
/// (j, row, col). Components are ordered by their smallest cell; cells inside
/// a component are sorted.
inline std::vector<Component> separate_targets(const DetectionGrid& grid) {
    const int L = grid.meshes(), m = grid.side();
    auto offset = [&](const GridIndex& g) {
        return (static_cast<std::size_t>(g.j - 1) * m + g.row) * m + g.col;
    };
    std::vector<char> seen(static_cast<std::size_t>(L) * m * m, 0);
    std::vector<Component> out;
    for (const auto& start : grid.blocked_cells()) {
        if (seen[offset(start)]) continue;
        Component comp;
        std::vector<GridIndex> stack{start};
        seen[offset(start)] = 1;
        while (!stack.empty()) {
            const GridIndex g = stack.back();
            stack.pop_back();
            comp.push_back(g);
            for (int dj = -1; dj <= 1; ++dj)
                for (int dr = -1; dr <= 1; ++dr)
                    for (int dc = -1; dc <= 1; ++dc) {
                        const GridIndex n{g.j + dj, g.row + dr, g.col + dc};
                        if (n.j < 1 || n.j > L || n.row < 0 || n.row >= m || n.col < 0 || n.col >= m) continue;
                        if (seen[offset(n)] || !grid.at(n).blocked) continue;
                        seen[offset(n)] = 1;
                        stack.push_back(n);
                    }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

/// Mean intersection position of a set of cells at steering position i.
inline Vec3 centroid(const MeshConfig& mesh, int i, const std::vector<GridIndex>& cells) {
    require(!cells.empty(), "centroid of an empty cell set");
    Vec3 sum;
    for (const auto& g : cells) sum = sum + intersection_position(mesh, i, g);
    return sum * (1.0 / static_cast<double>(cells.size()));
}

// ---------------------------------------------------------------------------
// Tracks

struct Observation {
    int i;
    double time;
    std::size_t component;  ///< index into that dwell's component list
    Vec3 center;
    double max_blocked_z;
    std::size_t cell_count;
    ShapeEstimate shape;
};

struct Track {
    std::size_t id;
    std::vector<Observation> observations;

    double last_time() const { return observations.back().time; }
    Vec3 last_center() const { return observations.back().center; }

    std::vector<TrackPoint> points() const {
        std::vector<TrackPoint> p;
        for (const auto& o : observations) p.push_back({o.center, o.time, o.max_blocked_z});
        return p;
    }
};

/// Appends this dwell's components to tracks. A component may join a track
/// whose last centre lies within v_cap * dt plus one grid diagonal (centroids
/// are quantised to the grid). Pairs are taken greedily by distance, then
/// track id, then component index; each track takes at most one component.
/// Components left over open new tracks in component order.
inline void update_track(std::vector<Track>& tracks, const DetectionGrid& grid, const MeshConfig& mesh, double t,
                         double gate_speed = default_gate_speed()) {
    const auto comps = separate_targets(grid);
    if (comps.empty()) return;
    const int i = grid.steering_index();
    const double slack = std::sqrt(2.0 * mesh.pitch() * mesh.pitch() + mesh.array_spacing * mesh.array_spacing);

    std::vector<Observation> obs;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        double zmax = -std::numeric_limits<double>::infinity();
        for (const auto& g : comps[c]) zmax = std::max(zmax, intersection_position(mesh, i, g).z);
        obs.push_back({i, t, c, centroid(mesh, i, comps[c]), zmax, comps[c].size(),
                       extract_shape(std::span<const GridIndex>(comps[c]), mesh)});
    }

    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;  // distance, track, component
    for (std::size_t k = 0; k < tracks.size(); ++k) {
        const double dt = t - tracks[k].last_time();
        if (dt <= 0.0) continue;
        const double gate = gate_speed * dt + slack;
        for (std::size_t c = 0; c < obs.size(); ++c) {
            const double d = (obs[c].center - tracks[k].last_center()).norm();
            if (d <= gate) pairs.emplace_back(d, k, c);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<char> track_used(tracks.size(), 0), comp_used(obs.size(), 0);
    for (const auto& [d, k, c] : pairs) {
        if (track_used[k] || comp_used[c]) continue;
        track_used[k] = comp_used[c] = 1;
        tracks[k].observations.push_back(obs[c]);
    }
    for (std::size_t c = 0; c < obs.size(); ++c)
        if (!comp_used[c]) tracks.push_back({tracks.size(), {obs[c]}});
}

// ---------------------------------------------------------------------------
// Sequential illumination

struct Activation {
    int ring;                      ///< Chebyshev distance from the centre
    double time;                   ///< s
    std::vector<GridIndex> meshes; ///< (j, row, col) aim points lit together
};

using IlluminationSequence = std::vector<Activation>;

/// Rings of Chebyshev distance 0..radius around `center` in the (j, col)
/// plane, lit one ring per dt_seq. Rings falling entirely outside the L x M
/// stack are skipped, so activation times stay contiguous.
inline IlluminationSequence ring_sequence(int L, int M, const GridIndex& center, int radius, double dt_seq) {
    require(L >= 1 && M >= 1, "ring_sequence: L and M must be >= 1");
    require(center.j >= 1 && center.j <= L && center.row >= 0 && center.row < M && center.col >= 0 && center.col < M,
            "ring_sequence: center outside the mesh stack");
    require(radius >= 0, "ring_sequence: radius must be >= 0");
    require(std::isfinite(dt_seq) && dt_seq > 0.0, "ring_sequence: dt_seq must be > 0");
    IlluminationSequence seq;
    for (int r = 0; r <= radius; ++r) {
        Activation a{r, 0.0, {}};
        for (int j = center.j - r; j <= center.j + r; ++j)
            for (int col = center.col - r; col <= center.col + r; ++col) {
                if (std::max(std::abs(j - center.j), std::abs(col - center.col)) != r) continue;
                if (j < 1 || j > L || col < 0 || col >= M) continue;
                a.meshes.push_back({j, center.row, col});
            }
        if (a.meshes.empty()) continue;
        a.time = static_cast<double>(seq.size()) * dt_seq;
        seq.push_back(std::move(a));
    }
    return seq;
}

// ---------------------------------------------------------------------------
// Full sweep

struct TruthBlob {
    std::size_t target;
    std::size_t cells;
    Vec3 centroid;
};

struct DwellRecord {
    int i;
    double time;
    std::size_t truth_cells;
    std::vector<TruthBlob> truth;  ///< per target that blocks anything
    std::size_t blocked_cells;     ///< detector decisions
    bool detected;
    std::vector<std::pair<std::size_t, std::size_t>> assignments;  ///< (track id, observation index)
};

struct TargetReport {
    std::size_t track_id;
    std::size_t class_index;
    std::string class_name;
    ShapeEstimate shape;  ///< from the observation with the most cells
    Kinematics kinematics;
    Features features;
    std::vector<std::size_t> row_votes;  ///< per-row predictions of the eval matrix
};

struct SdcltReport {
    std::vector<DwellRecord> dwells;
    std::vector<Track> tracks;
    std::vector<TargetReport> targets;
    SteeringSchedule schedule;
};

inline void validate(const Scenario& s) {
    validate(s.mesh);
    validate(s.detection);
    require(s.link.rx_aperture_radius > 0.0 && std::isfinite(s.link.rx_aperture_radius),
            "beam.rx_aperture_radius must be > 0");
    require(s.classifier.k_per_class >= 1, "classifier.k_per_class must be >= 1");
    require(s.sequencing.dt_seq > 0.0, "sequencing.dt_seq must be > 0");
    require(s.sequencing.ring_radius >= 0, "sequencing.ring_radius must be >= 0");
    for (const auto& t : s.targets) validate(t.spec);
}

inline ClassifierModel train_scenario_classifier(const ClassifierConfig& cfg) {
    const auto data = synthesize_dataset(cfg.k_per_class, cfg.seed);
    Hyperparams hp;
    hp.seed = cfg.seed;
    return cfg.auto_tune ? train_auto(cfg.algorithm, data, hp) : train(cfg.algorithm, data, hp);
}

/// Runs the sweep. A pre-trained model may be supplied; otherwise one is
/// trained from the scenario's classifier settings when any track exists.
inline SdcltReport run_sdclt(const Scenario& scenario, const ClassifierModel* model = nullptr) {
    validate(scenario);
    const auto layout = build_mesh(scenario.mesh);
    const auto& mesh = scenario.mesh;
    std::vector<TargetInstance> targets;
    double vmax = 0.0;
    for (const auto& t : scenario.targets) {
        targets.push_back(make_target(t.spec, t.position, t.velocity, mesh.pitch()));
        vmax = std::max(vmax, t.velocity.norm());
    }

    SdcltReport report;
    report.schedule = steering_schedule(mesh, vmax);
    const auto& dwells = report.schedule.dwells;

    // Occlusion and detection are independent per dwell.
    std::vector<std::optional<BlockageTruth>> truths(dwells.size());
    std::vector<std::optional<DetectionGrid>> grids(dwells.size());
    parallel_for(dwells.size(), [&](std::size_t n) {
        truths[n] = occlude(targets, layout, dwells[n].i, dwells[n].start_time);
        grids[n] = detect_grid(*truths[n], mesh, scenario.link, scenario.detection);
    });

    for (std::size_t n = 0; n < dwells.size(); ++n) {
        const auto& truth = *truths[n];
        const auto& grid = *grids[n];
        DwellRecord rec{dwells[n].i, dwells[n].start_time, truth.cells.size(), {}, 0, false, {}};
        for (std::size_t k = 0; k < targets.size(); ++k) {
            std::vector<GridIndex> cells;
            for (const auto& c : truth.cells)
                if (c.target == k) cells.push_back(c.index);
            if (!cells.empty()) rec.truth.push_back({k, cells.size(), centroid(mesh, rec.i, cells)});
        }
        rec.blocked_cells = grid.blocked_cells().size();
        rec.detected = rec.blocked_cells > 0;
        if (rec.detected) {
            std::vector<std::size_t> before(report.tracks.size());
            for (std::size_t k = 0; k < report.tracks.size(); ++k) before[k] = report.tracks[k].observations.size();
            update_track(report.tracks, grid, mesh, rec.time);
            for (std::size_t k = 0; k < report.tracks.size(); ++k) {
                const std::size_t had = k < before.size() ? before[k] : 0;
                if (report.tracks[k].observations.size() > had) rec.assignments.emplace_back(k, had);
            }
        }
        report.dwells.push_back(std::move(rec));
    }

    if (report.tracks.empty()) return report;
    std::optional<ClassifierModel> owned;
    if (!model) {
        owned = train_scenario_classifier(scenario.classifier);
        model = &*owned;
    }
    for (const auto& track : report.tracks) {
        const auto points = track.points();
        const auto kin = kinematics(std::span<const TrackPoint>(points), mesh);
        Matrix rows(static_cast<Eigen::Index>(track.observations.size()), kFeatureCount);
        std::size_t best = 0;
        for (std::size_t o = 0; o < track.observations.size(); ++o) {
            const auto f = to_feature_vector(track.observations[o].shape, kin);
            for (std::size_t c = 0; c < kFeatureCount; ++c) rows(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(c)) = f[c];
            if (track.observations[o].cell_count > track.observations[best].cell_count) best = o;
        }
        const Matrix eval = interpolate_eval(rows, scenario.classifier.k_per_class);
        TargetReport tr;
        tr.track_id = track.id;
        tr.row_votes = model->predict_rows(eval);
        tr.class_index = majority_vote(tr.row_votes, model->class_names().size());
        tr.class_name = model->class_names().at(tr.class_index);
        tr.shape = track.observations[best].shape;
        tr.kinematics = kin;
        tr.features = to_feature_vector(tr.shape, kin);
        report.targets.push_back(std::move(tr));
    }
    return report;
}

}  // namespace meshranger
