// Acceptance checks 1-8. One PASS/FAIL line per criterion; exit status 1 if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "meshranger/meshranger.hpp"

#ifndef MESHRANGER_PRESET
#define MESHRANGER_PRESET "configs/cruise_missile.json"
#endif

using namespace meshranger;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

const GaussianBeam kBeam{100e-9, 2e-3, 200.0};
constexpr double kRx = 1e-2;
constexpr double kNoise = 1e-4;
constexpr double kRange = 350.0;

Outcome link_budget_check() {
    const double xr = kBeam.rayleigh_range();
    const auto lb = link_budget(kBeam, kRx, kRange, kNoise);
    const bool ok = std::abs(xr - 125.7) <= 0.1 && std::abs(lb.received_power - 3.3e-4) <= 0.02 * 3.3e-4 &&
                    lb.snr_db >= 5.0 && lb.snr_db <= 5.3;
    return {ok, "x_R=" + fmt("%.2f", xr) + " m P=" + fmt("%.4e", lb.received_power) + " W SNR=" + fmt("%.2f", lb.snr_db) + " dB"};
}

Outcome threshold_check() {
    const double g = np_threshold(0.1);
    return {std::abs(g - 3.6) <= 0.05, "gamma=" + fmt("%.3f", g) + " dB"};
}

Outcome blockage_check() {
    const SurfaceCoefficients surface(0.7, 0.2);
    const double clear = link_snr(received_power(kBeam, kRx, kRange), kNoise);
    const double blocked = clear + to_db(surface.power_transmittance());
    const double gamma = np_threshold(0.1);

    // Detector decision on a single blocked link straight below the source.
    MeshConfig mesh;
    mesh.tx_height = kRange;
    mesh.arrays_per_position = 1;
    mesh.steering_half_count = 0;
    mesh.rx_per_array = 2;
    // L = 1, i = 0: slant range sqrt(h^2 + (dy/2)^2); dy tiny keeps d at 350 m.
    mesh.array_spacing = 1e-6;
    BlockageTruth truth{0, {{GridIndex{1, 0, 0}, surface, 0}}};
    DetectionConfig cfg;
    cfg.noise = false;
    const auto grid = detect_grid(truth, mesh, LinkModel{kBeam, kRx}, cfg);
    const auto& cell = grid.at({1, 0, 0});
    const bool ok = blocked <= -8.0 && blocked < gamma && std::abs(blocked - (-8.75)) <= 0.05 && cell.blocked &&
                    !grid.at({1, 0, 1}).blocked;
    return {ok, "blocked SNR=" + fmt("%.3f", blocked) + " dB, detector SNR=" + fmt("%.3f", cell.snr_db) +
                    " dB, fired=" + (cell.blocked ? "yes" : "no")};
}

Outcome shape_check() {
    MeshConfig c;
    c.rx_spacing = 0.5;
    c.array_spacing = 2.0;
    c.rx_per_array = 9;
    // Cruciform pattern: 1 / 5 / 3 blocked intersections on meshes 1 / 2 / 3.
    std::vector<GridIndex> cells{{1, 4, 4}};
    for (int col = 2; col <= 6; ++col) cells.push_back({2, 4, col});
    for (int col = 3; col <= 5; ++col) cells.push_back({3, 4, col});
    const auto est = extract_shape(std::span<const GridIndex>(cells), c);
    const double s = c.pitch();
    const bool ok = est.detected && est.central.length == 2.0 * c.array_spacing && est.central.width == s &&
                    est.central.height == s && est.wing && est.wing->span == 5.0 * s && est.tail.has_value();
    std::ostringstream d;
    d << "l_c=" << est.central.length << " w_c=" << est.central.width << " h_c=" << est.central.height
      << " wing=" << (est.wing ? std::to_string(std::lround(est.wing->span / s)) + "s" : "none") << " tail=" << (est.tail ? "yes" : "no");
    return {ok, d.str()};
}

Outcome classification_check() {
    const auto train_set = synthesize_dataset(200, 1);
    const auto test_set = synthesize_dataset(200, 2);
    Hyperparams hp;
    const auto nb = evaluate(train(Algorithm::NaiveBayes, train_set, hp), test_set);
    const auto lda = evaluate(train(Algorithm::Lda, train_set, hp), test_set);
    const auto knn = evaluate(train_auto(Algorithm::Knn, train_set, hp), test_set);
    const auto rf = evaluate(train_auto(Algorithm::RandomForest, train_set, hp), test_set);

    const auto uav = lda.top_confusion(kFixedWingUav);
    const auto small = lda.top_confusion(kSmallFixedWing);
    std::vector<std::string> failed;
    if (!(nb.accuracy() >= 0.99)) failed.push_back("NB<0.99");
    if (!(nb.accuracy() >= rf.accuracy())) failed.push_back("NB<RF");
    if (!(rf.accuracy() >= lda.accuracy())) failed.push_back("RF<LDA");
    if (!(lda.accuracy() > knn.accuracy())) failed.push_back("LDA<=KNN");
    if (uav != kFighterJet) failed.push_back("LDA fixed-wing UAV top confusion is not fighter jet");
    if (small != kFighterJet) failed.push_back("LDA small plane top confusion is not fighter jet");
    if (!(rf.errors() < lda.errors())) failed.push_back("RF errors >= LDA errors");

    std::ostringstream d;
    d << "acc NB=" << fmt("%.4f", nb.accuracy()) << " LDA=" << fmt("%.4f", lda.accuracy())
      << " KNN=" << fmt("%.4f", knn.accuracy()) << " RF=" << fmt("%.4f", rf.accuracy())
      << "; LDA UAV->" << (uav ? class_name(*uav) : "none") << ", small->" << (small ? class_name(*small) : "none");
    if (!failed.empty()) {
        d << "; failed:";
        for (const auto& f : failed) d << ' ' << f << ';';
    }
    return {failed.empty(), d.str()};
}

Outcome given_target_check() {
    const auto train_set = synthesize_dataset(200, 1);
    const Features g = mean_vector(given_target_spec());
    const auto nb = train(Algorithm::NaiveBayes, train_set).predict(g);
    const auto lda = train(Algorithm::Lda, train_set).predict(g);
    return {nb == kCruiseMissile && lda == kCruiseMissile,
            "NB=" + std::string(class_name(nb)) + " LDA=" + std::string(class_name(lda))};
}

Outcome end_to_end_check() {
    auto cfg = parse_scenario(MESHRANGER_PRESET);
    auto& s = cfg.scenario;
    s.detection.noise = false;
    const auto report = run_sdclt(s);
    const auto& mesh = s.mesh;
    bool complete = true, centered = true;
    std::size_t hits = 0;
    for (const auto& d : report.dwells) {
        const bool geometric = d.truth_cells > 0;
        if (geometric != d.detected) complete = false;
        if (!geometric) continue;
        ++hits;
        if (d.assignments.size() != 1 || d.truth.size() != 1) {
            centered = false;
            continue;
        }
        const auto& [track, idx] = d.assignments.front();
        const Vec3 c = report.tracks[track].observations[idx].center;
        const Vec3 t = d.truth.front().centroid;
        if (std::abs(c.x - t.x) > 0.5 * mesh.pitch() || std::abs(c.y - t.y) > 0.5 * mesh.array_spacing ||
            std::abs(c.z - t.z) > 0.5 * mesh.pitch())
            centered = false;
    }
    const double truth_speed = s.targets.front().velocity.norm();
    const bool one_track = report.targets.size() == 1;
    const double v = one_track ? report.targets.front().kinematics.max_velocity.value_or(0.0) : 0.0;
    const bool speed = std::abs(v - truth_speed) <= 0.01 * truth_speed;
    const std::string cls = one_track ? report.targets.front().class_name : "n/a";
    std::ostringstream d;
    d << "dwells hit=" << hits << "/" << report.dwells.size() << " complete=" << complete << " centered=" << centered
      << " tracks=" << report.targets.size() << " v_max=" << fmt("%.3f", v) << " m/s class=" << cls;
    return {complete && centered && hits > 0 && one_track && speed && cls == "cruise missile", d.str()};
}

Outcome property_check() {
    std::vector<std::string> failed;

    // Power conservation: integral of I(r, x) 2 pi r dr over r in [0, 8 w_b] by composite Simpson.
    double worst = 0.0;
    for (double x : {0.0, 1.0, 125.66, 350.0, 5000.0}) {
        const double w = kBeam.width_at(x), R = 8.0 * w;
        const int n = 4000;
        const double h = R / n;
        double sum = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double r = k * h;
            const double f = incident_intensity(kBeam, r, x) * 2.0 * kPi * r;
            sum += f * ((k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0));
        }
        worst = std::max(worst, std::abs(sum * h / 3.0 - kBeam.total_power()) / kBeam.total_power());
    }
    if (worst > 1e-6) failed.push_back("power conservation");

    // Occlusion against a brute-force scan of every intersection.
    Rng rng(2024);
    std::size_t mismatches = 0;
    for (int scene = 0; scene < 1000; ++scene) {
        MeshConfig c;
        c.arrays_per_position = 1 + static_cast<int>(rng.below(4));
        c.rx_per_array = 2 + static_cast<int>(rng.below(7));
        c.steering_half_count = static_cast<int>(rng.below(3));
        c.rx_spacing = 0.2 + rng.uniform();
        c.array_spacing = 0.2 + rng.uniform();
        c.steering_step = c.arrays_per_position * c.array_spacing + 0.5 + 3.0 * rng.uniform();
        c.grid_base_altitude = 100.0 * rng.uniform();
        const auto layout = build_mesh(c);
        const auto [lo, hi] = layout.bounds();
        std::vector<TargetInstance> targets;
        const int count = 1 + static_cast<int>(rng.below(3));
        for (int k = 0; k < count; ++k) {
            TargetSpec spec;
            spec.category = 3;
            spec.central = {0.1 + 3.0 * rng.uniform(), 0.1 + 2.0 * rng.uniform(), 0.1 + 2.0 * rng.uniform()};
            spec.wing = LateralSection{0.1 + 4.0 * rng.uniform(), 0.1 + rng.uniform()};
            spec.tail = LateralSection{0.1 + 2.0 * rng.uniform(), 0.1 + 0.5 * rng.uniform()};
            const Vec3 p{lo.x + (hi.x - lo.x) * rng.uniform(), lo.y + (hi.y - lo.y) * rng.uniform(),
                         lo.z + (hi.z - lo.z) * rng.uniform()};
            const Vec3 v{rng.normal(0.0, 2.0), rng.normal(0.0, 5.0), rng.normal(0.0, 2.0)};
            targets.push_back(make_target(spec, p, v, c.pitch()));
        }
        const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(c.positions()))) - c.steering_half_count;
        const double t = rng.uniform();
        const auto fast = occlude(targets, layout, i, t);
        std::vector<std::pair<GridIndex, std::size_t>> slow;
        for (const auto& p : layout.points()) {
            if (p.i != i) continue;
            for (std::size_t k = 0; k < targets.size(); ++k)
                if (targets[k].at_time(t).contains(p.position)) {
                    slow.emplace_back(p.index, k);
                    break;
                }
        }
        bool same = slow.size() == fast.cells.size();
        for (std::size_t n = 0; same && n < slow.size(); ++n)
            same = slow[n].first == fast.cells[n].index && slow[n].second == fast.cells[n].target;
        if (!same) ++mismatches;
    }
    if (mismatches) failed.push_back("occlusion oracle (" + std::to_string(mismatches) + " scenes)");

    // Detection determinism.
    {
        MeshConfig c;
        const auto layout = build_mesh(c);
        TargetSpec spec;
        spec.central = {3.0, 2.0, 2.0};
        const std::vector<TargetInstance> targets{make_target(spec, {0, 0, 5}, {0, 0, 0}, c.pitch())};
        const auto truth = occlude(targets, layout, 0, 0.0);
        DetectionConfig cfg;
        cfg.seed = 99;
        const LinkModel link;
        const auto a = detect_grid(truth, c, link, cfg), b = detect_grid(truth, c, link, cfg);
        cfg.seed = 100;
        const auto other = detect_grid(truth, c, link, cfg);
        if (!(a == b) || a == other) failed.push_back("detection determinism");
    }

    // Monte-Carlo false rate vs the analytic Gaussian tail.
    double z = 0.0;
    {
        DetectionConfig cfg;
        const double snr = received_power(kBeam, kRx, kRange) / kNoise;
        Rng mc(31337);
        const auto est = empirical_false_rate(cfg, snr, 100000, mc);
        const double model = model_false_rate(snr, cfg.threshold_linear());
        z = (est.rate - model) / est.standard_error;
        if (std::abs(z) > 3.0) failed.push_back("false-rate Monte Carlo");
    }

    std::ostringstream d;
    d << "power rel.err=" << fmt("%.2e", worst) << " occlusion mismatches=" << mismatches << "/1000"
      << " false-rate z=" << fmt("%.2f", z);
    for (const auto& f : failed) d << "; failed: " << f;
    return {failed.empty(), d.str()};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "link budget", 1.0, link_budget_check},
        {2, "detection threshold", 1.0, threshold_check},
        {3, "blockage decision", 1.0, blockage_check},
        {4, "shape extraction", 1.0, shape_check},
        {5, "classifier comparison", 60.0, classification_check},
        {6, "given-target prediction", 60.0, given_target_check},
        {7, "end-to-end sweep", 10.0, end_to_end_check},
        {8, "property suites", 120.0, property_check},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out{false, ""};
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_s) {
            out.pass = false;
            out.detail += "; over time budget";
        }
        failures += !out.pass;
        std::printf("%s %d %s: %s (%.3f s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures ? 1 : 0;
}
