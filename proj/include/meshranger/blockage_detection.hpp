#pragma once

// Per-intersection blockage decisions from the SNR threshold test.
//
// Threshold: gamma = 10 log10(-ln pfa), the Neyman-Pearson threshold of a
// square-law detector whose noise statistic is unit-mean exponential
// (P[T > gamma_lin] = exp(-gamma_lin) = pfa).
//
// Measurement model per intersection and dwell:
//   T = b * P_rx / sigma^2 + z,   z ~ N(0, 1),   T floored at 0
// with b = 1 on a clear link and b = Gamma2^2 when a target surface sits in
// the beam. The link is declared blocked when 10 log10(T) < gamma.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "beam_optics.hpp"
#include "core.hpp"
#include "mesh_geometry.hpp"
#include "random.hpp"
#include "target_scene.hpp"

namespace meshranger {

/// Threshold in dB for a false-alarm probability in (0, 1).
inline double np_threshold(double pfa) {
    require(pfa > 0.0 && pfa < 1.0, "pfa must be in (0, 1)");
    return to_db(-std::log(pfa));
}

struct DetectionConfig {
    double pfa = 0.1;
    double noise_variance = 1e-4;
    std::uint64_t seed = 1;
    bool noise = true;  ///< false: z = 0 (deterministic decisions)

    double threshold_db() const { return np_threshold(pfa); }
    double threshold_linear() const { return -std::log(pfa); }

    bool operator==(const DetectionConfig&) const = default;
};

inline void validate(const DetectionConfig& c) {
    require(c.pfa > 0.0 && c.pfa < 1.0, "detection.pfa must be in (0, 1)");
    require(std::isfinite(c.noise_variance) && c.noise_variance > 0.0, "detection.noise_variance must be > 0");
}

/// Source beam plus receiver aperture; enough to evaluate P_rx at any slant range.
struct LinkModel {
    GaussianBeam beam{100e-9, 2e-3, 200.0};
    double rx_aperture_radius = 1e-2;

    double clear_power(const MeshConfig& mesh, int i, int j) const {
        return received_power(beam, rx_aperture_radius, slant_range(mesh, i, j));
    }
};

struct Measurement {
    double snr_db;
    bool blocked;
};

class DetectionGrid {
public:
    DetectionGrid(int i, int meshes, int side)
        : i_(i), meshes_(meshes), side_(side), cells_(static_cast<std::size_t>(meshes) * side * side) {}

    int steering_index() const { return i_; }
    int meshes() const { return meshes_; }
    int side() const { return side_; }

    const Measurement& at(const GridIndex& g) const { return cells_.at(offset(g)); }
    Measurement& at(const GridIndex& g) { return cells_.at(offset(g)); }

    std::vector<GridIndex> blocked_cells() const {
        std::vector<GridIndex> out;
        for (int j = 1; j <= meshes_; ++j)
            for (int row = 0; row < side_; ++row)
                for (int col = 0; col < side_; ++col)
                    if (at({j, row, col}).blocked) out.push_back({j, row, col});
        return out;
    }

    bool any_blocked() const {
        for (const auto& c : cells_)
            if (c.blocked) return true;
        return false;
    }

    bool operator==(const DetectionGrid& o) const {
        if (i_ != o.i_ || meshes_ != o.meshes_ || side_ != o.side_) return false;
        for (std::size_t k = 0; k < cells_.size(); ++k) {
            const auto &a = cells_[k], &b = o.cells_[k];
            if (a.blocked != b.blocked) return false;
            if (!(a.snr_db == b.snr_db || (std::isinf(a.snr_db) && std::isinf(b.snr_db)))) return false;
        }
        return true;
    }

private:
    std::size_t offset(const GridIndex& g) const {
        require(g.j >= 1 && g.j <= meshes_ && g.row >= 0 && g.row < side_ && g.col >= 0 && g.col < side_,
                "grid index out of range");
        return (static_cast<std::size_t>(g.j - 1) * side_ + g.row) * side_ + g.col;
    }

    int i_;
    int meshes_;
    int side_;
    std::vector<Measurement> cells_;
};

/// Sub-stream seed for the noise of steering position i.
inline std::uint64_t dwell_seed(std::uint64_t master, int i) {
    return derive_seed(master, static_cast<std::uint64_t>(static_cast<std::int64_t>(i)));
}

/// Noisy decisions for every intersection of the truth's steering position.
/// One normal draw is consumed per intersection, in (j, row, col) order,
/// whether or not noise is enabled.
inline DetectionGrid detect_grid(const BlockageTruth& truth, const MeshConfig& mesh, const LinkModel& link,
                                 const DetectionConfig& cfg, Rng& rng) {
    validate(cfg);
    const int m = mesh.rx_per_array;
    const double gamma = cfg.threshold_db();
    DetectionGrid grid(truth.i, mesh.arrays_per_position, m);

    std::vector<double> transmittance(grid.meshes() * static_cast<std::size_t>(m) * m, 1.0);
    for (const auto& cell : truth.cells)
        transmittance[(static_cast<std::size_t>(cell.index.j - 1) * m + cell.index.row) * m + cell.index.col] =
            cell.surface.power_transmittance();

    for (int j = 1; j <= mesh.arrays_per_position; ++j) {
        const double clear_snr = link.clear_power(mesh, truth.i, j) / cfg.noise_variance;
        for (int row = 0; row < m; ++row)
            for (int col = 0; col < m; ++col) {
                const double b = transmittance[(static_cast<std::size_t>(j - 1) * m + row) * m + col];
                const double z = rng.normal();
                const double t = std::max(0.0, b * clear_snr + (cfg.noise ? z : 0.0));
                const double snr_db = to_db(t);
                grid.at({j, row, col}) = {snr_db, snr_db < gamma};
            }
    }
    return grid;
}

/// Convenience overload drawing from the position's derived sub-stream.
inline DetectionGrid detect_grid(const BlockageTruth& truth, const MeshConfig& mesh, const LinkModel& link,
                                 const DetectionConfig& cfg) {
    Rng rng(dwell_seed(cfg.seed, truth.i));
    return detect_grid(truth, mesh, link, cfg, rng);
}

struct RateEstimate {
    double rate;
    double standard_error;
    std::size_t trials;
};

namespace detail {
inline RateEstimate flagged_fraction(double snr_linear, double gamma_lin, std::size_t trials, Rng& rng) {
    require(trials >= 1, "trials must be >= 1");
    std::size_t hits = 0;
    for (std::size_t n = 0; n < trials; ++n) {
        const double t = std::max(0.0, snr_linear + rng.normal());
        if (t < gamma_lin) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(trials);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), trials};
}
}  // namespace detail

/// Monte-Carlo fraction of clear links declared blocked.
inline RateEstimate empirical_false_rate(const DetectionConfig& cfg, double clear_snr_linear, std::size_t trials,
                                         Rng& rng) {
    validate(cfg);
    return detail::flagged_fraction(clear_snr_linear, cfg.threshold_linear(), trials, rng);
}

/// Monte-Carlo fraction of truly blocked links (power transmittance b) that pass as clear.
inline RateEstimate empirical_miss_rate(const DetectionConfig& cfg, double clear_snr_linear, double transmittance,
                                        std::size_t trials, Rng& rng) {
    validate(cfg);
    auto r = detail::flagged_fraction(transmittance * clear_snr_linear, cfg.threshold_linear(), trials, rng);
    r.rate = 1.0 - r.rate;
    return r;
}

/// Closed-form false rate of the measurement model: Phi(gamma_lin - snr) for gamma_lin > 0.
inline double model_false_rate(double clear_snr_linear, double gamma_lin) {
    if (gamma_lin <= 0.0) return 0.0;
    return 0.5 * std::erfc(-(gamma_lin - clear_snr_linear) / std::sqrt(2.0));
}

}  // namespace meshranger
