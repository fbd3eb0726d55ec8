#pragma once

// Scenario JSON (strict schema), report serialisation and provenance.
//
// Scenario document:
//   beam       {wavelength, waist, amplitude, rx_aperture_radius?, medium_index?}
//   mesh       {h, L, M, N, dx, dy, dP, dt_s, t_dwell, z_min}
//   detection  {pfa, noise_variance, seed, noise?}
//   targets    [{class, category?, dims {central {length, width, height},
//                wing? {span, width}, tail? {span, width}},
//                surface? {gamma1, gamma2}, position [x,y,z], velocity [vx,vy,vz]}]
//   classifier? {algorithm, k_per_class, seed, auto_tune}
//   outputs?    {track_log, summary, confusion, dataset, linkbudget, calibration}
//   sequencing? {dt_seq, ring_radius}
// Unknown keys anywhere are rejected. All quantities SI.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pipeline.hpp"

namespace meshranger {

using Json = nlohmann::json;

/// Configuration problems; `kind` says which family of diagnostic it is.
class ConfigError : public InvalidArgument {
public:
    enum class Kind { Io, Malformed, Schema, Value };

    ConfigError(Kind kind, const std::string& message) : InvalidArgument(prefix(kind) + message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    static std::string prefix(Kind k) {
        switch (k) {
            case Kind::Io: return "cannot read config: ";
            case Kind::Malformed: return "malformed JSON: ";
            case Kind::Schema: return "schema error: ";
            case Kind::Value: return "invalid value: ";
        }
        return "";
    }
    Kind kind_;
};

struct OutputPaths {
    std::string track_log = "track_log.jsonl";
    std::string summary = "summary.json";
    std::string confusion = "confusion.csv";
    std::string dataset = "dataset.csv";
    std::string linkbudget = "linkbudget.csv";
    std::string calibration = "calibration.json";

    bool operator==(const OutputPaths&) const = default;
};

struct ScenarioConfig {
    Scenario scenario;
    OutputPaths outputs;
};

namespace detail {

/// Walks one JSON object, remembering which keys were read so leftovers can
/// be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(ConfigError::Kind::Schema, where() + " must be an object");
    }

    ~ObjectReader() = default;

    bool has(const std::string& key) const { return j_.contains(key); }

    const Json& child(const std::string& key) {
        used_.insert(key);
        if (!j_.contains(key)) throw ConfigError(ConfigError::Kind::Schema, "missing key '" + name(key) + "'");
        return j_.at(key);
    }

    double number(const std::string& key) {
        const auto& v = child(key);
        if (!v.is_number()) throw ConfigError(ConfigError::Kind::Schema, name(key) + " must be a number");
        return v.get<double>();
    }

    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    double positive(const std::string& key) {
        const double v = number(key);
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(ConfigError::Kind::Value, name(key) + " must be > 0");
        return v;
    }

    std::int64_t integer(const std::string& key) {
        const auto& v = child(key);
        if (!v.is_number_integer()) throw ConfigError(ConfigError::Kind::Schema, name(key) + " must be an integer");
        return v.get<std::int64_t>();
    }

    std::uint64_t unsigned_integer(const std::string& key) {
        const auto& v = child(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            throw ConfigError(ConfigError::Kind::Schema, name(key) + " must be a nonnegative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const auto& v = child(key);
        if (!v.is_boolean()) throw ConfigError(ConfigError::Kind::Schema, name(key) + " must be a boolean");
        return v.get<bool>();
    }

    std::string string(const std::string& key) {
        const auto& v = child(key);
        if (!v.is_string()) throw ConfigError(ConfigError::Kind::Schema, name(key) + " must be a string");
        return v.get<std::string>();
    }

    std::string string(const std::string& key, const std::string& fallback) { return has(key) ? string(key) : fallback; }

    Vec3 vec3(const std::string& key) {
        const auto& v = child(key);
        if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
            throw ConfigError(ConfigError::Kind::Schema, name(key) + " must be an array of 3 numbers");
        const Vec3 out{v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
        if (!std::isfinite(out.x) || !std::isfinite(out.y) || !std::isfinite(out.z))
            throw ConfigError(ConfigError::Kind::Value, name(key) + " must be finite");
        return out;
    }

    std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    std::string where() const { return path_.empty() ? "document" : path_; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key()))
                throw ConfigError(ConfigError::Kind::Schema, "unknown key '" + name(it.key()) + "'");
    }

private:
    const Json& j_;
    std::string path_;
    std::set<std::string> used_;
};

inline int checked_int(ObjectReader& r, const std::string& key) {
    const auto v = r.integer(key);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw ConfigError(ConfigError::Kind::Value, r.name(key) + " is out of range");
    return static_cast<int>(v);
}

/// Library validation messages name the key already; rethrow as value errors.
template <typename Fn>
void as_value_error(Fn&& fn) {
    try {
        fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw ConfigError(ConfigError::Kind::Value, e.what());
    }
}

inline LateralSection read_lateral(ObjectReader& dims, const std::string& key) {
    ObjectReader r(dims.child(key), dims.name(key));
    LateralSection s{r.positive("span"), r.positive("width")};
    r.finish();
    return s;
}

inline ScenarioTarget read_target(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    ScenarioTarget t;
    t.spec.class_name = r.string("class");
    const auto known = class_index(t.spec.class_name);
    if (r.has("category")) {
        t.spec.category = checked_int(r, "category");
    } else if (known) {
        t.spec.category = class_catalog()[*known].category;
    } else {
        throw ConfigError(ConfigError::Kind::Schema,
                          r.name("category") + " is required when class is not a catalog class ('" + t.spec.class_name + "')");
    }
    {
        ObjectReader dims(r.child("dims"), r.name("dims"));
        ObjectReader c(dims.child("central"), dims.name("central"));
        t.spec.central = {c.positive("length"), c.positive("width"), c.positive("height")};
        c.finish();
        if (dims.has("wing")) t.spec.wing = read_lateral(dims, "wing");
        if (dims.has("tail")) t.spec.tail = read_lateral(dims, "tail");
        dims.finish();
    }
    if (r.has("surface")) {
        ObjectReader s(r.child("surface"), r.name("surface"));
        const double g1 = s.number("gamma1"), g2 = s.number("gamma2");
        s.finish();
        as_value_error([&] { t.spec.surface = SurfaceCoefficients(g1, g2); });
    }
    t.position = r.vec3("position");
    t.velocity = r.vec3("velocity");
    r.finish();
    as_value_error([&] { validate(t.spec); });
    return t;
}

inline Json vec_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

}  // namespace detail

inline ScenarioConfig parse_scenario_json(const Json& doc) {
    using detail::ObjectReader;
    ScenarioConfig cfg;
    auto& s = cfg.scenario;
    ObjectReader root(doc, "");

    {
        ObjectReader b(root.child("beam"), "beam");
        const double wavelength = b.positive("wavelength");
        const double waist = b.positive("waist");
        const double amplitude = b.positive("amplitude");
        const double n0 = b.has("medium_index") ? b.positive("medium_index") : 1.0;
        s.link.rx_aperture_radius = b.has("rx_aperture_radius") ? b.positive("rx_aperture_radius") : 1e-2;
        b.finish();
        detail::as_value_error([&] { s.link.beam = GaussianBeam(wavelength, waist, amplitude, n0); });
    }
    {
        ObjectReader m(root.child("mesh"), "mesh");
        auto& c = s.mesh;
        c.tx_height = m.number("h");
        c.arrays_per_position = detail::checked_int(m, "L");
        c.rx_per_array = detail::checked_int(m, "M");
        c.steering_half_count = detail::checked_int(m, "N");
        c.rx_spacing = m.number("dx");
        c.array_spacing = m.number("dy");
        c.steering_step = m.number("dP");
        c.steering_hop_time = m.number("dt_s");
        c.dwell_time = m.number("t_dwell");
        c.grid_base_altitude = m.number("z_min");
        m.finish();
        detail::as_value_error([&] { validate(c); });
    }
    {
        ObjectReader d(root.child("detection"), "detection");
        s.detection.pfa = d.number("pfa");
        s.detection.noise_variance = d.number("noise_variance");
        s.detection.seed = d.unsigned_integer("seed");
        s.detection.noise = d.boolean("noise", true);
        d.finish();
        detail::as_value_error([&] { validate(s.detection); });
    }
    {
        const auto& targets = root.child("targets");
        if (!targets.is_array()) throw ConfigError(ConfigError::Kind::Schema, "targets must be an array");
        for (std::size_t k = 0; k < targets.size(); ++k)
            s.targets.push_back(detail::read_target(targets[k], "targets[" + std::to_string(k) + "]"));
    }
    if (root.has("classifier")) {
        ObjectReader c(root.child("classifier"), "classifier");
        const auto name = c.string("algorithm", "nb");
        const auto alg = parse_algorithm(name);
        if (!alg) throw ConfigError(ConfigError::Kind::Value, "classifier.algorithm must be one of nb, lda, knn, rf");
        s.classifier.algorithm = *alg;
        if (c.has("k_per_class")) {
            const auto k = c.integer("k_per_class");
            if (k < 1) throw ConfigError(ConfigError::Kind::Value, "classifier.k_per_class must be >= 1");
            s.classifier.k_per_class = static_cast<std::size_t>(k);
        }
        if (c.has("seed")) s.classifier.seed = c.unsigned_integer("seed");
        s.classifier.auto_tune = c.boolean("auto_tune", false);
        c.finish();
    }
    if (root.has("outputs")) {
        ObjectReader o(root.child("outputs"), "outputs");
        auto& p = cfg.outputs;
        p.track_log = o.string("track_log", p.track_log);
        p.summary = o.string("summary", p.summary);
        p.confusion = o.string("confusion", p.confusion);
        p.dataset = o.string("dataset", p.dataset);
        p.linkbudget = o.string("linkbudget", p.linkbudget);
        p.calibration = o.string("calibration", p.calibration);
        o.finish();
    }
    if (root.has("sequencing")) {
        ObjectReader q(root.child("sequencing"), "sequencing");
        s.sequencing.dt_seq = q.has("dt_seq") ? q.positive("dt_seq") : s.sequencing.dt_seq;
        if (q.has("ring_radius")) {
            s.sequencing.ring_radius = detail::checked_int(q, "ring_radius");
            if (s.sequencing.ring_radius < 0)
                throw ConfigError(ConfigError::Kind::Value, "sequencing.ring_radius must be >= 0");
        }
        q.finish();
    }
    root.finish();
    detail::as_value_error([&] { validate(s); });
    return cfg;
}

inline ScenarioConfig parse_scenario_text(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(ConfigError::Kind::Malformed, e.what());
    }
    return parse_scenario_json(doc);
}

inline ScenarioConfig parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(ConfigError::Kind::Io, path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

inline Json to_json(const ScenarioConfig& cfg) {
    const auto& s = cfg.scenario;
    Json j;
    j["beam"] = {{"wavelength", s.link.beam.wavelength()},
                 {"waist", s.link.beam.waist()},
                 {"amplitude", s.link.beam.amplitude()},
                 {"medium_index", s.link.beam.medium_index()},
                 {"rx_aperture_radius", s.link.rx_aperture_radius}};
    const auto& m = s.mesh;
    j["mesh"] = {{"h", m.tx_height},           {"L", m.arrays_per_position}, {"M", m.rx_per_array},
                 {"N", m.steering_half_count}, {"dx", m.rx_spacing},         {"dy", m.array_spacing},
                 {"dP", m.steering_step},      {"dt_s", m.steering_hop_time}, {"t_dwell", m.dwell_time},
                 {"z_min", m.grid_base_altitude}};
    j["detection"] = {{"pfa", s.detection.pfa},
                      {"noise_variance", s.detection.noise_variance},
                      {"seed", s.detection.seed},
                      {"noise", s.detection.noise}};
    j["targets"] = Json::array();
    for (const auto& t : s.targets) {
        Json dims;
        dims["central"] = {{"length", t.spec.central.length}, {"width", t.spec.central.width}, {"height", t.spec.central.height}};
        if (t.spec.wing) dims["wing"] = {{"span", t.spec.wing->span}, {"width", t.spec.wing->width}};
        if (t.spec.tail) dims["tail"] = {{"span", t.spec.tail->span}, {"width", t.spec.tail->width}};
        j["targets"].push_back({{"class", t.spec.class_name},
                                {"category", t.spec.category},
                                {"dims", dims},
                                {"surface", {{"gamma1", t.spec.surface.reflection}, {"gamma2", t.spec.surface.transmission}}},
                                {"position", detail::vec_json(t.position)},
                                {"velocity", detail::vec_json(t.velocity)}});
    }
    j["classifier"] = {{"algorithm", std::string(algorithm_name(s.classifier.algorithm))},
                       {"k_per_class", s.classifier.k_per_class},
                       {"seed", s.classifier.seed},
                       {"auto_tune", s.classifier.auto_tune}};
    const auto& p = cfg.outputs;
    j["outputs"] = {{"track_log", p.track_log},   {"summary", p.summary},       {"confusion", p.confusion},
                    {"dataset", p.dataset},       {"linkbudget", p.linkbudget}, {"calibration", p.calibration}};
    j["sequencing"] = {{"dt_seq", s.sequencing.dt_seq}, {"ring_radius", s.sequencing.ring_radius}};
    return j;
}

/// Canonical serialisation (sorted keys, shortest round-trip numbers).
inline std::string canonical_text(const ScenarioConfig& cfg) { return to_json(cfg).dump(); }

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string config_hash(const ScenarioConfig& cfg) { return hex64(fnv1a64(canonical_text(cfg))); }

struct Provenance {
    std::string config_hash;
    std::uint64_t seed;

    std::vector<std::string> comment_lines() const {
        return {"config_hash=" + config_hash, "seed=" + std::to_string(seed)};
    }
};

// ---------------------------------------------------------------------------
// Report serialisation

inline Json to_json(const ShapeEstimate& s) {
    Json j;
    j["detected"] = s.detected;
    j["central"] = {{"length", s.central.length}, {"width", s.central.width}, {"height", s.central.height}};
    j["wing"] = s.wing ? Json{{"span", s.wing->span}, {"width", s.wing->width}} : Json(nullptr);
    j["tail"] = s.tail ? Json{{"span", s.tail->span}, {"width", s.tail->width}} : Json(nullptr);
    j["blocked_mesh_count"] = s.blocked_mesh_count;
    j["per_mesh_counts"] = s.per_mesh_counts;
    return j;
}

inline Json to_json(const Kinematics& k) {
    auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    return {{"max_velocity", opt(k.max_velocity)}, {"pitch", opt(k.pitch)}, {"drift", opt(k.drift)}, {"max_altitude", k.max_altitude}};
}

inline Json features_json(const Features& f) {
    Json j;
    for (std::size_t n = 0; n < kFeatureCount; ++n) j[std::string(kFeatureNames[n])] = f[n];
    return j;
}

/// One JSON object per dwell, newline separated.
inline std::string track_log_jsonl(const SdcltReport& report, const Provenance& prov) {
    std::string out;
    for (const auto& d : report.dwells) {
        Json j;
        j["config_hash"] = prov.config_hash;
        j["seed"] = prov.seed;
        j["i"] = d.i;
        j["time"] = d.time;
        j["truth_cells"] = d.truth_cells;
        j["blocked_cells"] = d.blocked_cells;
        j["detected"] = d.detected;
        j["truth"] = Json::array();
        for (const auto& t : d.truth)
            j["truth"].push_back({{"target", t.target}, {"cells", t.cells}, {"centroid", detail::vec_json(t.centroid)}});
        j["observations"] = Json::array();
        for (const auto& [track, idx] : d.assignments) {
            const auto& o = report.tracks[track].observations[idx];
            j["observations"].push_back({{"track", track},
                                         {"component", o.component},
                                         {"center", detail::vec_json(o.center)},
                                         {"cells", o.cell_count},
                                         {"max_z", o.max_blocked_z},
                                         {"shape", to_json(o.shape)}});
        }
        out += j.dump();
        out += '\n';
    }
    return out;
}

inline Json summary_json(const SdcltReport& report, const Provenance& prov) {
    Json j;
    j["config_hash"] = prov.config_hash;
    j["seed"] = prov.seed;
    j["dwells"] = report.dwells.size();
    j["dwells_detected"] = std::count_if(report.dwells.begin(), report.dwells.end(), [](const auto& d) { return d.detected; });
    j["steering_speed"] = report.schedule.steering_speed;
    j["speed_ok"] = report.schedule.speed_ok;
    j["targets"] = Json::array();
    for (const auto& t : report.targets) {
        j["targets"].push_back({{"track", t.track_id},
                                {"class", t.class_name},
                                {"detections", report.tracks[t.track_id].observations.size()},
                                {"shape", to_json(t.shape)},
                                {"kinematics", to_json(t.kinematics)},
                                {"features", features_json(t.features)}});
    }
    j["class"] = report.targets.empty() ? Json(nullptr) : Json(report.targets.front().class_name);
    return j;
}

/// Writes via a sibling temporary file and rename, so readers never see a
/// partial artifact.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace meshranger
