// meshranger command-line front end.
//
//   meshranger simulate   <config> [--seed S] [--out DIR] [--no-noise] [--algorithm A] [--k K] [--auto-tune]
//   meshranger dataset    [--config C] [--k K] [--seed S] [--out DIR]
//   meshranger train-eval [--config C] [--k K] [--seed S] [--algorithm A] [--auto-tune] [--out DIR]
//   meshranger linkbudget <config> [--out DIR]
//   meshranger calibrate  <config> [--seed S] [--trials T] [--out DIR]
//
// Exit status: 0 success, 1 configuration or usage error, 2 runtime failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "meshranger/meshranger.hpp"

namespace fs = std::filesystem;
using namespace meshranger;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    bool no_noise = false;
    std::optional<std::size_t> k;
    std::string algorithm;
    bool auto_tune = false;
    std::size_t trials = 100000;
};

std::optional<ScenarioConfig> load(const Options& o, bool required) {
    if (o.config.empty()) {
        if (required) throw ConfigError(ConfigError::Kind::Io, "a scenario config is required (--config or positional)");
        return std::nullopt;
    }
    return parse_scenario(o.config);
}

/// Classifier settings from the config, overridden by flags. --seed applies
/// only where it names the classifier seed.
ClassifierConfig classifier_settings(const Options& o, const std::optional<ScenarioConfig>& cfg, bool seed_flag) {
    ClassifierConfig c = cfg ? cfg->scenario.classifier : ClassifierConfig{};
    if (seed_flag && o.seed) c.seed = *o.seed;
    if (o.k) {
        if (*o.k < 1) throw ConfigError(ConfigError::Kind::Value, "--k must be >= 1");
        c.k_per_class = *o.k;
    }
    if (!o.algorithm.empty()) {
        const auto a = parse_algorithm(o.algorithm);
        if (!a) throw ConfigError(ConfigError::Kind::Value, "--algorithm must be one of nb, lda, knn, rf");
        c.algorithm = *a;
    }
    if (o.auto_tune) c.auto_tune = true;
    return c;
}

/// Hash of what a command actually used: the scenario (if any) plus overrides.
std::string provenance_hash(const std::optional<ScenarioConfig>& cfg, const Json& extra) {
    Json j = cfg ? to_json(*cfg) : Json::object();
    j["invocation"] = extra;
    return hex64(fnv1a64(j.dump()));
}

Json classifier_json(const ClassifierConfig& c) {
    return {{"algorithm", std::string(algorithm_name(c.algorithm))},
            {"k_per_class", c.k_per_class},
            {"seed", c.seed},
            {"auto_tune", c.auto_tune}};
}

fs::path output_path(const Options& o, const std::string& name) { return fs::path(o.out) / name; }

int cmd_simulate(const Options& o) {
    auto cfg = *load(o, true);
    auto& s = cfg.scenario;
    if (o.seed) s.detection.seed = *o.seed;
    if (o.no_noise) s.detection.noise = false;
    s.classifier = classifier_settings(o, cfg, false);

    const Provenance prov{config_hash(cfg), s.detection.seed};
    const auto report = run_sdclt(s);
    write_file_atomic(output_path(o, cfg.outputs.track_log), track_log_jsonl(report, prov));
    const auto summary = summary_json(report, prov);
    write_file_atomic(output_path(o, cfg.outputs.summary), summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_dataset(const Options& o) {
    const auto cfg = load(o, false);
    const auto c = classifier_settings(o, cfg, true);
    const auto set = synthesize_dataset(c.k_per_class, c.seed);
    const Provenance prov{provenance_hash(cfg, {{"command", "dataset"}, {"classifier", classifier_json(c)}}), c.seed};
    std::ostringstream csv;
    write_training_csv(csv, set, prov.comment_lines());
    const auto path = output_path(o, cfg ? cfg->outputs.dataset : OutputPaths{}.dataset);
    write_file_atomic(path, csv.str());
    std::cout << "wrote " << set.size() << " rows to " << path.string() << "\n";
    return 0;
}

int cmd_train_eval(const Options& o) {
    const auto cfg = load(o, false);
    const auto c = classifier_settings(o, cfg, true);
    const auto train_set = synthesize_dataset(c.k_per_class, c.seed);
    const auto test_set = synthesize_dataset(c.k_per_class, c.seed + 1);
    Hyperparams hp;
    hp.seed = c.seed;
    std::optional<TuningResult> tuned;
    if (c.auto_tune) {
        tuned = tune(c.algorithm, train_set, hp);
        hp = tuned->best;
    }
    const auto model = train(c.algorithm, train_set, hp);
    const auto cm = evaluate(model, test_set);

    const Provenance prov{provenance_hash(cfg, {{"command", "train-eval"}, {"classifier", classifier_json(c)}}), c.seed};
    std::ostringstream csv;
    write_confusion_csv(csv, cm, prov.comment_lines());
    const OutputPaths paths = cfg ? cfg->outputs : OutputPaths{};
    write_file_atomic(output_path(o, paths.confusion), csv.str());

    Json metrics{{"config_hash", prov.config_hash},
                 {"seed", prov.seed},
                 {"algorithm", std::string(algorithm_name(c.algorithm))},
                 {"train_seed", c.seed},
                 {"test_seed", c.seed + 1},
                 {"accuracy", cm.accuracy()},
                 {"errors", cm.errors()},
                 {"hyperparams", {{"knn_k", hp.knn_k}, {"rf_trees", hp.rf_trees}, {"rf_min_leaf", hp.rf_min_leaf}}}};
    if (tuned) metrics["cv_accuracy"] = tuned->cv_accuracy;
    Json recall = Json::object();
    for (std::size_t k = 0; k < cm.classes(); ++k) recall[cm.class_names()[k]] = cm.recall(k);
    metrics["recall"] = recall;
    write_file_atomic(output_path(o, "metrics.json"), metrics.dump(2) + "\n");
    std::cout << metrics.dump(2) << "\n";
    return 0;
}

int cmd_linkbudget(const Options& o) {
    const auto cfg = *load(o, true);
    const auto& s = cfg.scenario;
    const double gamma = s.detection.threshold_db();
    const auto& beam = s.link.beam;
    const Provenance prov{config_hash(cfg), s.detection.seed};

    std::ostringstream csv;
    for (const auto& line : prov.comment_lines()) csv << "# " << line << '\n';
    csv << "i,j,distance_m,rayleigh_range_m,beam_width_m,power_w,snr_db,threshold_db\n";
    std::cout << std::setw(3) << "i" << std::setw(3) << "j" << std::setw(12) << "d [m]" << std::setw(12) << "x_R [m]"
              << std::setw(12) << "w_b [m]" << std::setw(14) << "P [W]" << std::setw(10) << "SNR [dB]" << std::setw(10)
              << "gamma [dB]" << "\n";
    const int n = s.mesh.steering_half_count;
    for (int i = -n; i <= n; ++i)
        for (int j = 1; j <= s.mesh.arrays_per_position; ++j) {
            const double d = slant_range(s.mesh, i, j);
            const auto lb = link_budget(beam, s.link.rx_aperture_radius, d, s.detection.noise_variance);
            csv << i << ',' << j << ',' << format_double(d) << ',' << format_double(beam.rayleigh_range()) << ','
                << format_double(beam.width_at(d)) << ',' << format_double(lb.received_power) << ','
                << format_double(lb.snr_db) << ',' << format_double(gamma) << '\n';
            std::cout << std::setw(3) << i << std::setw(3) << j << std::fixed << std::setprecision(2) << std::setw(12) << d
                      << std::setw(12) << beam.rayleigh_range() << std::setprecision(5) << std::setw(12) << beam.width_at(d)
                      << std::scientific << std::setprecision(3) << std::setw(14) << lb.received_power << std::fixed
                      << std::setprecision(2) << std::setw(10) << lb.snr_db << std::setw(10) << gamma << "\n";
        }
    // The reference row: receiver straight below the transmitter at slant range h.
    const auto ref = link_budget(beam, s.link.rx_aperture_radius, s.mesh.tx_height, s.detection.noise_variance);
    std::cout << std::defaultfloat << std::setprecision(6) << "reference d=" << s.mesh.tx_height
              << " m: x_R=" << beam.rayleigh_range() << " m P=" << ref.received_power << " W SNR=" << ref.snr_db
              << " dB gamma=" << gamma << " dB\n";
    write_file_atomic(output_path(o, cfg.outputs.linkbudget), csv.str());
    return 0;
}

int cmd_calibrate(const Options& o) {
    auto cfg = *load(o, true);
    auto& s = cfg.scenario;
    if (o.seed) s.detection.seed = *o.seed;
    if (o.trials < 1) throw ConfigError(ConfigError::Kind::Value, "--trials must be >= 1");
    const Provenance prov{config_hash(cfg), s.detection.seed};
    const double gamma_lin = s.detection.threshold_linear();

    Json rows = Json::array();
    const int n = s.mesh.steering_half_count;
    std::uint64_t stream = 0;
    for (int i = -n; i <= n; ++i)
        for (int j = 1; j <= s.mesh.arrays_per_position; ++j, ++stream) {
            const double snr = s.link.clear_power(s.mesh, i, j) / s.detection.noise_variance;
            Rng rng(derive_seed(s.detection.seed, stream));
            const auto est = empirical_false_rate(s.detection, snr, o.trials, rng);
            const double model = model_false_rate(snr, gamma_lin);
            rows.push_back({{"i", i},
                            {"j", j},
                            {"clear_snr_db", to_db(snr)},
                            {"empirical_false_rate", est.rate},
                            {"standard_error", est.standard_error},
                            {"model_false_rate", model},
                            {"z_score", est.standard_error > 0 ? (est.rate - model) / est.standard_error : 0.0}});
        }
    Json report{{"config_hash", prov.config_hash},
                {"seed", prov.seed},
                {"pfa", s.detection.pfa},
                {"threshold_db", s.detection.threshold_db()},
                {"trials", o.trials},
                {"links", rows}};
    write_file_atomic(output_path(o, cfg.outputs.calibration), report.dump(2) + "\n");
    std::cout << report.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"meshranger: laser-mesh aerial target simulator"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config,config", o.config, "scenario JSON");
        sub->add_option("--out", o.out, "output directory");
    };
    auto add_classifier = [&](CLI::App* sub) {
        sub->add_option("--k", o.k, "samples per class");
        sub->add_option("--algorithm", o.algorithm, "nb | lda | knn | rf");
        sub->add_flag("--auto-tune", o.auto_tune, "grid search by stratified 5-fold CV");
    };

    auto* sim = app.add_subcommand("simulate", "run the steering sweep and classify tracks");
    add_common(sim);
    add_classifier(sim);
    sim->add_option("--seed", o.seed, "detection noise master seed");
    sim->add_flag("--no-noise", o.no_noise, "deterministic detection decisions");

    auto* data = app.add_subcommand("dataset", "write a synthetic training set as CSV");
    add_common(data);
    data->add_option("--k", o.k, "samples per class");
    data->add_option("--seed", o.seed, "dataset seed");

    auto* te = app.add_subcommand("train-eval", "train on one synthetic set, evaluate on a fresh one");
    add_common(te);
    add_classifier(te);
    te->add_option("--seed", o.seed, "training seed (test uses seed + 1)");

    auto* lb = app.add_subcommand("linkbudget", "link budget table for every mesh link");
    add_common(lb);

    auto* cal = app.add_subcommand("calibrate", "Monte-Carlo false-alarm rate per link");
    add_common(cal);
    cal->add_option("--seed", o.seed, "Monte-Carlo seed");
    cal->add_option("--trials", o.trials, "trials per link");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*sim) return cmd_simulate(o);
        if (*data) return cmd_dataset(o);
        if (*te) return cmd_train_eval(o);
        if (*lb) return cmd_linkbudget(o);
        if (*cal) return cmd_calibrate(o);
    } catch (const ConfigError& e) {
        std::cerr << "meshranger: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "meshranger: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
