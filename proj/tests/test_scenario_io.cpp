#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "meshranger/scenario_io.hpp"

using namespace meshranger;

namespace {

Json preset_json() {
    std::ifstream in(MESHRANGER_PRESET);
    return Json::parse(in);
}

ConfigError::Kind kind_of(const std::string& text) {
    try {
        parse_scenario_text(text);
    } catch (const ConfigError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "accepted: " << text;
    return ConfigError::Kind::Io;
}

std::string message_of(const Json& doc) {
    try {
        parse_scenario_json(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(ScenarioIo, PresetEcho) {
    const auto cfg = parse_scenario(MESHRANGER_PRESET);
    const auto& s = cfg.scenario;
    EXPECT_DOUBLE_EQ(s.link.beam.wavelength(), 1e-7);
    EXPECT_DOUBLE_EQ(s.link.beam.waist(), 2e-3);
    EXPECT_DOUBLE_EQ(s.detection.noise_variance, 1e-4);
    EXPECT_DOUBLE_EQ(s.detection.pfa, 0.1);
    EXPECT_EQ(s.mesh.arrays_per_position, 3);
    EXPECT_EQ(s.mesh.rx_per_array, 21);
    ASSERT_EQ(s.targets.size(), 1u);
    EXPECT_EQ(s.targets[0].spec.category, 3);  // from the catalog entry
    EXPECT_EQ(s.targets[0].spec.class_name, "cruise missile");
    EXPECT_EQ(cfg.outputs, OutputPaths{});
}

TEST(ScenarioIo, ZeroMeshCountNamesKey) {
    auto doc = preset_json();
    doc["mesh"]["L"] = 0;
    const auto msg = message_of(doc);
    EXPECT_NE(msg.find("mesh.L"), std::string::npos) << msg;
    EXPECT_EQ(msg.rfind("invalid value: ", 0), 0u) << msg;
}

TEST(ScenarioIo, UnknownKeyRejected) {
    auto doc = preset_json();
    doc["mesh"]["foo"] = 1;
    EXPECT_NE(message_of(doc).find("unknown key 'mesh.foo'"), std::string::npos);
    doc = preset_json();
    doc["extra"] = true;
    EXPECT_NE(message_of(doc).find("extra"), std::string::npos);
    doc = preset_json();
    doc["targets"][0]["dims"]["central"]["depth"] = 1;
    EXPECT_NE(message_of(doc).find("depth"), std::string::npos);
}

TEST(ScenarioIo, ErrorFamiliesAreDistinct) {
    EXPECT_EQ(kind_of("{\"beam\": "), ConfigError::Kind::Malformed);
    auto missing = preset_json();
    missing.erase("mesh");
    EXPECT_EQ(kind_of(missing.dump()), ConfigError::Kind::Schema);
    auto wrong_type = preset_json();
    wrong_type["mesh"]["h"] = "tall";
    EXPECT_EQ(kind_of(wrong_type.dump()), ConfigError::Kind::Schema);
    auto bad_value = preset_json();
    bad_value["detection"]["pfa"] = 1.5;
    EXPECT_EQ(kind_of(bad_value.dump()), ConfigError::Kind::Value);
    auto bad_alg = preset_json();
    bad_alg["classifier"]["algorithm"] = "svm";
    EXPECT_EQ(kind_of(bad_alg.dump()), ConfigError::Kind::Value);
    try {
        parse_scenario("/nonexistent/scenario.json");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.kind(), ConfigError::Kind::Io);
    }
}

TEST(ScenarioIo, NonIntegerCountRejected) {
    auto doc = preset_json();
    doc["mesh"]["M"] = 21.5;
    EXPECT_THROW(parse_scenario_json(doc), ConfigError);
}

TEST(ScenarioIo, CategoryRulesChecked) {
    auto doc = preset_json();
    doc["targets"][0]["category"] = 4;
    EXPECT_THROW(parse_scenario_json(doc), ConfigError);
    doc = preset_json();
    doc["targets"][0]["surface"]["gamma1"] = 0.9;
    doc["targets"][0]["surface"]["gamma2"] = 0.9;
    EXPECT_THROW(parse_scenario_json(doc), ConfigError);
}

TEST(ScenarioIo, RoundTripIsIdentity) {
    const auto cfg = parse_scenario(MESHRANGER_PRESET);
    const auto again = parse_scenario_text(canonical_text(cfg));
    EXPECT_EQ(canonical_text(again), canonical_text(cfg));
    EXPECT_EQ(config_hash(again), config_hash(cfg));
    EXPECT_EQ(config_hash(cfg).size(), 16u);
}

TEST(ScenarioIo, HashSensitiveToValues) {
    auto doc = preset_json();
    const auto a = config_hash(parse_scenario_json(doc));
    doc["detection"]["seed"] = 8;
    EXPECT_NE(config_hash(parse_scenario_json(doc)), a);
}

TEST(ScenarioIo, ReportSerialisation) {
    auto s = parse_scenario(MESHRANGER_PRESET).scenario;
    const auto report = run_sdclt(s);
    const Provenance prov{"abc", 7};
    const auto summary = summary_json(report, prov);
    EXPECT_EQ(summary["class"], "cruise missile");
    const auto log = track_log_jsonl(report, prov);
    std::istringstream lines(log);
    std::string line;
    std::size_t count = 0;
    while (std::getline(lines, line)) {
        EXPECT_NO_THROW(Json::parse(line)) << line;
        ++count;
    }
    EXPECT_GE(count, report.dwells.size());
}

TEST(ScenarioIo, AtomicWrite) {
    const auto dir = std::filesystem::temp_directory_path() / "meshranger_io_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.txt";
    write_file_atomic(path, "hello\n");
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    EXPECT_EQ(text, "hello\n");
    EXPECT_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
    std::filesystem::remove_all(dir);
}
