#include "nss/config.hpp"
#include "nss/io.hpp"
#include "nss/pipeline.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>

using namespace nss;
namespace fs = std::filesystem;

namespace {

class TempDir : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("nss_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path dir_;
};

std::string error_of(const std::string& json) {
    try {
        experiment_from_json(json);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(ExperimentConfig, JsonRoundTripIsStable) {
    ExperimentConfig c;
    c.seed = 42;
    c.synth.duration_s = 33.0;
    c.synth.drift = DriftConfig{2, 0.3};
    c.nss.layer1.bit_width = 4;
    c.nss.layer2.neuron = NeuronModel::Lif;
    c.detector = DetectorKind::Neo;
    c.eval.mode = MatchMode::Exclusive;
    const std::string text = to_json(c);
    const ExperimentConfig back = experiment_from_json(text);
    EXPECT_EQ(to_json(back), text);
    EXPECT_EQ(back.seed, 42u);
    ASSERT_TRUE(back.synth.drift.has_value());
    EXPECT_EQ(back.synth.drift->unit_id, 2);
    EXPECT_EQ(back.nss.layer1.bit_width, 4);
    EXPECT_EQ(back.detector, DetectorKind::Neo);
    EXPECT_EQ(to_json(experiment_from_json(to_json(ExperimentConfig{}))), to_json(ExperimentConfig{}));
}

TEST(ExperimentConfig, KeyOrderIsStable) {
    const auto j = nlohmann::ordered_json::parse(to_json(ExperimentConfig{}));
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys.front(), "seed");
    EXPECT_EQ(keys, (std::vector<std::string>{"seed", "synth", "detection", "nss", "baseline", "eval"}));
}

TEST(ExperimentConfig, MissingKeysKeepDefaults) {
    const auto c = experiment_from_json(R"({"synth": {"duration_s": 12.5}})");
    EXPECT_DOUBLE_EQ(c.synth.duration_s, 12.5);
    EXPECT_EQ(c.synth.n_units, 5);
    EXPECT_EQ(c.nss.layer1.bit_width, NssConfig{}.layer1.bit_width);
}

TEST(ExperimentConfig, ErrorsNameTheFieldPath) {
    EXPECT_NE(error_of(R"({"synth": {"durration_s": 1}})").find("synth.durration_s"), std::string::npos);
    EXPECT_NE(error_of(R"({"nss": {"layer1": {"lambda": "big"}}})").find("nss.layer1.lambda"), std::string::npos);
    EXPECT_NE(error_of(R"({"nss": {"layer2": {"neuron": "relu"}}})").find("nss.layer2.neuron"), std::string::npos);
    EXPECT_NE(error_of(R"({"detection": {"detector": "wavelet"}})").find("detector"), std::string::npos);
    EXPECT_NE(error_of(R"({"seed": -3})").find("seed"), std::string::npos);
    EXPECT_NE(error_of("{not json").find("not valid JSON"), std::string::npos);
    EXPECT_FALSE(error_of("[1, 2]").empty());
}

TEST(ExperimentConfig, ValidationRejectsInconsistentDimensions) {
    ExperimentConfig c;
    c.nss.input_dim = 100;
    EXPECT_THROW(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.eval.tol_ms = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    EXPECT_NO_THROW(ExperimentConfig{}.validate());
}

TEST(ResolveSeeds, FillsOnlyZeroSeedsAndIsDeterministic) {
    ExperimentConfig c;
    c.seed = 9;
    const auto a = resolve_seeds(c);
    EXPECT_NE(a.synth.seed, 0u);
    EXPECT_NE(a.nss.seed, 0u);
    EXPECT_NE(a.synth.seed, a.nss.seed);
    EXPECT_EQ(resolve_seeds(c).synth.seed, a.synth.seed);
    c.synth.seed = 1234;
    EXPECT_EQ(resolve_seeds(c).synth.seed, 1234u);
    c.seed = 10;
    c.synth.seed = 0;
    EXPECT_NE(resolve_seeds(c).synth.seed, a.synth.seed);
}

TEST(NssConfigJson, RoundTrip) {
    NssConfig c;
    c.layer2.lambda = 0.05;
    c.learn.batch_size = 8;
    const auto back = nss_config_from_json(to_json(c));
    EXPECT_EQ(to_json(back), to_json(c));
    EXPECT_THROW(nss_config_from_json(R"({"learn": {"batch_size": 1.5}})"), ConfigError);
}

TEST(FormatDouble, ShortestRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(60.0), "60");
    for (double v : {1.0 / 3.0, 1e-300, 123456.789, -2.5e-7}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST_F(TempDir, RecordingRoundTripAndSidecar) {
    SampleMatrix s(3, 5);
    for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = 0.25 * static_cast<double>(i) - 1.0;
    const Recording rec(s, 20000.0);
    const fs::path p = dir_ / "r.bin";
    write_recording(p, rec);
    EXPECT_EQ(sidecar_path(p), dir_ / "r.meta.json");
    EXPECT_EQ(fs::file_size(p), 3u * 5u * 4u);
    const auto meta = nlohmann::json::parse(read_text_file(sidecar_path(p)));
    EXPECT_EQ(meta["n_channels"], 3);
    EXPECT_EQ(meta["sample_rate_hz"], 20000.0);
    const Recording back = read_recording(p);
    EXPECT_EQ(back.samples, rec.samples);
    EXPECT_DOUBLE_EQ(back.sample_rate, 20000.0);
    EXPECT_EQ(back.units, "uV");
}

TEST_F(TempDir, RecordingErrors) {
    const fs::path p = dir_ / "r.bin";
    write_recording(p, Recording(SampleMatrix::Zero(2, 4), 1000.0));
    fs::remove(sidecar_path(p));
    EXPECT_THROW(read_recording(p), IoError);
    write_recording(p, Recording(SampleMatrix::Zero(2, 4), 1000.0));
    {
        std::ofstream os(p, std::ios::binary | std::ios::app);
        os.put('x');
    }
    EXPECT_THROW(read_recording(p), SchemaError);
    write_text_file(sidecar_path(p), R"({"sample_rate_hz": 0, "n_channels": 2, "units": "uV"})");
    EXPECT_THROW(read_recording(p), SchemaError);
}

TEST_F(TempDir, SpikeTrainCsvRoundTrip) {
    const std::vector<SpikeTrain> trains{{0, {0.1, 0.25}}, {3, {1.0 / 3.0}}};
    const fs::path p = dir_ / "gt.csv";
    write_spike_trains_csv(p, trains);
    EXPECT_EQ(read_text_file(p).substr(0, 15), "unit_id,time_s\n");
    const auto back = read_spike_trains_csv(p);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].times, trains[0].times);
    EXPECT_EQ(back[1].unit_id, 3);
    EXPECT_EQ(back[1].times, trains[1].times);
}

TEST_F(TempDir, LabelsCsvRoundTrip) {
    const std::vector<LabeledEvent> ev{{0.5, 2}, {0.75, kUnassigned}};
    const fs::path p = dir_ / "labels.csv";
    write_labels_csv(p, ev);
    EXPECT_EQ(read_text_file(p), "time_s,label\n0.5,2\n0.75,-1\n");
    const auto back = read_labels_csv(p);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].label, kUnassigned);
}

TEST_F(TempDir, CsvSchemaErrorsCarryLineNumbers) {
    const fs::path p = dir_ / "bad.csv";
    const auto line_of = [&](const std::string& body, auto reader) -> long {
        write_text_file(p, body);
        try {
            reader(p);
        } catch (const SchemaError& e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of("time,label\n", read_labels_csv), 1);
    EXPECT_EQ(line_of("", read_labels_csv), 1);
    EXPECT_EQ(line_of("time_s,label\n0.1,1\n0.2,x\n", read_labels_csv), 3);
    EXPECT_EQ(line_of("time_s,label\n0.1,1,4\n", read_labels_csv), 2);
    EXPECT_EQ(line_of("time_s,label\n0.1,-2\n", read_labels_csv), 2);
    EXPECT_EQ(line_of("unit_id,time_s\n0,0.2\n0,0.1\n", read_spike_trains_csv), 3);
    EXPECT_EQ(line_of("unit_id,time_s\n0,0.2\n1,abc\n", read_spike_trains_csv), 3);
    write_text_file(p, "time_s,label\n0.1,x\n");
    try {
        read_labels_csv(p);
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("bad.csv"), std::string::npos);
    }
    EXPECT_THROW(read_labels_csv(dir_ / "missing.csv"), IoError);
}
