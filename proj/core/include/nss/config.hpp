#pragma once

#include "nss/baseline.hpp"
#include "nss/eval.hpp"
#include "nss/network.hpp"
#include "nss/signal.hpp"
#include "nss/synth.hpp"

#include <string>

namespace nss {

enum class DetectorKind { Mad, Neo };

DetectorKind parse_detector(std::string_view name);
std::string_view to_string(DetectorKind kind);

struct EvalConfig {
    double tol_ms = 1.0;
    /// Events before this time are excluded from scoring (training window).
    double eval_start_s = 60.0;
    MatchMode mode = MatchMode::BestPerUnit;
    /// Size of the trailing segment scored separately (drift analysis).
    int final_segment = 100;
};

/// Everything needed to reproduce one experiment. Component seeds are
/// derived from `seed` when the pipeline runs.
struct ExperimentConfig {
    std::uint64_t seed = 1;
    SynthConfig synth;
    DetectionConfig detection;
    DetectorKind detector = DetectorKind::Mad;
    NeoConfig neo;
    NssConfig nss;
    BaselineConfig baseline;
    EvalConfig eval;

    void validate() const;
};

/// Stable key order; every field is written.
std::string to_json(const ExperimentConfig& cfg);
std::string to_json(const NssConfig& cfg);

/// Missing keys keep their defaults; unknown keys and bad values raise
/// ConfigError naming the field path (e.g. "nss.layer1.lambda").
ExperimentConfig experiment_from_json(const std::string& text);
NssConfig nss_config_from_json(const std::string& text);

}  // namespace nss
