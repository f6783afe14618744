#pragma once

#include "nss/config.hpp"

#include <optional>

namespace nss {

/// Fills component seeds left at 0 from the root seed.
ExperimentConfig resolve_seeds(ExperimentConfig cfg);

std::uint64_t baseline_seed(const ExperimentConfig& cfg);

struct Preprocessed {
    Recording filtered;
    ChannelThresholds thresholds;
    std::vector<Detection> detections;
    std::vector<SpikeWaveform> waveforms;
};

/// Band-pass, detect (MAD or NEO) and cut windows.
Preprocessed preprocess(const Recording& raw, const ExperimentConfig& cfg);

struct NssRun {
    NssModel model;
    std::vector<LabeledEvent> labels;
    std::vector<PresentationStats> stats;
    long updates = 0;
    double seconds = 0.0;

    double spikes_per_waveform() const;
};

/// Online train+infer over the stream. With `freeze` the given model is
/// only used for inference (a fresh model must not be frozen).
NssRun run_nss(std::span<const SpikeWaveform> waveforms, const ExperimentConfig& cfg,
               std::optional<NssModel> pretrained = std::nullopt, bool freeze = false);

/// Scores labels against ground truth after eval_start_s.
MatchReport score(const std::vector<SpikeTrain>& truth, std::span<const LabeledEvent> labels,
                  const ExperimentConfig& cfg);

/// Same, restricted to the last `final_segment` labeled events.
MatchReport score_final_segment(const std::vector<SpikeTrain>& truth, std::span<const LabeledEvent> labels,
                                const ExperimentConfig& cfg);

struct CellResult {
    double mean_f1 = 0.0;
    double spikes_per_waveform = 0.0;
    SparsityMetrics sparsity;
    double detection_precision = 0.0;
    std::size_t waveforms = 0;
};

/// generate → preprocess → NSS → score, all from cfg.seed.
CellResult run_cell(const ExperimentConfig& cfg);

}  // namespace nss
