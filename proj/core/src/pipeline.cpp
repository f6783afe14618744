#include "nss/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

namespace nss {

ExperimentConfig resolve_seeds(ExperimentConfig cfg) {
    if (cfg.synth.seed == 0) cfg.synth.seed = derive_seed(cfg.seed, 100);
    if (cfg.nss.seed == 0) cfg.nss.seed = derive_seed(cfg.seed, 200);
    return cfg;
}

std::uint64_t baseline_seed(const ExperimentConfig& cfg) { return derive_seed(cfg.seed, 300); }

Preprocessed preprocess(const Recording& raw, const ExperimentConfig& cfg) {
    cfg.detection.validate(raw.sample_rate);
    Preprocessed out{bandpass_filter(raw, cfg.detection), {}, {}, {}};
    if (cfg.detector == DetectorKind::Mad) {
        out.thresholds = mad_threshold(out.filtered, cfg.detection);
        out.detections = detect_spikes(out.filtered, out.thresholds, cfg.detection);
    } else {
        out.detections = neo_detect(out.filtered, cfg.detection, cfg.neo);
    }
    out.waveforms = extract_waveforms(out.filtered, out.detections, cfg.detection);
    return out;
}

double NssRun::spikes_per_waveform() const {
    if (stats.empty()) return 0.0;
    long total = 0;
    for (const auto& s : stats) total += s.nonzero_emissions;
    return static_cast<double>(total) / static_cast<double>(stats.size());
}

NssRun run_nss(std::span<const SpikeWaveform> waveforms, const ExperimentConfig& cfg,
               std::optional<NssModel> pretrained, bool freeze) {
    if (freeze && !pretrained) throw ConfigError("freeze requires a pretrained model");
    NssModel model = pretrained ? std::move(*pretrained) : NssModel(cfg.nss);
    if (!waveforms.empty() && waveforms.front().vector.size() != model.config().input_dim) {
        throw DimensionError("waveform length " + std::to_string(waveforms.front().vector.size()) +
                             " does not match model input_dim " + std::to_string(model.config().input_dim));
    }
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<LabelResult> results;
    NssRun run{std::move(model), {}, {}, 0, 0.0};
    if (freeze) {
        results = nss_infer_all(run.model, waveforms, &run.stats);
    } else {
        TrainingSummary summary;
        results = nss_train_online(run.model, waveforms, &summary);
        run.stats = std::move(summary.stats);
        run.updates = summary.updates;
    }
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    run.labels.reserve(results.size());
    for (const auto& r : results) run.labels.push_back({r.timestamp, r.label});
    return run;
}

MatchReport score(const std::vector<SpikeTrain>& truth, std::span<const LabeledEvent> labels,
                  const ExperimentConfig& cfg) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const double t0 = cfg.eval.eval_start_s;
    return evaluate_sorting(restrict_trains(truth, t0, kInf), restrict_events(labels, t0, kInf),
                            {cfg.eval.tol_ms, cfg.eval.mode});
}

MatchReport score_final_segment(const std::vector<SpikeTrain>& truth, std::span<const LabeledEvent> labels,
                                const ExperimentConfig& cfg) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const auto n = static_cast<std::size_t>(cfg.eval.final_segment);
    const std::size_t first = labels.size() > n ? labels.size() - n : 0;
    const auto segment = labels.subspan(first);
    const double t0 = segment.empty() ? 0.0 : segment.front().time_s - cfg.eval.tol_ms * 1e-3;
    return evaluate_sorting(restrict_trains(truth, t0, kInf), segment, {cfg.eval.tol_ms, cfg.eval.mode});
}

CellResult run_cell(const ExperimentConfig& in) {
    const ExperimentConfig cfg = resolve_seeds(in);
    cfg.validate();
    const SyntheticRecording synth = generate_recording(cfg.synth);
    const Preprocessed pre = preprocess(synth.recording, cfg);
    const NssRun run = run_nss(pre.waveforms, cfg);
    const MatchReport report = score(synth.truth.spike_trains, run.labels, cfg);
    CellResult cell;
    cell.mean_f1 = report.mean_f1();
    cell.spikes_per_waveform = run.spikes_per_waveform();
    cell.sparsity = sparsity_metrics(run.stats);
    cell.detection_precision = report.detection_precision;
    cell.waveforms = pre.waveforms.size();
    return cell;
}

}  // namespace nss
