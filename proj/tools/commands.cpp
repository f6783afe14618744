#include "commands.hpp"

#include "nss/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

namespace nss::cli {

using json = nlohmann::ordered_json;

namespace {

void prepare_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_snapshot(const ExperimentConfig& cfg, const fs::path& out_dir) {
    write_text_file(out_dir / kConfigSnapshot, to_json(cfg));
}

json sparsity_json(const SparsityMetrics& s) {
    json j;
    j["temporal"] = s.temporal;
    j["spatial"] = s.spatial;
    return j;
}

json label_counts(std::span<const LabeledEvent> labels) {
    std::map<int, long> counts;
    for (const auto& e : labels) ++counts[e.label];
    json j = json::object();
    for (const auto& [label, n] : counts) j[std::to_string(label)] = n;
    return j;
}

json spike_stats(std::span<const PresentationStats> stats) {
    json j;
    if (stats.empty()) {
        j["mean"] = 0.0;
        j["min"] = 0;
        j["max"] = 0;
        return j;
    }
    long total = 0, lo = stats.front().nonzero_emissions, hi = lo;
    for (const auto& s : stats) {
        total += s.nonzero_emissions;
        lo = std::min(lo, s.nonzero_emissions);
        hi = std::max(hi, s.nonzero_emissions);
    }
    j["mean"] = static_cast<double>(total) / static_cast<double>(stats.size());
    j["min"] = lo;
    j["max"] = hi;
    return j;
}

json thresholds_json(const ChannelThresholds& t) {
    json j;
    j["values"] = t.values;
    j["degenerate_channels"] = t.degenerate_channels;
    return j;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

}  // namespace

ExperimentConfig load_config(const std::optional<fs::path>& config_file, const Overrides& flags) {
    ExperimentConfig cfg;
    if (config_file) cfg = experiment_from_json(read_text_file(*config_file));
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.bits) {
        cfg.nss.layer1.bit_width = *flags.bits;
        cfg.nss.layer2.bit_width = *flags.bits;
    }
    if (flags.neuron) {
        const NeuronModel m = parse_neuron_model(*flags.neuron);
        cfg.nss.layer1.neuron = m;
        cfg.nss.layer2.neuron = m;
    }
    if (flags.train_window_s) {
        cfg.baseline.train_window_s = *flags.train_window_s;
        cfg.eval.eval_start_s = *flags.train_window_s;
    }
    if (flags.detector) cfg.detector = parse_detector(*flags.detector);
    cfg = resolve_seeds(cfg);
    cfg.validate();
    return cfg;
}

void cmd_generate(const ExperimentConfig& cfg, const fs::path& out_dir) {
    prepare_out_dir(out_dir);
    const SyntheticRecording synth = generate_recording(cfg.synth);
    write_recording(out_dir / "recording.bin", synth.recording);
    write_spike_trains_csv(out_dir / "ground_truth.csv", synth.truth.spike_trains);

    std::ostringstream units;
    units << "unit_id,peak_channel,peak_amplitude_uv,snr,rate_hz,spike_count\n";
    for (std::size_t u = 0; u < synth.truth.templates.size(); ++u) {
        const auto& t = synth.truth.templates[u];
        units << u << ',' << t.peak_channel << ',' << format_double(t.peak_amplitude) << ','
              << format_double(synth.truth.snrs[u]) << ',' << format_double(synth.truth.rates_hz[u]) << ','
              << synth.truth.spike_trains[u].times.size() << '\n';
    }
    write_text_file(out_dir / "units.csv", units.str());

    std::ostringstream sim;
    sim << "unit_a,unit_b,cosine_similarity\n";
    for (std::size_t a = 0; a < synth.truth.templates.size(); ++a) {
        const Vector fa = synth.truth.templates[a].flattened();
        for (std::size_t b = a + 1; b < synth.truth.templates.size(); ++b) {
            const Vector fb = synth.truth.templates[b].flattened();
            sim << a << ',' << b << ','
                << format_double(template_cosine_similarity({fa.data(), static_cast<std::size_t>(fa.size())},
                                                            {fb.data(), static_cast<std::size_t>(fb.size())}))
                << '\n';
        }
    }
    write_text_file(out_dir / "template_similarity.csv", sim.str());
    write_snapshot(cfg, out_dir);
}

void cmd_sort(const ExperimentConfig& cfg, const SortOptions& opts) {
    if (opts.freeze && !opts.model) throw ConfigError("--freeze requires --model");
    const Recording raw = read_recording(opts.recording);
    std::optional<NssModel> pretrained;
    if (opts.model) pretrained = load_model(*opts.model);
    prepare_out_dir(opts.out_dir);

    const Preprocessed pre = preprocess(raw, cfg);
    const NssRun run = run_nss(pre.waveforms, cfg, std::move(pretrained), opts.freeze);

    write_detections_csv(opts.out_dir / "detections.csv", pre.detections);
    write_labels_csv(opts.out_dir / "labels.csv", run.labels);
    if (!opts.freeze) save_model(opts.out_dir / "model.nss", run.model);

    json s;
    s["recording"] = opts.recording.string();
    s["sample_rate_hz"] = raw.sample_rate;
    s["n_channels"] = raw.channel_count();
    s["duration_s"] = raw.duration_s();
    s["detector"] = std::string(to_string(cfg.detector));
    s["thresholds"] = thresholds_json(pre.thresholds);
    s["detections"] = pre.detections.size();
    s["waveforms"] = pre.waveforms.size();
    s["neuron"] = std::string(to_string(run.model.config().layer1.neuron));
    s["bit_width"] = run.model.config().layer1.bit_width;
    s["frozen"] = opts.freeze;
    s["pretrained_model"] = opts.model ? json(opts.model->string()) : json(nullptr);
    s["model_out"] = opts.freeze ? json(nullptr) : json((opts.out_dir / "model.nss").string());
    s["dictionary_updates"] = run.updates;
    s["label_counts"] = label_counts(run.labels);
    s["spikes_per_waveform"] = spike_stats(run.stats);
    s["sparsity"] = sparsity_json(sparsity_metrics(run.stats));
    s["wall_clock_s"] = run.seconds;
    s["wall_clock_per_waveform_s"] =
        run.labels.empty() ? json(nullptr) : json(run.seconds / static_cast<double>(run.labels.size()));
    write_text_file(opts.out_dir / "summary.json", s.dump(2) + "\n");
    write_snapshot(cfg, opts.out_dir);
}

void cmd_eval(const ExperimentConfig& cfg, const EvalOptions& opts) {
    const auto labels = read_labels_csv(opts.labels);
    const auto truth = read_spike_trains_csv(opts.truth);
    prepare_out_dir(opts.out_dir);
    const MatchReport report = score(truth, labels, cfg);
    write_text_file(opts.out_dir / "report.json", report_to_json(report));
    write_text_file(opts.out_dir / "pairs.csv", pairs_to_csv(report));
    write_text_file(opts.out_dir / "confusion.csv", confusion_to_csv(report.confusion));
    write_snapshot(cfg, opts.out_dir);
}

void cmd_baseline(const ExperimentConfig& cfg, const fs::path& recording, const fs::path& out_dir) {
    const Recording raw = read_recording(recording);
    prepare_out_dir(out_dir);
    const Preprocessed pre = preprocess(raw, cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const SortResult result = baseline_sort(pre.waveforms, raw.channel_count(), cfg.baseline, baseline_seed(cfg));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    write_detections_csv(out_dir / "detections.csv", pre.detections);
    write_labels_csv(out_dir / "labels.csv", result.labels);
    json s;
    s["recording"] = recording.string();
    s["detector"] = std::string(to_string(cfg.detector));
    s["detections"] = pre.detections.size();
    s["waveforms"] = pre.waveforms.size();
    s["k_clusters"] = cfg.baseline.k_clusters;
    s["train_window_s"] = cfg.baseline.train_window_s;
    s["label_counts"] = label_counts(result.labels);
    s["wall_clock_s"] = seconds;
    write_text_file(out_dir / "summary.json", s.dump(2) + "\n");
    write_snapshot(cfg, out_dir);
}

std::vector<SweepCell> cmd_sweep(const ExperimentConfig& cfg, const SweepOptions& opts) {
    if (opts.bits.empty() || opts.seeds.empty()) throw ConfigError("sweep needs at least one bit width and seed");
    for (int b : opts.bits) {
        if (b < 1 || b > 32) throw ConfigError("sweep bit width out of range: " + std::to_string(b));
    }
    prepare_out_dir(opts.out_dir);
    write_snapshot(cfg, opts.out_dir);

    std::vector<SweepCell> cells;
    for (int b : opts.bits) {
        for (auto s : opts.seeds) cells.push_back({b, s, false, {}, {}});
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            SweepCell& cell = cells[i];
            ExperimentConfig c = cfg;
            c.seed = cell.seed;
            c.synth.seed = 0;
            c.nss.seed = 0;
            c.nss.layer1.bit_width = cell.bits;
            c.nss.layer2.bit_width = cell.bits;
            try {
                cell.result = run_cell(c);
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
        }
    };
    const int jobs = std::clamp(opts.jobs, 1, static_cast<int>(cells.size()));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::ostringstream per_cell;
    per_cell << "bits,seed,status,mean_f1,spikes_per_waveform,temporal_sparsity,spatial_sparsity,"
                "detection_precision,waveforms,error\n";
    for (const auto& c : cells) {
        per_cell << c.bits << ',' << c.seed << ',' << (c.ok ? "ok" : "failed") << ',';
        if (c.ok) {
            per_cell << format_double(c.result.mean_f1) << ',' << format_double(c.result.spikes_per_waveform) << ','
                     << format_double(c.result.sparsity.temporal) << ','
                     << format_double(c.result.sparsity.spatial) << ','
                     << format_double(c.result.detection_precision) << ',' << c.result.waveforms << ",\n";
        } else {
            per_cell << ",,,,,," << csv_escape(c.error) << '\n';
        }
    }
    write_text_file(opts.out_dir / "sweep_cells.csv", per_cell.str());

    struct Agg {
        int ok = 0, failed = 0;
        double f1 = 0, spw = 0, temporal = 0, spatial = 0;
    };
    std::map<int, Agg> agg;
    for (const auto& c : cells) {
        Agg& a = agg[c.bits];
        if (!c.ok) {
            ++a.failed;
            continue;
        }
        ++a.ok;
        a.f1 += c.result.mean_f1;
        a.spw += c.result.spikes_per_waveform;
        a.temporal += c.result.sparsity.temporal;
        a.spatial += c.result.sparsity.spatial;
    }
    const auto mean = [](double sum, int n) { return n > 0 ? sum / n : std::nan(""); };
    const auto one_bit = agg.find(1);
    const double f1_ref = one_bit != agg.end() ? mean(one_bit->second.f1, one_bit->second.ok) : std::nan("");
    const auto cell_text = [](double v) { return std::isfinite(v) ? format_double(v) : std::string(); };

    std::ostringstream summary;
    summary << "bits,cells_ok,cells_failed,mean_f1,f1_gain_vs_1bit,mean_spikes_per_waveform,"
               "temporal_sparsity,spatial_sparsity\n";
    for (const auto& [bits, a] : agg) {
        const double f1 = mean(a.f1, a.ok);
        summary << bits << ',' << a.ok << ',' << a.failed << ',' << cell_text(f1) << ',' << cell_text(f1 - f1_ref)
                << ',' << cell_text(mean(a.spw, a.ok)) << ',' << cell_text(mean(a.temporal, a.ok)) << ','
                << cell_text(mean(a.spatial, a.ok)) << '\n';
    }
    write_text_file(opts.out_dir / "sweep.csv", summary.str());
    return cells;
}

}  // namespace nss::cli
