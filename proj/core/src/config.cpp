#include "nss/config.hpp"

#include <json.hpp>

#include <set>

namespace nss {

using json = nlohmann::ordered_json;

DetectorKind parse_detector(std::string_view name) {
    if (name == "mad") return DetectorKind::Mad;
    if (name == "neo") return DetectorKind::Neo;
    throw ConfigError("detector must be one of mad, neo (got '" + std::string(name) + "')");
}

std::string_view to_string(DetectorKind kind) { return kind == DetectorKind::Mad ? "mad" : "neo"; }

void ExperimentConfig::validate() const {
    synth.validate();
    detection.validate(synth.sample_rate);
    nss.validate();
    baseline.validate();
    if (!(eval.tol_ms > 0.0)) throw ConfigError("eval.tol_ms must be > 0");
    if (eval.final_segment < 1) throw ConfigError("eval.final_segment must be >= 1");
    const int expected = 4 * detection.window_samples(synth.sample_rate);
    if (nss.input_dim != expected) {
        throw ConfigError("nss.input_dim must equal channels × window samples (" + std::to_string(expected) + ")");
    }
}

namespace {

/// Reads fields of one JSON object, tracking which keys were consumed so
/// leftovers can be reported.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "config must be a JSON object" : path_ + " must be an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        const json& v = j_.at(key);
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw ConfigError("");
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer()) throw ConfigError("");
                if constexpr (std::is_unsigned_v<T>) {
                    if (v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError("");
                }
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!v.is_number()) throw ConfigError("");
            } else {
                if (!v.is_string()) throw ConfigError("");
            }
            out = v.get<T>();
        } catch (const std::exception&) {
            throw ConfigError("invalid value for " + name(key));
        }
    }

    template <class Fn>
    void get_string(const char* key, Fn&& assign) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        if (!j_.at(key).is_string()) throw ConfigError("invalid value for " + name(key));
        try {
            assign(j_.at(key).get<std::string>());
        } catch (const ConfigError& e) {
            throw ConfigError(name(key) + ": " + e.what());
        }
    }

    void mark(const char* key) { seen_.insert(key); }
    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    Section child(const char* key) {
        seen_.insert(key);
        return Section(j_.at(key), name(key));
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError("unknown config field " + name(it.key().c_str()));
        }
    }

    std::string name(const char* key) const { return path_.empty() ? std::string(key) : path_ + "." + key; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

json lca_to_json(const LcaConfig& c) {
    json j;
    j["lambda"] = c.lambda;
    j["tau_ms"] = c.tau_ms;
    j["dt_ms"] = c.dt_ms;
    j["n_steps"] = c.n_steps;
    j["bit_width"] = c.bit_width;
    j["neuron"] = std::string(to_string(c.neuron));
    j["lif_threshold"] = c.lif_threshold;
    j["lif_reset"] = c.lif_reset == LifReset::Soft ? "soft" : "hard";
    j["decode_window"] = c.decode_window;
    return j;
}

void lca_from_json(Section s, LcaConfig& c) {
    s.get("lambda", c.lambda);
    s.get("tau_ms", c.tau_ms);
    s.get("dt_ms", c.dt_ms);
    s.get("n_steps", c.n_steps);
    s.get("bit_width", c.bit_width);
    s.get_string("neuron", [&](const std::string& v) { c.neuron = parse_neuron_model(v); });
    s.get("lif_threshold", c.lif_threshold);
    s.get_string("lif_reset", [&](const std::string& v) {
        if (v == "soft") {
            c.lif_reset = LifReset::Soft;
        } else if (v == "hard") {
            c.lif_reset = LifReset::Hard;
        } else {
            throw ConfigError("must be soft or hard");
        }
    });
    s.get("decode_window", c.decode_window);
    s.finish();
}

json nss_to_json(const NssConfig& c) {
    json j;
    j["input_dim"] = c.input_dim;
    j["layer1_atoms"] = c.layer1_atoms;
    j["layer2_atoms"] = c.layer2_atoms;
    j["seed"] = c.seed;
    j["layer1"] = lca_to_json(c.layer1);
    j["layer2"] = lca_to_json(c.layer2);
    json l;
    l["eta_strong"] = c.learn.eta_strong;
    l["eta_slow"] = c.learn.eta_slow;
    l["strong_phase_s"] = c.learn.strong_phase_s;
    l["batch_size"] = c.learn.batch_size;
    l["noise_variance"] = c.learn.noise_variance;
    l["batch_reduction"] = std::string(to_string(c.learn.batch_reduction));
    l["eta_gain"] = c.learn.eta_gain;
    l["steps_strong"] = c.learn.steps_strong;
    l["steps_slow"] = c.learn.steps_slow;
    j["learn"] = std::move(l);
    return j;
}

void nss_from_json(Section s, NssConfig& c) {
    s.get("input_dim", c.input_dim);
    s.get("layer1_atoms", c.layer1_atoms);
    s.get("layer2_atoms", c.layer2_atoms);
    s.get("seed", c.seed);
    if (s.has("layer1")) lca_from_json(s.child("layer1"), c.layer1);
    if (s.has("layer2")) lca_from_json(s.child("layer2"), c.layer2);
    if (s.has("learn")) {
        Section l = s.child("learn");
        l.get("eta_strong", c.learn.eta_strong);
        l.get("eta_slow", c.learn.eta_slow);
        l.get("strong_phase_s", c.learn.strong_phase_s);
        l.get("batch_size", c.learn.batch_size);
        l.get("noise_variance", c.learn.noise_variance);
        l.get_string("batch_reduction", [&](const std::string& v) { c.learn.batch_reduction = parse_batch_reduction(v); });
        l.get("eta_gain", c.learn.eta_gain);
        l.get("steps_strong", c.learn.steps_strong);
        l.get("steps_slow", c.learn.steps_slow);
        l.finish();
    }
    s.finish();
}

json parse_or_throw(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

}  // namespace

std::string to_json(const NssConfig& cfg) { return nss_to_json(cfg).dump(2) + "\n"; }

NssConfig nss_config_from_json(const std::string& text) {
    NssConfig c;
    const json j = parse_or_throw(text);
    nss_from_json(Section(j, "nss"), c);
    return c;
}

std::string to_json(const ExperimentConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;

    json s;
    s["n_units"] = cfg.synth.n_units;
    s["duration_s"] = cfg.synth.duration_s;
    s["sample_rate"] = cfg.synth.sample_rate;
    s["noise_sigma_min"] = cfg.synth.noise_sigma_min;
    s["noise_sigma_max"] = cfg.synth.noise_sigma_max;
    s["rate_min_hz"] = cfg.synth.rate_min_hz;
    s["rate_max_hz"] = cfg.synth.rate_max_hz;
    s["refractory_ms"] = cfg.synth.refractory_ms;
    s["snr_min"] = cfg.synth.snr_min;
    s["snr_max"] = cfg.synth.snr_max;
    s["window_ms"] = cfg.synth.window_ms;
    s["attenuation_exponent"] = cfg.synth.attenuation_exponent;
    if (cfg.synth.drift) {
        s["drift"] = json{{"unit_id", cfg.synth.drift->unit_id},
                          {"amplitude_decay_fraction", cfg.synth.drift->amplitude_decay_fraction}};
    } else {
        s["drift"] = nullptr;
    }
    s["seed"] = cfg.synth.seed;
    j["synth"] = std::move(s);

    json d;
    d["mad_multiplier"] = cfg.detection.mad_multiplier;
    d["window_ms"] = cfg.detection.window_ms;
    d["band_low_hz"] = cfg.detection.band_low_hz;
    d["band_high_hz"] = cfg.detection.band_high_hz;
    d["filter_order"] = cfg.detection.filter_order;
    d["dead_time_ms"] = cfg.detection.dead_time_ms;
    d["threshold_window"] =
        cfg.detection.threshold_window == ThresholdWindow::FullRecording ? "full" : "streaming";
    d["streaming_window_s"] = cfg.detection.streaming_window_s;
    d["detector"] = std::string(to_string(cfg.detector));
    d["neo_multiplier"] = cfg.neo.multiplier;
    d["neo_smoothing_samples"] = cfg.neo.smoothing_samples;
    j["detection"] = std::move(d);

    j["nss"] = nss_to_json(cfg.nss);

    json b;
    b["k_clusters"] = cfg.baseline.k_clusters;
    b["components_per_channel"] = cfg.baseline.components_per_channel;
    b["train_window_s"] = cfg.baseline.train_window_s;
    b["label_training_window"] = cfg.baseline.label_training_window;
    j["baseline"] = std::move(b);

    json e;
    e["tol_ms"] = cfg.eval.tol_ms;
    e["eval_start_s"] = cfg.eval.eval_start_s;
    e["mode"] = cfg.eval.mode == MatchMode::BestPerUnit ? "best" : "exclusive";
    e["final_segment"] = cfg.eval.final_segment;
    j["eval"] = std::move(e);
    return j.dump(2) + "\n";
}

ExperimentConfig experiment_from_json(const std::string& text) {
    ExperimentConfig c;
    const json j = parse_or_throw(text);
    Section root(j, "");
    root.get("seed", c.seed);
    if (root.has("synth")) {
        Section s = root.child("synth");
        s.get("n_units", c.synth.n_units);
        s.get("duration_s", c.synth.duration_s);
        s.get("sample_rate", c.synth.sample_rate);
        s.get("noise_sigma_min", c.synth.noise_sigma_min);
        s.get("noise_sigma_max", c.synth.noise_sigma_max);
        s.get("rate_min_hz", c.synth.rate_min_hz);
        s.get("rate_max_hz", c.synth.rate_max_hz);
        s.get("refractory_ms", c.synth.refractory_ms);
        s.get("snr_min", c.synth.snr_min);
        s.get("snr_max", c.synth.snr_max);
        s.get("window_ms", c.synth.window_ms);
        s.get("attenuation_exponent", c.synth.attenuation_exponent);
        s.get("seed", c.synth.seed);
        if (s.has("drift")) {
            Section dr = s.child("drift");
            DriftConfig drift;
            dr.get("unit_id", drift.unit_id);
            dr.get("amplitude_decay_fraction", drift.amplitude_decay_fraction);
            dr.finish();
            c.synth.drift = drift;
        } else {
            s.mark("drift");
        }
        s.finish();
    }
    if (root.has("detection")) {
        Section d = root.child("detection");
        d.get("mad_multiplier", c.detection.mad_multiplier);
        d.get("window_ms", c.detection.window_ms);
        d.get("band_low_hz", c.detection.band_low_hz);
        d.get("band_high_hz", c.detection.band_high_hz);
        d.get("filter_order", c.detection.filter_order);
        d.get("dead_time_ms", c.detection.dead_time_ms);
        d.get_string("threshold_window", [&](const std::string& v) {
            if (v == "full") {
                c.detection.threshold_window = ThresholdWindow::FullRecording;
            } else if (v == "streaming") {
                c.detection.threshold_window = ThresholdWindow::Streaming;
            } else {
                throw ConfigError("must be full or streaming");
            }
        });
        d.get("streaming_window_s", c.detection.streaming_window_s);
        d.get_string("detector", [&](const std::string& v) { c.detector = parse_detector(v); });
        d.get("neo_multiplier", c.neo.multiplier);
        d.get("neo_smoothing_samples", c.neo.smoothing_samples);
        d.finish();
    }
    if (root.has("nss")) nss_from_json(root.child("nss"), c.nss);
    if (root.has("baseline")) {
        Section b = root.child("baseline");
        b.get("k_clusters", c.baseline.k_clusters);
        b.get("components_per_channel", c.baseline.components_per_channel);
        b.get("train_window_s", c.baseline.train_window_s);
        b.get("label_training_window", c.baseline.label_training_window);
        b.finish();
    }
    if (root.has("eval")) {
        Section e = root.child("eval");
        e.get("tol_ms", c.eval.tol_ms);
        e.get("eval_start_s", c.eval.eval_start_s);
        e.get_string("mode", [&](const std::string& v) {
            if (v == "best") {
                c.eval.mode = MatchMode::BestPerUnit;
            } else if (v == "exclusive") {
                c.eval.mode = MatchMode::Exclusive;
            } else {
                throw ConfigError("must be best or exclusive");
            }
        });
        e.get("final_segment", c.eval.final_segment);
        e.finish();
    }
    root.finish();
    return c;
}

}  // namespace nss
