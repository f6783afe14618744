#include "nss/network.hpp"

#include <cmath>
#include <limits>

namespace nss {

void NssConfig::validate() const {
    if (input_dim < 1) throw ConfigError("input_dim must be >= 1");
    if (layer1_atoms < 1) throw ConfigError("layer1_atoms must be >= 1");
    if (layer2_atoms < 1) throw ConfigError("layer2_atoms must be >= 1");
    layer1.validate();
    layer2.validate();
    learn.validate();
}

NssModel::NssModel(NssConfig cfg)
    : NssModel(cfg, init_dictionary(cfg.input_dim, cfg.layer1_atoms, derive_seed(cfg.seed, 11)),
               init_dictionary(cfg.layer1_atoms, cfg.layer2_atoms, derive_seed(cfg.seed, 12))) {}

NssModel::NssModel(NssConfig cfg, Dictionary layer1, Dictionary layer2) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (layer1.input_dim() != cfg_.input_dim || layer1.atom_count() != cfg_.layer1_atoms) {
        throw DimensionError("layer-1 dictionary does not match input_dim × layer1_atoms");
    }
    if (layer2.input_dim() != cfg_.layer1_atoms || layer2.atom_count() != cfg_.layer2_atoms) {
        throw DimensionError("layer-2 dictionary does not match layer1_atoms × layer2_atoms");
    }
    set_layer1(std::move(layer1));
    set_layer2(std::move(layer2));
    set_n_steps(cfg_.layer1.n_steps);
}

void NssModel::set_layer1(Dictionary d) {
    if (d.input_dim() != cfg_.input_dim || d.atom_count() != cfg_.layer1_atoms) {
        throw DimensionError("layer-1 dictionary shape changed");
    }
    d1_ = std::move(d);
    w1_ = build_inhibition(d1_);
}

void NssModel::set_layer2(Dictionary d) {
    if (d.input_dim() != cfg_.layer1_atoms || d.atom_count() != cfg_.layer2_atoms) {
        throw DimensionError("layer-2 dictionary shape changed");
    }
    d2_ = std::move(d);
    w2_ = build_inhibition(d2_);
}

void NssModel::set_n_steps(int n) {
    if (n < 1) throw ConfigError("n_steps must be >= 1");
    cfg_.layer1.n_steps = n;
    cfg_.layer2.n_steps = n;
}

long NssModel::forward_weight_count() const noexcept {
    return static_cast<long>(cfg_.input_dim) * cfg_.layer1_atoms +
           static_cast<long>(cfg_.layer1_atoms) * cfg_.layer2_atoms;
}

long NssModel::synapse_count() const noexcept {
    return forward_weight_count() + static_cast<long>(cfg_.layer1_atoms) * cfg_.layer1_atoms +
           static_cast<long>(cfg_.layer2_atoms) * cfg_.layer2_atoms;
}

int argmax_label(const Vector& accumulated) {
    int best = kUnassigned;
    double best_v = 0.0;
    for (Eigen::Index i = 0; i < accumulated.size(); ++i) {
        if (accumulated[i] > best_v) {
            best_v = accumulated[i];
            best = static_cast<int>(i);
        }
    }
    return best;
}

SpikeWaveform normalize_waveform(const SpikeWaveform& sw) {
    const double n = sw.vector.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw PreconditionError("cannot normalize a zero or non-finite waveform");
    SpikeWaveform out = sw;
    out.vector /= n;
    return out;
}

Presentation present(const NssModel& model, const Vector& x) {
    const auto& cfg = model.config();
    if (x.size() != cfg.input_dim) throw DimensionError("waveform length does not match model input_dim");
    const Eigen::Index m1 = cfg.layer1_atoms;
    const Eigen::Index m2 = cfg.layer2_atoms;
    const int steps = model.n_steps();
    const int window1 = std::min(cfg.layer1.decode_window, steps);
    const int window2 = std::min(cfg.layer2.decode_window, steps);

    const Vector bias1 = model.layer1().atoms().transpose() * x;
    const Matrix& d2 = model.layer2().atoms();
    LcaLayerState s1(m1), s2(m2);
    Vector bias2(m2);

    Presentation p;
    p.decoded1 = Vector::Zero(m1);
    p.decoded2 = Vector::Zero(m2);
    std::vector<char> active(static_cast<std::size_t>(m1 + m2), 0);
    for (int t = 0; t < steps; ++t) {
        lca_step(s1, bias1, model.inhibition1(), cfg.layer1);
        bias2.setZero();
        for (Eigen::Index j = 0; j < m1; ++j) {
            const double aj = s1.a[j];
            if (aj != 0.0) {
                bias2.noalias() += aj * d2.row(j).transpose();
                ++p.emitted_spikes;
                active[static_cast<std::size_t>(j)] = 1;
            }
        }
        lca_step(s2, bias2, model.inhibition2(), cfg.layer2);
        for (Eigen::Index j = 0; j < m2; ++j) {
            if (s2.a[j] != 0.0) {
                ++p.emitted_spikes;
                active[static_cast<std::size_t>(m1 + j)] = 1;
            }
        }
        if (t >= steps - window1) p.decoded1 += s1.a;
        if (t >= steps - window2) p.decoded2 += s2.a;
    }
    p.result.accumulated_activation = p.decoded2;
    p.result.label = argmax_label(p.decoded2);
    p.decoded1 /= static_cast<double>(window1);
    p.decoded2 /= static_cast<double>(window2);

    p.stats.neurons = static_cast<int>(m1 + m2);
    p.stats.steps = steps;
    p.stats.nonzero_emissions = p.emitted_spikes;
    for (char c : active) p.stats.active_neurons += c;
    return p;
}

LabelResult nss_infer(const NssModel& model, const SpikeWaveform& sw) {
    const auto unit = normalize_waveform(sw);
    LabelResult r = present(model, unit.vector).result;
    r.timestamp = sw.timestamp;
    return r;
}

long count_emitted_spikes(const NssModel& model, const SpikeWaveform& sw) {
    return present(model, normalize_waveform(sw).vector).emitted_spikes;
}

OnlineTrainer::OnlineTrainer(NssModel& model)
    : model_(model),
      rng_(derive_seed(model.config().seed, 13)),
      last_timestamp_(-std::numeric_limits<double>::infinity()) {}

Presentation OnlineTrainer::process(const SpikeWaveform& sw) {
    if (sw.timestamp < last_timestamp_) throw PreconditionError("training stream timestamps out of order");
    last_timestamp_ = sw.timestamp;

    model_.set_n_steps(schedule(std::max(sw.timestamp, 0.0), model_.config().learn).n_steps);
    const auto unit = normalize_waveform(sw);
    Presentation p = present(model_, unit.vector);
    p.result.timestamp = sw.timestamp;

    batch_.push_back(unit.vector);
    batch_codes_.push_back(p.decoded1);
    if (static_cast<int>(batch_.size()) >= model_.config().learn.batch_size) update_batch();
    return p;
}

void OnlineTrainer::update_batch() {
    const auto& learn = model_.config().learn;
    const double eta = schedule(std::max(last_timestamp_, 0.0), learn).eta * learn.eta_gain;

    std::vector<LearningPair> pairs1;
    pairs1.reserve(batch_.size());
    for (std::size_t i = 0; i < batch_.size(); ++i) pairs1.push_back({batch_[i], batch_codes_[i]});
    model_.set_layer1(dictionary_update(model_.layer1(), pairs1, eta, learn.noise_variance, rng_,
                                         learn.batch_reduction));

    // Layer 2 learns from codes recomputed with the refreshed layer 1.
    std::vector<LearningPair> pairs2;
    pairs2.reserve(batch_.size());
    for (const auto& x : batch_) {
        const Presentation p = present(model_, x);
        pairs2.push_back({p.decoded1, p.decoded2});
    }
    model_.set_layer2(dictionary_update(model_.layer2(), pairs2, eta, learn.noise_variance, rng_,
                                         learn.batch_reduction));

    batch_.clear();
    batch_codes_.clear();
    ++updates_;
}

std::vector<LabelResult> nss_train_online(NssModel& model, std::span<const SpikeWaveform> stream,
                                          TrainingSummary* summary) {
    OnlineTrainer trainer(model);
    std::vector<LabelResult> out;
    out.reserve(stream.size());
    for (const auto& sw : stream) {
        Presentation p = trainer.process(sw);
        if (summary != nullptr) summary->stats.push_back(p.stats);
        out.push_back(std::move(p.result));
    }
    if (summary != nullptr) {
        summary->waveforms += static_cast<long>(stream.size());
        summary->updates += trainer.updates();
    }
    return out;
}

std::vector<LabelResult> nss_infer_all(const NssModel& model, std::span<const SpikeWaveform> stream,
                                       std::vector<PresentationStats>* stats) {
    std::vector<LabelResult> out;
    out.reserve(stream.size());
    for (const auto& sw : stream) {
        const auto unit = normalize_waveform(sw);
        Presentation p = present(model, unit.vector);
        p.result.timestamp = sw.timestamp;
        if (stats != nullptr) stats->push_back(p.stats);
        out.push_back(std::move(p.result));
    }
    return out;
}

}  // namespace nss
