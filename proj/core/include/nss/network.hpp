#pragma once

#include "nss/dictionary_learning.hpp"
#include "nss/eval.hpp"
#include "nss/lca.hpp"
#include "nss/signal.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace nss {

struct NssConfig {
    int input_dim = 120;
    int layer1_atoms = 120;
    int layer2_atoms = 10;
    LcaConfig layer1;
    LcaConfig layer2;
    LearnConfig learn;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Two stacked LCA layers. Layer 2 codes layer 1's emissions and its most
/// active neuron names the unit.
class NssModel {
public:
    /// Random unit-norm dictionaries drawn from cfg.seed.
    explicit NssModel(NssConfig cfg);
    NssModel(NssConfig cfg, Dictionary layer1, Dictionary layer2);

    const NssConfig& config() const noexcept { return cfg_; }
    const Dictionary& layer1() const noexcept { return d1_; }
    const Dictionary& layer2() const noexcept { return d2_; }
    const InhibitionMatrix& inhibition1() const noexcept { return w1_; }
    const InhibitionMatrix& inhibition2() const noexcept { return w2_; }

    void set_layer1(Dictionary d);
    void set_layer2(Dictionary d);
    /// Presentation length shared by both layers.
    int n_steps() const noexcept { return cfg_.layer1.n_steps; }
    void set_n_steps(int n);

    /// Learnable forward weights L·M1 + M1·M2.
    long forward_weight_count() const noexcept;
    /// Forward weights plus the two recurrent matrices M1² + M2².
    long synapse_count() const noexcept;

private:
    NssConfig cfg_;
    Dictionary d1_, d2_;
    InhibitionMatrix w1_, w2_;
};

struct LabelResult {
    int label = kUnassigned;
    Vector accumulated_activation;
    double timestamp = 0.0;
};

/// Everything observed during one presentation of a waveform.
struct Presentation {
    LabelResult result;
    Vector decoded1;
    Vector decoded2;
    long emitted_spikes = 0;  ///< nonzero emissions over both layers and all steps
    PresentationStats stats;
};

/// Argmax with lowest-index tie-break; UNASSIGNED when no entry is positive.
int argmax_label(const Vector& accumulated);

/// Scales the waveform to unit L2 norm. Throws PreconditionError on a zero vector.
SpikeWaveform normalize_waveform(const SpikeWaveform& sw);

/// Runs both layers from reset on a unit-norm input for model.n_steps()
/// steps; layer 2 is driven by layer 1's emission of the same step.
Presentation present(const NssModel& model, const Vector& x);

/// Normalizes, presents and labels one waveform.
LabelResult nss_infer(const NssModel& model, const SpikeWaveform& sw);

long count_emitted_spikes(const NssModel& model, const SpikeWaveform& sw);

struct TrainingSummary {
    long waveforms = 0;
    long updates = 0;
    std::vector<PresentationStats> stats;  ///< one entry per processed waveform
};

/// Online, batched, layer-by-layer learner. Single writer of its model.
class OnlineTrainer {
public:
    explicit OnlineTrainer(NssModel& model);

    /// Labels the waveform with the current model, then buffers it; a full
    /// batch triggers a layer-1 then a layer-2 dictionary update.
    Presentation process(const SpikeWaveform& sw);

    long updates() const noexcept { return updates_; }

private:
    void update_batch();

    NssModel& model_;
    Rng rng_;
    std::vector<Vector> batch_;
    std::vector<Vector> batch_codes_;
    double last_timestamp_;
    long updates_ = 0;
};

/// Processes a time-ordered stream, emitting one label per waveform.
std::vector<LabelResult> nss_train_online(NssModel& model, std::span<const SpikeWaveform> stream,
                                          TrainingSummary* summary = nullptr);

/// Inference only; labels every waveform with a frozen model using its
/// current presentation length.
std::vector<LabelResult> nss_infer_all(const NssModel& model, std::span<const SpikeWaveform> stream,
                                       std::vector<PresentationStats>* stats = nullptr);

/// Container: "NSSM", u32 version, u32 JSON length, JSON config, then the
/// layer-1 and layer-2 dictionary blobs.
void save_model(const std::filesystem::path& path, const NssModel& model);
NssModel load_model(const std::filesystem::path& path);

}  // namespace nss
