#pragma once

#include "nss/lca.hpp"

#include <span>
#include <string_view>

namespace nss {

/// How per-waveform gradients in a batch are combined.
enum class BatchReduction { Mean, Sum };

BatchReduction parse_batch_reduction(std::string_view name);
std::string_view to_string(BatchReduction r);

struct LearnConfig {
    double eta_strong = 0.07;
    double eta_slow = 0.01;
    double strong_phase_s = 60.0;
    int batch_size = 16;
    double noise_variance = 0.0;
    BatchReduction batch_reduction = BatchReduction::Sum;
    /// Multiplies the scheduled rate inside the update; the schedule itself
    /// reports the nominal values.
    double eta_gain = 6.0;
    int steps_strong = 200;
    int steps_slow = 32;

    void validate() const;
};

enum class Phase { Strong, Slow };

struct TrainPhase {
    double elapsed_s = 0.0;
    Phase phase = Phase::Strong;

    static TrainPhase at(double elapsed_s, const LearnConfig& cfg);
};

struct Schedule {
    double eta;
    int n_steps;
};

/// Step schedule: strong values strictly before strong_phase_s, slow values
/// from that instant on.
Schedule schedule(double elapsed_s, const LearnConfig& cfg);

/// One training pair: the layer input and its decoded code.
struct LearningPair {
    Vector input;
    Vector code;
};

/// I.i.d. standard Gaussian entries, columns normalized. Deterministic per seed.
Dictionary init_dictionary(Eigen::Index input_dim, Eigen::Index atoms, std::uint64_t seed);

/// D += eta · reduce_batch((x - D a) a^T) + E, E ~ N(0, noise_variance) per
/// entry (one draw per update), then columns renormalized. Atoms that
/// collapse to zero norm are redrawn from `rng`.
Dictionary dictionary_update(const Dictionary& dict, std::span<const LearningPair> batch, double eta,
                             double noise_variance, Rng& rng, BatchReduction reduction = BatchReduction::Mean);

}  // namespace nss
