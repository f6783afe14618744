#pragma once

#include "nss/eval.hpp"
#include "nss/signal.hpp"

#include <span>
#include <vector>

namespace nss {

/// Per-channel PCA over channel segments of flattened waveforms.
struct PcaModel {
    int n_channels = 0;
    int segment_length = 0;
    int components = 0;
    std::vector<Vector> means;          ///< per channel, length segment_length
    std::vector<Matrix> axes;           ///< per channel, segment_length × components
    std::vector<Vector> explained;      ///< per channel, variance fraction per component

    int feature_dim() const noexcept { return n_channels * components; }
    Vector project(const Vector& waveform) const;
    Matrix project_all(std::span<const SpikeWaveform> waveforms) const;
};

PcaModel pca_fit(std::span<const SpikeWaveform> waveforms, int n_channels, int components_per_channel = 3);

struct KMeansModel {
    Matrix centroids;                   ///< K × feature_dim
    double inertia = 0.0;
    int iterations = 0;
    std::vector<double> inertia_history;  ///< after each assignment step

    int k() const noexcept { return static_cast<int>(centroids.rows()); }
    /// Squared-Euclidean nearest centroid, ties to the lower index.
    int assign(const Vector& feature) const;
};

struct KMeansOptions {
    int max_iterations = 300;
    double tolerance = 1e-4;
};

/// k-means++ seeding then Lloyd iterations; `features` is n_points × dim.
KMeansModel kmeans_fit(const Matrix& features, int k, std::uint64_t seed, const KMeansOptions& opts = {});

struct BaselineConfig {
    int k_clusters = 5;
    int components_per_channel = 3;
    double train_window_s = 60.0;
    /// Also label waveforms inside the training window.
    bool label_training_window = false;

    void validate() const;
};

struct SortResult {
    std::vector<LabeledEvent> labels;

    std::vector<SpikeTrain> unit_trains() const { return trains_from_labels(labels); }
};

SortResult baseline_sort(std::span<const SpikeWaveform> waveforms, int n_channels, const BaselineConfig& cfg,
                         std::uint64_t seed);

}  // namespace nss
