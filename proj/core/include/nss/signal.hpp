#pragma once

#include "nss/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace nss {

/// Multichannel voltage trace in µV, one row per channel.
struct Recording {
    SampleMatrix samples;
    double sample_rate = 0.0;
    std::string units = "uV";

    Recording() = default;
    Recording(SampleMatrix s, double rate, std::string u = "uV");

    int channel_count() const noexcept { return static_cast<int>(samples.rows()); }
    long sample_count() const noexcept { return static_cast<long>(samples.cols()); }
    double duration_s() const noexcept { return sample_rate > 0 ? sample_count() / sample_rate : 0.0; }
    std::span<const double> channel(int c) const {
        return {samples.row(c).data(), static_cast<std::size_t>(samples.cols())};
    }
    std::span<double> channel(int c) {
        return {samples.row(c).data(), static_cast<std::size_t>(samples.cols())};
    }
};

/// One aligned event: all channels concatenated channel-by-channel.
struct SpikeWaveform {
    Vector vector;
    double timestamp = 0.0;
    int peak_channel = 0;
};

enum class ThresholdWindow {
    FullRecording,  ///< offline: MAD over the whole trace
    Streaming,      ///< MAD over the first `streaming_window_s` seconds
};

struct DetectionConfig {
    double mad_multiplier = 5.0;
    double window_ms = 3.0;
    double band_low_hz = 300.0;
    double band_high_hz = 3000.0;
    int filter_order = 3;
    double dead_time_ms = 1.0;
    ThresholdWindow threshold_window = ThresholdWindow::FullRecording;
    double streaming_window_s = 10.0;

    /// Throws ConfigError naming the first invalid field.
    void validate(double sample_rate) const;
    int window_samples(double sample_rate) const;
    int dead_time_samples(double sample_rate) const;
};

struct NeoConfig {
    double multiplier = 8.0;   ///< threshold = multiplier × mean smoothed energy
    int smoothing_samples = 5;
};

struct ChannelThresholds {
    std::vector<double> values;
    /// Channels whose MAD is zero (constant or almost-constant data).
    std::vector<int> degenerate_channels;
};

struct Detection {
    long sample = 0;
    double time_s = 0.0;
    int peak_channel = 0;
};

Recording bandpass_filter(const Recording& rec, const DetectionConfig& cfg);

/// median(|x - median(x)|), no consistency rescaling.
double median_absolute_deviation(std::span<const double> x);

ChannelThresholds mad_threshold(const Recording& rec, const DetectionConfig& cfg);

/// Merges suprathreshold regions (|x| > threshold on any channel) separated by
/// fewer than dead_time samples and reports the largest |x| of each region.
std::vector<Detection> detect_spikes(const Recording& rec, const ChannelThresholds& thresholds,
                                     const DetectionConfig& cfg);

/// Nonlinear energy operator x(n)^2 - x(n-1)x(n+1), zero at the two edges.
std::vector<double> nonlinear_energy(std::span<const double> x);

std::vector<Detection> neo_detect(const Recording& rec, const DetectionConfig& cfg,
                                  const NeoConfig& neo = {});

/// Drops events whose window would leave the recording.
std::vector<SpikeWaveform> extract_waveforms(const Recording& rec, std::span<const Detection> detections,
                                             const DetectionConfig& cfg);

}  // namespace nss
