#pragma once

#include "nss/eval.hpp"
#include "nss/signal.hpp"

#include <array>
#include <optional>
#include <vector>

namespace nss {

struct DriftConfig {
    int unit_id = 0;
    /// Fraction of amplitude lost by the end of the recording.
    double amplitude_decay_fraction = 0.5;
};

struct SynthConfig {
    int n_units = 5;
    double duration_s = 240.0;
    double sample_rate = 10000.0;
    double noise_sigma_min = 8.0;
    double noise_sigma_max = 12.0;
    double rate_min_hz = 6.0;
    double rate_max_hz = 10.0;
    double refractory_ms = 2.0;
    double snr_min = 3.0;
    double snr_max = 13.0;
    double window_ms = 3.0;
    double attenuation_exponent = 2.0;
    std::optional<DriftConfig> drift;
    std::uint64_t seed = 0;

    void validate() const;
    int window_samples() const;
};

/// Tetrode contact positions in µm (2×2 square pad layout, z = 0).
using Point3 = std::array<double, 3>;
std::array<Point3, 4> tetrode_pads();

/// Gains 1/r^exponent of a source at `pos`, scaled so the largest is 1.
std::array<double, 4> channel_gains(const Point3& pos, double exponent = 1.0);

struct UnitTemplate {
    SampleMatrix waveform;  ///< channels × window samples, µV
    double peak_amplitude = 0.0;
    Point3 position{};
    int peak_channel = 0;

    /// Channel-by-channel flattened copy.
    Vector flattened() const;
};

struct GroundTruth {
    std::vector<SpikeTrain> spike_trains;
    std::vector<UnitTemplate> templates;
    std::vector<double> snrs;
    std::vector<double> rates_hz;
    std::vector<double> noise_sigmas;
};

/// Index of the template sample aligned to the reported spike time.
int template_center(int window_samples);

/// Biphasic difference-of-Gaussians shapes spread over the tetrode by
/// inverse-distance attenuation, scaled so SNRs are stratified over
/// [snr_min, snr_max] given `mean_noise_sigma`.
std::vector<UnitTemplate> make_templates(const SynthConfig& cfg, std::uint64_t seed, double mean_noise_sigma);

struct SyntheticRecording {
    Recording recording;
    GroundTruth truth;
};

SyntheticRecording generate_recording(const SynthConfig& cfg);

/// Fraction of ground-truth spikes with another spike (any unit) within
/// `window_ms`.
double overlap_rate(const GroundTruth& gt, double window_ms = 3.0);

}  // namespace nss
