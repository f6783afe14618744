#include "nss/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nss {

void SynthConfig::validate() const {
    if (n_units < 0) throw ConfigError("n_units must be >= 0");
    if (!(duration_s > 0.0)) throw ConfigError("duration_s must be > 0");
    if (!(sample_rate > 0.0)) throw ConfigError("sample_rate must be > 0");
    if (!(noise_sigma_min >= 0.0 && noise_sigma_max >= noise_sigma_min)) {
        throw ConfigError("noise_sigma_range must satisfy 0 <= min <= max");
    }
    if (!(rate_min_hz >= 0.0 && rate_max_hz >= rate_min_hz)) {
        throw ConfigError("rate_range must satisfy 0 <= min <= max");
    }
    if (!(refractory_ms > 0.0)) throw ConfigError("refractory_ms must be > 0");
    if (!(rate_max_hz * refractory_ms / 1000.0 < 1.0)) throw ConfigError("rate_max_hz incompatible with refractory_ms");
    if (!(snr_min > 0.0 && snr_max >= snr_min)) throw ConfigError("snr range must satisfy 0 < min <= max");
    const double w = window_ms * sample_rate / 1000.0;
    if (!(window_ms > 0.0) || std::abs(w - std::round(w)) > 1e-9) {
        throw ConfigError("window_ms must give an integer sample count");
    }
    if (!(attenuation_exponent > 0.0)) throw ConfigError("attenuation_exponent must be > 0");
    if (drift) {
        if (drift->unit_id < 0 || drift->unit_id >= n_units) throw ConfigError("drift.unit_id out of range");
        if (!(drift->amplitude_decay_fraction >= 0.0 && drift->amplitude_decay_fraction <= 1.0)) {
            throw ConfigError("drift.amplitude_decay_fraction must lie in [0, 1]");
        }
    }
}

int SynthConfig::window_samples() const {
    return static_cast<int>(std::lround(window_ms * sample_rate / 1000.0));
}

std::array<Point3, 4> tetrode_pads() {
    constexpr double h = 12.5;
    return {{{-h, -h, 0.0}, {h, -h, 0.0}, {-h, h, 0.0}, {h, h, 0.0}}};
}

std::array<double, 4> channel_gains(const Point3& pos, double exponent) {
    constexpr double min_distance = 5.0;
    std::array<double, 4> g{};
    const auto pads = tetrode_pads();
    for (std::size_t c = 0; c < 4; ++c) {
        double r2 = 0.0;
        for (int k = 0; k < 3; ++k) r2 += (pos[k] - pads[c][k]) * (pos[k] - pads[c][k]);
        g[c] = std::pow(std::max(std::sqrt(r2), min_distance), -exponent);
    }
    const double top = *std::max_element(g.begin(), g.end());
    for (double& v : g) v /= top;
    return g;
}

Vector UnitTemplate::flattened() const {
    Vector out(waveform.size());
    const Eigen::Index w = waveform.cols();
    for (Eigen::Index c = 0; c < waveform.rows(); ++c) out.segment(c * w, w) = waveform.row(c).transpose();
    return out;
}

int template_center(int window_samples) { return window_samples / 2; }

namespace {

double uniform(Rng& rng, double lo, double hi) {
    if (hi <= lo) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

struct ShapeParams {
    double trough_ms;         ///< width of the negative phase
    double rebound_ratio;     ///< repolarization peak relative to the trough
    double rebound_ms;
    double rebound_delay_ms;  ///< repolarization peak after the trough
    double pre_ratio;         ///< small positive bump before the trough
};

/// Unit-peak biphasic shape sampled on the window, trough at the center.
std::vector<double> biphasic_shape(int w, double fs, const ShapeParams& p) {
    const int center = template_center(w);
    constexpr int taper = 3;
    std::vector<double> s(static_cast<std::size_t>(w));
    for (int k = 0; k < w; ++k) {
        const double t = (k - center) * 1000.0 / fs;  // ms
        const double dr = t - p.rebound_delay_ms;
        const double dp = t + 0.35;
        double v = -std::exp(-0.5 * t * t / (p.trough_ms * p.trough_ms)) +
                   p.rebound_ratio * std::exp(-0.5 * dr * dr / (p.rebound_ms * p.rebound_ms)) +
                   p.pre_ratio * std::exp(-0.5 * dp * dp / (0.12 * 0.12));
        const int edge = std::min(k, w - 1 - k);
        if (edge < taper) v *= 0.5 - 0.5 * std::cos(3.141592653589793 * (edge + 0.5) / taper);
        s[static_cast<std::size_t>(k)] = v;
    }
    double peak = 0.0;
    for (double v : s) peak = std::max(peak, std::abs(v));
    for (double& v : s) v /= peak;
    return s;
}

}  // namespace

std::vector<UnitTemplate> make_templates(const SynthConfig& cfg, std::uint64_t seed, double mean_noise_sigma) {
    Rng rng(seed);
    const int w = cfg.window_samples();
    constexpr double margin = 5.0, half = 12.5, max_depth = 35.0;
    std::vector<UnitTemplate> out;
    for (int u = 0; u < cfg.n_units; ++u) {
        UnitTemplate t;
        t.position = {uniform(rng, -half - margin, half + margin), uniform(rng, -half - margin, half + margin),
                      uniform(rng, 2.0, max_depth)};
        ShapeParams sp;
        sp.trough_ms = uniform(rng, 0.15, 0.3);
        sp.rebound_ratio = uniform(rng, 0.15, 0.5);
        sp.rebound_ms = uniform(rng, 0.15, 0.35);
        sp.rebound_delay_ms = sp.trough_ms + uniform(rng, 0.2, 0.6);
        sp.pre_ratio = uniform(rng, 0.0, 0.3);
        const auto shape = biphasic_shape(w, cfg.sample_rate, sp);
        // Stratified SNRs so every recording spans the configured range.
        const double frac = (u + uniform(rng, 0.0, 1.0)) / std::max(cfg.n_units, 1);
        const double snr = cfg.snr_min + frac * (cfg.snr_max - cfg.snr_min);
        t.peak_amplitude = snr * mean_noise_sigma;

        const auto gains = channel_gains(t.position, cfg.attenuation_exponent);
        t.peak_channel = static_cast<int>(std::max_element(gains.begin(), gains.end()) - gains.begin());
        t.waveform.resize(4, w);
        for (int c = 0; c < 4; ++c) {
            for (int k = 0; k < w; ++k) {
                t.waveform(c, k) = t.peak_amplitude * gains[static_cast<std::size_t>(c)] * shape[static_cast<std::size_t>(k)];
            }
        }
        out.push_back(std::move(t));
    }
    return out;
}

SyntheticRecording generate_recording(const SynthConfig& cfg) {
    cfg.validate();
    constexpr int n_channels = 4;
    Rng sigma_rng(derive_seed(cfg.seed, 1));
    Rng train_rng(derive_seed(cfg.seed, 3));
    Rng noise_rng(derive_seed(cfg.seed, 4));

    const long n = std::lround(cfg.duration_s * cfg.sample_rate);
    const int w = cfg.window_samples();
    const int center = template_center(w);

    GroundTruth gt;
    for (int c = 0; c < n_channels; ++c) gt.noise_sigmas.push_back(uniform(sigma_rng, cfg.noise_sigma_min, cfg.noise_sigma_max));
    const double mean_sigma =
        std::accumulate(gt.noise_sigmas.begin(), gt.noise_sigmas.end(), 0.0) / static_cast<double>(n_channels);
    // A noiseless recording still gets templates; its SNR is reported as
    // infinite and amplitudes are scaled against a unit reference.
    gt.templates = make_templates(cfg, derive_seed(cfg.seed, 2), mean_sigma > 0.0 ? mean_sigma : 1.0);

    SampleMatrix samples(n_channels, n);
    for (int c = 0; c < n_channels; ++c) {
        const double sigma = gt.noise_sigmas[static_cast<std::size_t>(c)];
        std::normal_distribution<double> normal(0.0, 1.0);
        for (long t = 0; t < n; ++t) samples(c, t) = sigma > 0.0 ? sigma * normal(noise_rng) : 0.0;
    }

    const long refractory = static_cast<long>(std::ceil(cfg.refractory_ms * cfg.sample_rate / 1000.0 - 1e-9));
    for (int u = 0; u < cfg.n_units; ++u) {
        const double rate = uniform(train_rng, cfg.rate_min_hz, cfg.rate_max_hz);
        gt.rates_hz.push_back(rate);
        const auto& tmpl = gt.templates[static_cast<std::size_t>(u)];
        gt.snrs.push_back(mean_sigma > 0.0 ? tmpl.peak_amplitude / mean_sigma
                                           : std::numeric_limits<double>::infinity());
        SpikeTrain train{u, {}};
        if (rate > 0.0) {
            // Dead-time Poisson: exponential waiting time after the
            // refractory period, rate corrected so the mean stays `rate`.
            const double dead = refractory / cfg.sample_rate;
            std::exponential_distribution<double> wait(rate / (1.0 - rate * dead));
            long s = center + static_cast<long>(std::lround(wait(train_rng) * cfg.sample_rate));
            while (s - center + w <= n) {
                train.times.push_back(static_cast<double>(s) / cfg.sample_rate);
                double scale = 1.0;
                if (cfg.drift && cfg.drift->unit_id == u) {
                    scale = 1.0 - cfg.drift->amplitude_decay_fraction * (static_cast<double>(s) / static_cast<double>(n));
                }
                for (int c = 0; c < n_channels; ++c) {
                    samples.row(c).segment(s - center, w) += scale * tmpl.waveform.row(c);
                }
                s += refractory + static_cast<long>(std::lround(wait(train_rng) * cfg.sample_rate));
            }
        }
        gt.spike_trains.push_back(std::move(train));
    }

    return {Recording(std::move(samples), cfg.sample_rate), std::move(gt)};
}

double overlap_rate(const GroundTruth& gt, double window_ms) {
    std::vector<double> all;
    for (const auto& tr : gt.spike_trains) all.insert(all.end(), tr.times.begin(), tr.times.end());
    if (all.empty()) return 0.0;
    std::sort(all.begin(), all.end());
    const double win = window_ms / 1000.0;
    long overlapped = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const bool prev = i > 0 && all[i] - all[i - 1] <= win;
        const bool next = i + 1 < all.size() && all[i + 1] - all[i] <= win;
        if (prev || next) ++overlapped;
    }
    return static_cast<double>(overlapped) / static_cast<double>(all.size());
}

}  // namespace nss
