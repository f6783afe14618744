#include "nss/signal.hpp"

#include "nss/butterworth.hpp"

#include <algorithm>
#include <cmath>

namespace nss {

Recording::Recording(SampleMatrix s, double rate, std::string u)
    : samples(std::move(s)), sample_rate(rate), units(std::move(u)) {
    if (!(sample_rate > 0.0)) throw ConfigError("sample_rate must be > 0");
    if (samples.rows() < 1) throw ConfigError("channel_count must be positive");
}

void DetectionConfig::validate(double sample_rate) const {
    if (!(sample_rate > 0.0)) throw ConfigError("sample_rate must be > 0");
    if (!(band_low_hz > 0.0)) throw ConfigError("band_low_hz must be > 0");
    if (!(band_low_hz < band_high_hz)) throw ConfigError("band_low_hz must be < band_high_hz");
    if (!(band_high_hz < sample_rate / 2.0)) throw ConfigError("band_high_hz must be < sample_rate/2");
    if (filter_order < 1) throw ConfigError("filter_order must be >= 1");
    if (!(mad_multiplier > 0.0)) throw ConfigError("mad_multiplier must be > 0");
    if (!(dead_time_ms >= 0.0)) throw ConfigError("dead_time_ms must be >= 0");
    if (!(streaming_window_s > 0.0)) throw ConfigError("streaming_window_s must be > 0");
    const double n = window_ms * sample_rate / 1000.0;
    if (!(window_ms > 0.0) || std::abs(n - std::round(n)) > 1e-9 || std::round(n) < 1) {
        throw ConfigError("window_ms must give an integer sample count at this sample_rate");
    }
}

int DetectionConfig::window_samples(double sample_rate) const {
    return static_cast<int>(std::lround(window_ms * sample_rate / 1000.0));
}

int DetectionConfig::dead_time_samples(double sample_rate) const {
    return static_cast<int>(std::lround(dead_time_ms * sample_rate / 1000.0));
}

Recording bandpass_filter(const Recording& rec, const DetectionConfig& cfg) {
    cfg.validate(rec.sample_rate);
    const ButterworthBandpass filter(cfg.filter_order, cfg.band_low_hz, cfg.band_high_hz, rec.sample_rate);
    Recording out = rec;
    for (int c = 0; c < rec.channel_count(); ++c) filter.apply(rec.channel(c), out.channel(c));
    return out;
}

double median_absolute_deviation(std::span<const double> x) {
    if (x.empty()) return 0.0;
    auto median_of = [](std::vector<double>& v) {
        const std::size_t mid = v.size() / 2;
        std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
        double m = v[mid];
        if (v.size() % 2 == 0) {
            m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<long>(mid)));
        }
        return m;
    };
    std::vector<double> work(x.begin(), x.end());
    const double med = median_of(work);
    for (std::size_t i = 0; i < x.size(); ++i) work[i] = std::abs(x[i] - med);
    return median_of(work);
}

ChannelThresholds mad_threshold(const Recording& rec, const DetectionConfig& cfg) {
    long n = rec.sample_count();
    if (cfg.threshold_window == ThresholdWindow::Streaming) {
        n = std::min<long>(n, std::lround(cfg.streaming_window_s * rec.sample_rate));
    }
    ChannelThresholds out;
    for (int c = 0; c < rec.channel_count(); ++c) {
        const double mad = median_absolute_deviation(rec.channel(c).first(static_cast<std::size_t>(n)));
        out.values.push_back(cfg.mad_multiplier * mad);
        if (!(mad > 0.0)) out.degenerate_channels.push_back(c);
    }
    return out;
}

namespace {

struct Region {
    long first;
    long last;
};

/// Shared merge/peak logic for any per-sample "is suprathreshold" predicate.
template <class IsActive>
std::vector<Detection> regions_to_detections(const Recording& rec, int dead_samples, IsActive&& active) {
    std::vector<Region> regions;
    const long n = rec.sample_count();
    for (long t = 0; t < n; ++t) {
        if (!active(t)) continue;
        const long gap = regions.empty() ? -1 : t - regions.back().last;
        if (gap == 1 || (gap > 0 && gap < dead_samples)) {
            regions.back().last = t;
        } else {
            regions.push_back({t, t});
        }
    }

    std::vector<Detection> out;
    out.reserve(regions.size());
    for (const auto& r : regions) {
        Detection d{r.first, 0.0, 0};
        double best = -1.0;
        for (long t = r.first; t <= r.last; ++t) {
            for (int c = 0; c < rec.channel_count(); ++c) {
                const double v = std::abs(rec.samples(c, t));
                if (v > best) {
                    best = v;
                    d.sample = t;
                    d.peak_channel = c;
                }
            }
        }
        d.time_s = static_cast<double>(d.sample) / rec.sample_rate;
        out.push_back(d);
    }
    return out;
}

std::vector<int> usable_channels(const Recording& rec, const ChannelThresholds& th) {
    std::vector<int> out;
    for (int c = 0; c < rec.channel_count(); ++c) {
        if (std::find(th.degenerate_channels.begin(), th.degenerate_channels.end(), c) ==
                th.degenerate_channels.end() &&
            th.values.at(static_cast<std::size_t>(c)) > 0.0) {
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace

std::vector<Detection> detect_spikes(const Recording& rec, const ChannelThresholds& thresholds,
                                     const DetectionConfig& cfg) {
    if (thresholds.values.size() != static_cast<std::size_t>(rec.channel_count())) {
        throw DimensionError("threshold count does not match channel count");
    }
    const auto channels = usable_channels(rec, thresholds);
    if (channels.empty()) return {};
    return regions_to_detections(rec, cfg.dead_time_samples(rec.sample_rate), [&](long t) {
        for (int c : channels) {
            if (std::abs(rec.samples(c, t)) > thresholds.values[static_cast<std::size_t>(c)]) return true;
        }
        return false;
    });
}

std::vector<double> nonlinear_energy(std::span<const double> x) {
    std::vector<double> psi(x.size(), 0.0);
    for (std::size_t i = 1; i + 1 < x.size(); ++i) psi[i] = x[i] * x[i] - x[i - 1] * x[i + 1];
    return psi;
}

std::vector<Detection> neo_detect(const Recording& rec, const DetectionConfig& cfg, const NeoConfig& neo) {
    if (!(neo.multiplier > 0.0)) throw ConfigError("neo multiplier must be > 0");
    if (neo.smoothing_samples < 1) throw ConfigError("neo smoothing_samples must be >= 1");
    const long n = rec.sample_count();
    if (n < 3) return {};

    // Smoothed energy per channel; the moving average is clipped to the
    // interior samples where the operator is defined.
    std::vector<std::vector<double>> energy;
    std::vector<double> thresholds;
    const long half = neo.smoothing_samples / 2;
    for (int c = 0; c < rec.channel_count(); ++c) {
        const auto psi = nonlinear_energy(rec.channel(c));
        std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
        for (long i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + psi[i];
        std::vector<double> smooth(static_cast<std::size_t>(n), 0.0);
        double total = 0.0;
        for (long i = 1; i < n - 1; ++i) {
            const long lo = std::max<long>(1, i - half);
            const long hi = std::min<long>(n - 2, i + (neo.smoothing_samples - 1 - half));
            smooth[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
            total += smooth[i];
        }
        const double mean = total / static_cast<double>(n - 2);
        thresholds.push_back(neo.multiplier * mean);
        energy.push_back(std::move(smooth));
    }

    return regions_to_detections(rec, cfg.dead_time_samples(rec.sample_rate), [&](long t) {
        for (std::size_t c = 0; c < energy.size(); ++c) {
            if (thresholds[c] > 0.0 && energy[c][t] > thresholds[c]) return true;
        }
        return false;
    });
}

std::vector<SpikeWaveform> extract_waveforms(const Recording& rec, std::span<const Detection> detections,
                                             const DetectionConfig& cfg) {
    const int w = cfg.window_samples(rec.sample_rate);
    const int half = w / 2;
    const int n_ch = rec.channel_count();
    std::vector<SpikeWaveform> out;
    out.reserve(detections.size());
    for (const auto& d : detections) {
        const long start = d.sample - half;
        if (start < 0 || start + w > rec.sample_count()) continue;
        SpikeWaveform sw;
        sw.vector.resize(static_cast<Eigen::Index>(n_ch) * w);
        for (int c = 0; c < n_ch; ++c) {
            sw.vector.segment(static_cast<Eigen::Index>(c) * w, w) = rec.samples.row(c).segment(start, w).transpose();
        }
        sw.timestamp = d.time_s;
        sw.peak_channel = d.peak_channel;
        out.push_back(std::move(sw));
    }
    return out;
}

}  // namespace nss
