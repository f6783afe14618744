#include "nss/butterworth.hpp"

#include "nss/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nss {

namespace {

using cplx = std::complex<double>;

Biquad section_from_poles(cplx p1, cplx p2) {
    // Zeros at z = +1 (from s = 0) and z = -1 (from s = infinity).
    Biquad s;
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;
    s.a1 = -(p1 + p2).real();
    s.a2 = (p1 * p2).real();
    return s;
}

}  // namespace

std::complex<double> Biquad::response(std::complex<double> z_inv) const {
    const cplx num = b0 + b1 * z_inv + b2 * z_inv * z_inv;
    const cplx den = 1.0 + a1 * z_inv + a2 * z_inv * z_inv;
    return num / den;
}

ButterworthBandpass::ButterworthBandpass(int order, double low_hz, double high_hz, double sample_rate)
    : order_(order), sample_rate_(sample_rate) {
    if (order < 1) throw ConfigError("filter_order must be >= 1");
    if (!(sample_rate > 0.0)) throw ConfigError("sample_rate must be > 0");
    if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < sample_rate / 2.0)) {
        throw ConfigError("band edges must satisfy 0 < band_low_hz < band_high_hz < sample_rate/2");
    }

    const double fs2 = 2.0 * sample_rate;
    const double w_low = fs2 * std::tan(std::numbers::pi * low_hz / sample_rate);
    const double w_high = fs2 * std::tan(std::numbers::pi * high_hz / sample_rate);
    const double bw = w_high - w_low;
    const double w0_sq = w_low * w_high;

    std::vector<cplx> complex_poles;
    std::vector<double> real_poles;
    for (int k = 0; k < order; ++k) {
        const cplx proto = std::polar(1.0, std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order));
        const cplx half = proto * bw / 2.0;
        const cplx disc = std::sqrt(half * half - w0_sq);
        for (const cplx s : {half + disc, half - disc}) {
            const cplx z = (fs2 + s) / (fs2 - s);
            if (std::abs(z.imag()) < 1e-12) {
                real_poles.push_back(z.real());
            } else if (z.imag() > 0.0) {
                complex_poles.push_back(z);
            }
        }
    }
    std::sort(real_poles.begin(), real_poles.end());
    if (real_poles.size() % 2 != 0) throw NumericalFault("unpaired real pole in band-pass design");

    for (const cplx p : complex_poles) sections_.push_back(section_from_poles(p, std::conj(p)));
    for (std::size_t i = 0; i < real_poles.size(); i += 2) {
        sections_.push_back(section_from_poles(real_poles[i], real_poles[i + 1]));
    }

    // The analog prototype has unit gain at the geometric center, which the
    // bilinear map sends to this digital frequency.
    const double w_center = 2.0 * std::atan(std::sqrt(w0_sq) / fs2);
    const cplx z_inv = std::polar(1.0, -w_center);
    cplx h = 1.0;
    for (const auto& s : sections_) h *= s.response(z_inv);
    const double gain = 1.0 / std::abs(h);
    sections_.front().b0 *= gain;
    sections_.front().b1 *= gain;
    sections_.front().b2 *= gain;
}

double ButterworthBandpass::magnitude(double freq_hz) const {
    const cplx z_inv = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / sample_rate_);
    cplx h = 1.0;
    for (const auto& s : sections_) h *= s.response(z_inv);
    return std::abs(h);
}

void ButterworthBandpass::apply(std::span<const double> in, std::span<double> out) const {
    if (in.size() != out.size()) throw DimensionError("filter input/output length mismatch");
    std::copy(in.begin(), in.end(), out.begin());
    for (const auto& s : sections_) {
        double z1 = 0.0, z2 = 0.0;
        for (double& x : out) {
            const double y = s.b0 * x + z1;
            z1 = s.b1 * x - s.a1 * y + z2;
            z2 = s.b2 * x - s.a2 * y;
            x = y;
        }
    }
}

std::vector<double> ButterworthBandpass::apply(std::span<const double> in) const {
    std::vector<double> out(in.size());
    apply(in, out);
    return out;
}

}  // namespace nss
