#pragma once

#include <complex>
#include <span>
#include <vector>

namespace nss {

/// One second-order section, normalized so a0 = 1. Realized in transposed
/// direct form II.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;

    std::complex<double> response(std::complex<double> z_inv) const;
};

/// Digital Butterworth band-pass designed by the bilinear transform with
/// frequency pre-warping. A prototype of order n yields n sections.
class ButterworthBandpass {
public:
    ButterworthBandpass(int order, double low_hz, double high_hz, double sample_rate);

    const std::vector<Biquad>& sections() const noexcept { return sections_; }
    int order() const noexcept { return order_; }
    double sample_rate() const noexcept { return sample_rate_; }

    /// |H(e^{jw})| of the realized cascade at `freq_hz`.
    double magnitude(double freq_hz) const;

    /// Causal, forward-only filtering with zero initial state.
    void apply(std::span<const double> in, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> in) const;

private:
    int order_;
    double sample_rate_;
    std::vector<Biquad> sections_;
};

}  // namespace nss
