#ifndef WPT_FILTERS_HPP
#define WPT_FILTERS_HPP

#include <complex>
#include <span>
#include <vector>

namespace wpt {

// One second-order IIR section, direct form II transposed.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;  // denominator, a0 normalized to 1

    double step(double x, double& s1, double& s2) const {
        const double y = b0 * x + s1;
        s1 = b1 * x - a1 * y + s2;
        s2 = b2 * x - a2 * y;
        return y;
    }
};

// Cascade of biquads with per-section state.
class SosFilter {
public:
    explicit SosFilter(std::vector<Biquad> sections);

    void reset();
    double step(double x);
    std::vector<double> process(std::span<const double> x);

    std::complex<double> response(double f_hz, double fs_hz) const;
    const std::vector<Biquad>& sections() const { return sections_; }

    // Group delay (samples) at a frequency, from the numerical phase slope.
    double group_delay_samples(double f_hz, double fs_hz) const;

    // Equivalent noise bandwidth in Hz: integral of |H|^2 df normalized by
    // the peak power gain. Used to predict the in-band noise floor.
    double noise_bandwidth_hz(double fs_hz, int grid = 4096) const;

    double peak_gain(double f_lo_hz, double f_hi_hz, double fs_hz, int grid = 512) const;

private:
    std::vector<Biquad> sections_;
    std::vector<double> s1_, s2_;
};

// Band-pass Chebyshev type-I design (bilinear transform, center prewarped).
// lp_order is the low-pass prototype order, so the band-pass ends up with
// 2 * lp_order poles; lp_order = 2 gives the 4th-order response used by the
// tone detectors. Peak passband gain is normalized to 1.
SosFilter cheby1_bandpass(int lp_order, double ripple_db, double f_center_hz,
                          double bandwidth_hz, double fs_hz);

}  // namespace wpt

#endif  // WPT_FILTERS_HPP
