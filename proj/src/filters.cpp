#include "wpt/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wpt {

namespace {

using Cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Chebyshev type-I low-pass prototype poles (cutoff 1 rad/s).
std::vector<Cplx> cheby1_prototype_poles(int order, double ripple_db) {
    const double eps = std::sqrt(std::pow(10.0, ripple_db / 10.0) - 1.0);
    const double a = std::asinh(1.0 / eps) / order;
    std::vector<Cplx> poles;
    poles.reserve(order);
    for (int k = 1; k <= order; ++k) {
        const double theta = kPi * (2.0 * k - 1.0) / (2.0 * order);
        poles.emplace_back(-std::sinh(a) * std::sin(theta), std::cosh(a) * std::cos(theta));
    }
    return poles;
}

}  // namespace

SosFilter::SosFilter(std::vector<Biquad> sections)
    : sections_(std::move(sections)), s1_(sections_.size(), 0.0), s2_(sections_.size(), 0.0) {}

void SosFilter::reset() {
    std::fill(s1_.begin(), s1_.end(), 0.0);
    std::fill(s2_.begin(), s2_.end(), 0.0);
}

double SosFilter::step(double x) {
    double y = x;
    for (std::size_t i = 0; i < sections_.size(); ++i) {
        y = sections_[i].step(y, s1_[i], s2_[i]);
    }
    return y;
}

std::vector<double> SosFilter::process(std::span<const double> x) {
    std::vector<double> out(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        out[n] = step(x[n]);
    }
    return out;
}

std::complex<double> SosFilter::response(double f_hz, double fs_hz) const {
    const double w = 2.0 * kPi * f_hz / fs_hz;
    const Cplx z_inv = std::exp(Cplx(0.0, -w));
    Cplx h{1.0, 0.0};
    for (const Biquad& s : sections_) {
        const Cplx num = s.b0 + s.b1 * z_inv + s.b2 * z_inv * z_inv;
        const Cplx den = 1.0 + s.a1 * z_inv + s.a2 * z_inv * z_inv;
        h *= num / den;
    }
    return h;
}

double SosFilter::group_delay_samples(double f_hz, double fs_hz) const {
    const double df = fs_hz * 1e-6;
    const Cplx h1 = response(f_hz - df, fs_hz);
    const Cplx h2 = response(f_hz + df, fs_hz);
    const double dphi = std::arg(h2 / h1);  // wrapped difference
    const double dw = 2.0 * kPi * (2.0 * df) / fs_hz;
    return -dphi / dw;
}

double SosFilter::noise_bandwidth_hz(double fs_hz, int grid) const {
    double sum = 0.0;
    double peak = 0.0;
    const double df = 0.5 * fs_hz / grid;
    for (int i = 0; i < grid; ++i) {
        const double f = (i + 0.5) * df;
        const double g = std::norm(response(f, fs_hz));
        sum += g * df;
        peak = std::max(peak, g);
    }
    return peak > 0.0 ? sum / peak : 0.0;
}

double SosFilter::peak_gain(double f_lo_hz, double f_hi_hz, double fs_hz, int grid) const {
    double peak = 0.0;
    for (int i = 0; i <= grid; ++i) {
        const double f = f_lo_hz + (f_hi_hz - f_lo_hz) * i / grid;
        peak = std::max(peak, std::abs(response(f, fs_hz)));
    }
    return peak;
}

SosFilter cheby1_bandpass(int lp_order, double ripple_db, double f_center_hz,
                          double bandwidth_hz, double fs_hz) {
    if (lp_order < 1 || ripple_db <= 0.0 || bandwidth_hz <= 0.0) {
        throw std::invalid_argument("cheby1_bandpass: bad design parameters");
    }
    if (f_center_hz - 0.5 * bandwidth_hz <= 0.0 || f_center_hz + 0.5 * bandwidth_hz >= 0.5 * fs_hz) {
        throw std::invalid_argument("cheby1_bandpass: band does not fit below Nyquist");
    }

    // Prewarp the band edges for the bilinear transform.
    const auto warp = [fs_hz](double f) { return 2.0 * fs_hz * std::tan(kPi * f / fs_hz); };
    const double w1 = warp(f_center_hz - 0.5 * bandwidth_hz);
    const double w2 = warp(f_center_hz + 0.5 * bandwidth_hz);
    const double w0 = std::sqrt(w1 * w2);
    const double bw = w2 - w1;

    // Low-pass prototype -> band-pass pole pairs.
    std::vector<Cplx> poles;
    for (const Cplx& p : cheby1_prototype_poles(lp_order, ripple_db)) {
        const Cplx pb = p * (bw / 2.0);
        const Cplx disc = std::sqrt(pb * pb - w0 * w0);
        poles.push_back(pb + disc);
        poles.push_back(pb - disc);
    }

    // Bilinear transform of poles; zeros land at z = +1 and z = -1 (one pair
    // per prototype pole).
    const double k2 = 2.0 * fs_hz;
    std::vector<Cplx> zpoles;
    zpoles.reserve(poles.size());
    for (const Cplx& p : poles) {
        zpoles.push_back((k2 + p) / (k2 - p));
    }

    // Pair complex-conjugate poles into biquads; attach one (z-1)(z+1)
    // numerator pair to each.
    std::vector<Biquad> sections;
    std::vector<bool> used(zpoles.size(), false);
    for (std::size_t i = 0; i < zpoles.size(); ++i) {
        if (used[i]) {
            continue;
        }
        used[i] = true;
        std::size_t mate = i;
        double best = 1e300;
        for (std::size_t j = i + 1; j < zpoles.size(); ++j) {
            if (used[j]) {
                continue;
            }
            const double d = std::abs(zpoles[j] - std::conj(zpoles[i]));
            if (d < best) {
                best = d;
                mate = j;
            }
        }
        if (mate == i) {
            throw std::runtime_error("cheby1_bandpass: unpaired pole");
        }
        used[mate] = true;
        const Cplx p1 = zpoles[i];
        const Cplx p2 = zpoles[mate];
        Biquad s;
        s.b0 = 1.0;
        s.b1 = 0.0;
        s.b2 = -1.0;  // zeros at +/-1
        s.a1 = -(p1 + p2).real();
        s.a2 = (p1 * p2).real();
        sections.push_back(s);
    }

    SosFilter filter(std::move(sections));
    // Normalize the peak passband gain to 1.
    const double peak = filter.peak_gain(f_center_hz - 0.6 * bandwidth_hz,
                                         f_center_hz + 0.6 * bandwidth_hz, fs_hz, 1024);
    std::vector<Biquad> scaled = filter.sections();
    if (peak > 0.0 && !scaled.empty()) {
        const double g = 1.0 / peak;
        scaled.front().b0 *= g;
        scaled.front().b1 *= g;
        scaled.front().b2 *= g;
    }
    return SosFilter(std::move(scaled));
}

}  // namespace wpt
