#include "wpt/lsk.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "wpt/errors.hpp"
#include "wpt/geometry.hpp"

namespace wpt {

void ModulatorConfig::validate() const {
    if (!(v_l_v < v_h_v)) {
        throw ConfigError("modulator: v_l must be below v_h");
    }
    if (!(hysteresis_v > 0.0)) {
        throw ConfigError("modulator: hysteresis must be positive");
    }
    if (!(f_low_hz < f_high_hz) || !(f_low_hz > 0.0)) {
        throw ConfigError("modulator: need 0 < f_low < f_high");
    }
    if (!(divider_ratio > 0.0) || divider_ratio > 1.0) {
        throw ConfigError("modulator: divider ratio must be in (0, 1]");
    }
}

const char* to_string(ToneDecision d) {
    switch (d) {
        case ToneDecision::kNone: return "none";
        case ToneDecision::kLowTone: return "low";
        case ToneDecision::kHighTone: return "high";
    }
    return "?";
}

const char* to_string(Band b) {
    switch (b) {
        case Band::kBelow: return "below";
        case Band::kInBand: return "in_band";
        case Band::kAbove: return "above";
    }
    return "?";
}

ModulatorState modulator_step(double v_out_v, const ModulatorConfig& cfg, ModulatorState state) {
    cfg.validate();
    if (v_out_v < 0.0) {
        throw ConfigError("modulator: negative rectified voltage");
    }
    const double v = cfg.divider_ratio * v_out_v;
    const double h = 0.5 * cfg.hysteresis_v;

    // Walk the band up/down one threshold at a time so a large jump still
    // settles in a single call.
    bool moved = true;
    while (moved) {
        moved = false;
        switch (state.band) {
            case Band::kBelow:
                if (v >= cfg.v_l_v + h) {
                    state.band = Band::kInBand;
                    moved = true;
                }
                break;
            case Band::kInBand:
                if (v >= cfg.v_h_v + h) {
                    state.band = Band::kAbove;
                    moved = true;
                } else if (v <= cfg.v_l_v - h) {
                    state.band = Band::kBelow;
                    moved = true;
                }
                break;
            case Band::kAbove:
                if (v <= cfg.v_h_v - h) {
                    state.band = Band::kInBand;
                    moved = true;
                }
                break;
        }
    }

    switch (state.band) {
        case Band::kBelow: state.f_m_hz = 0.0; break;
        case Band::kInBand: state.f_m_hz = cfg.f_low_hz; break;
        case Band::kAbove: state.f_m_hz = cfg.f_high_hz; break;
    }
    return state;
}

void advance_phase(ModulatorState& state, double dt_s) {
    state.phase_rad += 2.0 * kPi * state.f_m_hz * dt_s;
    state.phase_rad = std::fmod(state.phase_rad, 2.0 * kPi);
    if (state.phase_rad < 0.0) {
        state.phase_rad += 2.0 * kPi;
    }
}

void DemodConfig::validate() const {
    if (!(sample_rate_hz > 2.0 * (f_high_hz + bpf_bandwidth_hz))) {
        throw ConfigError("demod: sample rate must exceed 2 (f_high + bandwidth)");
    }
    if (!(decision_window_s > 0.0) || !(bpf_bandwidth_hz > 0.0)) {
        throw ConfigError("demod: window and bandwidth must be positive");
    }
    if (!(energy_ratio_threshold > 0.0)) {
        throw ConfigError("demod: energy ratio threshold must be positive");
    }
    if (!(f_low_hz < f_reference_hz && f_reference_hz < f_high_hz)) {
        throw ConfigError("demod: reference band must sit between the tones");
    }
}

std::vector<double> synthesize_shunt(double i_on_a, double i_off_a, double r_sh_ohm,
                                     double f_m_hz, double duration_s, const DemodConfig& cfg,
                                     double noise_rms_a, std::mt19937_64& rng,
                                     double phase0_rad) {
    cfg.validate();
    if (duration_s + 1e-12 < cfg.decision_window_s) {
        throw ConfigError("synthesize_shunt: duration shorter than the decision window");
    }
    const std::size_t n = static_cast<std::size_t>(std::llround(duration_s * cfg.sample_rate_hz));
    std::vector<double> out(n);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double dt = 1.0 / cfg.sample_rate_hz;
    for (std::size_t k = 0; k < n; ++k) {
        double level = i_off_a;
        if (f_m_hz > 0.0) {
            const double phase = std::fmod(phase0_rad / (2.0 * kPi) + f_m_hz * k * dt, 1.0);
            level = (phase < 0.5) ? i_on_a : i_off_a;
        }
        const double noise = noise_rms_a > 0.0 ? noise_rms_a * gauss(rng) : 0.0;
        out[k] = r_sh_ohm * (level + noise);
    }
    return out;
}

std::vector<double> agc(std::span<const double> samples, const DemodConfig& cfg) {
    if (samples.empty()) {
        throw ConfigError("agc: empty input");
    }
    bool any = false;
    for (double x : samples) {
        if (x != 0.0) {
            any = true;
            break;
        }
    }
    if (!any) {
        throw AllZeroInput("agc: all-zero input");
    }

    // One-pole power tracker seeded from a leading block, so the gain path is
    // exactly scale covariant: agc(c x) == agc(x).
    const std::size_t seed_len = std::min<std::size_t>(64, samples.size());
    double seed = 0.0;
    for (std::size_t k = 0; k < seed_len; ++k) {
        seed += samples[k] * samples[k];
    }
    seed /= static_cast<double>(seed_len);

    const double tau_s = cfg.decision_window_s / 4.0;
    const double alpha = 1.0 - std::exp(-1.0 / (tau_s * cfg.sample_rate_hz));

    std::vector<double> out(samples.size());
    double power = seed;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        power += alpha * (samples[k] * samples[k] - power);
        const double rms = std::sqrt(power);
        out[k] = rms > 0.0 ? cfg.agc_target_v * samples[k] / rms : 0.0;
    }
    return out;
}

namespace {

double band_energy(SosFilter& filter, std::span<const double> x, double mean,
                   std::size_t discard) {
    filter.reset();
    double energy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double y = filter.step(x[k] - mean);
        if (k >= discard) {
            energy += y * y;
        }
    }
    return energy;
}

}  // namespace

DemodResult demodulate(std::span<const double> samples, const DemodConfig& cfg) {
    cfg.validate();
    if (samples.size() < static_cast<std::size_t>(cfg.window_samples())) {
        throw ConfigError("demodulate: fewer samples than one decision window");
    }

    const int lp_order = cfg.bpf_order / 2;
    SosFilter low = cheby1_bandpass(lp_order, cfg.bpf_ripple_db, cfg.f_low_hz,
                                    cfg.bpf_bandwidth_hz, cfg.sample_rate_hz);
    SosFilter high = cheby1_bandpass(lp_order, cfg.bpf_ripple_db, cfg.f_high_hz,
                                     cfg.bpf_bandwidth_hz, cfg.sample_rate_hz);
    SosFilter ref = cheby1_bandpass(lp_order, cfg.bpf_ripple_db, cfg.f_reference_hz,
                                    cfg.bpf_bandwidth_hz, cfg.sample_rate_hz);

    // The envelope pedestal would hit the filters as a large step whose ring
    // swamps small tones, so the window mean comes off first and the ring-in
    // span (a few filter time constants) is excluded from the energies.
    double mean = 0.0;
    for (double x : samples) {
        mean += x;
    }
    mean /= static_cast<double>(samples.size());

    const double gd = std::max(low.group_delay_samples(cfg.f_low_hz, cfg.sample_rate_hz),
                               high.group_delay_samples(cfg.f_high_hz, cfg.sample_rate_hz));
    const double ring_samples = 3.0 * cfg.sample_rate_hz / cfg.bpf_bandwidth_hz;
    const std::size_t discard = std::min(
        samples.size() / 2, static_cast<std::size_t>(std::max(2.0 * gd, ring_samples)));

    DemodResult result;
    result.low_energy = band_energy(low, samples, mean, discard);
    result.high_energy = band_energy(high, samples, mean, discard);
    result.reference_energy = band_energy(ref, samples, mean, discard);

    // Numerical-residue guard: energies far below the working scale never
    // count as a tone.
    const double min_energy = 1e-15 * static_cast<double>(samples.size()) *
                              cfg.agc_target_v * cfg.agc_target_v;
    const double floor = std::max(result.reference_energy, min_energy);
    const double low_ratio = result.low_energy / floor;
    const double high_ratio = result.high_energy / floor;

    if (result.high_energy >= result.low_energy && high_ratio >= cfg.energy_ratio_threshold) {
        result.decision = ToneDecision::kHighTone;
        result.group_delay_s = high.group_delay_samples(cfg.f_high_hz, cfg.sample_rate_hz) /
                               cfg.sample_rate_hz;
    } else if (result.low_energy > result.high_energy && low_ratio >= cfg.energy_ratio_threshold) {
        result.decision = ToneDecision::kLowTone;
        result.group_delay_s = low.group_delay_samples(cfg.f_low_hz, cfg.sample_rate_hz) /
                               cfg.sample_rate_hz;
    }
    return result;
}

ToneDecision demodulate_decision(std::span<const double> samples, const DemodConfig& cfg) {
    return demodulate(samples, cfg).decision;
}

ToneDecision analytic_tone_decision(double modulation_depth, double f_m_hz,
                                    double noise_rms_rel, const DemodConfig& cfg) {
    if (f_m_hz <= 0.0 || modulation_depth <= 0.0) {
        return ToneDecision::kNone;
    }
    // Post-AGC envelope: unit carrier level, square modulation of half
    // amplitude depth/2, fundamental amplitude (4/pi)(depth/2). In-band noise
    // power after a band-pass of noise bandwidth B is sigma^2 * B / (fs/2).
    const double a_fund = (4.0 / kPi) * 0.5 * modulation_depth;
    const double signal_power = 0.5 * a_fund * a_fund;

    static thread_local double cached_bw = -1.0;
    static thread_local double cached_fs = -1.0;
    static thread_local double cached_nbw = 0.0;
    if (cached_bw != cfg.bpf_bandwidth_hz || cached_fs != cfg.sample_rate_hz) {
        SosFilter f = cheby1_bandpass(cfg.bpf_order / 2, cfg.bpf_ripple_db, cfg.f_low_hz,
                                      cfg.bpf_bandwidth_hz, cfg.sample_rate_hz);
        cached_nbw = f.noise_bandwidth_hz(cfg.sample_rate_hz);
        cached_bw = cfg.bpf_bandwidth_hz;
        cached_fs = cfg.sample_rate_hz;
    }
    const double noise_power = noise_rms_rel * noise_rms_rel;
    const double in_band_noise = noise_power * cached_nbw / (0.5 * cfg.sample_rate_hz);

    if (in_band_noise <= 0.0) {
        // Noise-free: any nonzero tone is detectable.
        return f_m_hz >= 0.5 * (cfg.f_low_hz + cfg.f_high_hz) ? ToneDecision::kHighTone
                                                              : ToneDecision::kLowTone;
    }
    const double ratio = (signal_power + in_band_noise) / in_band_noise;
    if (ratio < cfg.energy_ratio_threshold) {
        return ToneDecision::kNone;
    }
    return f_m_hz >= 0.5 * (cfg.f_low_hz + cfg.f_high_hz) ? ToneDecision::kHighTone
                                                          : ToneDecision::kLowTone;
}

void dump_filter_coefficients(const DemodConfig& cfg, std::ostream& os) {
    const int lp_order = cfg.bpf_order / 2;
    for (double fc : {cfg.f_low_hz, cfg.f_reference_hz, cfg.f_high_hz}) {
        SosFilter f = cheby1_bandpass(lp_order, cfg.bpf_ripple_db, fc, cfg.bpf_bandwidth_hz,
                                      cfg.sample_rate_hz);
        os << "# bpf fc=" << fc << " Hz bw=" << cfg.bpf_bandwidth_hz << " Hz fs="
           << cfg.sample_rate_hz << " Hz\n";
        for (const Biquad& s : f.sections()) {
            os << "b=[" << s.b0 << "," << s.b1 << "," << s.b2 << "] a=[1," << s.a1 << ","
               << s.a2 << "]\n";
        }
    }
}

}  // namespace wpt
