#ifndef WPT_LSK_HPP
#define WPT_LSK_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "wpt/errors.hpp"
#include "wpt/filters.hpp"
#include "wpt/geometry.hpp"

namespace wpt {

// Rx-side comparator thresholds and tone plan. Thresholds act on the divided
// output V' = divider_ratio * V_OUT.
struct ModulatorConfig {
    double divider_ratio = 0.5;
    double v_l_v = 1.575;       // lower threshold (V' domain)
    double v_h_v = 1.725;       // upper threshold (V' domain)
    double hysteresis_v = 0.025;
    double f_low_hz = 15e3;
    double f_high_hz = 35e3;

    void validate() const;
};

enum class Band : std::uint8_t { kBelow, kInBand, kAbove };

struct ModulatorState {
    Band band = Band::kBelow;
    double f_m_hz = 0.0;
    double phase_rad = 0.0;  // oscillator phase, continuous across updates
};

enum class ToneDecision : std::uint8_t { kNone, kLowTone, kHighTone };

const char* to_string(ToneDecision d);
const char* to_string(Band b);

// One comparator update. Band moves with hysteresis (up at threshold + h/2,
// down at threshold - h/2); the active frequency follows the band:
// below -> 0, in band -> f_low, above -> f_high.
ModulatorState modulator_step(double v_out_v, const ModulatorConfig& cfg, ModulatorState state);

// Advances the relaxation-oscillator phase; kept separate so the comparator
// update itself stays time-free.
void advance_phase(ModulatorState& state, double dt_s);

// Tx-side demodulation chain settings.
struct DemodConfig {
    double sample_rate_hz = 1e6;
    double agc_target_v = 1.0;
    int bpf_order = 4;          // band-pass order (two biquads)
    double bpf_ripple_db = 0.5;
    double bpf_bandwidth_hz = 6e3;
    double decision_window_s = 2e-3;
    double energy_ratio_threshold = 3.0;
    double f_low_hz = 15e3;
    double f_high_hz = 35e3;
    double f_reference_hz = 25e3;  // noise floor estimation band

    void validate() const;
    int window_samples() const { return static_cast<int>(decision_window_s * sample_rate_hz); }
};

// Baseband shunt-voltage synthesis: the envelope toggles between
// R_SH * i_on and R_SH * i_off at f_m (50% duty) with additive white
// Gaussian noise on the current. f_m = 0 holds the released level.
std::vector<double> synthesize_shunt(double i_on_a, double i_off_a, double r_sh_ohm,
                                     double f_m_hz, double duration_s, const DemodConfig& cfg,
                                     double noise_rms_a, std::mt19937_64& rng,
                                     double phase0_rad = 0.0);

// Scale-invariant RMS normalization toward agc_target. Throws AllZeroInput.
std::vector<double> agc(std::span<const double> samples, const DemodConfig& cfg);

struct DemodResult {
    ToneDecision decision = ToneDecision::kNone;
    double low_energy = 0.0;
    double high_energy = 0.0;
    double reference_energy = 0.0;
    double group_delay_s = 0.0;  // of the winning band filter
};

// Band-pass energy comparison over one decision window (or longer).
DemodResult demodulate(std::span<const double> samples, const DemodConfig& cfg);
ToneDecision demodulate_decision(std::span<const double> samples, const DemodConfig& cfg);

// Analytic stand-in for the DSP chain used by the fast scenario path: given
// the modulation depth and frequency the Rx imposes on the Tx envelope, and
// the configured envelope noise, predicts the post-AGC in-band energy ratio
// and applies the same threshold rule as demodulate().
ToneDecision analytic_tone_decision(double modulation_depth, double f_m_hz,
                                    double noise_rms_rel, const DemodConfig& cfg);

// Writes the tone filter coefficients to the given stream (run-log aid).
void dump_filter_coefficients(const DemodConfig& cfg, std::ostream& os);

}  // namespace wpt

#endif  // WPT_LSK_HPP
