#ifndef WPT_CIRCUIT_HPP
#define WPT_CIRCUIT_HPP

#include <array>
#include <complex>
#include <optional>

#include "wpt/coil.hpp"
#include "wpt/magnetics.hpp"

namespace wpt {

using Complex = std::complex<double>;

enum class RectifierMode { kEquivalentResistance, kDiodeDrop };

// Behavioral rectifier abstraction. The phasor solver always loads the
// matching network with the equivalent ac resistance; the mode only selects
// the ac -> dc output mapping.
struct RectifierModel {
    RectifierMode mode = RectifierMode::kEquivalentResistance;
    double eta = 0.85;      // ac-to-dc conversion efficiency
    double v_drop_v = 0.3;  // per-diode drop for the diode mode

    void validate() const;
};

// Half-bridge driven series-resonant transmitter tank.
struct TxCircuit {
    double v_in_v = 10.0;     // APS output feeding the half bridge
    double c_tx_f = 0.0;      // 0 means "derive for series resonance at f0"
    double r_sh_ohm = 0.4 / 6.0;
    double f0_hz = 1.7e6;
    CoilSpec coil;

    void validate() const;
    double resonant_c_tx() const;            // 1 / ((2 pi f0)^2 L)
    double effective_c_tx() const;           // c_tx_f or the derived value
    double omega() const { return 2.0 * kPi * f0_hz; }
};

// One receiver axis: coil, parallel-series matching network, switched
// modulation capacitor and the behavioral rectifier with its dc load.
struct RxBranch {
    CoilSpec coil;
    double c_p_f = 1.12e-9;   // across the coil terminals
    double c_s_f = 120e-12;   // in series towards the rectifier
    double c_m_f = 280e-12;   // switched, across the rectifier input
    double r_load_ohm = 120.0;
    RectifierModel rectifier;

    void validate() const;
    // Equivalent ac resistance presented by the rectifier + dc load.
    double r_ac_ohm() const;
};

// One steady-state phasor solve of the coupled link.
struct LinkSolution {
    Complex i_tx_a{0.0, 0.0};          // Tx coil current phasor (amplitude convention)
    double v_sh_v = 0.0;               // shunt voltage amplitude
    std::array<double, 3> v_out_v{};   // per-axis rectified dc output
    std::array<double, 3> p_out_w{};   // per-axis dc power into the load
    std::array<double, 3> p_ac_w{};    // per-axis ac power into the rectifier
    std::array<bool, 3> lsk_engaged{}; // echo of the C_M switch states
    double p_in_w = 0.0;               // real power delivered by the drive
    double p_total_out_w = 0.0;

    double i_tx_amplitude() const { return std::abs(i_tx_a); }
};

// Modulated/unmodulated solution pair plus duty-weighted averages.
struct LskAveragedSolution {
    LinkSolution engaged;    // C_M connected on the modulating axes
    LinkSolution released;   // C_M disconnected everywhere
    double duty = 0.5;
    std::array<double, 3> avg_v_out_v{};
    std::array<double, 3> avg_p_out_w{};
    double avg_p_total_out_w = 0.0;
    double avg_p_in_w = 0.0;
    // Duty-weighted RMS of the two current amplitudes; the quantity the SAR
    // i^2 budget sees.
    double i_tx_rms_amplitude = 0.0;
    // Relative difference of the two amplitudes; what the demodulator sees.
    double modulation_depth = 0.0;
};

// Fundamental component of the 0-to-v_in half-bridge square wave:
// amplitude (2/pi) v_in at phase 0.
Complex drive_phasor(const TxCircuit& tx);

// Impedance of the full branch seen from behind the coil EMF: coil ESR and
// inductance plus the matching network loaded by the rectifier, with C_M
// optionally connected across the rectifier input.
Complex rx_input_impedance(const RxBranch& branch, bool with_c_m, double f_hz);

// ac amplitude at the rectifier input -> (dc volts, dc watts).
std::pair<double, double> rectify(double v_ac_amplitude, const RxBranch& branch);

// Full link solve. Branch cross-coupling is neglected unless an override
// matrix is supplied (entries in henries, only off-diagonal used).
LinkSolution solve_link(const TxCircuit& tx, const std::array<RxBranch, 3>& branches,
                        const CouplingSet& couplings, const std::array<bool, 3>& lsk_states,
                        const std::optional<Eigen::Matrix3d>& rx_cross_m = std::nullopt);

// Solves with and without C_M on the masked axes and averages with the given
// duty (fraction of the modulation period the capacitor is connected).
LskAveragedSolution lsk_averaged_solution(const TxCircuit& tx,
                                          const std::array<RxBranch, 3>& branches,
                                          const CouplingSet& couplings, double duty,
                                          const std::array<bool, 3>& modulating_axes,
                                          const std::optional<Eigen::Matrix3d>& rx_cross_m = std::nullopt);

}  // namespace wpt

#endif  // WPT_CIRCUIT_HPP
