#include "wpt/circuit.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

#include "wpt/errors.hpp"

namespace wpt {

namespace {

constexpr Complex kJ{0.0, 1.0};

Complex capacitor_z(double c_f, double omega) { return 1.0 / (kJ * omega * c_f); }

Complex parallel(Complex a, Complex b) { return a * b / (a + b); }

// Network constants of a branch at a given frequency and C_M state.
struct BranchNetwork {
    Complex z_coil;    // ESR + jwL
    Complex z_cp;      // shunt capacitor at the coil terminals
    Complex z_after;   // series capacitor plus the loaded rectifier node
    Complex z_node;    // rectifier input node (r_ac, optionally || C_M)
    Complex z_total;   // z_coil + z_cp || z_after

    // Rectifier node voltage for a given coil current.
    Complex v_rect(Complex i_coil) const {
        const Complex v_a = i_coil * parallel(z_cp, z_after);
        const Complex i_s = v_a / z_after;
        return i_s * z_node;
    }
};

BranchNetwork branch_network(const RxBranch& b, bool with_c_m, double omega) {
    BranchNetwork n;
    const double r_ac = b.r_ac_ohm();
    n.z_coil = Complex(b.coil.esr_ohm, omega * b.coil.self_inductance_h);
    n.z_cp = capacitor_z(b.c_p_f, omega);
    n.z_node = with_c_m ? parallel(Complex(r_ac, 0.0), capacitor_z(b.c_m_f, omega))
                        : Complex(r_ac, 0.0);
    n.z_after = capacitor_z(b.c_s_f, omega) + n.z_node;
    n.z_total = n.z_coil + parallel(n.z_cp, n.z_after);
    return n;
}

}  // namespace

void RectifierModel::validate() const {
    if (!(eta > 0.0) || eta > 1.0) {
        throw ConfigError("rectifier efficiency must be in (0, 1]");
    }
    if (v_drop_v < 0.0) {
        throw ConfigError("rectifier diode drop must be >= 0");
    }
}

void TxCircuit::validate() const {
    coil.validate();
    if (!(v_in_v >= 0.0) || !std::isfinite(v_in_v)) {
        throw ConfigError("tx v_in must be finite and non-negative");
    }
    if (!(f0_hz > 0.0)) {
        throw ConfigError("tx f0 must be positive");
    }
    if (!(r_sh_ohm > 0.0)) {
        throw ConfigError("tx shunt resistance must be positive");
    }
    if (c_tx_f < 0.0) {
        throw ConfigError("tx c_tx must be positive (or 0 to derive from resonance)");
    }
}

double TxCircuit::resonant_c_tx() const {
    const double w = omega();
    return 1.0 / (w * w * coil.self_inductance_h);
}

double TxCircuit::effective_c_tx() const { return c_tx_f > 0.0 ? c_tx_f : resonant_c_tx(); }

void RxBranch::validate() const {
    coil.validate();
    rectifier.validate();
    if (!(c_p_f > 0.0) || !(c_s_f > 0.0) || !(c_m_f > 0.0)) {
        throw ConfigError("rx matching capacitors must be positive");
    }
    if (!(r_load_ohm > 0.0)) {
        throw ConfigError("rx load resistance must be positive");
    }
}

double RxBranch::r_ac_ohm() const {
    // Fundamental-equivalent resistance of a full-wave rectifier feeding
    // r_load, inflated by the conversion loss.
    return (8.0 / (kPi * kPi)) * r_load_ohm / rectifier.eta;
}

Complex drive_phasor(const TxCircuit& tx) {
    return Complex((2.0 / kPi) * tx.v_in_v, 0.0);
}

Complex rx_input_impedance(const RxBranch& branch, bool with_c_m, double f_hz) {
    branch.validate();
    return branch_network(branch, with_c_m, 2.0 * kPi * f_hz).z_total;
}

std::pair<double, double> rectify(double v_ac_amplitude, const RxBranch& branch) {
    if (v_ac_amplitude < 0.0) {
        throw ConfigError("rectify: negative ac amplitude");
    }
    const RectifierModel& r = branch.rectifier;
    double v_out = 0.0;
    if (r.mode == RectifierMode::kEquivalentResistance) {
        // dc power = eta * ac power into r_ac; with r_ac = (8/pi^2) R/eta the
        // dc mapping collapses to v_out = (pi/4) eta v_ac.
        v_out = (kPi / 4.0) * r.eta * v_ac_amplitude;
    } else {
        v_out = std::max(0.0, v_ac_amplitude - 2.0 * r.v_drop_v);
    }
    return {v_out, v_out * v_out / branch.r_load_ohm};
}

LinkSolution solve_link(const TxCircuit& tx, const std::array<RxBranch, 3>& branches,
                        const CouplingSet& couplings, const std::array<bool, 3>& lsk_states,
                        const std::optional<Eigen::Matrix3d>& rx_cross_m) {
    tx.validate();
    for (const auto& b : branches) {
        b.validate();
    }
    for (int i = 0; i < 3; ++i) {
        if (!std::isfinite(couplings.m_h[i])) {
            throw ConfigError("solve_link: non-finite coupling");
        }
    }

    const double w = tx.omega();
    const Complex z_tx = Complex(tx.coil.esr_ohm + tx.r_sh_ohm, 0.0) +
                         kJ * w * tx.coil.self_inductance_h +
                         capacitor_z(tx.effective_c_tx(), w);
    const Complex v_drive = drive_phasor(tx);

    std::array<BranchNetwork, 3> nets;
    for (int i = 0; i < 3; ++i) {
        nets[i] = branch_network(branches[i], lsk_states[i], w);
    }

    Complex i_tx;
    std::array<Complex, 3> i_rx{};
    const bool has_cross = rx_cross_m.has_value() &&
                           !rx_cross_m->isZero(0.0);
    if (!has_cross) {
        Complex z_refl{0.0, 0.0};
        for (int i = 0; i < 3; ++i) {
            const double wm = w * couplings.m_h[i];
            z_refl += (wm * wm) / nets[i].z_total;
        }
        const Complex z_mesh = z_tx + z_refl;
        if (std::abs(z_mesh) < 1e-12) {
            throw SingularSystem("mesh impedance magnitude below 1e-12 ohm");
        }
        i_tx = v_drive / z_mesh;
        for (int i = 0; i < 3; ++i) {
            i_rx[i] = -kJ * w * couplings.m_h[i] * i_tx / nets[i].z_total;
        }
    } else {
        // Full 4-mesh system with Rx-Rx mutual terms.
        Eigen::Matrix4cd z = Eigen::Matrix4cd::Zero();
        Eigen::Vector4cd rhs = Eigen::Vector4cd::Zero();
        z(0, 0) = z_tx;
        rhs(0) = v_drive;
        for (int i = 0; i < 3; ++i) {
            z(0, i + 1) = kJ * w * couplings.m_h[i];
            z(i + 1, 0) = kJ * w * couplings.m_h[i];
            z(i + 1, i + 1) = nets[i].z_total;
            for (int j = 0; j < 3; ++j) {
                if (i != j) {
                    z(i + 1, j + 1) = kJ * w * (*rx_cross_m)(i, j);
                }
            }
        }
        const Eigen::PartialPivLU<Eigen::Matrix4cd> lu(z);
        const double rcond_proxy = std::abs(lu.determinant());
        if (!(rcond_proxy > 1e-48)) {
            throw SingularSystem("coupled mesh system is singular");
        }
        const Eigen::Vector4cd sol = lu.solve(rhs);
        i_tx = sol(0);
        for (int i = 0; i < 3; ++i) {
            i_rx[i] = sol(i + 1);
        }
    }

    LinkSolution out;
    out.i_tx_a = i_tx;
    out.v_sh_v = tx.r_sh_ohm * std::abs(i_tx);
    out.lsk_engaged = lsk_states;
    out.p_in_w = 0.5 * (v_drive * std::conj(i_tx)).real();
    for (int i = 0; i < 3; ++i) {
        const Complex v_rect = nets[i].v_rect(i_rx[i]);
        const double v_ac = std::abs(v_rect);
        out.p_ac_w[i] = v_ac * v_ac / (2.0 * branches[i].r_ac_ohm());
        const auto [v_dc, p_dc] = rectify(v_ac, branches[i]);
        out.v_out_v[i] = v_dc;
        out.p_out_w[i] = p_dc;
        out.p_total_out_w += p_dc;
    }
    return out;
}

LskAveragedSolution lsk_averaged_solution(const TxCircuit& tx,
                                          const std::array<RxBranch, 3>& branches,
                                          const CouplingSet& couplings, double duty,
                                          const std::array<bool, 3>& modulating_axes,
                                          const std::optional<Eigen::Matrix3d>& rx_cross_m) {
    if (!(duty >= 0.0) || duty > 1.0) {
        throw ConfigError("lsk duty must lie in [0, 1]");
    }
    LskAveragedSolution out;
    out.duty = duty;
    out.released = solve_link(tx, branches, couplings, {false, false, false}, rx_cross_m);
    out.engaged = solve_link(tx, branches, couplings, modulating_axes, rx_cross_m);

    const double don = duty;
    const double doff = 1.0 - duty;
    for (int i = 0; i < 3; ++i) {
        out.avg_v_out_v[i] = don * out.engaged.v_out_v[i] + doff * out.released.v_out_v[i];
        out.avg_p_out_w[i] = don * out.engaged.p_out_w[i] + doff * out.released.p_out_w[i];
    }
    out.avg_p_total_out_w = don * out.engaged.p_total_out_w + doff * out.released.p_total_out_w;
    out.avg_p_in_w = don * out.engaged.p_in_w + doff * out.released.p_in_w;

    const double i_on = out.engaged.i_tx_amplitude();
    const double i_off = out.released.i_tx_amplitude();
    out.i_tx_rms_amplitude = std::sqrt(don * i_on * i_on + doff * i_off * i_off);
    const double i_ref = std::max(i_on, i_off);
    out.modulation_depth = i_ref > 0.0 ? std::abs(i_on - i_off) / i_ref : 0.0;
    return out;
}

}  // namespace wpt
