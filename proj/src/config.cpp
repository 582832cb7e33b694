#include "wpt/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "wpt/errors.hpp"

namespace wpt {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& ctx) {
    if (!j.is_object()) {
        throw ConfigError(ctx + ": expected an object");
    }
}

// Unknown keys are rejected so unit mistakes fail loudly instead of being
// silently ignored.
void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& ctx) {
    require_object(j, ctx);
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError(ctx + ": unknown key '" + item.key() + "'");
        }
    }
}

double get_num(const json& j, const std::string& key, double fallback, const std::string& ctx) {
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j[key].is_number()) {
        throw ConfigError(ctx + "." + key + ": expected a number");
    }
    return j[key].get<double>();
}

int get_int(const json& j, const std::string& key, int fallback, const std::string& ctx) {
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j[key].is_number_integer()) {
        throw ConfigError(ctx + "." + key + ": expected an integer");
    }
    return j[key].get<int>();
}

bool get_bool(const json& j, const std::string& key, bool fallback, const std::string& ctx) {
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j[key].is_boolean()) {
        throw ConfigError(ctx + "." + key + ": expected a boolean");
    }
    return j[key].get<bool>();
}

std::string get_str(const json& j, const std::string& key, const std::string& fallback,
                    const std::string& ctx) {
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j[key].is_string()) {
        throw ConfigError(ctx + "." + key + ": expected a string");
    }
    return j[key].get<std::string>();
}

Vec3 get_vec3(const json& j, const std::string& key, const Vec3& fallback, const std::string& ctx) {
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j[key];
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number()) {
        throw ConfigError(ctx + "." + key + ": expected [x, y, z]");
    }
    return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

Quat get_quat(const json& j, const std::string& key, const Quat& fallback, const std::string& ctx) {
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j[key];
    if (!v.is_array() || v.size() != 4) {
        throw ConfigError(ctx + "." + key + ": expected [w, x, y, z]");
    }
    return Quat(v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>());
}

CoilSpec coil_from_json(const json& j, const CoilSpec& defaults, const std::string& ctx) {
    check_keys(j, {"radius_m", "turns", "turn_pitch_m", "inductance_h", "esr_ohm", "label"}, ctx);
    CoilSpec c = defaults;
    c.radius_m = get_num(j, "radius_m", c.radius_m, ctx);
    c.turns = get_int(j, "turns", c.turns, ctx);
    c.turn_pitch_m = get_num(j, "turn_pitch_m", c.turn_pitch_m, ctx);
    c.self_inductance_h = get_num(j, "inductance_h", c.self_inductance_h, ctx);
    c.esr_ohm = get_num(j, "esr_ohm", c.esr_ohm, ctx);
    c.label = get_str(j, "label", c.label, ctx);
    return c;
}

json coil_to_json(const CoilSpec& c) {
    return json{{"radius_m", c.radius_m},
                {"turns", c.turns},
                {"turn_pitch_m", c.turn_pitch_m},
                {"inductance_h", c.self_inductance_h},
                {"esr_ohm", c.esr_ohm},
                {"label", c.label}};
}

}  // namespace

void TrajectoryConfig::validate() const {
    if (static_coaxial_distance_m.has_value() == !keyframes.empty()) {
        throw ConfigError(
            "trajectory: provide exactly one of static_coaxial_distance_m or keyframes");
    }
    if (static_coaxial_distance_m && !(*static_coaxial_distance_m > 0.0)) {
        throw ConfigError("trajectory: static coaxial distance must be positive");
    }
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& k : keyframes) {
        if (!(k.t_s > prev)) {
            throw ConfigError("trajectory: keyframe timestamps must strictly increase");
        }
        prev = k.t_s;
        k.tx_pose.validate("trajectory tx pose");
        k.capsule_pose.validate("trajectory capsule pose");
    }
}

void RespirationConfig::validate() const {
    if (amplitude_m < 0.0 || frequency_hz < 0.0) {
        throw ConfigError("respiration: amplitude and frequency must be non-negative");
    }
    if (amplitude_m > 0.0 && axis.norm() < 1e-12) {
        throw ConfigError("respiration: axis must be a nonzero vector");
    }
}

void CouplingConfig::validate() const {
    if (segments_per_turn < 8) {
        throw ConfigError("coupling: segments_per_turn must be >= 8");
    }
    if (!(field_attenuation > 0.0) || field_attenuation > 1.0) {
        throw ConfigError("coupling: field attenuation must be in (0, 1]");
    }
}

void ControllerConfig::validate() const {
    if (!(loop_period_s > 0.0)) {
        throw ConfigError("controller: loop period must be positive");
    }
    if (!(v_start_v > 0.0)) {
        throw ConfigError("controller: start voltage must be positive");
    }
}

void SarConfig::validate() const {
    limit.validate();
    if (!(horizon_s > 0.0) || horizon_s > limit.window_s) {
        throw ConfigError("sar: horizon must lie in (0, window]");
    }
}

void ScenarioConfig::validate(double loop_period_s) const {
    if (!(step_s > 0.0) || !(duration_s > 0.0)) {
        throw ConfigError("scenario: step and duration must be positive");
    }
    if (step_s > loop_period_s + 1e-12) {
        throw ConfigError("scenario: engine step must not exceed the control loop period");
    }
    if (!(modulator_period_s > 0.0) || modulator_period_s > loop_period_s + 1e-12) {
        throw ConfigError("scenario: modulator period must lie in (0, loop period]");
    }
    trajectory.validate();
    respiration.validate();
    if (!(target_power_w > 0.0) || !(band_fraction > 0.0) || band_fraction >= 1.0) {
        throw ConfigError("scenario: band parameters out of range");
    }
    if (settle_exclude_s < 0.0) {
        throw ConfigError("scenario: settle window must be non-negative");
    }
}

void GridConfig::validate() const {
    if (distances_m.empty() || v_in_values_v.empty() || lateral_offsets_m.empty()) {
        throw ConfigError("grid: distances, supply values and offsets must be non-empty");
    }
    for (double d : distances_m) {
        if (!(d > 0.0)) {
            throw ConfigError("grid: distances must be positive");
        }
    }
    for (double o : lateral_offsets_m) {
        if (o < 0.0) {
            throw ConfigError("grid: lateral offsets must be non-negative");
        }
    }
}

void RunConfig::validate() const {
    tx.validate();
    for (const auto& b : rx) {
        b.validate();
    }
    modulator.validate();
    demod.validate();
    aps.validate();
    controller.validate();
    sar.validate();
    coupling.validate();
    scenario.validate(controller.loop_period_s);
    if (grid) {
        grid->validate();
    }
    if (controller.v_start_v < aps.v_min_v - 1e-12 || controller.v_start_v > aps.v_max_v + 1e-12) {
        throw ConfigError("controller start voltage outside the APS range");
    }
    if (tx.v_in_v < aps.v_min_v - 1e-12 || tx.v_in_v > aps.v_max_v + 1e-12) {
        throw ConfigError("tx v_in outside the APS range");
    }
}

RunConfig default_config() {
    RunConfig cfg;
    cfg.tx.coil = default_tx_coil();
    cfg.tx.v_in_v = 10.0;
    cfg.rx = {RxBranch{default_rx_coil("rx_x")}, RxBranch{default_rx_coil("rx_y")},
              RxBranch{default_rx_coil("rx_z")}};
    cfg.demod.f_low_hz = cfg.modulator.f_low_hz;
    cfg.demod.f_high_hz = cfg.modulator.f_high_hz;
    cfg.scenario.trajectory.static_coaxial_distance_m = 0.09;
    cfg.scenario.duration_s = 30.0;
    return cfg;
}

RunConfig config_from_json(const json& j) {
    const std::string ctx = "config";
    check_keys(j,
               {"schema_version", "tx", "rx", "modulator", "demod", "aps", "controller", "sar",
                "coupling", "scenario", "grid", "annotation"},
               ctx);
    RunConfig cfg = default_config();

    if (j.contains("schema_version") && get_int(j, "schema_version", 1, ctx) != 1) {
        throw ConfigError("config: unsupported schema_version");
    }

    if (j.contains("tx")) {
        const json& t = j["tx"];
        check_keys(t, {"v_in_v", "c_tx_f", "r_sh_ohm", "f0_hz", "coil"}, "tx");
        cfg.tx.v_in_v = get_num(t, "v_in_v", cfg.tx.v_in_v, "tx");
        cfg.tx.c_tx_f = get_num(t, "c_tx_f", cfg.tx.c_tx_f, "tx");
        cfg.tx.r_sh_ohm = get_num(t, "r_sh_ohm", cfg.tx.r_sh_ohm, "tx");
        cfg.tx.f0_hz = get_num(t, "f0_hz", cfg.tx.f0_hz, "tx");
        if (t.contains("coil")) {
            cfg.tx.coil = coil_from_json(t["coil"], cfg.tx.coil, "tx.coil");
        }
    }

    if (j.contains("rx")) {
        const json& r = j["rx"];
        check_keys(r, {"coil", "c_p_f", "c_s_f", "c_m_f", "r_load_ohm", "rectifier"}, "rx");
        for (int i = 0; i < 3; ++i) {
            RxBranch& b = cfg.rx[i];
            if (r.contains("coil")) {
                const std::string label = b.coil.label;
                b.coil = coil_from_json(r["coil"], b.coil, "rx.coil");
                b.coil.label = label;
            }
            b.c_p_f = get_num(r, "c_p_f", b.c_p_f, "rx");
            b.c_s_f = get_num(r, "c_s_f", b.c_s_f, "rx");
            b.c_m_f = get_num(r, "c_m_f", b.c_m_f, "rx");
            b.r_load_ohm = get_num(r, "r_load_ohm", b.r_load_ohm, "rx");
            if (r.contains("rectifier")) {
                const json& rect = r["rectifier"];
                check_keys(rect, {"mode", "eta", "v_drop_v"}, "rx.rectifier");
                const std::string mode =
                    get_str(rect, "mode", "equivalent_resistance", "rx.rectifier");
                if (mode == "equivalent_resistance") {
                    b.rectifier.mode = RectifierMode::kEquivalentResistance;
                } else if (mode == "diode_drop") {
                    b.rectifier.mode = RectifierMode::kDiodeDrop;
                } else {
                    throw ConfigError("rx.rectifier.mode: unknown mode '" + mode + "'");
                }
                b.rectifier.eta = get_num(rect, "eta", b.rectifier.eta, "rx.rectifier");
                b.rectifier.v_drop_v =
                    get_num(rect, "v_drop_v", b.rectifier.v_drop_v, "rx.rectifier");
            }
        }
    }

    if (j.contains("modulator")) {
        const json& m = j["modulator"];
        check_keys(m, {"divider_ratio", "v_l_v", "v_h_v", "hysteresis_v", "f_low_hz", "f_high_hz"},
                   "modulator");
        cfg.modulator.divider_ratio = get_num(m, "divider_ratio", cfg.modulator.divider_ratio, "modulator");
        cfg.modulator.v_l_v = get_num(m, "v_l_v", cfg.modulator.v_l_v, "modulator");
        cfg.modulator.v_h_v = get_num(m, "v_h_v", cfg.modulator.v_h_v, "modulator");
        cfg.modulator.hysteresis_v = get_num(m, "hysteresis_v", cfg.modulator.hysteresis_v, "modulator");
        cfg.modulator.f_low_hz = get_num(m, "f_low_hz", cfg.modulator.f_low_hz, "modulator");
        cfg.modulator.f_high_hz = get_num(m, "f_high_hz", cfg.modulator.f_high_hz, "modulator");
    }

    if (j.contains("demod")) {
        const json& d = j["demod"];
        check_keys(d,
                   {"sample_rate_hz", "agc_target_v", "bpf_order", "bpf_ripple_db",
                    "bpf_bandwidth_hz", "decision_window_s", "energy_ratio_threshold",
                    "f_reference_hz"},
                   "demod");
        cfg.demod.sample_rate_hz = get_num(d, "sample_rate_hz", cfg.demod.sample_rate_hz, "demod");
        cfg.demod.agc_target_v = get_num(d, "agc_target_v", cfg.demod.agc_target_v, "demod");
        cfg.demod.bpf_order = get_int(d, "bpf_order", cfg.demod.bpf_order, "demod");
        cfg.demod.bpf_ripple_db = get_num(d, "bpf_ripple_db", cfg.demod.bpf_ripple_db, "demod");
        cfg.demod.bpf_bandwidth_hz =
            get_num(d, "bpf_bandwidth_hz", cfg.demod.bpf_bandwidth_hz, "demod");
        cfg.demod.decision_window_s =
            get_num(d, "decision_window_s", cfg.demod.decision_window_s, "demod");
        cfg.demod.energy_ratio_threshold =
            get_num(d, "energy_ratio_threshold", cfg.demod.energy_ratio_threshold, "demod");
        cfg.demod.f_reference_hz = get_num(d, "f_reference_hz", cfg.demod.f_reference_hz, "demod");
    }
    // The demodulator listens at the modulator's tones.
    cfg.demod.f_low_hz = cfg.modulator.f_low_hz;
    cfg.demod.f_high_hz = cfg.modulator.f_high_hz;

    if (j.contains("aps")) {
        const json& a = j["aps"];
        check_keys(a, {"v_min_v", "v_max_v", "step_v", "slew_v_per_s"}, "aps");
        cfg.aps.v_min_v = get_num(a, "v_min_v", cfg.aps.v_min_v, "aps");
        cfg.aps.v_max_v = get_num(a, "v_max_v", cfg.aps.v_max_v, "aps");
        cfg.aps.step_v = get_num(a, "step_v", cfg.aps.step_v, "aps");
        cfg.aps.slew_v_per_s = get_num(a, "slew_v_per_s", cfg.aps.slew_v_per_s, "aps");
    }

    if (j.contains("controller")) {
        const json& c = j["controller"];
        check_keys(c, {"enabled", "loop_period_s", "v_start_v"}, "controller");
        cfg.controller.enabled = get_bool(c, "enabled", cfg.controller.enabled, "controller");
        cfg.controller.loop_period_s =
            get_num(c, "loop_period_s", cfg.controller.loop_period_s, "controller");
        cfg.controller.v_start_v = get_num(c, "v_start_v", cfg.controller.v_start_v, "controller");
    }

    if (j.contains("sar")) {
        const json& s = j["sar"];
        check_keys(s, {"i_max_const_a", "window_s", "horizon_s", "hard_stop"}, "sar");
        cfg.sar.limit.i_max_const_a = get_num(s, "i_max_const_a", cfg.sar.limit.i_max_const_a, "sar");
        cfg.sar.limit.window_s = get_num(s, "window_s", cfg.sar.limit.window_s, "sar");
        cfg.sar.horizon_s = get_num(s, "horizon_s", cfg.sar.horizon_s, "sar");
        cfg.sar.hard_stop = get_bool(s, "hard_stop", cfg.sar.hard_stop, "sar");
    }

    if (j.contains("coupling")) {
        const json& c = j["coupling"];
        check_keys(c, {"method", "segments_per_turn", "field_attenuation", "rx_cross_coupling_h"},
                   "coupling");
        const std::string method = get_str(c, "method", "filament", "coupling");
        if (method == "filament") {
            cfg.coupling.method = CouplingMethod::kFilament;
        } else if (method == "dipole") {
            cfg.coupling.method = CouplingMethod::kDipole;
        } else if (method == "uniform_field") {
            cfg.coupling.method = CouplingMethod::kUniformField;
        } else {
            throw ConfigError("coupling.method: unknown method '" + method + "'");
        }
        cfg.coupling.segments_per_turn =
            get_int(c, "segments_per_turn", cfg.coupling.segments_per_turn, "coupling");
        cfg.coupling.field_attenuation =
            get_num(c, "field_attenuation", cfg.coupling.field_attenuation, "coupling");
        if (c.contains("rx_cross_coupling_h")) {
            const json& m = c["rx_cross_coupling_h"];
            if (!m.is_array() || m.size() != 3) {
                throw ConfigError("coupling.rx_cross_coupling_h: expected a 3x3 array");
            }
            Eigen::Matrix3d cross;
            for (int r = 0; r < 3; ++r) {
                if (!m[r].is_array() || m[r].size() != 3) {
                    throw ConfigError("coupling.rx_cross_coupling_h: expected a 3x3 array");
                }
                for (int cidx = 0; cidx < 3; ++cidx) {
                    cross(r, cidx) = m[r][cidx].get<double>();
                }
            }
            cfg.coupling.rx_cross_m = cross;
        }
    }

    if (j.contains("scenario")) {
        const json& s = j["scenario"];
        check_keys(s,
                   {"step_s", "duration_s", "modulator_period_s", "trajectory", "respiration",
                    "noise_seed", "noise_rms_a", "full_dsp", "multi_axis_lsk", "target_power_w",
                    "band_fraction", "settle_exclude_s"},
                   "scenario");
        cfg.scenario.step_s = get_num(s, "step_s", cfg.scenario.step_s, "scenario");
        cfg.scenario.duration_s = get_num(s, "duration_s", cfg.scenario.duration_s, "scenario");
        cfg.scenario.modulator_period_s =
            get_num(s, "modulator_period_s", cfg.scenario.modulator_period_s, "scenario");
        if (s.contains("trajectory")) {
            const json& t = s["trajectory"];
            check_keys(t, {"static_coaxial_distance_m", "keyframes"}, "scenario.trajectory");
            if (t.contains("static_coaxial_distance_m") && t.contains("keyframes")) {
                throw ConfigError(
                    "scenario.trajectory: static_coaxial_distance_m and keyframes are exclusive");
            }
            cfg.scenario.trajectory = TrajectoryConfig{};
            if (t.contains("static_coaxial_distance_m")) {
                cfg.scenario.trajectory.static_coaxial_distance_m =
                    get_num(t, "static_coaxial_distance_m", 0.0, "scenario.trajectory");
            }
            if (t.contains("keyframes")) {
                const json& ks = t["keyframes"];
                if (!ks.is_array()) {
                    throw ConfigError("scenario.trajectory.keyframes: expected an array");
                }
                for (const json& k : ks) {
                    check_keys(k,
                               {"t_s", "tx_position_m", "tx_quat_wxyz", "capsule_position_m",
                                "capsule_quat_wxyz"},
                               "keyframe");
                    TrajectoryKeyframe kf;
                    kf.t_s = get_num(k, "t_s", 0.0, "keyframe");
                    kf.tx_pose.position = get_vec3(k, "tx_position_m", Vec3::Zero(), "keyframe");
                    kf.tx_pose.orientation =
                        get_quat(k, "tx_quat_wxyz", Quat::Identity(), "keyframe").normalized();
                    kf.capsule_pose.position =
                        get_vec3(k, "capsule_position_m", Vec3(0, 0, 0.09), "keyframe");
                    kf.capsule_pose.orientation =
                        get_quat(k, "capsule_quat_wxyz", Quat::Identity(), "keyframe").normalized();
                    cfg.scenario.trajectory.keyframes.push_back(kf);
                }
            }
        }
        if (s.contains("respiration")) {
            const json& r = s["respiration"];
            check_keys(r, {"amplitude_m", "frequency_hz", "axis"}, "scenario.respiration");
            cfg.scenario.respiration.amplitude_m =
                get_num(r, "amplitude_m", cfg.scenario.respiration.amplitude_m, "respiration");
            cfg.scenario.respiration.frequency_hz =
                get_num(r, "frequency_hz", cfg.scenario.respiration.frequency_hz, "respiration");
            cfg.scenario.respiration.axis =
                get_vec3(r, "axis", cfg.scenario.respiration.axis, "respiration");
        }
        if (s.contains("noise_seed")) {
            cfg.scenario.noise_seed = s["noise_seed"].get<std::uint64_t>();
        }
        cfg.scenario.noise_rms_a = get_num(s, "noise_rms_a", cfg.scenario.noise_rms_a, "scenario");
        cfg.scenario.full_dsp = get_bool(s, "full_dsp", cfg.scenario.full_dsp, "scenario");
        cfg.scenario.multi_axis_lsk =
            get_bool(s, "multi_axis_lsk", cfg.scenario.multi_axis_lsk, "scenario");
        cfg.scenario.target_power_w =
            get_num(s, "target_power_w", cfg.scenario.target_power_w, "scenario");
        cfg.scenario.band_fraction =
            get_num(s, "band_fraction", cfg.scenario.band_fraction, "scenario");
        cfg.scenario.settle_exclude_s =
            get_num(s, "settle_exclude_s", cfg.scenario.settle_exclude_s, "scenario");
    }

    if (j.contains("grid")) {
        const json& g = j["grid"];
        check_keys(g, {"distances_m", "v_in_values_v", "lateral_offsets_m"}, "grid");
        GridConfig grid;
        if (g.contains("distances_m")) {
            grid.distances_m = g["distances_m"].get<std::vector<double>>();
        }
        if (g.contains("v_in_values_v")) {
            grid.v_in_values_v = g["v_in_values_v"].get<std::vector<double>>();
        }
        if (g.contains("lateral_offsets_m")) {
            grid.lateral_offsets_m = g["lateral_offsets_m"].get<std::vector<double>>();
        }
        cfg.grid = grid;
    }

    cfg.annotation = get_str(j, "annotation", "", ctx);

    cfg.validate();
    return cfg;
}

json config_to_json(const RunConfig& cfg) {
    json j;
    j["schema_version"] = 1;
    j["tx"] = {{"v_in_v", cfg.tx.v_in_v},
               {"c_tx_f", cfg.tx.c_tx_f},
               {"r_sh_ohm", cfg.tx.r_sh_ohm},
               {"f0_hz", cfg.tx.f0_hz},
               {"coil", coil_to_json(cfg.tx.coil)}};
    const RxBranch& b = cfg.rx[0];
    j["rx"] = {{"coil", coil_to_json(b.coil)},
               {"c_p_f", b.c_p_f},
               {"c_s_f", b.c_s_f},
               {"c_m_f", b.c_m_f},
               {"r_load_ohm", b.r_load_ohm},
               {"rectifier",
                {{"mode", b.rectifier.mode == RectifierMode::kEquivalentResistance
                              ? "equivalent_resistance"
                              : "diode_drop"},
                 {"eta", b.rectifier.eta},
                 {"v_drop_v", b.rectifier.v_drop_v}}}};
    j["modulator"] = {{"divider_ratio", cfg.modulator.divider_ratio},
                      {"v_l_v", cfg.modulator.v_l_v},
                      {"v_h_v", cfg.modulator.v_h_v},
                      {"hysteresis_v", cfg.modulator.hysteresis_v},
                      {"f_low_hz", cfg.modulator.f_low_hz},
                      {"f_high_hz", cfg.modulator.f_high_hz}};
    j["demod"] = {{"sample_rate_hz", cfg.demod.sample_rate_hz},
                  {"agc_target_v", cfg.demod.agc_target_v},
                  {"bpf_order", cfg.demod.bpf_order},
                  {"bpf_ripple_db", cfg.demod.bpf_ripple_db},
                  {"bpf_bandwidth_hz", cfg.demod.bpf_bandwidth_hz},
                  {"decision_window_s", cfg.demod.decision_window_s},
                  {"energy_ratio_threshold", cfg.demod.energy_ratio_threshold},
                  {"f_reference_hz", cfg.demod.f_reference_hz}};
    j["aps"] = {{"v_min_v", cfg.aps.v_min_v},
                {"v_max_v", cfg.aps.v_max_v},
                {"step_v", cfg.aps.step_v},
                {"slew_v_per_s", cfg.aps.slew_v_per_s}};
    j["controller"] = {{"enabled", cfg.controller.enabled},
                       {"loop_period_s", cfg.controller.loop_period_s},
                       {"v_start_v", cfg.controller.v_start_v}};
    j["sar"] = {{"i_max_const_a", cfg.sar.limit.i_max_const_a},
                {"window_s", cfg.sar.limit.window_s},
                {"horizon_s", cfg.sar.horizon_s},
                {"hard_stop", cfg.sar.hard_stop}};
    json coupling = {{"method", cfg.coupling.method == CouplingMethod::kFilament ? "filament"
                                : cfg.coupling.method == CouplingMethod::kDipole
                                    ? "dipole"
                                    : "uniform_field"},
                     {"segments_per_turn", cfg.coupling.segments_per_turn},
                     {"field_attenuation", cfg.coupling.field_attenuation}};
    if (cfg.coupling.rx_cross_m) {
        json m = json::array();
        for (int r = 0; r < 3; ++r) {
            m.push_back({(*cfg.coupling.rx_cross_m)(r, 0), (*cfg.coupling.rx_cross_m)(r, 1),
                         (*cfg.coupling.rx_cross_m)(r, 2)});
        }
        coupling["rx_cross_coupling_h"] = m;
    }
    j["coupling"] = coupling;

    json traj;
    if (cfg.scenario.trajectory.static_coaxial_distance_m) {
        traj["static_coaxial_distance_m"] = *cfg.scenario.trajectory.static_coaxial_distance_m;
    } else {
        json ks = json::array();
        for (const auto& k : cfg.scenario.trajectory.keyframes) {
            ks.push_back(
                {{"t_s", k.t_s},
                 {"tx_position_m",
                  {k.tx_pose.position.x(), k.tx_pose.position.y(), k.tx_pose.position.z()}},
                 {"tx_quat_wxyz",
                  {k.tx_pose.orientation.w(), k.tx_pose.orientation.x(),
                   k.tx_pose.orientation.y(), k.tx_pose.orientation.z()}},
                 {"capsule_position_m",
                  {k.capsule_pose.position.x(), k.capsule_pose.position.y(),
                   k.capsule_pose.position.z()}},
                 {"capsule_quat_wxyz",
                  {k.capsule_pose.orientation.w(), k.capsule_pose.orientation.x(),
                   k.capsule_pose.orientation.y(), k.capsule_pose.orientation.z()}}});
        }
        traj["keyframes"] = ks;
    }
    j["scenario"] = {{"step_s", cfg.scenario.step_s},
                     {"duration_s", cfg.scenario.duration_s},
                     {"modulator_period_s", cfg.scenario.modulator_period_s},
                     {"trajectory", traj},
                     {"respiration",
                      {{"amplitude_m", cfg.scenario.respiration.amplitude_m},
                       {"frequency_hz", cfg.scenario.respiration.frequency_hz},
                       {"axis",
                        {cfg.scenario.respiration.axis.x(), cfg.scenario.respiration.axis.y(),
                         cfg.scenario.respiration.axis.z()}}}},
                     {"noise_seed", cfg.scenario.noise_seed},
                     {"noise_rms_a", cfg.scenario.noise_rms_a},
                     {"full_dsp", cfg.scenario.full_dsp},
                     {"multi_axis_lsk", cfg.scenario.multi_axis_lsk},
                     {"target_power_w", cfg.scenario.target_power_w},
                     {"band_fraction", cfg.scenario.band_fraction},
                     {"settle_exclude_s", cfg.scenario.settle_exclude_s}};
    if (cfg.grid) {
        j["grid"] = {{"distances_m", cfg.grid->distances_m},
                     {"v_in_values_v", cfg.grid->v_in_values_v},
                     {"lateral_offsets_m", cfg.grid->lateral_offsets_m}};
    }
    if (!cfg.annotation.empty()) {
        j["annotation"] = cfg.annotation;
    }
    return j;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

void set_json_path(nlohmann::json& doc, const std::string& dotted_path, double value) {
    if (dotted_path.empty()) {
        throw InvalidParameterPath("empty parameter path");
    }
    json* node = &doc;
    std::stringstream ss(dotted_path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) {
            throw InvalidParameterPath("parameter path '" + dotted_path + "' has an empty segment");
        }
        parts.push_back(part);
    }
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->is_object() || !node->contains(parts[i])) {
            throw InvalidParameterPath("parameter path '" + dotted_path +
                                       "' does not resolve at '" + parts[i] + "'");
        }
        node = &(*node)[parts[i]];
    }
    if (!node->is_object() || !node->contains(parts.back()) ||
        !(*node)[parts.back()].is_number()) {
        throw InvalidParameterPath("parameter path '" + dotted_path +
                                   "' does not name a numeric config value");
    }
    (*node)[parts.back()] = value;
}

}  // namespace wpt
