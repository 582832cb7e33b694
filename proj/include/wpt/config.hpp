#ifndef WPT_CONFIG_HPP
#define WPT_CONFIG_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wpt/circuit.hpp"
#include "wpt/control.hpp"
#include "wpt/lsk.hpp"
#include "wpt/safety.hpp"

namespace wpt {

struct TrajectoryKeyframe {
    double t_s = 0.0;
    Pose tx_pose;
    Pose capsule_pose;
};

// Either a static coaxial placement (Tx at the origin facing +z, capsule on
// the axis) or an explicit keyframe list. Positions interpolate linearly,
// orientations spherically.
struct TrajectoryConfig {
    std::optional<double> static_coaxial_distance_m;
    std::vector<TrajectoryKeyframe> keyframes;

    void validate() const;
};

struct RespirationConfig {
    double amplitude_m = 0.0;
    double frequency_hz = 0.25;
    Vec3 axis{0.0, 0.0, 1.0};

    void validate() const;
};

struct CouplingConfig {
    CouplingMethod method = CouplingMethod::kFilament;
    int segments_per_turn = 64;
    double field_attenuation = 1.0;
    std::optional<Eigen::Matrix3d> rx_cross_m;  // sensitivity-study override

    void validate() const;
};

// Loop timing and starting point; the step size and slew live in ApsModel.
struct ControllerConfig {
    bool enabled = true;
    double loop_period_s = 0.1;
    double v_start_v = 3.5;

    void validate() const;
};

struct SarConfig {
    SarLimit limit;
    double horizon_s = 360.0;  // headroom horizon for the supply interlock
    bool hard_stop = false;

    void validate() const;
};

struct ScenarioConfig {
    double step_s = 0.01;
    double duration_s = 10.0;
    // Comparator observation cadence. The rectifier rail the comparators
    // watch settles over milliseconds; pinning its cadence (instead of
    // re-evaluating every engine step) keeps runs step-size independent.
    double modulator_period_s = 0.01;
    TrajectoryConfig trajectory;
    RespirationConfig respiration;
    std::uint64_t noise_seed = 1;
    double noise_rms_a = 0.0;    // envelope noise on the sensed Tx current
    bool full_dsp = false;       // synthesize + filter instead of the analytic path
    bool multi_axis_lsk = false; // all three modulators active at once
    // Summary band: fraction of samples with p_total within
    // target_power_w * (1 +/- band_fraction) after settle_exclude_s.
    double target_power_w = 0.1;
    double band_fraction = 0.25;
    double settle_exclude_s = 10.0;

    void validate(double loop_period_s) const;
};

// Multi-run expansion used by the static misalignment preset: the run
// command executes the cross product of distances, supply levels and
// lateral offsets as independent static runs.
struct GridConfig {
    std::vector<double> distances_m;
    std::vector<double> v_in_values_v;
    std::vector<double> lateral_offsets_m{0.0};

    void validate() const;
};

struct RunConfig {
    TxCircuit tx;
    std::array<RxBranch, 3> rx;
    ModulatorConfig modulator;
    DemodConfig demod;
    ApsModel aps;
    ControllerConfig controller;
    SarConfig sar;
    CouplingConfig coupling;
    ScenarioConfig scenario;
    std::optional<GridConfig> grid;
    std::string annotation;

    void validate() const;
};

// Paper-default component values everywhere, 9 cm static coaxial trajectory.
RunConfig default_config();

// Strict parsers: unknown keys are rejected, units are part of the key names.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig load_config_file(const std::string& path);

// Sets a dotted path ("tx.v_in_v", "scenario.trajectory.static_coaxial_distance_m")
// inside a config JSON document. Throws InvalidParameterPath.
void set_json_path(nlohmann::json& doc, const std::string& dotted_path, double value);

}  // namespace wpt

#endif  // WPT_CONFIG_HPP
