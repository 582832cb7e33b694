#ifndef WPT_SCENARIO_HPP
#define WPT_SCENARIO_HPP

#include <string>
#include <vector>

#include "wpt/config.hpp"

namespace wpt {

// One engine step of the co-simulation log. Field order here is the CSV
// column order (after the schema_version column).
struct ScenarioRecord {
    double t_s = 0.0;
    double d_m = 0.0;  // Tx center to capsule center
    double k_x = 0.0, k_y = 0.0, k_z = 0.0;
    double v_in_v = 0.0;
    double i_tx_a = 0.0;  // duty-weighted RMS of the modulated amplitudes
    double v_out_x_v = 0.0, v_out_y_v = 0.0, v_out_z_v = 0.0;
    double p_out_x_w = 0.0, p_out_y_w = 0.0, p_out_z_w = 0.0;
    double p_total_out_w = 0.0;
    double p_in_w = 0.0;
    double f_m_hz = 0.0;
    ToneDecision tone = ToneDecision::kNone;
    double sar_mean_i2_a2 = 0.0;
    double sar_margin = 0.0;
    bool sar_compliant = true;
};

struct RunSummary {
    std::size_t records = 0;
    double duration_s = 0.0;
    double mean_p_total_w = 0.0;
    double min_p_total_w = 0.0;
    double max_p_total_w = 0.0;
    double mean_p_in_w = 0.0;
    double max_i_tx_a = 0.0;
    double final_v_in_v = 0.0;
    double frac_in_band = 0.0;  // after the settle window
    bool sar_compliant_throughout = true;
    bool never_converged = false;  // control diagnostic, not fatal
};

struct RunResult {
    std::vector<ScenarioRecord> records;
    RunSummary summary;
};

// Summary recomputation from the record rows (the CSV contract: summary
// values are pure functions of the rows plus these band parameters).
RunSummary summarize(const std::vector<ScenarioRecord>& records, const RunConfig& cfg);

// Trajectory sampling with clamped extrapolation outside the keyframe span.
struct SampledPoses {
    Pose tx;
    Pose capsule;
};
SampledPoses sample_trajectory(const TrajectoryConfig& traj, double t_s);

std::array<CoilSpec, 3> rx_coils(const RunConfig& cfg);

// Runs the full co-simulation loop. Control commands issued at step n take
// effect at step n+1. Throws SarHardStop when configured to abort.
RunResult run_scenario(const RunConfig& cfg);

// Named experiment replicas. Known names: ramp_fig6b, robot_fig7,
// static_grid_fig9, dynamic_fig10. Throws UnknownPreset.
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

struct SweepRow {
    double value = 0.0;
    RunSummary summary;
};

// Re-runs the scenario once per value with the dotted config path replaced.
std::vector<SweepRow> sweep(const RunConfig& cfg, const std::string& parameter_path,
                            const std::vector<double>& values);

// Expansion of a grid config into independent static runs (one per
// distance x supply x offset combination).
struct GridRow {
    double distance_m = 0.0;
    double lateral_offset_m = 0.0;
    double v_in_v = 0.0;
    RunResult result;
};
std::vector<GridRow> run_grid(const RunConfig& cfg);

}  // namespace wpt

#endif  // WPT_SCENARIO_HPP
