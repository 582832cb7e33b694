#include <doctest.h>

#include <cmath>
#include <complex>

#include "wpt/scenario.hpp"

using namespace wpt;

namespace {

// Short, coarse settings keep unit-test runs fast; acceptance runs use the
// full resolution.
RunConfig fast_static(double d, double v_in, bool control) {
    RunConfig cfg = default_config();
    cfg.scenario.trajectory = TrajectoryConfig{};
    cfg.scenario.trajectory.static_coaxial_distance_m = d;
    cfg.scenario.duration_s = 8.0;
    cfg.scenario.step_s = 0.02;
    cfg.coupling.segments_per_turn = 16;
    cfg.controller.enabled = control;
    cfg.tx.v_in_v = v_in;
    return cfg;
}

// Single-frequency spectral line of a uniformly sampled series, mean removed.
double spectral_line(const std::vector<double>& x, double dt, double f_hz) {
    double mean = 0.0;
    for (double v : x) {
        mean += v;
    }
    mean /= static_cast<double>(x.size());
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double ph = -2.0 * kPi * f_hz * static_cast<double>(n) * dt;
        acc += (x[n] - mean) * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    return std::abs(acc);
}

}  // namespace

TEST_CASE("trajectory sampling interpolates and clamps") {
    TrajectoryConfig traj;
    TrajectoryKeyframe a, b;
    a.t_s = 0.0;
    a.capsule_pose.position = Vec3(0.0, 0.0, 0.06);
    b.t_s = 10.0;
    b.capsule_pose.position = Vec3(0.0, 0.0, 0.10);
    b.capsule_pose.orientation = Quat(Eigen::AngleAxisd(kPi / 2.0, Vec3::UnitX()));
    traj.keyframes = {a, b};

    const SampledPoses mid = sample_trajectory(traj, 5.0);
    CHECK(mid.capsule.position.z() == doctest::Approx(0.08));
    const double half_angle =
        2.0 * std::acos(std::clamp(mid.capsule.orientation.w(), -1.0, 1.0));
    CHECK(half_angle == doctest::Approx(kPi / 4.0).epsilon(1e-9));

    CHECK(sample_trajectory(traj, -1.0).capsule.position.z() == doctest::Approx(0.06));
    CHECK(sample_trajectory(traj, 99.0).capsule.position.z() == doctest::Approx(0.10));
}

TEST_CASE("closed loop regulates a static plant") {
    const RunConfig cfg = fast_static(0.09, 10.0, true);
    const RunResult res = run_scenario(cfg);
    REQUIRE(res.records.size() == 400);

    // Converged: the loop must be seeing the low tone by the end.
    int low_count = 0;
    for (std::size_t i = res.records.size() - 50; i < res.records.size(); ++i) {
        if (res.records[i].tone == ToneDecision::kLowTone) {
            ++low_count;
        }
    }
    CHECK(low_count > 0);
    CHECK_FALSE(res.summary.never_converged);

    // Steady-state power oscillation within two supply steps of equivalent
    // power around the late-run mean.
    double lo = 1e9, hi = -1e9, mean_v = 0.0;
    int n = 0;
    for (std::size_t i = res.records.size() - 100; i < res.records.size(); ++i) {
        lo = std::min(lo, res.records[i].p_total_out_w);
        hi = std::max(hi, res.records[i].p_total_out_w);
        mean_v += res.records[i].v_in_v;
        ++n;
    }
    mean_v /= n;
    const double dp_per_step =
        2.0 * (hi / mean_v) * cfg.aps.step_v;  // p ~ v^2: dp = 2 p dv / v
    CHECK(hi - lo <= 2.0 * dp_per_step);

    // Monotone approach: the supply never reverses direction before the
    // first in-band decision.
    int sign_changes = 0;
    int prev_sign = 0;
    for (std::size_t i = 1; i < res.records.size(); ++i) {
        if (res.records[i].tone == ToneDecision::kLowTone) {
            break;
        }
        const double dv = res.records[i].v_in_v - res.records[i - 1].v_in_v;
        const int sign = dv > 0.0 ? 1 : (dv < 0.0 ? -1 : 0);
        if (sign != 0 && prev_sign != 0 && sign != prev_sign) {
            ++sign_changes;
        }
        if (sign != 0) {
            prev_sign = sign;
        }
    }
    CHECK(sign_changes <= 1);
}

TEST_CASE("distance step forces the supply to rise") {
    RunConfig cfg = fast_static(0.065, 10.0, true);
    cfg.scenario.trajectory = TrajectoryConfig{};
    TrajectoryKeyframe a, b, c;
    a.t_s = 0.0;
    a.capsule_pose.position = Vec3(0.0, 0.0, 0.065);
    b.t_s = 4.0;
    b.capsule_pose.position = Vec3(0.0, 0.0, 0.065);
    c.t_s = 4.5;
    c.capsule_pose.position = Vec3(0.0, 0.0, 0.11);
    cfg.scenario.trajectory.keyframes = {a, b, c};
    cfg.scenario.duration_s = 10.0;

    const RunResult res = run_scenario(cfg);
    double v_before = 0.0, v_after = 0.0;
    for (const auto& r : res.records) {
        if (r.t_s < 4.0) {
            v_before = std::max(v_before, r.v_in_v);
        }
        if (r.t_s > 8.0) {
            v_after = std::max(v_after, r.v_in_v);
        }
    }
    CHECK(v_after > v_before + 1.0);
}

TEST_CASE("zero coupling saturates the supply with no output") {
    RunConfig cfg = fast_static(2.5, 10.0, true);
    cfg.scenario.duration_s = 30.0;
    cfg.scenario.step_s = 0.05;
    const RunResult res = run_scenario(cfg);
    CHECK(res.summary.final_v_in_v == doctest::Approx(60.0));
    CHECK(res.summary.max_p_total_w < 1e-6);
    for (const auto& r : res.records) {
        CHECK(r.tone == ToneDecision::kNone);
    }
}

TEST_CASE("determinism: identical config and seed give identical records") {
    RunConfig cfg = fast_static(0.09, 12.0, true);
    cfg.scenario.full_dsp = true;
    cfg.scenario.noise_rms_a = 0.01;
    cfg.scenario.duration_s = 2.0;
    cfg.scenario.noise_seed = 42;

    const RunResult r1 = run_scenario(cfg);
    const RunResult r2 = run_scenario(cfg);
    REQUIRE(r1.records.size() == r2.records.size());
    for (std::size_t i = 0; i < r1.records.size(); ++i) {
        CHECK(r1.records[i].p_total_out_w == r2.records[i].p_total_out_w);
        CHECK(r1.records[i].v_in_v == r2.records[i].v_in_v);
        CHECK(r1.records[i].tone == r2.records[i].tone);
        CHECK(r1.records[i].i_tx_a == r2.records[i].i_tx_a);
    }
}

TEST_CASE("causality: a truncated run is a prefix of a longer one") {
    RunConfig longer = fast_static(0.09, 10.0, true);
    longer.scenario.duration_s = 6.0;
    RunConfig shorter = longer;
    shorter.scenario.duration_s = 3.0;

    const RunResult rl = run_scenario(longer);
    const RunResult rs = run_scenario(shorter);
    REQUIRE(rs.records.size() * 2 == rl.records.size());
    for (std::size_t i = 0; i < rs.records.size(); ++i) {
        CHECK(rs.records[i].p_total_out_w == rl.records[i].p_total_out_w);
        CHECK(rs.records[i].v_in_v == rl.records[i].v_in_v);
        CHECK(rs.records[i].sar_mean_i2_a2 == rl.records[i].sar_mean_i2_a2);
    }
}

TEST_CASE("halving the engine step barely moves the summary") {
    RunConfig coarse = fast_static(0.09, 12.0, true);
    RunConfig fine = coarse;
    fine.scenario.step_s = coarse.scenario.step_s / 2.0;

    const RunSummary sc = run_scenario(coarse).summary;
    const RunSummary sf = run_scenario(fine).summary;
    CHECK(std::abs(sc.mean_p_total_w - sf.mean_p_total_w) / sf.mean_p_total_w < 0.01);
}

TEST_CASE("respiration leaves its spectral fingerprint") {
    RunConfig cfg = fast_static(0.09, 12.0, false);
    cfg.scenario.duration_s = 40.0;
    cfg.scenario.step_s = 0.02;
    cfg.scenario.respiration.amplitude_m = 0.005;
    cfg.scenario.respiration.frequency_hz = 0.25;
    cfg.scenario.respiration.axis = Vec3(0.0, 0.0, 1.0);

    const RunResult res = run_scenario(cfg);
    std::vector<double> p;
    p.reserve(res.records.size());
    for (const auto& r : res.records) {
        p.push_back(r.p_total_out_w);
    }
    const double peak = spectral_line(p, cfg.scenario.step_s, 0.25);
    for (double f : {0.1, 0.175, 0.325, 0.45}) {
        CHECK(peak > 3.0 * spectral_line(p, cfg.scenario.step_s, f));
    }
}

TEST_CASE("sar hard stop aborts the run") {
    RunConfig cfg = fast_static(0.09, 60.0, false);
    cfg.sar.limit.window_s = 10.0;
    cfg.sar.horizon_s = 10.0;
    cfg.sar.hard_stop = true;
    cfg.scenario.duration_s = 20.0;
    CHECK_THROWS_AS(run_scenario(cfg), SarHardStop);
}

TEST_CASE("supply interlock respects the SAR headroom") {
    // Unreachable target: the controller would slam to 60 V (48 A) without
    // the interlock. A short window makes the budget bind quickly.
    RunConfig cfg = fast_static(0.4, 10.0, true);
    cfg.sar.limit.window_s = 20.0;
    cfg.sar.horizon_s = 20.0;
    cfg.scenario.duration_s = 60.0;
    cfg.scenario.step_s = 0.05;

    const RunResult res = run_scenario(cfg);
    CHECK(res.summary.sar_compliant_throughout);
    double max_i = 0.0;
    for (const auto& r : res.records) {
        max_i = std::max(max_i, r.i_tx_a);
    }
    // With horizon == window the headroom floor equals the constant limit,
    // so the commanded current must hover there instead of slamming to the
    // ~48 A an uncapped 60 V supply would drive.
    CHECK(max_i <= cfg.sar.limit.i_max_const_a * 1.2);
    CHECK(res.summary.final_v_in_v < 30.0);
}

TEST_CASE("presets") {
    SUBCASE("ramp preset timing") {
        const RunConfig cfg = preset("ramp_fig6b");
        CHECK(cfg.scenario.duration_s == doctest::Approx(67.5));
        CHECK(cfg.controller.enabled);
        REQUIRE(cfg.scenario.trajectory.keyframes.size() == 3);
        CHECK(cfg.scenario.trajectory.keyframes[1].t_s == doctest::Approx(22.5));
    }

    SUBCASE("rotation preset turns the capsule a quarter turn") {
        const RunConfig cfg = preset("robot_fig7");
        CHECK_FALSE(cfg.controller.enabled);
        REQUIRE(cfg.scenario.trajectory.keyframes.size() >= 2);
        const Quat q = cfg.scenario.trajectory.keyframes.back().capsule_pose.orientation;
        const double angle = 2.0 * std::acos(std::clamp(std::abs(q.w()), -1.0, 1.0));
        CHECK(angle == doctest::Approx(kPi / 2.0).epsilon(1e-9));
    }

    SUBCASE("static grid expands one run per grid point") {
        RunConfig cfg = preset("static_grid_fig9");
        REQUIRE(cfg.grid.has_value());
        // Shrink for test runtime.
        cfg.grid->distances_m = {0.07, 0.09};
        cfg.grid->v_in_values_v = {8.0, 16.0};
        cfg.grid->lateral_offsets_m = {0.0, 0.10};
        cfg.scenario.duration_s = 0.5;
        cfg.coupling.segments_per_turn = 16;
        const auto rows = run_grid(cfg);
        CHECK(rows.size() == 8);
        for (const auto& row : rows) {
            CHECK(row.result.records.size() == 50);
        }
    }

    SUBCASE("dynamic preset has enough orientation keyframes") {
        const RunConfig cfg = preset("dynamic_fig10");
        CHECK(cfg.scenario.duration_s == doctest::Approx(85.0));
        int orientation_changes = 0;
        const auto& ks = cfg.scenario.trajectory.keyframes;
        for (std::size_t i = 1; i < ks.size(); ++i) {
            if (std::abs(ks[i].capsule_pose.orientation.angularDistance(
                    ks[i - 1].capsule_pose.orientation)) > 0.05) {
                ++orientation_changes;
            }
        }
        CHECK(orientation_changes >= 4);
        CHECK(cfg.scenario.respiration.amplitude_m > 0.0);
    }

    SUBCASE("unknown preset is rejected") {
        CHECK_THROWS_AS(preset("no_such_thing"), UnknownPreset);
    }
}

TEST_CASE("sweeps") {
    RunConfig cfg = fast_static(0.09, 12.0, false);
    cfg.scenario.duration_s = 0.5;

    SUBCASE("power falls with distance") {
        const auto rows =
            sweep(cfg, "scenario.trajectory.static_coaxial_distance_m", {0.065, 0.09, 0.11});
        REQUIRE(rows.size() == 3);
        CHECK(rows[0].summary.mean_p_total_w > rows[1].summary.mean_p_total_w);
        CHECK(rows[1].summary.mean_p_total_w > rows[2].summary.mean_p_total_w);
    }

    SUBCASE("power rises with the supply") {
        const auto rows = sweep(cfg, "tx.v_in_v", {8.0, 12.0, 16.0});
        REQUIRE(rows.size() == 3);
        CHECK(rows[0].summary.mean_p_total_w < rows[1].summary.mean_p_total_w);
        CHECK(rows[1].summary.mean_p_total_w < rows[2].summary.mean_p_total_w);
    }

    SUBCASE("empty value list gives an empty table") {
        CHECK(sweep(cfg, "tx.v_in_v", {}).empty());
    }

    SUBCASE("bad parameter paths are rejected") {
        CHECK_THROWS_AS(sweep(cfg, "tx.no_such_key", {1.0}), InvalidParameterPath);
        CHECK_THROWS_AS(sweep(cfg, "", {1.0}), InvalidParameterPath);
    }
}

TEST_CASE("multi axis modulation keeps the loop stable") {
    RunConfig cfg = fast_static(0.09, 10.0, true);
    cfg.scenario.multi_axis_lsk = true;
    // Tilt the capsule so two axes share the power.
    cfg.scenario.trajectory = TrajectoryConfig{};
    TrajectoryKeyframe kf;
    kf.capsule_pose.position = Vec3(0.0, 0.0, 0.09);
    kf.capsule_pose.orientation = Quat(Eigen::AngleAxisd(kPi / 4.0, Vec3::UnitX()));
    cfg.scenario.trajectory.keyframes = {kf};

    const RunResult res = run_scenario(cfg);
    CHECK(res.summary.max_p_total_w > 0.0);
    CHECK(res.summary.sar_compliant_throughout);
    int tones = 0;
    for (const auto& r : res.records) {
        if (r.tone != ToneDecision::kNone) {
            ++tones;
        }
    }
    CHECK(tones > 0);
}
