#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wpt/csvio.hpp"
#include "wpt/errors.hpp"
#include "wpt/scenario.hpp"

namespace {

using namespace wpt;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitSarStop = 4;

struct CommonOpts {
    std::string config_path;
    std::string preset_name;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> steps_per_turn;
    bool no_adaptive_control = false;
};

RunConfig resolve_config(const CommonOpts& opts) {
    RunConfig cfg;
    if (!opts.preset_name.empty() && !opts.config_path.empty()) {
        throw ConfigError("give either --config or --preset, not both");
    }
    if (!opts.preset_name.empty()) {
        cfg = preset(opts.preset_name);
    } else if (!opts.config_path.empty()) {
        cfg = load_config_file(opts.config_path);
    } else {
        cfg = default_config();
    }
    if (opts.seed) {
        cfg.scenario.noise_seed = *opts.seed;
    }
    if (opts.steps_per_turn) {
        cfg.coupling.segments_per_turn = *opts.steps_per_turn;
    }
    if (opts.no_adaptive_control) {
        cfg.controller.enabled = false;
    }
    cfg.validate();
    return cfg;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty()) {
        return std::cout;
    }
    file.open(path);
    if (!file) {
        throw ConfigError("cannot open output file: " + path);
    }
    return file;
}

void print_summary(std::ostream& os, const RunSummary& s) {
    os << "records:            " << s.records << "\n"
       << "duration_s:         " << s.duration_s << "\n"
       << "mean_p_total_w:     " << s.mean_p_total_w << "\n"
       << "min_p_total_w:      " << s.min_p_total_w << "\n"
       << "max_p_total_w:      " << s.max_p_total_w << "\n"
       << "mean_p_in_w:        " << s.mean_p_in_w << "\n"
       << "max_i_tx_a:         " << s.max_i_tx_a << "\n"
       << "final_v_in_v:       " << s.final_v_in_v << "\n"
       << "frac_in_band:       " << s.frac_in_band << "\n"
       << "sar_compliant:      " << (s.sar_compliant_throughout ? "yes" : "no") << "\n";
    if (s.never_converged) {
        os << "warning:            control loop never saw a tone (NeverConverged)\n";
    }
}

int cmd_link(const CommonOpts& opts) {
    RunConfig cfg = resolve_config(opts);

    const SampledPoses poses = sample_trajectory(cfg.scenario.trajectory, 0.0);
    const CouplingSet k =
        coupling_set(cfg.tx.coil, poses.tx, poses.capsule, rx_coils(cfg), cfg.coupling.method,
                     cfg.coupling.segments_per_turn, cfg.coupling.field_attenuation);

    // Modulate the strongest axis for the "with LSK" numbers.
    int strongest = 0;
    for (int i = 1; i < 3; ++i) {
        if (std::abs(k.k[i]) > std::abs(k.k[strongest])) {
            strongest = i;
        }
    }
    std::array<bool, 3> mask{false, false, false};
    mask[strongest] = true;
    const LskAveragedSolution sol =
        lsk_averaged_solution(cfg.tx, cfg.rx, k, 0.5, mask, cfg.coupling.rx_cross_m);
    const LinkSolution& plain = sol.released;

    const double d = (poses.capsule.position - poses.tx.position).norm();
    std::cout << "link report\n"
              << "  distance_m:        " << d << "\n"
              << "  k:                 [" << k.k[0] << ", " << k.k[1] << ", " << k.k[2] << "]\n"
              << "  m_h:               [" << k.m_h[0] << ", " << k.m_h[1] << ", " << k.m_h[2]
              << "]\n"
              << "  v_in_v:            " << cfg.tx.v_in_v << "\n"
              << "  i_tx_a:            " << plain.i_tx_amplitude() << "\n"
              << "  v_out_v:           [" << plain.v_out_v[0] << ", " << plain.v_out_v[1] << ", "
              << plain.v_out_v[2] << "]\n"
              << "  p_out_w:           [" << plain.p_out_w[0] << ", " << plain.p_out_w[1] << ", "
              << plain.p_out_w[2] << "]\n"
              << "  p_total_out_w:     " << plain.p_total_out_w << "\n"
              << "  p_in_w:            " << plain.p_in_w << "\n"
              << "  lsk_avg_p_total_w: " << sol.avg_p_total_out_w << "\n"
              << "  lsk_depth:         " << sol.modulation_depth << "\n";

    nlohmann::json j;
    j["distance_m"] = d;
    j["k"] = {k.k[0], k.k[1], k.k[2]};
    j["m_h"] = {k.m_h[0], k.m_h[1], k.m_h[2]};
    j["v_in_v"] = cfg.tx.v_in_v;
    j["i_tx_a"] = plain.i_tx_amplitude();
    j["v_out_v"] = {plain.v_out_v[0], plain.v_out_v[1], plain.v_out_v[2]};
    j["p_out_w"] = {plain.p_out_w[0], plain.p_out_w[1], plain.p_out_w[2]};
    j["p_total_out_w"] = plain.p_total_out_w;
    j["p_in_w"] = plain.p_in_w;
    j["lsk_avg_p_total_w"] = sol.avg_p_total_out_w;
    j["lsk_depth"] = sol.modulation_depth;
    std::cout << j.dump(2) << "\n";

    if (!opts.out_path.empty()) {
        std::ofstream out(opts.out_path);
        if (!out) {
            throw ConfigError("cannot open output file: " + opts.out_path);
        }
        out << j.dump(2) << "\n";
    }
    return kExitOk;
}

int cmd_run(const CommonOpts& opts) {
    RunConfig cfg = resolve_config(opts);

    if (cfg.grid) {
        const std::vector<GridRow> rows = run_grid(cfg);
        std::cout << "d_m,offset_m,v_in_v,mean_p_total_w,max_i_tx_a,sar_compliant\n";
        int idx = 0;
        for (const GridRow& row : rows) {
            if (!opts.out_path.empty()) {
                std::ostringstream name;
                if (opts.out_path.size() > 4 &&
                    opts.out_path.substr(opts.out_path.size() - 4) == ".csv") {
                    name << opts.out_path.substr(0, opts.out_path.size() - 4) << "_g" << idx
                         << ".csv";
                } else {
                    name << opts.out_path << "_g" << idx;
                }
                write_records_csv_file(name.str(), row.result.records);
            }
            std::cout << row.distance_m << ',' << row.lateral_offset_m << ',' << row.v_in_v
                      << ',' << row.result.summary.mean_p_total_w << ','
                      << row.result.summary.max_i_tx_a << ','
                      << (row.result.summary.sar_compliant_throughout ? 1 : 0) << "\n";
            ++idx;
        }
        return kExitOk;
    }

    const RunResult res = run_scenario(cfg);
    if (!opts.out_path.empty()) {
        write_records_csv_file(opts.out_path, res.records);
    } else {
        write_records_csv(std::cout, res.records);
    }
    print_summary(std::cout, res.summary);
    return kExitOk;
}

int cmd_sweep(const CommonOpts& opts, const std::string& axis, const std::string& values_arg) {
    RunConfig cfg = resolve_config(opts);

    std::vector<double> values;
    std::stringstream ss(values_arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            continue;
        }
        values.push_back(std::stod(item));
    }
    if (values.empty()) {
        throw ConfigError("sweep: empty value list");
    }

    const std::vector<SweepRow> rows = sweep(cfg, axis, values);
    std::ofstream file;
    std::ostream& os = open_out(file, opts.out_path);
    write_sweep_csv(os, axis, rows);
    return kExitOk;
}

int cmd_sar(const std::string& input_path, double i_max, double window_s) {
    std::ifstream file;
    std::istream* is = &std::cin;
    if (!input_path.empty() && input_path != "-") {
        file.open(input_path);
        if (!file) {
            throw ConfigError("cannot open input file: " + input_path);
        }
        is = &file;
    }
    const std::vector<SarSample> samples = read_sar_csv(*is);
    if (samples.size() < 2) {
        throw ConfigError("sar: need at least two samples");
    }

    SarLimit limit;
    limit.i_max_const_a = i_max;
    limit.window_s = window_s;
    SarWindow window(limit);
    // Left-rectangle integration: each row holds until the next timestamp;
    // the final row only closes the trace.
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const double dt = samples[i + 1].t_s - samples[i].t_s;
        if (!(dt > 0.0)) {
            throw ConfigError("sar: timestamps must strictly increase");
        }
        window.update(samples[i].t_s, samples[i].i_amp_a, dt);
    }

    const double mean_i2 = window.mean_i2();
    const double limit2 = i_max * i_max;
    const bool ok = window.compliant();
    const bool boundary = std::abs(mean_i2 - limit2) <= 1e-9 * limit2;
    std::cout << "samples:        " << samples.size() << "\n"
              << "span_s:         " << samples.back().t_s - samples.front().t_s << "\n"
              << "mean_i2_a2:     " << mean_i2 << "\n"
              << "limit_i2_a2:    " << limit2 << "\n"
              << "margin:         " << window.margin() << "\n"
              << "headroom_180s_a:" << window.headroom(std::min(180.0, window_s)) << "\n"
              << (ok ? (boundary ? "COMPLIANT (boundary)" : "COMPLIANT") : "NON-COMPLIANT")
              << "\n";
    return ok ? kExitOk : kExitSarStop;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resonant inductive link co-simulator for a wireless capsule"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string sweep_axis;
    std::string sweep_values;
    std::string sar_input;
    double sar_imax = 14.5;
    double sar_window = 360.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "configuration file (JSON)");
        sub->add_option("--preset", opts.preset_name, "named preset scenario");
        sub->add_option("--out", opts.out_path, "output path");
        sub->add_option("--seed", opts.seed, "noise seed override");
        sub->add_option("--steps-per-turn", opts.steps_per_turn,
                        "filament segments per turn override");
        sub->add_flag("--no-adaptive-control", opts.no_adaptive_control,
                      "freeze the supply at its configured value");
    };

    CLI::App* link = app.add_subcommand("link", "single steady-state link evaluation");
    add_common(link);
    CLI::App* run = app.add_subcommand("run", "time-stepped scenario run, CSV output");
    add_common(run);
    CLI::App* sw = app.add_subcommand("sweep", "repeat a run over a config parameter");
    add_common(sw);
    sw->add_option("--axis", sweep_axis, "dotted config path, e.g. tx.v_in_v")->required();
    sw->add_option("--values", sweep_values, "comma-separated values")->required();
    CLI::App* sar = app.add_subcommand("sar", "check a (t_s,i_amp_a) trace against the SAR budget");
    sar->add_option("--input", sar_input, "CSV file ('-' for stdin)");
    sar->add_option("--i-max", sar_imax, "equivalent constant current limit, A");
    sar->add_option("--window", sar_window, "averaging window, s");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (link->parsed()) {
            return cmd_link(opts);
        }
        if (run->parsed()) {
            return cmd_run(opts);
        }
        if (sw->parsed()) {
            return cmd_sweep(opts, sweep_axis, sweep_values);
        }
        if (sar->parsed()) {
            return cmd_sar(sar_input, sar_imax, sar_window);
        }
    } catch (const SarHardStop& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSarStop;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitConfig;
}
