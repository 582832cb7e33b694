#include "wpt/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "wpt/errors.hpp"

namespace wpt {

namespace {

const char* kHeader =
    "schema_version,t_s,d_m,k_x,k_y,k_z,v_in_v,i_tx_a,"
    "v_out_x_v,v_out_y_v,v_out_z_v,p_out_x_w,p_out_y_w,p_out_z_w,"
    "p_total_out_w,p_in_w,f_m_hz,tone,sar_mean_i2_a2,sar_margin,sar_compliant";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ToneDecision tone_from_string(const std::string& s) {
    if (s == "none") {
        return ToneDecision::kNone;
    }
    if (s == "low") {
        return ToneDecision::kLowTone;
    }
    if (s == "high") {
        return ToneDecision::kHighTone;
    }
    throw ConfigError("csv: unknown tone value '" + s + "'");
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        out.push_back(field);
    }
    return out;
}

double num(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string("csv: bad number in column ") + what + ": '" + s + "'");
    }
}

}  // namespace

void write_records_csv(std::ostream& os, const std::vector<ScenarioRecord>& records) {
    os << kHeader << "\n";
    for (const ScenarioRecord& r : records) {
        os << kCsvSchemaVersion << ',' << fmt(r.t_s) << ',' << fmt(r.d_m) << ',' << fmt(r.k_x)
           << ',' << fmt(r.k_y) << ',' << fmt(r.k_z) << ',' << fmt(r.v_in_v) << ','
           << fmt(r.i_tx_a) << ',' << fmt(r.v_out_x_v) << ',' << fmt(r.v_out_y_v) << ','
           << fmt(r.v_out_z_v) << ',' << fmt(r.p_out_x_w) << ',' << fmt(r.p_out_y_w) << ','
           << fmt(r.p_out_z_w) << ',' << fmt(r.p_total_out_w) << ',' << fmt(r.p_in_w) << ','
           << fmt(r.f_m_hz) << ',' << to_string(r.tone) << ',' << fmt(r.sar_mean_i2_a2) << ','
           << fmt(r.sar_margin) << ',' << (r.sar_compliant ? 1 : 0) << "\n";
    }
}

void write_records_csv_file(const std::string& path, const std::vector<ScenarioRecord>& records) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot open output file: " + path);
    }
    write_records_csv(out, records);
}

std::vector<ScenarioRecord> read_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) {
        throw ConfigError("csv: empty stream");
    }
    if (line != kHeader) {
        throw ConfigError("csv: unexpected header row");
    }
    std::vector<ScenarioRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 21) {
            throw ConfigError("csv: expected 21 columns, got " + std::to_string(f.size()));
        }
        if (num(f[0], "schema_version") != kCsvSchemaVersion) {
            throw ConfigError("csv: unsupported schema version " + f[0]);
        }
        ScenarioRecord r;
        r.t_s = num(f[1], "t_s");
        r.d_m = num(f[2], "d_m");
        r.k_x = num(f[3], "k_x");
        r.k_y = num(f[4], "k_y");
        r.k_z = num(f[5], "k_z");
        r.v_in_v = num(f[6], "v_in_v");
        r.i_tx_a = num(f[7], "i_tx_a");
        r.v_out_x_v = num(f[8], "v_out_x_v");
        r.v_out_y_v = num(f[9], "v_out_y_v");
        r.v_out_z_v = num(f[10], "v_out_z_v");
        r.p_out_x_w = num(f[11], "p_out_x_w");
        r.p_out_y_w = num(f[12], "p_out_y_w");
        r.p_out_z_w = num(f[13], "p_out_z_w");
        r.p_total_out_w = num(f[14], "p_total_out_w");
        r.p_in_w = num(f[15], "p_in_w");
        r.f_m_hz = num(f[16], "f_m_hz");
        r.tone = tone_from_string(f[17]);
        r.sar_mean_i2_a2 = num(f[18], "sar_mean_i2_a2");
        r.sar_margin = num(f[19], "sar_margin");
        r.sar_compliant = num(f[20], "sar_compliant") != 0.0;
        out.push_back(r);
    }
    return out;
}

std::vector<ScenarioRecord> read_records_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open csv file: " + path);
    }
    return read_records_csv(in);
}

void write_sweep_csv(std::ostream& os, const std::string& parameter_path,
                     const std::vector<SweepRow>& rows) {
    os << "parameter,value,records,mean_p_total_w,min_p_total_w,max_p_total_w,mean_p_in_w,"
          "max_i_tx_a,final_v_in_v,frac_in_band,sar_compliant\n";
    for (const SweepRow& r : rows) {
        os << parameter_path << ',' << fmt(r.value) << ',' << r.summary.records << ','
           << fmt(r.summary.mean_p_total_w) << ',' << fmt(r.summary.min_p_total_w) << ','
           << fmt(r.summary.max_p_total_w) << ',' << fmt(r.summary.mean_p_in_w) << ','
           << fmt(r.summary.max_i_tx_a) << ',' << fmt(r.summary.final_v_in_v) << ','
           << fmt(r.summary.frac_in_band) << ','
           << (r.summary.sar_compliant_throughout ? 1 : 0) << "\n";
    }
}

std::vector<SarSample> read_sar_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) {
        throw ConfigError("sar csv: empty stream");
    }
    // Tolerate UTF-8 BOM and trailing CR.
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "t_s,i_amp_a") {
        throw ConfigError("sar csv: header must be 't_s,i_amp_a'");
    }
    std::vector<SarSample> out;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 2) {
            throw ConfigError("sar csv: expected 2 columns");
        }
        out.push_back({num(f[0], "t_s"), num(f[1], "i_amp_a")});
    }
    return out;
}

}  // namespace wpt
