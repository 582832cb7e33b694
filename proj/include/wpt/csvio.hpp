#ifndef WPT_CSVIO_HPP
#define WPT_CSVIO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "wpt/scenario.hpp"

namespace wpt {

inline constexpr int kCsvSchemaVersion = 1;

// ScenarioRecord series, one row per record, %.17g numbers so a re-parse
// reproduces every value exactly.
void write_records_csv(std::ostream& os, const std::vector<ScenarioRecord>& records);
void write_records_csv_file(const std::string& path, const std::vector<ScenarioRecord>& records);
std::vector<ScenarioRecord> read_records_csv(std::istream& is);
std::vector<ScenarioRecord> read_records_csv_file(const std::string& path);

void write_sweep_csv(std::ostream& os, const std::string& parameter_path,
                     const std::vector<SweepRow>& rows);

// Two-column (t_s, i_amp_a) current trace for the sar subcommand. Header
// row required.
struct SarSample {
    double t_s = 0.0;
    double i_amp_a = 0.0;
};
std::vector<SarSample> read_sar_csv(std::istream& is);

}  // namespace wpt

#endif  // WPT_CSVIO_HPP
