#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ecoop::harness {

/// One aggregate over realizations. `slot` is -1 when the scenario has no
/// time axis; `beta` is 0 for schemes without energy sharing.
struct ResultRow {
  double sweep_key = 0.0;
  int slot = -1;
  std::string scheme;
  double beta = 0.0;
  double mean_rate = 0.0;
  double stderr_rate = 0.0;
  long n = 0;
  // Not serialized.
  long failed = 0;
  std::string last_error;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  // Worst per-instance violation of none <= energy_only, energy_only <= joint,
  // none <= comm_only, comm_only <= joint (0 when never violated or not evaluated).
  std::array<double, 4> dominance_gap{0.0, 0.0, 0.0, 0.0};
  long instances = 0;
};

enum class Format { csv, jsonl };

Format parse_format(std::string_view name);

/// %.9g, with "nan"/"inf" spelled out.
std::string format_g9(double v);

void write_results(const ResultTable& table, std::ostream& out, Format format);

/// Writes to `path`; I/O failures throw std::runtime_error naming the path.
void emit_results(const ResultTable& table, const std::filesystem::path& path, Format format);

/// Reads back the CSV form.
ResultTable parse_results_csv(std::istream& in);

}  // namespace ecoop::harness
