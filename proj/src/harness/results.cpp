#include "ecoop/harness/results.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "ecoop/errors.hpp"

namespace ecoop::harness {

namespace {

constexpr const char* kHeader = "sweep_key,slot,scheme,beta,mean_rate,stderr,n";

std::string json_number(double v) { return std::isfinite(v) ? format_g9(v) : "null"; }

double parse_field(const std::string& s, int line) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw ParseError("bad number '" + s + "'", line);
  return v;
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "jsonl" || name == "json-lines") return Format::jsonl;
  throw DomainError("unknown format '" + std::string(name) + "'");
}

std::string format_g9(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
  return buf;
}

void write_results(const ResultTable& table, std::ostream& out, Format format) {
  if (format == Format::csv) {
    out << kHeader << '\n';
    for (const auto& r : table.rows) {
      out << format_g9(r.sweep_key) << ',' << r.slot << ',' << r.scheme << ',' << format_g9(r.beta) << ','
          << format_g9(r.mean_rate) << ',' << format_g9(r.stderr_rate) << ',' << r.n << '\n';
    }
    return;
  }
  for (const auto& r : table.rows) {
    out << "{\"sweep_key\":" << json_number(r.sweep_key) << ",\"slot\":" << r.slot << ",\"scheme\":\"" << r.scheme
        << "\",\"beta\":" << json_number(r.beta) << ",\"mean_rate\":" << json_number(r.mean_rate)
        << ",\"stderr\":" << json_number(r.stderr_rate) << ",\"n\":" << r.n << "}\n";
  }
}

void emit_results(const ResultTable& table, const std::filesystem::path& path, Format format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_results(table, out, format);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

ResultTable parse_results_csv(std::istream& in) {
  ResultTable table;
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ParseError("missing header");
  ++line_no;
  if (line != kHeader) throw ParseError("unexpected header '" + line + "'", line_no);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 7) throw ParseError("expected 7 fields", line_no);
    ResultRow r;
    r.sweep_key = parse_field(f[0], line_no);
    r.slot = static_cast<int>(parse_field(f[1], line_no));
    r.scheme = f[2];
    r.beta = parse_field(f[3], line_no);
    r.mean_rate = parse_field(f[4], line_no);
    r.stderr_rate = parse_field(f[5], line_no);
    r.n = static_cast<long>(parse_field(f[6], line_no));
    table.rows.push_back(std::move(r));
  }
  return table;
}

}  // namespace ecoop::harness
