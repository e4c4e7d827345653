#include "ecoop/harness/profile.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "ecoop/errors.hpp"

#ifndef ECOOP_DATA_DIR
#define ECOOP_DATA_DIR "data"
#endif

namespace ecoop::harness {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

// Minutes since 1970-01-01 for "YYYY-MM-DD[ T]HH:MM[:SS]", or a bare number.
bool parse_timestamp(const std::string& s, double& minutes) {
  if (parse_number(s, minutes)) return true;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  double sec = 0.0;
  char sep = 0;
  const int got = std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%lf", &y, &mo, &d, &sep, &h, &mi, &sec);
  if (got < 6 || (sep != ' ' && sep != 'T')) return false;
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 24 || mi < 0 || mi > 59) return false;
  const double days = sys_days{ymd}.time_since_epoch().count();
  minutes = days * 1440.0 + h * 60.0 + mi + sec / 60.0;
  return true;
}

void normalize_peak(std::vector<double>& v) {
  const double peak = *std::max_element(v.begin(), v.end());
  if (peak <= 0.0) return;
  for (double& x : v) x /= peak;
}

}  // namespace

void EnergyProfile::validate() const {
  const std::size_t n = wind.size();
  if (solar.size() != n || timestamps.size() != n || minutes.size() != n) {
    throw ValidationError("profile series differ in length");
  }
  if (n < 2) throw ValidationError("profile needs at least 2 samples");
  for (std::size_t t = 0; t < n; ++t) {
    if (!(wind[t] >= 0.0 && wind[t] <= 1.0) || !(solar[t] >= 0.0 && solar[t] <= 1.0)) {
      throw ValidationError("profile value outside [0,1] at sample " + std::to_string(t));
    }
    if (t > 0 && !(minutes[t] > minutes[t - 1])) {
      throw ValidationError("timestamps not strictly increasing at sample " + std::to_string(t));
    }
  }
  for (const auto& w : mix) {
    if (!(w[0] >= 0.0) || !(w[1] >= 0.0)) throw ValidationError("mix weights must be nonnegative");
  }
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw ValidationError("profile scale must be finite and nonnegative");
}

EnergyProfile load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open profile '" + path.string() + "'");

  EnergyProfile prof;
  std::string line;
  int line_no = 0;
  int c_time = -1, c_wind = -1, c_solar = -1;
  std::size_t n_cols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line.front() == '#') continue;
    const auto cells = split_csv(line);
    if (c_time < 0) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        std::string name = cells[c];
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (name == "timestamp") c_time = static_cast<int>(c);
        if (name == "wind") c_wind = static_cast<int>(c);
        if (name == "solar") c_solar = static_cast<int>(c);
      }
      if (c_time < 0 || c_wind < 0 || c_solar < 0) {
        throw ParseError("header must name timestamp, wind and solar columns", line_no);
      }
      n_cols = cells.size();
      continue;
    }
    if (cells.size() != n_cols) {
      throw ParseError("expected " + std::to_string(n_cols) + " fields, got " + std::to_string(cells.size()), line_no);
    }
    double minutes = 0.0, w = 0.0, s = 0.0;
    if (!parse_timestamp(cells[static_cast<std::size_t>(c_time)], minutes)) {
      throw ParseError("bad timestamp '" + cells[static_cast<std::size_t>(c_time)] + "'", line_no);
    }
    if (!parse_number(cells[static_cast<std::size_t>(c_wind)], w) || !std::isfinite(w) || w < 0.0) {
      throw ParseError("bad wind value '" + cells[static_cast<std::size_t>(c_wind)] + "'", line_no);
    }
    if (!parse_number(cells[static_cast<std::size_t>(c_solar)], s) || !std::isfinite(s) || s < 0.0) {
      throw ParseError("bad solar value '" + cells[static_cast<std::size_t>(c_solar)] + "'", line_no);
    }
    prof.timestamps.push_back(cells[static_cast<std::size_t>(c_time)]);
    prof.minutes.push_back(minutes);
    prof.wind.push_back(w);
    prof.solar.push_back(s);
  }
  if (c_time < 0) throw ValidationError("profile '" + path.string() + "' is empty");
  if (prof.size() < 2) throw ValidationError("profile '" + path.string() + "' has fewer than 2 rows");
  normalize_peak(prof.wind);
  normalize_peak(prof.solar);
  prof.validate();
  return prof;
}

Eigen::VectorXd bs_budgets_at(const EnergyProfile& profile, std::size_t slot) {
  if (slot >= profile.size()) {
    throw DomainError("slot " + std::to_string(slot) + " out of range [0, " + std::to_string(profile.size()) + ")");
  }
  if (profile.mix.empty()) throw DomainError("profile has no per-BS mix");
  Eigen::VectorXd e(static_cast<Eigen::Index>(profile.mix.size()));
  for (std::size_t i = 0; i < profile.mix.size(); ++i) {
    const auto& w = profile.mix[i];
    e(static_cast<Eigen::Index>(i)) = profile.scale * (w[0] * profile.wind[slot] + w[1] * profile.solar[slot]);
  }
  return e;
}

EnergyProfile synthetic_profile(std::uint64_t seed, int days) {
  if (days < 1) throw DomainError("need at least one day");
  constexpr int kPerDay = 96;
  const int n = days * kPerDay;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  EnergyProfile prof;
  prof.wind.resize(static_cast<std::size_t>(n));
  prof.solar.resize(static_cast<std::size_t>(n));

  // Solar: sunrise ~06:30, sunset ~19:00, day-to-day cloud factor and a little jitter.
  const double rise = 6.5, set = 19.0;
  for (int d = 0; d < days; ++d) {
    const double cloud = 0.55 + 0.45 * unif(rng);
    for (int q = 0; q < kPerDay; ++q) {
      const double hour = q / 4.0;
      double v = 0.0;
      if (hour > rise && hour < set) {
        v = cloud * std::sin(std::numbers::pi * (hour - rise) / (set - rise));
        v *= 1.0 + 0.05 * gauss(rng);
      }
      prof.solar[static_cast<std::size_t>(d * kPerDay + q)] = std::max(0.0, v);
    }
  }

  // Wind: mean-reverting random walk, then a centered moving average.
  std::vector<double> walk(static_cast<std::size_t>(n));
  double x = 0.5;
  for (int t = 0; t < n; ++t) {
    x += 0.02 * (0.45 - x) + 0.06 * gauss(rng);
    x = std::clamp(x, 0.02, 1.0);
    walk[static_cast<std::size_t>(t)] = x;
  }
  constexpr int kHalf = 4;
  for (int t = 0; t < n; ++t) {
    double acc = 0.0;
    int cnt = 0;
    for (int u = std::max(0, t - kHalf); u <= std::min(n - 1, t + kHalf); ++u, ++cnt) acc += walk[static_cast<std::size_t>(u)];
    prof.wind[static_cast<std::size_t>(t)] = acc / cnt;
  }
  normalize_peak(prof.wind);
  normalize_peak(prof.solar);

  using namespace std::chrono;
  const sys_days start = year{2020} / September / 1;
  prof.timestamps.reserve(static_cast<std::size_t>(n));
  prof.minutes.reserve(static_cast<std::size_t>(n));
  const double base = start.time_since_epoch().count() * 1440.0;
  for (int t = 0; t < n; ++t) {
    const int day = t / kPerDay;
    const int q = t % kPerDay;
    const year_month_day ymd{start + std::chrono::days{day}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), q / 4, 15 * (q % 4));
    prof.timestamps.emplace_back(buf);
    prof.minutes.push_back(base + 15.0 * t);
  }
  prof.validate();
  return prof;
}

void write_profile_csv(const EnergyProfile& profile, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "timestamp,wind,solar\n";
  char buf[96];
  for (std::size_t t = 0; t < profile.size(); ++t) {
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f\n", profile.wind[t], profile.solar[t]);
    out << profile.timestamps[t] << buf;
  }
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::filesystem::path bundled_profile_path() {
  // Installed copies (the Python wheel) point here at their own data directory.
  if (const char* dir = std::getenv("ECOOP_DATA_DIR"); dir && *dir)
    return std::filesystem::path(dir) / "synthetic_profile.csv";
  return std::filesystem::path(ECOOP_DATA_DIR) / "synthetic_profile.csv";
}

}  // namespace ecoop::harness
