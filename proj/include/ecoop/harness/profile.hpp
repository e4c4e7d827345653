#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ecoop::harness {

/// Normalized wind/solar harvesting series sampled on a common clock, plus the
/// per-BS mix that turns them into budgets.
struct EnergyProfile {
  std::vector<std::string> timestamps;  // as read from the file
  std::vector<double> minutes;          // parsed clock, strictly increasing
  std::vector<double> wind;             // in [0,1], peak 1
  std::vector<double> solar;            // in [0,1], peak 1
  std::vector<std::array<double, 2>> mix;  // per BS: (wind weight, solar weight)
  double scale = 1.0;                      // E-bar

  std::size_t size() const { return wind.size(); }
  void validate() const;
};

/// Reads a CSV with a header naming at least `timestamp`, `wind` and `solar`
/// (other columns are ignored). Each series is rescaled to peak 1.
/// Timestamps are either plain numbers (minutes) or "YYYY-MM-DD HH:MM[:SS]".
EnergyProfile load_profiles(const std::filesystem::path& path);

/// E_i(t) = scale * (w_wind,i * wind(t) + w_solar,i * solar(t)).
Eigen::VectorXd bs_budgets_at(const EnergyProfile& profile, std::size_t slot);

/// Four days at 15-minute resolution: half-sine daytime solar lobes with a
/// per-day cloud factor, and a smoothed random-walk wind series.
EnergyProfile synthetic_profile(std::uint64_t seed = 2013, int days = 4);

void write_profile_csv(const EnergyProfile& profile, const std::filesystem::path& path);

std::filesystem::path bundled_profile_path();

}  // namespace ecoop::harness
