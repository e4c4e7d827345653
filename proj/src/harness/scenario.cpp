#include "ecoop/harness/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "ecoop/errors.hpp"

namespace ecoop::harness {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& tok, int line) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) throw ParseError("not a number: '" + tok + "'", line);
  return v;
}

long long to_int(const std::string& tok, int line) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) throw ParseError("not an integer: '" + tok + "'", line);
  return v;
}

std::vector<std::string> tokens(const std::string& s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream ss(t);
  std::vector<std::string> out;
  for (std::string w; ss >> w;) out.push_back(w);
  return out;
}

std::vector<double> to_list(const std::string& s, int line) {
  std::vector<double> out;
  for (const auto& t : tokens(s)) out.push_back(to_double(t, line));
  if (out.empty()) throw ParseError("empty list", line);
  return out;
}

Eigen::VectorXd to_vector(const std::string& s, int line) {
  const auto v = to_list(s, line);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<std::vector<double>> to_rows(const std::string& s, int line) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, ';');) {
    if (trim(part).empty()) continue;
    rows.push_back(to_list(part, line));
  }
  if (rows.empty()) throw ParseError("empty matrix", line);
  for (const auto& r : rows)
    if (r.size() != rows.front().size()) throw ParseError("matrix rows differ in length", line);
  return rows;
}

ScenarioKind to_kind(const std::string& s, int line) {
  if (s == "constant") return ScenarioKind::constant;
  if (s == "two_cell_sweep") return ScenarioKind::two_cell_sweep;
  if (s == "snr_sweep") return ScenarioKind::snr_sweep;
  if (s == "hex_profile") return ScenarioKind::hex_profile;
  throw ParseError("unknown kind '" + s + "'", line);
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

}  // namespace

std::string_view kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::constant: return "constant";
    case ScenarioKind::two_cell_sweep: return "two_cell_sweep";
    case ScenarioKind::snr_sweep: return "snr_sweep";
    case ScenarioKind::hex_profile: return "hex_profile";
  }
  return "unknown";
}

void Scenario::validate() const {
  require(n_bs > 0 && m_ant > 0 && n_mt > 0, "n_bs, m_ant and n_mt must be positive");
  require(n_mt <= n_bs * m_ant, "n_mt exceeds the total antenna count n_bs * m_ant");
  require(n_realizations > 0, "realizations must be positive");
  require(!schemes.empty(), "schemes must not be empty");
  require(!betas.empty(), "beta must list at least one value");
  for (double b : betas) require(b >= 0.0 && b <= 1.0, "beta values must lie in [0, 1]");
  require(tol > 0.0, "tol must be positive");
  require(weights.size() == 0 || weights.size() == n_mt, "weights must have n_mt entries");
  require(weights.size() == 0 || (weights.array() > 0.0).all(), "weights must be positive");
  const bool any_positive_beta = std::any_of(betas.begin(), betas.end(), [](double b) { return b > 0.0; });
  for (Scheme s : schemes) {
    if (s == Scheme::energy_only) require(any_positive_beta, "energy_only needs at least one beta > 0");
  }

  switch (kind) {
    case ScenarioKind::constant:
      require(variances.rows() == n_bs && variances.cols() == n_mt, "variances must be n_bs x n_mt");
      require((variances.array() > 0.0).all(), "variances must be positive");
      require(budgets.size() == n_bs, "budgets must have n_bs entries");
      require((budgets.array() >= 0.0).all(), "budgets must be nonnegative");
      require(noise_var > 0.0, "noise_var must be positive");
      break;
    case ScenarioKind::two_cell_sweep:
      require(n_bs == 2 && m_ant == 1 && n_mt == 2, "two_cell_sweep fixes n_bs=2, m_ant=1, n_mt=2");
      require(cross_variance > 0.0 && cross_variance <= 1.0, "cross_variance must lie in (0, 1]");
      require(energy_sum >= 0.0, "energy_sum must be nonnegative");
      require(e1_step > 0.0, "e1_step must be positive");
      require(noise_var > 0.0, "noise_var must be positive");
      break;
    case ScenarioKind::snr_sweep:
      require(n_bs == 2 && m_ant == 1 && n_mt == 2, "snr_sweep fixes n_bs=2, m_ant=1, n_mt=2");
      require(!energy_db.empty(), "energy_db must list at least one value");
      require(std::is_sorted(energy_db.begin(), energy_db.end()) &&
                  std::adjacent_find(energy_db.begin(), energy_db.end()) == energy_db.end(),
              "energy_db must be strictly increasing");
      require(noise_var > 0.0, "noise_var must be positive");
      break;
    case ScenarioKind::hex_profile: {
      require(n_bs == 3, "hex_profile uses three cells");
      require(mt_per_cell > 0 && n_mt == 3 * mt_per_cell, "hex_profile needs n_mt = 3 * mt_per_cell");
      require(mt_per_cell <= m_ant, "mt_per_cell must not exceed m_ant");
      require(static_cast<int>(mix.size()) == n_bs, "mix needs one (wind, solar) pair per BS");
      for (const auto& w : mix) require(w[0] >= 0.0 && w[1] >= 0.0, "mix weights must be nonnegative");
      require(!ebar_dbw.empty(), "ebar_dbw must list at least one value");
      require(slot_begin >= 0, "slot_begin must be nonnegative");
      require(slot_end < 0 || slot_end > slot_begin, "slot_end must exceed slot_begin");
      require(slot_stride > 0, "slot_stride must be positive");
      require(placements > 0, "placements must be positive");
      require(site_distance > 0.0, "site_distance must be positive");
      require(pathloss_d0 > 0.0 && pathloss_exp > 0.0, "pathloss d0 and exponent must be positive");
      const double inradius = site_distance / 2.0;
      require(min_distance >= 0.0 && min_distance < inradius, "min_distance must lie in [0, site_distance/2)");
      break;
    }
  }
}

Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir) {
  std::map<std::string, std::pair<std::string, int>> kv;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("missing key", line_no);
    if (value.empty()) throw ParseError("missing value for '" + key + "'", line_no);
    if (!kv.emplace(key, std::make_pair(value, line_no)).second) throw ParseError("duplicate key '" + key + "'", line_no);
  }

  Scenario sc;
  auto take = [&](const std::string& key, auto&& apply) {
    auto it = kv.find(key);
    if (it == kv.end()) return false;
    apply(it->second.first, it->second.second);
    kv.erase(it);
    return true;
  };
  auto as_int = [](int& dst) {
    return [&dst](const std::string& v, int ln) { dst = static_cast<int>(to_int(v, ln)); };
  };
  auto as_double = [](double& dst) {
    return [&dst](const std::string& v, int ln) { dst = to_double(v, ln); };
  };

  take("kind", [&](const std::string& v, int ln) { sc.kind = to_kind(v, ln); });
  if (sc.kind == ScenarioKind::hex_profile) {
    sc.n_bs = 3;
    sc.m_ant = 4;
  }
  take("name", [&](const std::string& v, int) { sc.name = v; });
  take("n_bs", as_int(sc.n_bs));
  take("m_ant", as_int(sc.m_ant));
  take("mt_per_cell", as_int(sc.mt_per_cell));
  if (!take("n_mt", as_int(sc.n_mt)) && sc.kind == ScenarioKind::hex_profile) sc.n_mt = 3 * sc.mt_per_cell;

  take("variances", [&](const std::string& v, int ln) {
    const auto rows = to_rows(v, ln);
    sc.variances.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        sc.variances(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  });
  take("cross_variance", as_double(sc.cross_variance));
  take("noise_var", as_double(sc.noise_var));
  take("noise_dbm", as_double(sc.noise_dbm));
  take("weights", [&](const std::string& v, int ln) { sc.weights = to_vector(v, ln); });
  take("beta", [&](const std::string& v, int ln) { sc.betas = to_list(v, ln); });
  take("budgets", [&](const std::string& v, int ln) { sc.budgets = to_vector(v, ln); });
  take("energy_sum", as_double(sc.energy_sum));
  take("e1_step", as_double(sc.e1_step));
  take("energy_db", [&](const std::string& v, int ln) { sc.energy_db = to_list(v, ln); });
  take("profile", [&](const std::string& v, int) {
    std::filesystem::path p(v);
    sc.profile = (p.is_relative() && !base_dir.empty()) ? base_dir / p : p;
  });
  take("mix", [&](const std::string& v, int ln) {
    sc.mix.clear();
    for (const auto& r : to_rows(v, ln)) {
      if (r.size() != 2) throw ParseError("mix rows are (wind, solar) pairs", ln);
      sc.mix.push_back({r[0], r[1]});
    }
  });
  take("ebar_dbw", [&](const std::string& v, int ln) { sc.ebar_dbw = to_list(v, ln); });
  take("slot_begin", as_int(sc.slot_begin));
  take("slot_end", as_int(sc.slot_end));
  take("slot_stride", as_int(sc.slot_stride));
  take("placements", as_int(sc.placements));
  take("site_distance", as_double(sc.site_distance));
  take("pathloss_c0_db", as_double(sc.pathloss_c0_db));
  take("pathloss_d0", as_double(sc.pathloss_d0));
  take("pathloss_exp", as_double(sc.pathloss_exp));
  take("min_distance", as_double(sc.min_distance));
  take("realizations", as_int(sc.n_realizations));
  take("seed", [&](const std::string& v, int ln) {
    const long long s = to_int(v, ln);
    if (s < 0) throw ParseError("seed must be nonnegative", ln);
    sc.rng_seed = static_cast<std::uint64_t>(s);
  });
  take("schemes", [&](const std::string& v, int ln) {
    sc.schemes.clear();
    std::set<Scheme> seen;
    for (const auto& t : tokens(v)) {
      Scheme s{};
      try {
        s = parse_scheme(t);
      } catch (const DomainError& e) {
        throw ParseError(e.what(), ln);
      }
      if (seen.insert(s).second) sc.schemes.push_back(s);
    }
  });
  take("tol", as_double(sc.tol));

  if (!kv.empty()) {
    const auto& [key, val] = *kv.begin();
    throw ParseError("unknown key '" + key + "'", val.second);
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario '" + path.string() + "'");
  Scenario sc = parse_scenario(in, path.parent_path());
  if (sc.name.empty()) sc.name = path.stem().string();
  return sc;
}

}  // namespace ecoop::harness
