#include "ecoop/harness/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "ecoop/baselines.hpp"
#include "ecoop/channel.hpp"
#include "ecoop/energy.hpp"
#include "ecoop/errors.hpp"
#include "ecoop/solver.hpp"

namespace ecoop::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Eval {
  Scheme scheme;
  double beta;
};

struct Point {
  double key;
  int slot;
  Eigen::VectorXd budgets;  // empty for snr_sweep, which scales per-realization draws
  double energy = 0.0;      // snr_sweep: linear E
};

struct Unit {
  int slot_index;  // into the slot list (0 for non-profile kinds)
  int placement;
  int realization;
};

// Per-unit output: values[point][eval], plus the message of the last failure.
struct UnitResult {
  std::vector<std::vector<double>> values;
  std::vector<std::vector<std::string>> errors;
  std::array<double, 4> gap{0.0, 0.0, 0.0, 0.0};
  long instances = 0;
};

std::vector<Eval> eval_list(const Scenario& sc) {
  std::vector<Eval> out;
  for (Scheme s : sc.schemes) {
    switch (s) {
      case Scheme::joint:
        for (double b : sc.betas) out.push_back({s, b});
        break;
      case Scheme::energy_only:
        for (double b : sc.betas)
          if (b > 0.0) out.push_back({s, b});
        break;
      case Scheme::comm_only:
      case Scheme::none:
        out.push_back({s, 0.0});
        break;
    }
  }
  return out;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::vector<Point2> hex_sites(double d) {
  return {{0.0, 0.0}, {d, 0.0}, {d / 2.0, d * std::sqrt(3.0) / 2.0}};
}

class Runner {
public:
  Runner(const Scenario& sc, const EnergyProfile* profile) : sc_(sc), evals_(eval_list(sc)) {
    weights_ = sc.weights.size() ? sc.weights : Eigen::VectorXd::Ones(sc.n_mt);
    opts_.tol = sc.tol;
    for (const auto& e : evals_) needs_per_bs_ = needs_per_bs_ || e.scheme == Scheme::energy_only || e.scheme == Scheme::none;

    switch (sc.kind) {
      case ScenarioKind::constant:
        slots_ = {-1};
        points_.push_back({0.0, -1, sc.budgets});
        break;
      case ScenarioKind::two_cell_sweep: {
        slots_ = {-1};
        const int steps = static_cast<int>(std::floor(sc.energy_sum / sc.e1_step + 1e-9));
        for (int k = 0; k <= steps; ++k) {
          const double e1 = std::min(sc.energy_sum, k * sc.e1_step);
          Eigen::VectorXd b(2);
          b << e1, std::max(0.0, sc.energy_sum - e1);
          points_.push_back({e1, -1, b});
        }
        break;
      }
      case ScenarioKind::snr_sweep:
        slots_ = {-1};
        for (double db : sc.energy_db) points_.push_back({db, -1, {}, db_to_linear(db)});
        break;
      case ScenarioKind::hex_profile: {
        if (profile) {
          profile_ = *profile;
        } else {
          profile_ = load_profiles(sc.profile.empty() ? bundled_profile_path() : sc.profile);
        }
        profile_.mix = sc.mix;
        profile_.scale = 1.0;
        const int end = sc.slot_end < 0 ? static_cast<int>(profile_.size()) : sc.slot_end;
        if (end > static_cast<int>(profile_.size())) throw ValidationError("slot_end exceeds the profile length");
        for (int t = sc.slot_begin; t < end; t += sc.slot_stride) slots_.push_back(t);
        for (double dbw : sc.ebar_dbw) {
          for (int t : slots_) points_.push_back({dbw, t, db_to_linear(dbw) * bs_budgets_at(profile_, static_cast<std::size_t>(t))});
        }
        noise_w_ = std::pow(10.0, (sc.noise_dbm - 30.0) / 10.0);
        break;
      }
    }
    for (std::size_t s = 0; s < slots_.size(); ++s)
      for (int pl = 0; pl < placements(); ++pl)
        for (int r = 0; r < sc.n_realizations; ++r) units_.push_back({static_cast<int>(s), pl, r});
  }

  ResultTable run(int threads) {
    std::vector<UnitResult> results(units_.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t u; (u = next.fetch_add(1)) < units_.size();) results[u] = run_unit(units_[u]);
    };
    threads = std::max(1, std::min<int>(threads, static_cast<int>(units_.size())));
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    return aggregate(results);
  }

private:
  int placements() const { return sc_.kind == ScenarioKind::hex_profile ? sc_.placements : 1; }

  // Points evaluated by a unit: hex units cover one slot (all E-bar values), others cover all points.
  bool covers(const Unit& u, const Point& p) const {
    return sc_.kind != ScenarioKind::hex_profile || p.slot == slots_[static_cast<std::size_t>(u.slot_index)];
  }

  UnitResult run_unit(const Unit& u) const {
    UnitResult out;
    out.values.assign(points_.size(), std::vector<double>(evals_.size(), kNaN));
    out.errors.assign(points_.size(), std::vector<std::string>(evals_.size()));

    std::optional<ClusterChannel> ch;
    double energy_u1 = 1.0, energy_u2 = 1.0;
    const auto r = static_cast<std::uint32_t>(u.realization);
    const std::uint64_t seed = sc_.rng_seed;
    std::string setup_error;
    try {
      switch (sc_.kind) {
        case ScenarioKind::constant:
          ch = generate_rayleigh(sc_.n_bs, sc_.m_ant, sc_.n_mt, sc_.variances, derive_seed(seed, {0, r}),
                                 Eigen::VectorXd::Constant(sc_.n_mt, sc_.noise_var));
          break;
        case ScenarioKind::two_cell_sweep: {
          Eigen::MatrixXd var(2, 2);
          var << 1.0, sc_.cross_variance, sc_.cross_variance, 1.0;
          ch = generate_rayleigh(2, 1, 2, var, derive_seed(seed, {1, r}), Eigen::VectorXd::Constant(2, sc_.noise_var));
          break;
        }
        case ScenarioKind::snr_sweep: {
          std::mt19937_64 rng(derive_seed(seed, {2, r}));
          std::uniform_real_distribution<double> unif(0.0, 1.0);
          Eigen::MatrixXd var(2, 2);
          var(0, 0) = var(1, 1) = 1.0;
          var(0, 1) = unif(rng);
          var(1, 0) = unif(rng);
          energy_u1 = unif(rng);
          energy_u2 = unif(rng);
          ch = generate_rayleigh(2, 1, 2, var, rng(), Eigen::VectorXd::Constant(2, sc_.noise_var));
          break;
        }
        case ScenarioKind::hex_profile: {
          const auto slot = static_cast<std::uint32_t>(slots_[static_cast<std::size_t>(u.slot_index)]);
          const auto pl = static_cast<std::uint32_t>(u.placement);
          std::mt19937_64 drop(derive_seed(seed, {3, slot, pl}));
          ScenarioGeometry geo;
          geo.bs_positions = hex_sites(sc_.site_distance);
          geo.pathloss_c0_db = sc_.pathloss_c0_db;
          geo.pathloss_d0 = sc_.pathloss_d0;
          geo.pathloss_exp = sc_.pathloss_exp;
          const double radius = sc_.site_distance / std::sqrt(3.0);
          for (const auto& site : geo.bs_positions)
            for (int k = 0; k < sc_.mt_per_cell; ++k)
              geo.mt_positions.push_back(sample_hexagon(drop, site, radius, sc_.min_distance));
          ch = generate_rayleigh(sc_.n_bs, sc_.m_ant, sc_.n_mt, pathloss_variances(geo), derive_seed(seed, {4, slot, pl, r}),
                                 Eigen::VectorXd::Constant(sc_.n_mt, noise_w_));
          break;
        }
      }
    } catch (const std::exception& e) {
      setup_error = e.what();
    }

    std::optional<ZfGains> joint_gains;
    std::vector<int> association;
    if (ch) {
      try {
        joint_gains = zf_gains(*ch, weights_);
        if (needs_per_bs_) association = strongest_association(block_power(*ch), sc_.m_ant);
      } catch (const std::exception& e) {
        setup_error = e.what();
      }
    }

    for (std::size_t pi = 0; pi < points_.size(); ++pi) {
      const Point& pt = points_[pi];
      if (!covers(u, pt)) continue;
      auto& vals = out.values[pi];
      if (!joint_gains) {
        for (std::size_t ei = 0; ei < evals_.size(); ++ei) out.errors[pi][ei] = setup_error;
        continue;
      }
      Eigen::VectorXd budgets = pt.budgets;
      if (sc_.kind == ScenarioKind::snr_sweep) {
        budgets.resize(2);
        budgets << energy_u1 * pt.energy, energy_u2 * pt.energy;
      }
      const EnergyState es = EnergyState::from_budgets(budgets);
      for (std::size_t ei = 0; ei < evals_.size(); ++ei) {
        const Eval& ev = evals_[ei];
        try {
          const Eigen::MatrixXd beta = uniform_beta(sc_.n_bs, ev.beta);
          Solution s;
          switch (ev.scheme) {
            case Scheme::joint: s = solve_p1(*joint_gains, es, beta, opts_); break;
            case Scheme::comm_only: s = solve_comm_only(*joint_gains, es, opts_); break;
            case Scheme::energy_only: s = solve_energy_only(*ch, association, es, beta, weights_, opts_); break;
            case Scheme::none: s = solve_no_coop(*ch, association, es, weights_, opts_); break;
          }
          vals[ei] = s.objective;
        } catch (const std::exception& e) {
          out.errors[pi][ei] = e.what();
        }
      }
      ++out.instances;
      record_dominance(vals, out.gap);
    }
    return out;
  }

  void record_dominance(const std::vector<double>& vals, std::array<double, 4>& gap) const {
    auto find = [&](Scheme s, double beta) -> double {
      for (std::size_t ei = 0; ei < evals_.size(); ++ei)
        if (evals_[ei].scheme == s && evals_[ei].beta == beta) return vals[ei];
      return kNaN;
    };
    auto bump = [](double& g, double lo, double hi) {
      if (std::isfinite(lo) && std::isfinite(hi)) g = std::max(g, lo - hi);
    };
    const double none = find(Scheme::none, 0.0);
    const double comm = find(Scheme::comm_only, 0.0);
    bump(gap[2], none, comm);
    for (double b : sc_.betas) {
      const double joint = find(Scheme::joint, b);
      const double eo = find(Scheme::energy_only, b);
      bump(gap[0], none, eo);
      bump(gap[1], eo, joint);
      bump(gap[3], comm, joint);
    }
  }

  ResultTable aggregate(const std::vector<UnitResult>& results) const {
    ResultTable table;
    for (const auto& r : results) {
      for (int l = 0; l < 4; ++l) table.dominance_gap[static_cast<std::size_t>(l)] = std::max(table.dominance_gap[static_cast<std::size_t>(l)], r.gap[static_cast<std::size_t>(l)]);
      table.instances += r.instances;
    }
    for (std::size_t pi = 0; pi < points_.size(); ++pi) {
      for (std::size_t ei = 0; ei < evals_.size(); ++ei) {
        ResultRow row;
        row.sweep_key = points_[pi].key;
        row.slot = points_[pi].slot;
        row.scheme = std::string(scheme_name(evals_[ei].scheme));
        row.beta = evals_[ei].beta;
        // Two-pass mean/variance in unit order, so the result does not depend on scheduling.
        double sum = 0.0;
        for (std::size_t u = 0; u < results.size(); ++u) {
          if (!covers(units_[u], points_[pi])) continue;
          const double v = results[u].values[pi][ei];
          if (std::isfinite(v)) {
            sum += v;
            ++row.n;
          } else {
            ++row.failed;
            row.last_error = results[u].errors[pi][ei];
          }
        }
        if (row.n == 0) {
          row.mean_rate = kNaN;
          row.stderr_rate = kNaN;
        } else {
          row.mean_rate = sum / static_cast<double>(row.n);
          double ss = 0.0;
          for (std::size_t u = 0; u < results.size(); ++u) {
            if (!covers(units_[u], points_[pi])) continue;
            const double v = results[u].values[pi][ei];
            if (std::isfinite(v)) ss += (v - row.mean_rate) * (v - row.mean_rate);
          }
          row.stderr_rate = row.n > 1 ? std::sqrt(ss / static_cast<double>(row.n - 1) / static_cast<double>(row.n)) : 0.0;
        }
        table.rows.push_back(std::move(row));
      }
    }
    return table;
  }

  const Scenario& sc_;
  std::vector<Eval> evals_;
  Eigen::VectorXd weights_;
  SolverOptions opts_;
  bool needs_per_bs_ = false;
  EnergyProfile profile_;
  double noise_w_ = 1.0;
  std::vector<int> slots_;
  std::vector<Point> points_;
  std::vector<Unit> units_;
};

}  // namespace

int threads_from_env() {
  const char* env = std::getenv("ECOOP_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw ValidationError("ECOOP_THREADS must be a positive integer");
  return static_cast<int>(std::min<long>(v, 256));
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint32_t> coords) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32)};
  words.insert(words.end(), coords.begin(), coords.end());
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

ResultTable run_scenario(const Scenario& scenario, const EnergyProfile* profile, const RunOptions& options) {
  scenario.validate();
  Runner runner(scenario, profile);
  return runner.run(options.threads > 0 ? options.threads : threads_from_env());
}

}  // namespace ecoop::harness
