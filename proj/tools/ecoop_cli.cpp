// ecoop: run experiment scenarios, print power-region boundaries, validate scenario files.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecoop/energy.hpp"
#include "ecoop/errors.hpp"
#include "ecoop/harness/profile.hpp"
#include "ecoop/harness/results.hpp"
#include "ecoop/harness/runner.hpp"
#include "ecoop/harness/scenario.hpp"

namespace {

enum Exit { kOk = 0, kInvalid = 1, kRuntime = 2 };

std::vector<double> parse_csv_numbers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string cell; std::getline(ss, cell, ',');) {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw ecoop::ValidationError("bad number '" + cell + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint communication and energy cooperation experiments"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_path;
  std::string format = "csv";
  long long seed = -1;
  int realizations = 0;
  auto* run = app.add_subcommand("run", "Run a scenario and emit per-row mean sum-rates");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--out", out_path, "Output path (default: stdout)");
  run->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  run->add_option("--seed", seed, "Override the scenario seed")->check(CLI::NonNegativeNumber);
  run->add_option("--realizations", realizations, "Override the realization count")->check(CLI::PositiveNumber);

  std::string budgets = "10,10";
  double beta = 1.0;
  int samples = 50;
  auto* region = app.add_subcommand("region", "Boundary of the two-BS feasible power region");
  region->add_option("--budgets", budgets, "E1,E2")->required();
  region->add_option("--beta", beta, "Transfer efficiency (both directions)")->required();
  region->add_option("--samples", samples, "Boundary samples")->check(CLI::PositiveNumber);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Parse and check a scenario file");
  validate->add_option("scenario", validate_path, "Scenario file")->required();

  std::string synth_out;
  long long synth_seed = 2013;
  auto* synth = app.add_subcommand("synth-profile", "Write a synthetic wind/solar profile CSV");
  synth->add_option("--out", synth_out, "Output path")->required();
  synth->add_option("--seed", synth_seed, "Generator seed")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) {
      auto sc = ecoop::harness::load_scenario(scenario_path);
      if (seed >= 0) sc.rng_seed = static_cast<std::uint64_t>(seed);
      if (realizations > 0) sc.n_realizations = realizations;
      sc.validate();
      const auto fmt = ecoop::harness::parse_format(format);
      const auto table = ecoop::harness::run_scenario(sc);
      for (const auto& row : table.rows) {
        if (row.failed > 0) {
          std::fprintf(stderr, "warning: %s beta=%g key=%g slot=%d: %ld failed (%s)\n", row.scheme.c_str(), row.beta,
                       row.sweep_key, row.slot, row.failed, row.last_error.c_str());
        }
      }
      if (out_path.empty()) {
        ecoop::harness::write_results(table, std::cout, fmt);
      } else {
        ecoop::harness::emit_results(table, out_path, fmt);
      }
    } else if (*region) {
      const auto e = parse_csv_numbers(budgets);
      if (e.size() != 2) throw ecoop::ValidationError("--budgets takes exactly two values");
      const Eigen::Vector2d b(e[0], e[1]);
      const auto pts = ecoop::power_region_boundary(b, ecoop::uniform_beta(2, beta), samples);
      std::cout << "p1,p2\n";
      for (const auto& p : pts) std::cout << ecoop::harness::format_g9(p[0]) << ',' << ecoop::harness::format_g9(p[1]) << '\n';
    } else if (*validate) {
      const auto sc = ecoop::harness::load_scenario(validate_path);
      sc.validate();
      std::cout << validate_path << ": ok (" << ecoop::harness::kind_name(sc.kind) << ")\n";
    } else if (*synth) {
      ecoop::harness::write_profile_csv(ecoop::harness::synthetic_profile(static_cast<std::uint64_t>(synth_seed)), synth_out);
    }
  } catch (const ecoop::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const ecoop::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const ecoop::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
