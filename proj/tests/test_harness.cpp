#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <unistd.h>

#include "ecoop/errors.hpp"
#include "ecoop/harness/profile.hpp"
#include "ecoop/harness/results.hpp"
#include "ecoop/harness/runner.hpp"
#include "ecoop/harness/scenario.hpp"

using namespace ecoop;
using namespace ecoop::harness;
namespace fs = std::filesystem;

namespace {

const fs::path kTestDir = ECOOP_TEST_DIR;
const fs::path kScenarioDir = fs::path(ECOOP_TEST_DIR).parent_path() / "scenarios";

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& name, const std::string& body = {})
      : path(fs::temp_directory_path() / ("ecoop_test_" + std::to_string(::getpid()) + "_" + name)) {
    if (!body.empty()) std::ofstream(path) << body;
  }
  ~TempFile() {
    std::error_code ec;
    fs::remove(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string to_csv(const ResultTable& t) {
  std::ostringstream out;
  write_results(t, out, Format::csv);
  return out.str();
}

Scenario micro() { return load_scenario(kScenarioDir / "micro.scn"); }

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("bundled profile") {
  const auto p = load_profiles(bundled_profile_path());
  CHECK(p.size() == 384);
  CHECK(p.timestamps.size() == 384);
  CHECK(*std::max_element(p.wind.begin(), p.wind.end()) == 1.0);
  CHECK(*std::max_element(p.solar.begin(), p.solar.end()) == 1.0);
  CHECK(*std::min_element(p.solar.begin(), p.solar.end()) == 0.0);
  CHECK(p.minutes[1] - p.minutes[0] == 15.0);
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("profile parsing") {
  SUBCASE("constant columns normalize to one; unknown columns are ignored") {
    TempFile f("const.csv", "Timestamp,site,Wind,Solar\n0,a,5,2\n15,b,5,1\n30,c,5,4\n");
    const auto p = load_profiles(f.path);
    CHECK(p.wind == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(p.solar == std::vector<double>{0.5, 0.25, 1.0});
  }
  SUBCASE("a single row is not a profile") {
    TempFile f("one.csv", "timestamp,wind,solar\n0,1,1\n");
    CHECK_THROWS_AS(load_profiles(f.path), ValidationError);
  }
  SUBCASE("malformed rows name their line") {
    TempFile f("bad.csv", "timestamp,wind,solar\n0,1,1\n15,oops,1\n");
    try {
      load_profiles(f.path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("time must move forward") {
    TempFile f("back.csv", "timestamp,wind,solar\n2020-01-01 00:15,1,1\n2020-01-01 00:00,1,1\n");
    CHECK_THROWS_AS(load_profiles(f.path), ValidationError);
  }
  SUBCASE("date stamps") {
    TempFile f("dates.csv", "timestamp,wind,solar\n2020-01-01 23:45,1,0\n2020-01-02T00:00:00,0.5,0\n");
    const auto p = load_profiles(f.path);
    CHECK(p.minutes[1] - p.minutes[0] == doctest::Approx(15.0));
  }
  SUBCASE("missing file and missing columns") {
    CHECK_THROWS(load_profiles(kTestDir / "no_such_profile.csv"));
    TempFile f("cols.csv", "timestamp,wind\n0,1\n15,1\n");
    CHECK_THROWS_AS(load_profiles(f.path), ParseError);
  }
}

TEST_CASE("budgets from a profile") {
  EnergyProfile p;
  p.timestamps = {"0", "15"};
  p.minutes = {0.0, 15.0};
  p.wind = {1.0, 0.0};
  p.solar = {1.0, 0.4};
  p.mix = {{0.5, 0.5}, {0.9, 0.1}};
  p.scale = 10.0;
  auto e = bs_budgets_at(p, 0);
  CHECK(e(0) == doctest::Approx(10.0));
  CHECK(e(1) == doctest::Approx(10.0));
  e = bs_budgets_at(p, 1);
  CHECK(e(1) == doctest::Approx(10.0 * 0.1 * 0.4));
  CHECK_THROWS_AS(bs_budgets_at(p, 2), DomainError);

  auto bundled = load_profiles(bundled_profile_path());
  bundled.mix = {{0.5, 0.5}, {0.1, 0.9}, {0.9, 0.1}};
  bundled.scale = 10.0;
  // Hand-computed from the bundled CSV rows.
  const std::map<std::size_t, std::array<double, 3>> expected{
      {0, {2.41507, 0.483014, 4.347126}},
      {48, {5.652205, 7.050377, 4.254033}},
      {200, {2.46887, 0.493774, 4.443966}},
  };
  for (const auto& [slot, want] : expected) {
    const auto got = bs_budgets_at(bundled, slot);
    for (int i = 0; i < 3; ++i) CHECK(got(i) == doctest::Approx(want[static_cast<std::size_t>(i)]).epsilon(1e-9));
  }
}

TEST_CASE("synthetic profile shape") {
  const auto p = synthetic_profile();
  REQUIRE(p.size() == 384);
  for (std::size_t t = 0; t < p.size(); ++t) {
    const double hour = std::fmod(p.minutes[t] - p.minutes[0], 1440.0) / 60.0;
    if (hour < 6.0 || hour > 19.5) CHECK(p.solar[t] == 0.0);
    CHECK(p.wind[t] >= 0.0);
    CHECK(p.wind[t] <= 1.0);
  }
  CHECK(synthetic_profile(7).wind != p.wind);
  CHECK(synthetic_profile().wind == p.wind);
}

TEST_CASE("scenario files") {
  SUBCASE("bundled scenarios validate") {
    for (const auto* name : {"micro.scn", "two_cell_sweep.scn", "snr_sweep.scn", "hex_profile.scn"}) {
      CAPTURE(name);
      CHECK_NOTHROW(load_scenario(kScenarioDir / name).validate());
    }
  }
  SUBCASE("errors") {
    std::istringstream unknown("kind = constant\nbogus = 1\n");
    try {
      parse_scenario(unknown);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    std::istringstream dup("kind = constant\nseed = 1\nseed = 2\n");
    CHECK_THROWS_AS(parse_scenario(dup), ParseError);
    std::istringstream no_schemes("kind = two_cell_sweep\nschemes =\n");
    CHECK_THROWS(parse_scenario(no_schemes).validate());
    std::istringstream bad_sweep("kind = two_cell_sweep\nenergy_sum = -1\n");
    CHECK_THROWS_AS(parse_scenario(bad_sweep).validate(), ValidationError);
    std::istringstream no_share("kind = two_cell_sweep\nbeta = 0\nschemes = energy_only\n");
    CHECK_THROWS_AS(parse_scenario(no_share).validate(), ValidationError);
  }
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, {0, 1}) == derive_seed(1, {0, 1}));
  CHECK(derive_seed(1, {0, 1}) != derive_seed(1, {1, 0}));
  CHECK(derive_seed(1, {0, 1}) != derive_seed(2, {0, 1}));
}

TEST_CASE("hexagon drops stay inside the cell") {
  std::mt19937_64 rng(3);
  const double r = 1000.0 / std::sqrt(3.0);
  for (int s = 0; s < 2000; ++s) {
    const auto p = sample_hexagon(rng, Point2{100.0, -50.0}, r, 10.0);
    const double x = std::abs(p.x - 100.0), y = std::abs(p.y + 50.0);
    CHECK(std::hypot(x, y) >= 10.0);
    CHECK(x <= r * std::sqrt(3.0) / 2.0 + 1e-9);
    CHECK(y <= r - x / std::sqrt(3.0) + 1e-9);
  }
}

TEST_CASE("runs are deterministic, also across thread counts") {
  const auto sc = micro();
  const auto one = run_scenario(sc, nullptr, RunOptions{1});
  const auto again = run_scenario(sc, nullptr, RunOptions{1});
  const auto four = run_scenario(sc, nullptr, RunOptions{4});
  CHECK(to_csv(one) == to_csv(again));
  CHECK(to_csv(one) == to_csv(four));
  Scenario other = sc;
  other.rng_seed = 43;
  CHECK(to_csv(run_scenario(other)) != to_csv(one));
}

TEST_CASE("golden micro scenario") {
  const auto table = run_scenario(micro());
  CHECK(to_csv(table) == slurp(kTestDir / "golden" / "micro.csv"));
  for (const auto& row : table.rows) CHECK(row.failed == 0);
}

TEST_CASE("result serialization") {
  SUBCASE("empty table") {
    CHECK(to_csv(ResultTable{}) == "sweep_key,slot,scheme,beta,mean_rate,stderr,n\n");
    std::ostringstream j;
    write_results(ResultTable{}, j, Format::jsonl);
    CHECK(j.str().empty());
  }
  SUBCASE("round trip") {
    ResultTable t;
    t.rows.push_back({1.0 / 3.0, 7, "joint", 0.9, 12.3456789123, 1e-7 / 3.0, 200, 0, {}});
    t.rows.push_back({-30.0, -1, "none", 0.0, 0.0, 0.0, 1, 0, {}});
    std::istringstream in(to_csv(t));
    const auto back = parse_results_csv(in);
    REQUIRE(back.rows.size() == 2);
    CHECK(format_g9(back.rows[0].sweep_key) == format_g9(1.0 / 3.0));
    CHECK(format_g9(back.rows[0].mean_rate) == "12.3456789");
    CHECK(back.rows[0].slot == 7);
    CHECK(back.rows[1].scheme == "none");
    CHECK(to_csv(back) == to_csv(t));
  }
  SUBCASE("json lines") {
    ResultTable t;
    t.rows.push_back({2.0, -1, "joint", 0.5, 1.5, std::nan(""), 3, 0, {}});
    std::ostringstream j;
    write_results(t, j, Format::jsonl);
    CHECK(j.str() ==
          "{\"sweep_key\":2,\"slot\":-1,\"scheme\":\"joint\",\"beta\":0.5,\"mean_rate\":1.5,\"stderr\":null,\"n\":3}\n");
  }
  SUBCASE("formats and paths") {
    CHECK(parse_format("json-lines") == Format::jsonl);
    CHECK_THROWS(parse_format("xml"));
    CHECK_THROWS_AS(emit_results(ResultTable{}, "/nonexistent-dir/x.csv", Format::csv), std::runtime_error);
    TempFile f("out.csv");
    emit_results(ResultTable{}, f.path, Format::csv);
    CHECK(slurp(f.path) == "sweep_key,slot,scheme,beta,mean_rate,stderr,n\n");
  }
}

TEST_CASE("two-cell sweep rows rise with beta") {
  auto sc = load_scenario(kScenarioDir / "two_cell_sweep.scn");
  sc.n_realizations = 40;
  const auto table = run_scenario(sc);
  std::map<std::pair<double, double>, const ResultRow*> by_key;
  for (const auto& r : table.rows) by_key[{r.sweep_key, r.beta}] = &r;
  for (const auto& [key, row] : by_key) {
    for (const auto& [key2, row2] : by_key) {
      if (key2.first != key.first || key2.second <= key.second) continue;
      const double se = std::hypot(row->stderr_rate, row2->stderr_rate);
      CHECK(row->mean_rate <= row2->mean_rate + 2.0 * se + 1e-12);
    }
  }
  CHECK(table.dominance_gap[3] <= 1e-8);
}

}  // TEST_SUITE
