#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "ecoop/baselines.hpp"
#include "ecoop/channel.hpp"
#include "ecoop/energy.hpp"
#include "ecoop/errors.hpp"
#include "ecoop/harness/profile.hpp"
#include "ecoop/harness/results.hpp"
#include "ecoop/harness/runner.hpp"
#include "ecoop/harness/scenario.hpp"
#include "ecoop/solver.hpp"

namespace py = pybind11;
using namespace ecoop;

PYBIND11_MODULE(_ecoop, m) {
  m.doc() = "Joint transmit-power and energy-transfer optimisation for cooperating base stations";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<FeasibilityError>(m, "FeasibilityError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_ValueError);
  py::register_exception<DegeneracyError>(m, "DegeneracyError", PyExc_RuntimeError);
  py::register_exception<ConsistencyError>(m, "ConsistencyError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<ClusterChannel>(m, "ClusterChannel")
      .def_readonly("n_bs", &ClusterChannel::n_bs)
      .def_readonly("m_ant", &ClusterChannel::m_ant)
      .def_readonly("n_mt", &ClusterChannel::n_mt)
      .def_readonly("h", &ClusterChannel::h)
      .def_readonly("noise_var", &ClusterChannel::noise_var);

  py::class_<ZfGains>(m, "ZfGains")
      .def_readonly("a", &ZfGains::a)
      .def_readonly("b", &ZfGains::b)
      .def_readonly("t_dir", &ZfGains::t_dir)
      .def_readonly("weights", &ZfGains::weights)
      .def_readonly("bandwidth_share", &ZfGains::bandwidth_share);

  m.def("generate_rayleigh", &generate_rayleigh, py::arg("n_bs"), py::arg("m_ant"), py::arg("n_mt"),
        py::arg("variances"), py::arg("seed"), py::arg("noise_var") = Eigen::VectorXd());
  m.def("zf_gains", &zf_gains, py::arg("channel"), py::arg("weights"));
  m.def("per_bs_zf_gains", &per_bs_zf_gains, py::arg("channel"), py::arg("association"), py::arg("weights"));
  m.def("block_power", &block_power, py::arg("channel"));
  m.def("strongest_association", &strongest_association, py::arg("power"), py::arg("capacity"));

  py::class_<EnergyState>(m, "EnergyState")
      .def(py::init<Eigen::VectorXd, double, double, double>(), py::arg("renewable"), py::arg("grid"),
           py::arg("circuit"), py::arg("pa_eff") = 1.0)
      .def_static("from_budgets", &EnergyState::from_budgets, py::arg("budgets"))
      .def_property_readonly("budget", &EnergyState::budget)
      .def_property_readonly("n_bs", &EnergyState::n_bs);

  m.def("validate_beta", &validate_beta, py::arg("beta"));
  m.def("uniform_beta", &uniform_beta, py::arg("n_bs"), py::arg("value"));
  m.def("power_region_boundary", &power_region_boundary, py::arg("budgets"), py::arg("beta"), py::arg("samples"));

  py::class_<SolverOptions>(m, "SolverOptions")
      .def(py::init<>())
      .def_readwrite("tol", &SolverOptions::tol)
      .def_readwrite("max_iter", &SolverOptions::max_iter);

  py::class_<Solution>(m, "Solution")
      .def_readonly("p", &Solution::p)
      .def_readonly("e", &Solution::e)
      .def_property_readonly("mu", [](const Solution& s) { return s.mu.mu; })
      .def_readonly("rates", &Solution::rates)
      .def_readonly("objective", &Solution::objective)
      .def_readonly("net_exchange", &Solution::net_exchange)
      .def_readonly("dual_value", &Solution::dual_value)
      .def_readonly("duality_gap", &Solution::duality_gap)
      .def_readonly("iterations", &Solution::iterations);

  const SolverOptions defaults;
  m.def("solve_p1", &solve_p1, py::arg("gains"), py::arg("energy"), py::arg("beta"), py::arg("options") = defaults);
  m.def("solve_comm_only", &solve_comm_only, py::arg("gains"), py::arg("energy"), py::arg("options") = defaults);
  m.def("solve_energy_only", &solve_energy_only, py::arg("channel"), py::arg("association"), py::arg("energy"),
        py::arg("beta"), py::arg("weights"), py::arg("options") = defaults);
  m.def("solve_no_coop", &solve_no_coop, py::arg("channel"), py::arg("association"), py::arg("energy"),
        py::arg("weights"), py::arg("options") = defaults);

  py::class_<harness::Scenario>(m, "Scenario")
      .def_readonly("name", &harness::Scenario::name)
      .def_readwrite("n_realizations", &harness::Scenario::n_realizations)
      .def_readwrite("rng_seed", &harness::Scenario::rng_seed)
      .def("validate", &harness::Scenario::validate);
  m.def("load_scenario", &harness::load_scenario, py::arg("path"));
  m.def("parse_scenario", [](const std::string& text) {
    std::istringstream in(text);
    return harness::parse_scenario(in);
  }, py::arg("text"));

  // Returns the result table as a list of row dicts, the same fields the CLI writes.
  m.def(
      "run_scenario",
      [](const harness::Scenario& sc, int threads) {
        harness::ResultTable table;
        {
          py::gil_scoped_release unlocked;
          table = harness::run_scenario(sc, nullptr, harness::RunOptions{threads});
        }
        py::list rows;
        for (const auto& r : table.rows) {
          py::dict d;
          d["sweep_key"] = r.sweep_key;
          d["slot"] = r.slot;
          d["scheme"] = r.scheme;
          d["beta"] = r.beta;
          d["mean_rate"] = r.mean_rate;
          d["stderr"] = r.stderr_rate;
          d["n"] = r.n;
          rows.append(d);
        }
        return rows;
      },
      py::arg("scenario"), py::arg("threads") = 0);

  m.def("bundled_profile_path", &harness::bundled_profile_path);
}
