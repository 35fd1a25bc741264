#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nsplab/experiment.hpp"
#include "nsplab/measures.hpp"
#include "nsplab/nsp.hpp"
#include "nsplab/random.hpp"
#include "nsplab/report.hpp"
#include "nsplab/solver.hpp"
#include "nsplab/subspaces.hpp"
#include "nsplab/suite.hpp"
#include "nsplab/width.hpp"

namespace py = pybind11;
using namespace nsplab;

namespace {

// Reports cross the boundary as plain dicts through their JSON form.
py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

SearchOptions search(std::uint64_t seed, std::size_t budget) {
  SearchOptions o;
  o.seed = seed;
  o.budget = budget;
  return o;
}

Subspace subspace_from(const Eigen::MatrixXd& generator) { return Subspace::from_generator(generator); }

}  // namespace

PYBIND11_MODULE(_nsplab, m) {
  m.doc() = "Null space property certificates, robustness probes, recovery and width estimates";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const std::invalid_argument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<SparsenessMeasure>(m, "Measure")
      .def(py::init([](const std::string& spec) { return parse_measure(spec); }), py::arg("spec"))
      .def("__call__", [](const SparsenessMeasure& F, double x) { return F(x); })
      .def("derivative", &SparsenessMeasure::derivative)
      .def_property_readonly("spec", &SparsenessMeasure::spec)
      .def_property_readonly("name", &SparsenessMeasure::name)
      .def_property_readonly("homogeneous", &SparsenessMeasure::homogeneous)
      .def("__repr__", [](const SparsenessMeasure& F) { return "Measure('" + F.spec() + "')"; });

  py::class_<Subspace>(m, "Subspace")
      .def(py::init(&subspace_from), py::arg("generator"), "orthonormalized span of the columns of an n x l matrix")
      .def_property_readonly("basis", &Subspace::basis)
      .def_property_readonly("ambient_dim", &Subspace::ambient_dim)
      .def_property_readonly("dim", &Subspace::dim)
      .def("membership_residual", &Subspace::membership_residual)
      .def("orthogonal_complement", &Subspace::orthogonal_complement);

  m.def(
      "null_space", [](const Eigen::MatrixXd& A) { return MeasurementMatrix(A).null_space(); }, py::arg("A"));
  m.def(
      "sample_haar",
      [](Eigen::Index n, Eigen::Index l, std::uint64_t seed) {
        Rng rng = make_rng(seed, 0);
        return sample_haar(n, l, rng);
      },
      py::arg("n"), py::arg("l"), py::arg("seed") = 1);
  m.def("grassmann_distance", &grassmann_distance);

  m.def(
      "check_properties",
      [](const std::string& measure, std::size_t budget) {
        return to_py(to_json(check_measure_properties(parse_measure(measure), budget)));
      },
      py::arg("measure"), py::arg("budget") = 100000);
  m.def(
      "compare_measures",
      [](const std::string& f, const std::string& g, std::size_t budget) {
        return to_py(to_json(compare_measures(parse_measure(f), parse_measure(g), budget)));
      },
      py::arg("f"), py::arg("g"), py::arg("budget") = 100000);

  m.def(
      "nsc",
      [](const Subspace& nu, const std::string& measure, int k, std::uint64_t seed, std::size_t budget) {
        return to_py(to_json(nsc(nu, CostFunction(parse_measure(measure), nu.ambient_dim()), k, search(seed, budget))));
      },
      py::arg("nu"), py::arg("measure"), py::arg("k"), py::arg("seed") = 1, py::arg("budget") = 200000);
  m.def(
      "nsp_check",
      [](const Subspace& nu, const std::string& measure, int k, std::uint64_t seed, std::size_t budget) {
        return to_py(
            to_json(nsp_check(nu, CostFunction(parse_measure(measure), nu.ambient_dim()), k, search(seed, budget))));
      },
      py::arg("nu"), py::arg("measure"), py::arg("k"), py::arg("seed") = 1, py::arg("budget") = 200000);
  m.def(
      "rrc_probe",
      [](const Subspace& nu, const std::string& measure, int k, double d, std::size_t budget, std::uint64_t seed) {
        return to_py(to_json(
            rrc_probe(nu, CostFunction(parse_measure(measure), nu.ambient_dim()), k, d, budget, search(seed, budget))));
      },
      py::arg("nu"), py::arg("measure"), py::arg("k"), py::arg("d"), py::arg("budget") = 100000,
      py::arg("seed") = 1);

  m.def(
      "recover",
      [](const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const std::string& measure, double eps,
         const std::string& method, int k, std::uint64_t seed) {
        const MeasurementMatrix M(A);
        SolverOptions o;
        o.method = parse_solver_method(method);
        o.seed = seed;
        const RecoveryProblem P(M, y, eps, CostFunction(parse_measure(measure), M.cols()), k);
        return to_py(to_json(solve(P, o)));
      },
      py::arg("A"), py::arg("y"), py::arg("measure") = "l1", py::arg("eps") = 0.0, py::arg("method") = "descent",
      py::arg("k") = 1, py::arg("seed") = 1);

  m.def(
      "width",
      [](const std::string& measure, int n, int k, std::size_t draws, double d, std::uint64_t seed) {
        const CostFunction J(parse_measure(measure), n);
        return to_py(to_json(d > 0.0 ? width_extended(J, k, d, draws, seed) : width_mc(J, k, draws, seed)));
      },
      py::arg("measure"), py::arg("n"), py::arg("k"), py::arg("draws") = 10000, py::arg("d") = 0.0,
      py::arg("seed") = 1);
  m.def("zeta", &zeta, py::arg("n"), py::arg("k"));
  m.def("rv_bound", &rv_bound, py::arg("n"), py::arg("k"));
  m.def("gordon_bound", &gordon_bound, py::arg("w"), py::arg("m"));
  m.def("delta_threshold", &delta_threshold, py::arg("beta"));
  m.def("tradeoff_delta", &tradeoff_delta, py::arg("beta"), py::arg("gamma"));
  m.def(
      "tradeoff",
      [](double beta, double gamma, bool oracle) { return to_py(to_json(tradeoff(beta, gamma, oracle))); },
      py::arg("beta"), py::arg("gamma"), py::arg("oracle") = true);

  m.def(
      "mc_probability",
      [](const py::dict& settings) {
        ExperimentConfig cfg;
        for (const auto& [key, value] : settings) cfg.set(py::str(key), py::str(value));
        MonteCarloSummary s;
        {
          py::gil_scoped_release release;
          s = mc_probability(cfg);
        }
        return to_py(to_json(s));
      },
      py::arg("settings"), "config keys as in the key=value files, e.g. {'n': 5, 'm': 3, 'trials': 200}");
  m.def(
      "verify_counterexample1",
      [](const std::vector<double>& d) { return to_py(to_json(verify_counterexample1(d))); },
      py::arg("d_list") = std::vector<double>{0.5, 0.1, 0.01, 0.001});
  m.def(
      "run_suite",
      [](const std::string& name, std::uint64_t seed, unsigned threads) {
        SuiteOptions o;
        o.seed = seed;
        o.threads = threads;
        return to_py(run_suite(name, o).bundle);
      },
      py::arg("name") = "quick", py::arg("seed") = 1, py::arg("threads") = 1);
}
