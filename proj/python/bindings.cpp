#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dfs/bloch.hpp"
#include "dfs/causal.hpp"
#include "dfs/closedform.hpp"
#include "dfs/constrained.hpp"
#include "dfs/critical.hpp"
#include "dfs/io.hpp"

namespace py = pybind11;
using namespace dfs;

namespace {

FermionMatrix as_psi(const CMatrix& e) {
  if (e.rows() % 2 != 0 || e.rows() == 0 || e.cols() == 0) {
    throw std::invalid_argument("fermion matrix must be 2m x f with m, f >= 1");
  }
  return FermionMatrix(e);
}

FermionicProjector as_operator(const CMatrix& e) { return operator_from_columns(as_psi(e)); }

py::dict spectrum_dict(const ChainSpectrum& s) {
  py::dict d;
  d["lambda_plus"] = s.lambda_plus;
  d["lambda_minus"] = s.lambda_minus;
  d["trace"] = s.trace;
  d["determinant"] = s.determinant;
  d["discriminant"] = s.discriminant;
  return d;
}

py::dict run_dict(const critical::OptimizerRun& r) {
  py::dict d;
  d["seed"] = r.seed;
  d["restart"] = r.restart;
  d["action"] = r.action;
  d["feasible"] = r.feasible;
  d["residual_norm_sq"] = r.residual_norm_sq;
  d["outer_iterations"] = r.outer_iterations;
  d["inner_iterations"] = r.inner_iterations;
  d["xi"] = r.xi;
  d["psi"] = r.psi.entries();
  return d;
}

py::dict constrained_dict(const constrained::ConstrainedResult& r) {
  py::dict d;
  d["value"] = r.value;
  d["kappa"] = r.kappa;
  d["z"] = r.z;
  d["constraint_residual"] = r.constraint_residual;
  d["feasible"] = r.feasible;
  d["seed"] = r.seed;
  d["evaluations"] = r.evaluations;
  d["psi"] = r.psi.entries();
  d["idempotence_defect"] = r.idempotence_defect;
  return d;
}

constrained::SearchConfig search_config(int restarts, std::uint64_t seed) {
  constrained::SearchConfig cfg;
  cfg.restarts = restarts;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Fermion systems in discrete space-time: actions, Bloch data, causal structure, optimizers";

  static py::exception<ValidationError> validation_error(mod, "ValidationError", PyExc_ValueError);
  static py::exception<InfeasibleError> infeasible_error(mod, "InfeasibleError", PyExc_ValueError);
  static py::exception<io::ParseError> parse_error(mod, "ParseError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      PyErr_SetString(validation_error.ptr(), e.what());
    } catch (const InfeasibleError& e) {
      PyErr_SetString(infeasible_error.ptr(), e.what());
    } catch (const io::ParseError& e) {
      PyErr_SetString(parse_error.ptr(), e.what());
    }
  });

  // algebra
  mod.def("validate", [](const CMatrix& e, double tol) {
    Tolerances t;
    t.pseudo_orthonormal = tol;
    as_psi(e).validate(t);
  }, py::arg("psi"), py::arg("tol") = kDefaultTolerances.pseudo_orthonormal);
  mod.def("gram", [](const CMatrix& e) { return as_psi(e).gram(); }, py::arg("psi"));
  mod.def("projector", [](const CMatrix& e) { return as_operator(e).matrix; }, py::arg("psi"),
          "P = -Psi Psi^+ S");
  mod.def("action", [](const CMatrix& e, double mu) { return action(as_operator(e), mu); },
          py::arg("psi"), py::arg("mu") = 0.5);
  mod.def("constraint_value", [](const CMatrix& e) { return constraint_value(as_operator(e)); },
          py::arg("psi"), "sum |A_xy|^2");
  mod.def("target_value", [](const CMatrix& e) { return target_value(as_operator(e)); },
          py::arg("psi"), "sum |A_xy^2|");
  mod.def("closed_chain", [](const CMatrix& e, int x, int y) {
    return Mat2(closed_chain(as_operator(e), x, y));
  }, py::arg("psi"), py::arg("x"), py::arg("y"));
  mod.def("chain_spectrum", [](const CMatrix& e, int x, int y) {
    return spectrum_dict(chain_roots(closed_chain(as_operator(e), x, y)));
  }, py::arg("psi"), py::arg("x"), py::arg("y"));

  // bloch
  mod.def("bloch_configuration", [](const CMatrix& e) {
    const auto c = bloch_configuration(as_psi(e));
    Eigen::VectorXd rho(c.size());
    Eigen::MatrixXd v(c.size(), 3);
    for (int x = 0; x < c.size(); ++x) {
      rho(x) = c.points[x].rho;
      v.row(x) = c.points[x].bloch.transpose();
    }
    return py::make_tuple(rho, v);
  }, py::arg("psi"), "(rho, v) with rho of shape (m,) and Bloch vectors of shape (m, 3)");
  mod.def("reconstruct", [](const Eigen::VectorXd& rho, const Eigen::MatrixXd& v) {
    if (v.rows() != rho.size() || v.cols() != 3) throw std::invalid_argument("v must have shape (m, 3)");
    BlochConfiguration c;
    for (Eigen::Index x = 0; x < rho.size(); ++x) c.points.push_back({rho(x), v.row(x).transpose()});
    return reconstruct_fermion_matrix(c).entries();
  }, py::arg("rho"), py::arg("v"));

  // causal
  mod.def("causal_matrix", [](const CMatrix& e) {
    const auto c = causal_matrix(as_operator(e));
    std::vector<std::string> rows;
    for (int x = 1; x <= c.m; ++x) {
      std::string row;
      for (int y = 1; y <= c.m; ++y) row += label_code(c.at(x, y));
      rows.push_back(row);
    }
    return rows;
  }, py::arg("psi"), "rows of T (timelike), S (spacelike), B (boundary)");

  // closed forms
  auto cfm = mod.def_submodule("closedform", "analytic families and closed-form minima");
  cfm.def("two_point_critical", [] { return closedform::two_point_critical().entries(); });
  cfm.def("three_point_family", [](double th) { return closedform::three_point_family(th).entries(); },
          py::arg("theta") = 0.0);
  cfm.def("four_point_family", [](double phi) { return closedform::four_point_family(phi).entries(); },
          py::arg("phi"));
  cfm.def("five_point_optimum", &closedform::five_point_optimum);
  cfm.def("five_point_action", &closedform::five_point_action, py::arg("alpha"));
  cfm.def("one_particle_minimizer", [](int m, double mu) {
    const auto r = closedform::one_particle_minimizer(m, mu);
    return py::make_tuple(r.psi.entries(), r.action);
  }, py::arg("m"), py::arg("mu"));
  cfm.def("two_point_constrained", [](double kappa) {
    const auto r = closedform::two_point_constrained(kappa);
    py::dict d;
    d["v"] = r.v;
    d["target"] = r.target;
    d["mu"] = r.mu;
    d["psi"] = r.psi.entries();
    return d;
  }, py::arg("kappa"));
  cfm.def("three_point_constrained", [](double kappa) {
    const auto r = closedform::three_point_constrained(kappa);
    py::dict d;
    d["v"] = r.v;
    d["target"] = r.target;
    d["branch"] = r.branch;
    d["off_diagonal"] = std::string(1, label_code(r.off_diagonal));
    d["psi"] = r.psi.entries();
    return d;
  }, py::arg("kappa"));

  // critical optimizer
  auto crm = mod.def_submodule("critical", "penalty method for the critical action");
  crm.def("unpack", [](const RVector& xi) { return critical::unpack(xi).entries(); }, py::arg("xi"));
  crm.def("residuals", &critical::residuals, py::arg("xi"));
  crm.def("delta_form_action", &critical::delta_form_action, py::arg("xi"));
  crm.def("penalty_objective", &critical::penalty_objective, py::arg("xi"), py::arg("L"));
  crm.def("gradient", &critical::gradient, py::arg("xi"), py::arg("L"));
  crm.def("penalty_loop", [](const RVector& xi0) {
    py::gil_scoped_release release;
    auto r = critical::penalty_loop(xi0);
    py::gil_scoped_acquire acquire;
    return run_dict(r);
  }, py::arg("xi0"));
  crm.def("multi_start", [](int m, int restarts, std::uint64_t seed, int workers) {
    critical::MultiStartOptions opt;
    opt.restarts = restarts;
    opt.seed = seed;
    opt.workers = workers;
    critical::MultiStartResult r;
    {
      py::gil_scoped_release release;
      r = critical::multi_start(m, opt);
    }
    py::dict d = run_dict(r.best_run());
    py::list runs;
    for (const auto& run : r.runs) runs.append(run_dict(run));
    d["runs"] = runs;
    return d;
  }, py::arg("m"), py::arg("restarts") = 0, py::arg("seed") = 0, py::arg("workers") = 0,
     "best run as a dict, with every run under 'runs'");

  // constrained optimizer
  auto com = mod.def_submodule("constrained", "variational principle with constraint");
  com.def("kappa_min", [](int m, int f, int restarts, std::uint64_t seed) {
    constrained::ConstrainedResult r;
    {
      py::gil_scoped_release release;
      r = constrained::kappa_min(m, f, search_config(restarts, seed));
    }
    return constrained_dict(r);
  }, py::arg("m"), py::arg("f"), py::arg("restarts") = 4, py::arg("seed") = 0);
  com.def("minimize_Z", [](int m, int f, double kappa, int restarts, std::uint64_t seed) {
    constrained::ConstrainedResult r;
    {
      py::gil_scoped_release release;
      r = constrained::minimize_Z(m, f, kappa, search_config(restarts, seed));
    }
    return constrained_dict(r);
  }, py::arg("m"), py::arg("f"), py::arg("kappa"), py::arg("restarts") = 4, py::arg("seed") = 0);

  // io
  mod.def("to_json", [](const CMatrix& e) { return io::fermion_matrix_to_json(as_psi(e)); },
          py::arg("psi"));
  mod.def("from_json", [](const std::string& s) { return io::fermion_matrix_from_json(s).entries(); },
          py::arg("text"));
}
