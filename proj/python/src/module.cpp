#include "compham/composite_residual.hpp"
#include "compham/constraints.hpp"
#include "compham/integrator.hpp"
#include "compham/model_spec.hpp"
#include "compham/oracles.hpp"
#include "compham/projection.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace compham;

namespace {

/// Stacks one vector per sample into a (samples x n) array.
Mat stack(const Trajectory& traj, Vec PhaseState::*member) {
  if (traj.empty()) return Mat(0, 0);
  Mat out(static_cast<Eigen::Index>(traj.size()), (traj.front().*member).size());
  for (std::size_t n = 0; n < traj.size(); ++n) out.row(static_cast<Eigen::Index>(n)) = (traj.samples[n].*member).transpose();
  return out;
}

Vec column(const Trajectory& traj, double ConstraintReport::*member) {
  Vec out(static_cast<Eigen::Index>(traj.constraints.size()));
  for (std::size_t n = 0; n < traj.constraints.size(); ++n) out[static_cast<Eigen::Index>(n)] = traj.constraints[n].*member;
  return out;
}

IntegratorOptions options(const std::string& method, double t_end, double step, double rtol, double atol) {
  IntegratorOptions o;
  o.method = parse_method(method);
  o.t_end = t_end;
  o.step = step;
  o.rtol = rtol;
  o.atol = atol;
  o.check();
  return o;
}

}  // namespace

PYBIND11_MODULE(_compham, m) {
  m.doc() = "Constrained Hamiltonian engine for composite higher-derivative theories";

  py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);
  py::register_exception<RankDeficient>(m, "RankDeficient", PyExc_ArithmeticError);
  py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_RuntimeError);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);

  py::class_<WorkhorseModel>(m, "WorkhorseModel")
      .def_property_readonly("dim", &WorkhorseModel::dim)
      .def_property_readonly("mass", &WorkhorseModel::mass)
      .def("potential", &WorkhorseModel::potential)
      .def("grad_potential", &WorkhorseModel::grad_potential)
      .def("u", &WorkhorseModel::u);
  m.def("harmonic_workhorse", &harmonic_workhorse, py::arg("mass"), py::arg("spring_constants"));

  py::class_<CompositionRule>(m, "CompositionRule")
      .def_property_readonly("dim_q", &CompositionRule::dim_q)
      .def_property_readonly("dim_qbar", &CompositionRule::dim_qbar)
      .def("alpha", &CompositionRule::alpha)
      .def("beta", &CompositionRule::beta)
      .def("dalpha", &CompositionRule::dalpha)
      .def("dbeta", &CompositionRule::dbeta);
  m.def("compose", &compose, py::arg("rule"), py::arg("qbar"), py::arg("qbar_dot"));

  py::class_<ModelSpec>(m, "ModelSpec")
      .def_readwrite("mass", &ModelSpec::mass)
      .def_readwrite("spring_constants", &ModelSpec::spring_constants)
      .def_readwrite("alpha_matrix", &ModelSpec::alpha_matrix)
      .def_readwrite("alpha_offset", &ModelSpec::alpha_offset)
      .def_readwrite("lam", &ModelSpec::lambda)
      .def_property_readonly("dim_q", &ModelSpec::dim_q)
      .def_property_readonly("dim_qbar", &ModelSpec::dim_qbar)
      .def_property_readonly("beta_is_constant", &ModelSpec::beta_is_constant)
      .def("__eq__", &ModelSpec::operator==)
      .def("__str__", &format_model_spec);
  m.def("parse_model_spec", [](const std::string& text) { return parse_model_spec(text); });
  m.def("load_model_spec", &load_model_spec);
  m.def("format_model_spec", &format_model_spec);
  m.def("build_workhorse", &build_workhorse);
  m.def("build_rule", &build_rule);

  py::class_<TwoOscParams>(m, "TwoOscParams")
      .def(py::init([](double mass, double h1, double h2, double lam) { return TwoOscParams{mass, h1, h2, lam}; }),
           py::arg("m") = 1.0, py::arg("h1") = 1.0, py::arg("h2") = 1.0, py::arg("lam") = 1.0)
      .def_readwrite("m", &TwoOscParams::m)
      .def_readwrite("h1", &TwoOscParams::h1)
      .def_readwrite("h2", &TwoOscParams::h2)
      .def_readwrite("lam", &TwoOscParams::lambda);
  py::class_<ThreeOscParams>(m, "ThreeOscParams")
      .def(py::init([](double mass, double h, double lam) { return ThreeOscParams{mass, h, lam}; }),
           py::arg("m") = 1.0, py::arg("h") = 1.0, py::arg("lam") = 1.0)
      .def_readwrite("m", &ThreeOscParams::m)
      .def_readwrite("h", &ThreeOscParams::h)
      .def_readwrite("lam", &ThreeOscParams::lambda);
  py::class_<TwoOscConstants>(m, "TwoOscConstants")
      .def(py::init([](double c1, double c1p, double c2, double c2p, double cbar, double cbarp) {
             return TwoOscConstants{c1, c1p, c2, c2p, cbar, cbarp};
           }),
           py::arg("c1") = 0.0, py::arg("c1p") = 0.0, py::arg("c2") = 0.0, py::arg("c2p") = 0.0,
           py::arg("cbar") = 0.0, py::arg("cbarp") = 0.0)
      .def_readwrite("c1", &TwoOscConstants::c1)
      .def_readwrite("c1p", &TwoOscConstants::c1p)
      .def_readwrite("c2", &TwoOscConstants::c2)
      .def_readwrite("c2p", &TwoOscConstants::c2p)
      .def_readwrite("cbar", &TwoOscConstants::cbar)
      .def_readwrite("cbarp", &TwoOscConstants::cbarp);

  m.def("two_osc_model", &two_osc_model);
  m.def("two_osc_rule", &two_osc_rule, py::arg("lam"));
  m.def("three_osc_model", &three_osc_model);
  m.def("three_osc_rule", &three_osc_rule, py::arg("lam"));

  py::class_<PhaseState>(m, "PhaseState")
      .def(py::init([](Vec qbar, Vec q, Vec pbar, Vec p, double t) { return PhaseState{t, qbar, q, pbar, p}; }),
           py::arg("qbar"), py::arg("q"), py::arg("pbar"), py::arg("p"), py::arg("t") = 0.0)
      .def_static("zero", &PhaseState::zero, py::arg("dim_q"), py::arg("dim_qbar"), py::arg("t") = 0.0)
      .def_readwrite("t", &PhaseState::t)
      .def_readwrite("qbar", &PhaseState::qbar)
      .def_readwrite("q", &PhaseState::q)
      .def_readwrite("pbar", &PhaseState::pbar)
      .def_readwrite("p", &PhaseState::p)
      .def("pack", [](const PhaseState& s) { return pack(s); });

  py::class_<ProjectionBundle>(m, "ProjectionBundle")
      .def_readonly("qbar", &ProjectionBundle::qbar)
      .def_readonly("alpha", &ProjectionBundle::alpha)
      .def_readonly("dalpha", &ProjectionBundle::dalpha)
      .def_readonly("beta", &ProjectionBundle::beta)
      .def_readonly("gram_inv", &ProjectionBundle::gram_inv)
      .def_readonly("beta_inv", &ProjectionBundle::beta_inv)
      .def_readonly("projector", &ProjectionBundle::projector);
  m.def("bundle_at", &bundle_at, py::arg("rule"), py::arg("qbar"));
  m.def("qbar_dot", &qbar_dot, py::arg("bundle"), py::arg("q"));
  m.def("projector_derivative", py::overload_cast<const CompositionRule&, const Vec&>(&projector_derivative),
        py::arg("rule"), py::arg("qbar"));

  m.def("hamiltonian", &hamiltonian, py::arg("model"), py::arg("rule"), py::arg("state"));
  m.def(
      "canonical_field",
      [](const WorkhorseModel& model, const CompositionRule& rule, const PhaseState& s) {
        return pack(canonical_field(model, rule, s));
      },
      py::arg("model"), py::arg("rule"), py::arg("state"),
      "Time derivative of the state, packed as (qbar, q, pbar, p).");

  py::class_<ConstraintReport>(m, "ConstraintReport")
      .def_readonly("primary_norm", &ConstraintReport::primary_norm)
      .def_readonly("secondary_norm", &ConstraintReport::secondary_norm)
      .def_readonly("pbar_norm", &ConstraintReport::pbar_norm);
  m.def("primary_residual", &primary_residual, py::arg("rule"), py::arg("qbar"), py::arg("q"));
  m.def("constraint_report", &constraint_report, py::arg("model"), py::arg("rule"), py::arg("state"));
  m.def(
      "project_initial",
      [](const CompositionRule& rule, const PhaseState& s, bool zero_pbar) { return project_initial(rule, s, {zero_pbar}); },
      py::arg("rule"), py::arg("state"), py::arg("zero_pbar") = false);

  py::class_<Trajectory>(m, "Trajectory")
      .def("__len__", &Trajectory::size)
      .def_property_readonly("t", [](const Trajectory& tr) {
        Vec t(static_cast<Eigen::Index>(tr.size()));
        for (std::size_t n = 0; n < tr.size(); ++n) t[static_cast<Eigen::Index>(n)] = tr.samples[n].t;
        return t;
      })
      .def_property_readonly("qbar", [](const Trajectory& tr) { return stack(tr, &PhaseState::qbar); })
      .def_property_readonly("q", [](const Trajectory& tr) { return stack(tr, &PhaseState::q); })
      .def_property_readonly("pbar", [](const Trajectory& tr) { return stack(tr, &PhaseState::pbar); })
      .def_property_readonly("p", [](const Trajectory& tr) { return stack(tr, &PhaseState::p); })
      .def_readonly("hamiltonian", &Trajectory::hamiltonian)
      .def_property_readonly("primary_norm", [](const Trajectory& tr) { return column(tr, &ConstraintReport::primary_norm); })
      .def_property_readonly("secondary_norm", [](const Trajectory& tr) { return column(tr, &ConstraintReport::secondary_norm); })
      .def_property_readonly("pbar_norm", [](const Trajectory& tr) { return column(tr, &ConstraintReport::pbar_norm); })
      .def("state", [](const Trajectory& tr, std::size_t n) { return tr.samples.at(n); })
      .def("to_csv", [](const Trajectory& tr) {
        std::ostringstream os;
        write_csv(os, tr);
        return os.str();
      });

  m.def(
      "integrate_canonical",
      [](const WorkhorseModel& model, const CompositionRule& rule, const PhaseState& s0, const std::string& method,
         double t_end, double step, double rtol, double atol) {
        const auto o = options(method, t_end, step, rtol, atol);
        py::gil_scoped_release release;
        return integrate_canonical(model, rule, s0, o);
      },
      py::arg("model"), py::arg("rule"), py::arg("state"), py::arg("method") = "rk45", py::arg("t_end") = 10.0,
      py::arg("step") = 1e-3, py::arg("rtol") = 1e-10, py::arg("atol") = 1e-12);
  m.def(
      "two_step_solve",
      [](const WorkhorseModel& model, const CompositionRule& rule, const Vec& q0, const Vec& p0, const Vec& qbar0,
         const std::string& method, double t_end, double step, double rtol, double atol, double t0) {
        const auto o = options(method, t_end, step, rtol, atol);
        py::gil_scoped_release release;
        return two_step_solve(model, rule, q0, p0, qbar0, o, t0);
      },
      py::arg("model"), py::arg("rule"), py::arg("q0"), py::arg("p0"), py::arg("qbar0"), py::arg("method") = "rk45",
      py::arg("t_end") = 10.0, py::arg("step") = 1e-3, py::arg("rtol") = 1e-10, py::arg("atol") = 1e-12,
      py::arg("t0") = 0.0);

  py::class_<ConsistencyResult>(m, "ConsistencyResult")
      .def_readonly("max_primary", &ConsistencyResult::max_primary)
      .def_readonly("tolerance", &ConsistencyResult::tolerance)
      .def_readonly("passed", &ConsistencyResult::passed);
  m.def("consistency_check", &consistency_check, py::arg("rule"), py::arg("trajectory"), py::arg("tolerance") = 1e-6);

  py::class_<CompositeResidual>(m, "CompositeResidual")
      .def_readonly("times", &CompositeResidual::times)
      .def_readonly("residual", &CompositeResidual::residual)
      .def_readonly("max_norm", &CompositeResidual::max_norm);
  m.def("composite_residual", &composite_residual, py::arg("model"), py::arg("rule"), py::arg("trajectory"));

  py::class_<ConstraintClosure>(m, "ConstraintClosure")
      .def_readonly("phase_dim", &ConstraintClosure::phase_dim)
      .def_readonly("constraint_rank", &ConstraintClosure::constraint_rank)
      .def_readonly("free_dim", &ConstraintClosure::free_dim);
  m.def("constraint_closure", &constraint_closure, py::arg("model"), py::arg("rule"));

  py::class_<ValidationCheck>(m, "ValidationCheck")
      .def_readonly("name", &ValidationCheck::name)
      .def_readonly("passed", &ValidationCheck::passed)
      .def_readonly("worst", &ValidationCheck::worst)
      .def_readonly("tolerance", &ValidationCheck::tolerance)
      .def_readonly("detail", &ValidationCheck::detail);
  m.def(
      "validate",
      [](const WorkhorseModel& model, const CompositionRule& rule, int count, unsigned seed) {
        return validate(model, rule, random_samples(model, rule, count, seed)).checks;
      },
      py::arg("model"), py::arg("rule"), py::arg("count") = 50, py::arg("seed") = 1u);

  m.def("two_osc_state", &two_osc_state, py::arg("params"), py::arg("constants"), py::arg("t"));
  m.def("two_osc_constrained_constants", &two_osc_constrained_constants, py::arg("params"), py::arg("c2"), py::arg("c2p"));
  m.def("three_osc_constrained_state", &three_osc_constrained_state, py::arg("params"), py::arg("c1"), py::arg("c1p"),
        py::arg("c2"), py::arg("c2p"), py::arg("t"));
  m.def("mode_count", [](const TwoOscParams& p) { return mode_count(p); });
  m.def("mode_count", [](const ThreeOscParams& p) { return mode_count(p); });
  m.def("example_chain_residual", [](const TwoOscParams& p, const PhaseState& s) { return example_chain_residual(p, s); });
  m.def("example_chain_residual", [](const ThreeOscParams& p, const PhaseState& s) { return example_chain_residual(p, s); });
}
