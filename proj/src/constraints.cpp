#include "compham/constraints.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <random>

namespace compham {

Vec primary_residual(const CompositionRule& rule, const Vec& qbar, const Vec& q) {
  require_size(q, rule.dim_q(), "q");
  const ProjectionBundle b = bundle_at(rule, qbar);
  return b.complement() * (q - b.alpha);
}

Vec secondary_residual(const WorkhorseModel& model, const CompositionRule& rule, const PhaseState& s) {
  require_size(s.q, model.dim(), "q");
  require_size(s.p, model.dim(), "p");
  const ProjectionBundle b = bundle_at(rule, s.qbar);
  const Vec qdot = (s.p - model.u(s.q)) / model.mass();
  const Vec qbardot = qbar_dot(b, s.q);
  return b.complement() * (qdot - b.dalpha * qbardot - contract_dbeta(b.dbeta, qbardot));
}

double pbar_residual(const PhaseState& s) { return s.pbar.norm(); }

ConstraintReport constraint_report(const WorkhorseModel& model, const CompositionRule& rule,
                                   const PhaseState& s) {
  return {primary_residual(rule, s.qbar, s.q).norm(), secondary_residual(model, rule, s).norm(),
          pbar_residual(s)};
}

PhaseState project_initial(const CompositionRule& rule, const PhaseState& raw, const ProjectOptions& opts) {
  require_size(raw.q, rule.dim_q(), "q");
  const ProjectionBundle b = bundle_at(rule, raw.qbar);
  PhaseState out = raw;
  // States already on the surface (to rounding) are returned bit-identical,
  // which makes the projection exactly idempotent.
  const Vec disp = raw.q - b.alpha;
  const Vec r = b.complement() * disp;
  if (r.norm() > 1e-14 * std::max(1.0, disp.norm())) out.q = b.alpha + b.projector * disp;
  if (opts.zero_pbar) out.pbar.setZero();
  return out;
}

DriftReport drift_report(const WorkhorseModel& model, const CompositionRule& rule, const Trajectory& traj) {
  DriftReport report;
  report.series.reserve(traj.size());
  for (const auto& s : traj.samples) {
    ConstraintReport c = constraint_report(model, rule, s);
    report.max.primary_norm = std::max(report.max.primary_norm, c.primary_norm);
    report.max.secondary_norm = std::max(report.max.secondary_norm, c.secondary_norm);
    report.max.pbar_norm = std::max(report.max.pbar_norm, c.pbar_norm);
    report.series.push_back(c);
  }
  return report;
}

void attach_diagnostics(const WorkhorseModel& model, const CompositionRule& rule, Trajectory& traj) {
  traj.hamiltonian.clear();
  traj.hamiltonian.reserve(traj.size());
  for (const auto& s : traj.samples) traj.hamiltonian.push_back(hamiltonian(model, rule, s));
  traj.constraints = drift_report(model, rule, traj).series;
}

namespace {

void require_shape(const PhaseState& s, int dim_q, int dim_qbar, const char* family) {
  if (s.q.size() != dim_q || s.p.size() != dim_q || s.qbar.size() != dim_qbar || s.pbar.size() != dim_qbar) {
    throw DimensionMismatch(std::string(family) + " chain needs I=" + std::to_string(dim_q) +
                            ", K=" + std::to_string(dim_qbar));
  }
}

}  // namespace

Vec example_chain_residual(const TwoOscParams& params, const PhaseState& s) {
  params.check();
  require_shape(s, 2, 1, "two-oscillator");
  const double m = params.m, l = params.lambda;
  Vec r(4);
  r << s.q[0] - s.qbar[0],
       s.p[0] - (m / l) * (s.q[1] - s.q[0]),
       s.p[1] - s.p[0] + l * params.h1 * s.q[0],
       s.pbar[0] - l * (params.h1 - params.h2) * s.q[1];
  return r;
}

Vec example_chain_residual(const ThreeOscParams& params, const PhaseState& s) {
  params.check();
  require_shape(s, 3, 2, "three-oscillator");
  const double m = params.m, l = params.lambda, h = params.h;
  Vec r(6);
  r << s.q[1] - s.qbar[1],
       s.p[1] - (m / l) * (s.q[0] - s.qbar[0]),
       s.p[0] - (m / l) * s.q[2] + l * h * s.qbar[1],
       s.p[2] + l * h * s.qbar[0],
       s.pbar[0],
       s.pbar[1];
  return r;
}

Vec example_chain_residual(const FamilyParams& params, const PhaseState& s) {
  return std::visit([&s](const auto& p) { return example_chain_residual(p, s); }, params);
}

namespace {

// Orthonormal basis (as rows) of the row space of m.
Mat row_basis(const Mat& m, double rel_tol) {
  if (m.rows() == 0) return m;
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return Mat(0, m.cols());
  Eigen::Index r = 0;
  while (r < sv.size() && sv[r] > rel_tol * sv[0]) ++r;
  return svd.matrixV().leftCols(r).transpose();
}

}  // namespace

ConstraintClosure constraint_closure(const WorkhorseModel& model, const CompositionRule& rule) {
  const int dim_q = rule.dim_q();
  const int dim_qbar = rule.dim_qbar();
  const int n = 2 * (dim_q + dim_qbar);

  auto field = [&](const Vec& y) { return pack(canonical_field(model, rule, unpack(y, dim_q, dim_qbar, 0.0))); };
  auto primary = [&](const Vec& y) {
    PhaseState s = unpack(y, dim_q, dim_qbar, 0.0);
    return primary_residual(rule, s.qbar, s.q);
  };

  const Vec origin = Vec::Zero(n);
  const Vec f0 = field(origin);
  const Vec c0 = primary(origin);
  Mat flow(n, n);
  Mat constraints(dim_q, n);
  for (int j = 0; j < n; ++j) {
    Vec e = Vec::Unit(n, j);
    flow.col(j) = field(e) - f0;
    constraints.col(j) = primary(e) - c0;
  }

  std::mt19937 gen(12345u);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = dist(gen);
    const double scale = std::max(1.0, flow.cwiseAbs().maxCoeff()) * n;
    if ((field(x) - (f0 + flow * x)).cwiseAbs().maxCoeff() > 1e-9 * scale ||
        (primary(x) - (c0 + constraints * x)).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw std::domain_error("constraint_closure needs an affine canonical field and affine primary constraints");
    }
  }

  constexpr double kRelTol = 1e-9;
  ConstraintClosure out;
  out.phase_dim = n;
  Mat basis = row_basis(constraints, kRelTol);
  Mat latest = basis;
  while (true) {
    Mat derived = latest * flow;
    Mat stacked(basis.rows() + derived.rows(), n);
    stacked << basis, derived;
    Mat next = row_basis(stacked, kRelTol);
    ++out.iterations;
    if (next.rows() == basis.rows() || next.rows() >= n) {
      basis = next;
      break;
    }
    basis = next;
    latest = basis;
  }
  out.constraint_rank = static_cast<int>(basis.rows());
  out.free_dim = n - out.constraint_rank;
  return out;
}

}  // namespace compham
