#include "compham/dynamics.hpp"

namespace compham {

PhaseState PhaseState::zero(int dim_q, int dim_qbar, double t) {
  return PhaseState{t, Vec::Zero(dim_qbar), Vec::Zero(dim_q), Vec::Zero(dim_qbar), Vec::Zero(dim_q)};
}

bool PhaseState::all_finite() const {
  return std::isfinite(t) && qbar.allFinite() && q.allFinite() && pbar.allFinite() && p.allFinite();
}

Vec pack(const PhaseState& s) {
  Vec y(s.qbar.size() + s.q.size() + s.pbar.size() + s.p.size());
  y << s.qbar, s.q, s.pbar, s.p;
  return y;
}

Vec pack(const FieldEval& f) {
  Vec y(f.d_qbar.size() + f.d_q.size() + f.d_pbar.size() + f.d_p.size());
  y << f.d_qbar, f.d_q, f.d_pbar, f.d_p;
  return y;
}

PhaseState unpack(const Vec& y, int dim_q, int dim_qbar, double t) {
  require_size(y, 2 * (dim_q + dim_qbar), "packed phase state");
  PhaseState s;
  s.t = t;
  s.qbar = y.segment(0, dim_qbar);
  s.q = y.segment(dim_qbar, dim_q);
  s.pbar = y.segment(dim_qbar + dim_q, dim_qbar);
  s.p = y.segment(2 * dim_qbar + dim_q, dim_q);
  return s;
}

namespace {

void check_state(const WorkhorseModel& model, const CompositionRule& rule, const PhaseState& s) {
  if (model.dim() != rule.dim_q()) throw DimensionMismatch("model and rule disagree on I");
  require_size(s.qbar, rule.dim_qbar(), "qbar");
  require_size(s.pbar, rule.dim_qbar(), "pbar");
  require_size(s.q, model.dim(), "q");
  require_size(s.p, model.dim(), "p");
  if (!s.all_finite()) throw NonFiniteInput("phase state contains non-finite entries");
}

}  // namespace

double workhorse_energy(const WorkhorseModel& model, const Vec& q, const Vec& p) {
  Vec v = p - model.u(q);
  return v.squaredNorm() / (2.0 * model.mass()) + model.potential(q);
}

double hamiltonian(const WorkhorseModel& model, const CompositionRule& rule, const PhaseState& s) {
  check_state(model, rule, s);
  ProjectionBundle b = bundle_at(rule, s.qbar);
  return workhorse_energy(model, s.q, s.p) + (s.q - b.alpha).dot(b.beta_inv * s.pbar);
}

FieldEval canonical_field(const WorkhorseModel& model, const CompositionRule& rule,
                          const PhaseState& s) {
  check_state(model, rule, s);
  const ProjectionBundle b = bundle_at(rule, s.qbar);
  const double m = model.mass();
  const Vec disp = s.q - b.alpha;
  const Vec velocity = (s.p - model.u(s.q)) / m;
  const Mat jac_u = model.du_dq(s.q);
  const Mat w = jac_u - jac_u.transpose();
  const Vec coupling = b.beta_inv * s.pbar;

  FieldEval f;
  f.d_qbar = b.beta_inv.transpose() * disp;
  f.d_q = velocity;
  const Vec d_kinetic = -(w * velocity + model.grad_potential(s.q) + coupling);
  f.d_p = d_kinetic + jac_u * velocity;

  // First line: [alpha'_ik + disp_j beta_inv_jl beta'_ilk] (beta_inv pbar)_i
  // Second line: -disp_i (1-P)_ij beta'_jlk (B pbar)_l, zero on the primary surface.
  const Vec qbar_rate = f.d_qbar;
  const Vec gram_pbar = b.gram_inv * s.pbar;
  const Vec off_surface = b.complement() * disp;
  const auto dim_qbar = static_cast<Eigen::Index>(b.dbeta.size());
  f.d_pbar.resize(dim_qbar);
  for (Eigen::Index k = 0; k < dim_qbar; ++k) {
    const Mat& dbk = b.dbeta[static_cast<std::size_t>(k)];
    const Vec lead = b.dalpha.col(k) + dbk * qbar_rate;
    f.d_pbar[k] = lead.dot(coupling) - off_surface.dot(dbk * gram_pbar);
  }
  return f;
}

WorkhorseRate workhorse_field(const WorkhorseModel& model, const Vec& q, const Vec& p) {
  require_size(q, model.dim(), "q");
  require_size(p, model.dim(), "p");
  const Vec velocity = (p - model.u(q)) / model.mass();
  const Mat jac_u = model.du_dq(q);
  const Mat w = jac_u - jac_u.transpose();
  WorkhorseRate r;
  r.dq = velocity;
  r.dp = -(w * velocity + model.grad_potential(q)) + jac_u * velocity;
  return r;
}

PbarIdentification pbar_identify(const WorkhorseModel& model, const CompositionRule& rule,
                                 const Vec& qbar, const Vec& q, const Vec& qdot, const Vec& qddot) {
  require_size(q, model.dim(), "q");
  require_size(qdot, model.dim(), "qdot");
  require_size(qddot, model.dim(), "qddot");
  const ProjectionBundle b = bundle_at(rule, qbar);
  const Vec rhs = -(model.mass() * qddot + omega(model, q) * qdot + model.grad_potential(q));
  PbarIdentification id;
  id.pbar = b.beta.transpose() * rhs;
  id.out_of_range = (rhs - b.beta_inv * id.pbar).norm();
  return id;
}

PhaseField canonical_system(const WorkhorseModel& model, const CompositionRule& rule) {
  return [model, rule](const PhaseState& s) { return canonical_field(model, rule, s); };
}

}  // namespace compham
