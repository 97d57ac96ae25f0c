#include "compham/model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace compham {

WorkhorseModel::WorkhorseModel(int dim, double mass, VectorMap u, MatrixMap du_dq,
                               ScalarMap potential, VectorMap grad_potential)
    : dim_(dim),
      mass_(mass),
      u_(std::move(u)),
      du_dq_(std::move(du_dq)),
      potential_(std::move(potential)),
      grad_potential_(std::move(grad_potential)) {
  if (dim_ <= 0) throw DimensionMismatch("workhorse dimension must be positive");
  if (!(mass_ > 0.0) || !std::isfinite(mass_)) throw std::invalid_argument("mass must be positive and finite");
  if (!u_ || !du_dq_ || !potential_ || !grad_potential_) {
    throw std::invalid_argument("workhorse model needs u, du_dq, V and dV_dq");
  }
}

Vec WorkhorseModel::u(const Vec& q) const {
  require_size(q, dim_, "q");
  return u_(q);
}

Mat WorkhorseModel::du_dq(const Vec& q) const {
  require_size(q, dim_, "q");
  return du_dq_(q);
}

double WorkhorseModel::potential(const Vec& q) const {
  require_size(q, dim_, "q");
  return potential_(q);
}

Vec WorkhorseModel::grad_potential(const Vec& q) const {
  require_size(q, dim_, "q");
  return grad_potential_(q);
}

WorkhorseModel harmonic_workhorse(double mass, std::vector<double> spring_constants) {
  const int n = static_cast<int>(spring_constants.size());
  Vec h = Eigen::Map<const Vec>(spring_constants.data(), n);
  return WorkhorseModel(
      n, mass, [n](const Vec&) { return Vec::Zero(n); },
      [n](const Vec&) { return Mat::Zero(n, n); },
      [h](const Vec& q) { return 0.5 * (h.array() * q.array().square()).sum(); },
      [h](const Vec& q) { return Vec(h.cwiseProduct(q)); });
}

CompositionRule::CompositionRule(int dim_q, int dim_qbar, VectorMap alpha, MatrixMap beta,
                                 MatrixMap dalpha, TensorMap dbeta,
                                 std::optional<double> lambda_hint)
    : dim_q_(dim_q),
      dim_qbar_(dim_qbar),
      alpha_(std::move(alpha)),
      beta_(std::move(beta)),
      dalpha_(std::move(dalpha)),
      dbeta_(std::move(dbeta)),
      lambda_hint_(lambda_hint) {
  if (dim_q_ <= 0 || dim_qbar_ <= 0) throw DimensionMismatch("composition dimensions must be positive");
  if (dim_qbar_ > dim_q_) {
    throw DimensionMismatch("composition rule needs K <= I, got K=" + std::to_string(dim_qbar_) +
                            " I=" + std::to_string(dim_q_));
  }
  if (!alpha_ || !beta_ || !dalpha_ || !dbeta_) {
    throw std::invalid_argument("composition rule needs alpha, beta and their derivatives");
  }
}

Vec CompositionRule::alpha(const Vec& qbar) const {
  require_size(qbar, dim_qbar_, "qbar");
  return alpha_(qbar);
}

Mat CompositionRule::beta(const Vec& qbar) const {
  require_size(qbar, dim_qbar_, "qbar");
  return beta_(qbar);
}

Mat CompositionRule::dalpha(const Vec& qbar) const {
  require_size(qbar, dim_qbar_, "qbar");
  return dalpha_(qbar);
}

Tensor3 CompositionRule::dbeta(const Vec& qbar) const {
  require_size(qbar, dim_qbar_, "qbar");
  return dbeta_(qbar);
}

CompositionRule affine_rule(Mat alpha_matrix, Vec alpha_offset, Mat beta,
                            std::optional<double> lambda_hint) {
  const auto dim_q = static_cast<int>(beta.rows());
  const auto dim_qbar = static_cast<int>(beta.cols());
  if (alpha_matrix.rows() != dim_q || alpha_matrix.cols() != dim_qbar || alpha_offset.size() != dim_q) {
    throw DimensionMismatch("affine rule: alpha matrix/offset shape does not match beta");
  }
  return CompositionRule(
      dim_q, dim_qbar,
      [A = alpha_matrix, a = alpha_offset](const Vec& qbar) { return Vec(A * qbar + a); },
      [beta](const Vec&) { return beta; },
      [A = alpha_matrix](const Vec&) { return A; },
      [dim_q, dim_qbar](const Vec&) {
        return Tensor3(static_cast<std::size_t>(dim_qbar), Mat::Zero(dim_q, dim_qbar));
      },
      lambda_hint);
}

CompositionRule polynomial_rule(Mat alpha_matrix, Vec alpha_offset, PolynomialMatrix beta) {
  const int dim_q = beta.rows;
  const int dim_qbar = beta.cols;
  if (alpha_matrix.rows() != dim_q || alpha_matrix.cols() != dim_qbar || alpha_offset.size() != dim_q) {
    throw DimensionMismatch("polynomial rule: alpha matrix/offset shape does not match beta");
  }
  for (const auto& p : beta.entries) {
    if (p.num_vars() != dim_qbar) throw DimensionMismatch("polynomial rule: entry variable count must equal K");
  }
  return CompositionRule(
      dim_q, dim_qbar,
      [A = alpha_matrix, a = alpha_offset](const Vec& qbar) { return Vec(A * qbar + a); },
      [beta](const Vec& qbar) { return beta.evaluate(qbar); },
      [A = alpha_matrix](const Vec&) { return A; },
      [beta](const Vec& qbar) { return beta.derivative(qbar); });
}

double workhorse_lagrangian(const WorkhorseModel& model, const Vec& q, const Vec& qdot) {
  require_size(q, model.dim(), "q");
  require_size(qdot, model.dim(), "qdot");
  require_finite(q, "q");
  require_finite(qdot, "qdot");
  return 0.5 * model.mass() * qdot.squaredNorm() + qdot.dot(model.u(q)) - model.potential(q);
}

Vec compose(const CompositionRule& rule, const Vec& qbar, const Vec& qbardot) {
  require_size(qbardot, rule.dim_qbar(), "qbardot");
  return rule.alpha(qbar) + rule.beta(qbar) * qbardot;
}

Vec contract_dbeta(const Tensor3& dbeta, const Vec& v) {
  if (dbeta.size() != static_cast<std::size_t>(v.size())) {
    throw DimensionMismatch("dbeta slice count does not match vector length");
  }
  Vec out = Vec::Zero(dbeta.empty() ? 0 : dbeta.front().rows());
  for (std::size_t l = 0; l < dbeta.size(); ++l) out += v[static_cast<Eigen::Index>(l)] * (dbeta[l] * v);
  return out;
}

Vec compose_rate(const CompositionRule& rule, const Vec& qbar, const Vec& qbardot,
                 const Vec& qbarddot) {
  require_size(qbardot, rule.dim_qbar(), "qbardot");
  require_size(qbarddot, rule.dim_qbar(), "qbarddot");
  return rule.dalpha(qbar) * qbardot + contract_dbeta(rule.dbeta(qbar), qbardot) +
         rule.beta(qbar) * qbarddot;
}

double composite_lagrangian(const WorkhorseModel& model, const CompositionRule& rule,
                            const Vec& qbar, const Vec& qbardot, const Vec& qbarddot) {
  if (model.dim() != rule.dim_q()) throw DimensionMismatch("model and rule disagree on I");
  return workhorse_lagrangian(model, compose(rule, qbar, qbardot),
                              compose_rate(rule, qbar, qbardot, qbarddot));
}

Mat omega(const WorkhorseModel& model, const Vec& q) {
  Mat j = model.du_dq(q);
  return j - j.transpose();
}

double gram_eigen_ratio(const Mat& beta) {
  Eigen::SelfAdjointEigenSolver<Mat> es(beta.transpose() * beta, Eigen::EigenvaluesOnly);
  const Vec& ev = es.eigenvalues();
  double top = ev.maxCoeff();
  if (!(top > 0.0)) return 0.0;
  return std::max(0.0, ev.minCoeff()) / top;
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const ValidationCheck* ValidationReport::find(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

ValidationSamples random_samples(const WorkhorseModel& model, const CompositionRule& rule,
                                 int count, unsigned seed, double half_width) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-half_width, half_width);
  auto draw = [&](int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(gen);
    return v;
  };
  ValidationSamples s;
  for (int n = 0; n < count; ++n) {
    s.qbar.push_back(draw(rule.dim_qbar()));
    s.q.push_back(draw(model.dim()));
  }
  return s;
}

namespace {

constexpr double kFdStep = 1e-6;
constexpr double kFdTolerance = 1e-5;

// Central difference of a matrix-valued map along coordinate d.
template <class F>
Mat central_diff(const F& f, const Vec& x, Eigen::Index d) {
  Vec xp = x, xm = x;
  xp[d] += kFdStep;
  xm[d] -= kFdStep;
  return (Mat(f(xp)) - Mat(f(xm))) / (2.0 * kFdStep);
}

double relative_gap(const Mat& analytic, const Mat& numeric) {
  double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
  return (analytic - numeric).cwiseAbs().maxCoeff() / scale;
}

void record(ValidationCheck& c, double err) {
  if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
  c.worst = std::max(c.worst, err);
  c.passed = c.worst <= c.tolerance;
}

}  // namespace

ValidationReport validate(const WorkhorseModel& model, const CompositionRule& rule,
                          const ValidationSamples& samples) {
  if (model.dim() != rule.dim_q()) {
    throw DimensionMismatch("model has I=" + std::to_string(model.dim()) + " but rule has I=" +
                            std::to_string(rule.dim_q()));
  }
  ValidationCheck du{"du_dq", true, 0.0, kFdTolerance, {}};
  ValidationCheck dv{"dV_dq", true, 0.0, kFdTolerance, {}};
  ValidationCheck da{"dalpha", true, 0.0, kFdTolerance, {}};
  ValidationCheck db{"dbeta", true, 0.0, kFdTolerance, {}};
  ValidationCheck rank{"rank", true, std::numeric_limits<double>::infinity(), kRankTolerance, {}};

  for (const Vec& q : samples.q) {
    require_finite(q, "sample q");
    Mat jac = model.du_dq(q);
    Vec grad = model.grad_potential(q);
    for (Eigen::Index d = 0; d < q.size(); ++d) {
      Mat col = central_diff([&](const Vec& x) { return model.u(x); }, q, d);
      record(du, relative_gap(jac.col(d), col));
      Vec xp = q, xm = q;
      xp[d] += kFdStep;
      xm[d] -= kFdStep;
      double g = (model.potential(xp) - model.potential(xm)) / (2.0 * kFdStep);
      record(dv, std::abs(grad[d] - g) / std::max(1.0, grad.cwiseAbs().maxCoeff()));
    }
  }

  for (const Vec& qbar : samples.qbar) {
    require_finite(qbar, "sample qbar");
    Mat dalpha = rule.dalpha(qbar);
    Tensor3 dbeta = rule.dbeta(qbar);
    if (dbeta.size() != static_cast<std::size_t>(rule.dim_qbar())) {
      db.passed = false;
      db.worst = std::numeric_limits<double>::infinity();
      db.detail = "dbeta must have K slices";
      continue;
    }
    for (Eigen::Index k = 0; k < qbar.size(); ++k) {
      Mat acol = central_diff([&](const Vec& x) { return rule.alpha(x); }, qbar, k);
      record(da, relative_gap(dalpha.col(k), acol));
      Mat bslice = central_diff([&](const Vec& x) { return rule.beta(x); }, qbar, k);
      record(db, relative_gap(dbeta[static_cast<std::size_t>(k)], bslice));
    }
    double ratio = gram_eigen_ratio(rule.beta(qbar));
    rank.worst = std::min(rank.worst, ratio);
    if (!(ratio > kRankTolerance)) {
      rank.passed = false;
      rank.detail = "beta^T beta is singular to tolerance at one or more samples";
    }
  }
  if (samples.qbar.empty()) rank.worst = 1.0;

  ValidationReport report;
  report.checks = {du, dv, da, db, rank};
  return report;
}

}  // namespace compham
