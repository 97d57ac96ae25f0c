#pragma once

#include "compham/polynomial.hpp"
#include "compham/types.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace compham {

/// Second-order mechanical theory L = m/2 qdot.qdot + qdot.u(q) - V(q).
///
/// Derivatives are supplied analytically; they are checked against finite
/// differences by validate() but never replaced by them. V is assumed to be
/// bounded from below; that is the caller's obligation and is not checked.
class WorkhorseModel {
 public:
  using VectorMap = std::function<Vec(const Vec&)>;
  using MatrixMap = std::function<Mat(const Vec&)>;
  using ScalarMap = std::function<double(const Vec&)>;

  WorkhorseModel(int dim, double mass, VectorMap u, MatrixMap du_dq, ScalarMap potential,
                 VectorMap grad_potential);

  int dim() const noexcept { return dim_; }
  double mass() const noexcept { return mass_; }

  Vec u(const Vec& q) const;
  Mat du_dq(const Vec& q) const;
  double potential(const Vec& q) const;
  Vec grad_potential(const Vec& q) const;

 private:
  int dim_;
  double mass_;
  VectorMap u_;
  MatrixMap du_dq_;
  ScalarMap potential_;
  VectorMap grad_potential_;
};

/// Independent harmonic oscillators: u = 0, V = 1/2 sum h_i q_i^2.
WorkhorseModel harmonic_workhorse(double mass, std::vector<double> spring_constants);

/// q = alpha(qbar) + beta(qbar) qbardot with I = dim_q() >= K = dim_qbar().
class CompositionRule {
 public:
  using VectorMap = std::function<Vec(const Vec&)>;
  using MatrixMap = std::function<Mat(const Vec&)>;
  using TensorMap = std::function<Tensor3(const Vec&)>;

  /// Throws DimensionMismatch when K > I or either dimension is not positive.
  CompositionRule(int dim_q, int dim_qbar, VectorMap alpha, MatrixMap beta, MatrixMap dalpha,
                  TensorMap dbeta, std::optional<double> lambda_hint = std::nullopt);

  int dim_q() const noexcept { return dim_q_; }
  int dim_qbar() const noexcept { return dim_qbar_; }
  std::optional<double> lambda_hint() const noexcept { return lambda_hint_; }

  Vec alpha(const Vec& qbar) const;
  Mat beta(const Vec& qbar) const;
  Mat dalpha(const Vec& qbar) const;
  Tensor3 dbeta(const Vec& qbar) const;

 private:
  int dim_q_;
  int dim_qbar_;
  VectorMap alpha_;
  MatrixMap beta_;
  MatrixMap dalpha_;
  TensorMap dbeta_;
  std::optional<double> lambda_hint_;
};

/// alpha = A qbar + a, beta constant.
CompositionRule affine_rule(Mat alpha_matrix, Vec alpha_offset, Mat beta,
                            std::optional<double> lambda_hint = std::nullopt);

/// alpha = A qbar + a, beta entries polynomial in qbar.
CompositionRule polynomial_rule(Mat alpha_matrix, Vec alpha_offset, PolynomialMatrix beta);

double workhorse_lagrangian(const WorkhorseModel& model, const Vec& q, const Vec& qdot);

Vec compose(const CompositionRule& rule, const Vec& qbar, const Vec& qbardot);

/// Time derivative of compose() along a path: alpha' qbardot + beta':(qbardot x qbardot) + beta qbarddot.
Vec compose_rate(const CompositionRule& rule, const Vec& qbar, const Vec& qbardot,
                 const Vec& qbarddot);

/// Contraction sum_{k,l} dbeta[l](i,k) v_k v_l.
Vec contract_dbeta(const Tensor3& dbeta, const Vec& v);

double composite_lagrangian(const WorkhorseModel& model, const CompositionRule& rule,
                            const Vec& qbar, const Vec& qbardot, const Vec& qbarddot);

/// omega_ij = du_i/dq_j - du_j/dq_i.
Mat omega(const WorkhorseModel& model, const Vec& q);

/// lambda_min / lambda_max of beta^T beta (0 for a zero matrix).
double gram_eigen_ratio(const Mat& beta);

struct ValidationCheck {
  std::string name;
  bool passed = true;
  double worst = 0.0;      // worst relative error or, for rank, smallest eigenvalue ratio
  double tolerance = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool all_passed() const;
  const ValidationCheck* find(std::string_view name) const;
};

struct ValidationSamples {
  std::vector<Vec> qbar;  // points in R^K for the rule
  std::vector<Vec> q;     // points in R^I for the model
};

/// Uniform points in [-half_width, half_width]^n.
ValidationSamples random_samples(const WorkhorseModel& model, const CompositionRule& rule,
                                 int count, unsigned seed, double half_width = 1.0);

/// Central finite-difference checks (step 1e-6, tolerance 1e-5 relative) of
/// du_dq, dV_dq, dalpha, dbeta plus the Gram rank check at every qbar sample.
/// Failures are reported, not thrown; a dimension clash between model and rule
/// throws DimensionMismatch.
ValidationReport validate(const WorkhorseModel& model, const CompositionRule& rule,
                          const ValidationSamples& samples);

}  // namespace compham
