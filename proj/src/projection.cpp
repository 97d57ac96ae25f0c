#include "compham/projection.hpp"

#include <Eigen/Cholesky>

namespace compham {

ProjectionBundle bundle_at(const CompositionRule& rule, const Vec& qbar) {
  require_finite(qbar, "qbar");
  ProjectionBundle b;
  b.qbar = qbar;
  b.alpha = rule.alpha(qbar);
  b.dalpha = rule.dalpha(qbar);
  b.beta = rule.beta(qbar);
  b.dbeta = rule.dbeta(qbar);
  if (b.beta.rows() != rule.dim_q() || b.beta.cols() != rule.dim_qbar()) {
    throw DimensionMismatch("beta(qbar) has the wrong shape");
  }

  double ratio = gram_eigen_ratio(b.beta);
  if (!(ratio > kRankTolerance)) throw RankDeficient(ratio, kRankTolerance);

  const Mat gram = b.beta.transpose() * b.beta;
  Eigen::LLT<Mat> llt(gram);
  if (llt.info() != Eigen::Success) throw RankDeficient(ratio, kRankTolerance);
  b.gram_inv = llt.solve(Mat::Identity(gram.rows(), gram.cols()));
  b.beta_inv = llt.solve(b.beta.transpose()).transpose();
  b.projector = b.beta_inv * b.beta.transpose();
  // Symmetrize away rounding so downstream identities see an exact symmetric P.
  b.projector = 0.5 * (b.projector + b.projector.transpose()).eval();
  return b;
}

Vec qbar_dot(const ProjectionBundle& bundle, const Vec& q) {
  require_size(q, bundle.dim_q(), "q");
  return bundle.beta_inv.transpose() * (q - bundle.alpha);
}

Tensor3 projector_derivative(const ProjectionBundle& bundle) {
  const Mat comp = bundle.complement();
  Tensor3 out;
  out.reserve(bundle.dbeta.size());
  for (const Mat& dbk : bundle.dbeta) {
    Mat a = bundle.beta_inv * dbk.transpose() * comp;
    out.push_back(a + a.transpose());
  }
  return out;
}

Tensor3 projector_derivative(const CompositionRule& rule, const Vec& qbar) {
  return projector_derivative(bundle_at(rule, qbar));
}

}  // namespace compham
