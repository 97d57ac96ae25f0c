#pragma once

#include "compham/model.hpp"
#include "compham/types.hpp"

namespace compham {

/// Composition-rule algebra evaluated once at a point qbar.
///
/// gram_inv = (beta^T beta)^-1, beta_inv = beta gram_inv (the left-inverse
/// with beta_inv^T beta = 1_K) and projector = beta_inv beta^T, the
/// orthogonal projector onto the column space of beta.
struct ProjectionBundle {
  Vec qbar;
  Vec alpha;
  Mat dalpha;
  Mat beta;
  Tensor3 dbeta;
  Mat gram_inv;
  Mat beta_inv;
  Mat projector;

  Eigen::Index dim_q() const { return beta.rows(); }
  Eigen::Index dim_qbar() const { return beta.cols(); }
  /// 1 - P
  Mat complement() const { return Mat::Identity(dim_q(), dim_q()) - projector; }
};

/// Throws RankDeficient when the Gram matrix spectrum ratio is at or below
/// kRankTolerance.
ProjectionBundle bundle_at(const CompositionRule& rule, const Vec& qbar);

/// (q - alpha) . beta_inv, i.e. the qbar velocity encoded by q.
Vec qbar_dot(const ProjectionBundle& bundle, const Vec& q);

/// dP/dqbar_k for each k, assembled from beta_inv, P and dbeta.
Tensor3 projector_derivative(const ProjectionBundle& bundle);
Tensor3 projector_derivative(const CompositionRule& rule, const Vec& qbar);

}  // namespace compham
