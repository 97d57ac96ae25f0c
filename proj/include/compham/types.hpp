#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace compham {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Rank-3 array stored as one I x K matrix per derivative direction.
/// Slice k holds the partial derivative with respect to qbar_k, so for
/// dbeta, slices[k](i, l) = d beta_il / d qbar_k.
using Tensor3 = std::vector<Mat>;

/// Relative threshold on the Gram matrix spectrum: smallest eigenvalue of
/// beta^T beta must exceed this times the largest.
inline constexpr double kRankTolerance = 1e-10;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonFiniteInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class RankDeficient : public std::runtime_error {
 public:
  RankDeficient(double ratio, double tolerance)
      : std::runtime_error("composition rule is rank deficient: eigenvalue ratio " +
                           std::to_string(ratio) + " of beta^T beta is below " +
                           std::to_string(tolerance)),
        ratio_(ratio) {}

  double ratio() const noexcept { return ratio_; }

 private:
  double ratio_;
};

inline void require_size(const Vec& v, Eigen::Index n, const char* what) {
  if (v.size() != n) {
    throw DimensionMismatch(std::string(what) + ": expected length " + std::to_string(n) +
                            ", got " + std::to_string(v.size()));
  }
}

inline void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) {
    throw NonFiniteInput(std::string(what) + " contains non-finite entries");
  }
}

}  // namespace compham
