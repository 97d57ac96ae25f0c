#pragma once

#include "compham/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace compham {

struct Monomial {
  double coeff = 0.0;
  std::vector<int> powers;  // one exponent per variable

  bool operator==(const Monomial&) const = default;
};

/// Multivariate polynomial in qbar_1..qbar_n, kept as an ordered term list so
/// that text round trips reproduce the exact same representation.
///
/// Text form: terms joined by '+' or '-', each term a product of an optional
/// coefficient and factors `qbK` or `qbK^e`, e.g. `1 - 0.5*qb1^2*qb2`.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(int num_vars, std::vector<Monomial> terms);

  static Polynomial constant(int num_vars, double value);
  static Polynomial parse(std::string_view text, int num_vars);

  int num_vars() const noexcept { return num_vars_; }
  const std::vector<Monomial>& terms() const noexcept { return terms_; }

  double operator()(const Vec& x) const;
  Vec gradient(const Vec& x) const;

  std::string to_string() const;

  bool operator==(const Polynomial&) const = default;

 private:
  int num_vars_ = 0;
  std::vector<Monomial> terms_;
};

/// Row-major I x K grid of polynomials.
struct PolynomialMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Polynomial> entries;

  const Polynomial& at(int i, int k) const { return entries[static_cast<std::size_t>(i * cols + k)]; }

  Mat evaluate(const Vec& x) const;
  /// One rows x cols slice per variable.
  Tensor3 derivative(const Vec& x) const;

  bool operator==(const PolynomialMatrix&) const = default;
};

}  // namespace compham
