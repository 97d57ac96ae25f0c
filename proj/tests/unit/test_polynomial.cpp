#include "compham/polynomial.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace compham;
using namespace compham::testing;

TEST_CASE("parse and evaluate") {
  const auto p = Polynomial::parse("1 - 0.5*qb1^2*qb2 + 3*qb2", 2);
  REQUIRE(p.terms().size() == 3);
  const Vec x = (Vec(2) << 2.0, -1.0).finished();
  CHECK(p(x) == doctest::Approx(1.0 + 2.0 - 3.0));

  const Vec g = p.gradient(x);
  CHECK(g[0] == doctest::Approx(-0.5 * 2 * 2.0 * -1.0));
  CHECK(g[1] == doctest::Approx(-0.5 * 4.0 + 3.0));

  CHECK(Polynomial::parse("qb1*qb1", 1)(Vec::Constant(1, 3.0)) == doctest::Approx(9.0));
  CHECK(Polynomial::parse("-2.5e-1", 3)(Vec::Zero(3)) == doctest::Approx(-0.25));
  CHECK(Polynomial::constant(2, 4.0)(Vec::Ones(2)) == 4.0);
}

TEST_CASE("malformed text is rejected") {
  for (const char* bad : {"", "1 +", "qb0", "qb3", "2**qb1", "qb1^-1", "inf", "1 $ 2", "x1"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(Polynomial::parse(bad, 2), std::invalid_argument);
  }
}

TEST_CASE("to_string round trips exactly") {
  Rng rng(5);
  for (int n = 0; n < 200; ++n) {
    const int vars = rng.integer(1, 3);
    std::vector<Monomial> terms;
    const int count = rng.integer(1, 5);
    for (int t = 0; t < count; ++t) {
      std::vector<int> pw(static_cast<std::size_t>(vars));
      for (auto& e : pw) e = rng.integer(0, 3);
      terms.push_back({rng.normal() * std::pow(10.0, rng.integer(-8, 8)), pw});
    }
    const Polynomial p(vars, terms);
    const auto back = Polynomial::parse(p.to_string(), vars);
    CHECK(back == p);
  }
}

TEST_CASE("gradient and matrix derivative match central differences") {
  Rng rng(11);
  const auto pm = random_beta_polynomials(4, 3, rng);
  for (int n = 0; n < 20; ++n) {
    const Vec x = rng.vec(3);
    const Tensor3 an = pm.derivative(x);
    const Tensor3 fd = fd_matrix_derivative([&](const Vec& s) { return pm.evaluate(s); }, x);
    REQUIRE(an.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) CHECK(rel_err(an[k], fd[k]) <= 1e-7);
    for (const auto& e : pm.entries) {
      CHECK(rel_err(e.gradient(x), fd_gradient([&](const Vec& s) { return e(s); }, x)) <= 1e-7);
    }
  }
}

TEST_CASE("dimension checks") {
  CHECK_THROWS_AS(Polynomial(2, {Monomial{1.0, {1}}}), DimensionMismatch);
  CHECK_THROWS_AS(Polynomial::parse("qb1", 2)(Vec::Zero(3)), DimensionMismatch);
}
