#include "compham/polynomial.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace compham {

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

class TermScanner {
 public:
  TermScanner(std::string_view text, int num_vars) : text_(text), num_vars_(num_vars) {}

  std::vector<Monomial> run() {
    std::vector<Monomial> terms;
    skip_space();
    if (done()) fail("empty polynomial");
    double sign = 1.0;
    if (peek() == '+' || peek() == '-') {
      sign = take() == '-' ? -1.0 : 1.0;
    }
    terms.push_back(term(sign));
    while (true) {
      skip_space();
      if (done()) break;
      char op = take();
      if (op != '+' && op != '-') fail(std::string("unexpected '") + op + "'");
      terms.push_back(term(op == '-' ? -1.0 : 1.0));
    }
    return terms;
  }

 private:
  Monomial term(double sign) {
    Monomial m{sign, std::vector<int>(static_cast<std::size_t>(num_vars_), 0)};
    bool first = true;
    while (true) {
      skip_space();
      if (!first) {
        if (done() || peek() != '*') break;
        take();
        skip_space();
      }
      first = false;
      if (done()) fail("dangling operator");
      if (peek() == 'q') {
        variable(m);
      } else {
        m.coeff *= number();
      }
    }
    return m;
  }

  void variable(Monomial& m) {
    if (text_.substr(pos_, 2) != "qb") fail("expected variable qbN");
    pos_ += 2;
    int index = integer();
    if (index < 1 || index > num_vars_) fail("variable index out of range: qb" + std::to_string(index));
    int power = 1;
    skip_space();
    if (!done() && peek() == '^') {
      take();
      skip_space();
      power = integer();
    }
    m.powers[static_cast<std::size_t>(index - 1)] += power;
  }

  double number() {
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    // strtod handles exponents and inf/nan spellings we want to reject afterwards.
    std::string buf(begin, end);
    char* stop = nullptr;
    double v = std::strtod(buf.c_str(), &stop);
    auto used = static_cast<std::size_t>(stop - buf.c_str());
    if (used == 0) fail("expected number");
    if (!std::isfinite(v)) fail("non-finite coefficient");
    pos_ += used;
    return v;
  }

  int integer() {
    int v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (ec != std::errc{}) fail("expected integer");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    if (v < 0) fail("negative exponent");
    return v;
  }

  void skip_space() {
    while (!done() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char take() { return text_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("polynomial '" + std::string(text_) + "' at offset " +
                                std::to_string(pos_) + ": " + msg);
  }

  std::string_view text_;
  int num_vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial::Polynomial(int num_vars, std::vector<Monomial> terms)
    : num_vars_(num_vars), terms_(std::move(terms)) {
  for (auto& t : terms_) {
    if (t.powers.size() != static_cast<std::size_t>(num_vars_)) {
      throw DimensionMismatch("monomial exponent count does not match variable count");
    }
  }
}

Polynomial Polynomial::constant(int num_vars, double value) {
  return Polynomial(num_vars, {Monomial{value, std::vector<int>(static_cast<std::size_t>(num_vars), 0)}});
}

Polynomial Polynomial::parse(std::string_view text, int num_vars) {
  return Polynomial(num_vars, TermScanner(text, num_vars).run());
}

double Polynomial::operator()(const Vec& x) const {
  require_size(x, num_vars_, "polynomial argument");
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (int j = 0; j < num_vars_; ++j) v *= ipow(x[j], t.powers[static_cast<std::size_t>(j)]);
    sum += v;
  }
  return sum;
}

Vec Polynomial::gradient(const Vec& x) const {
  require_size(x, num_vars_, "polynomial argument");
  Vec g = Vec::Zero(num_vars_);
  for (const auto& t : terms_) {
    for (int d = 0; d < num_vars_; ++d) {
      int pd = t.powers[static_cast<std::size_t>(d)];
      if (pd == 0) continue;
      double v = t.coeff * pd;
      for (int j = 0; j < num_vars_; ++j) {
        int e = t.powers[static_cast<std::size_t>(j)] - (j == d ? 1 : 0);
        v *= ipow(x[j], e);
      }
      g[d] += v;
    }
  }
  return g;
}

std::string Polynomial::to_string() const {
  std::string out;
  for (std::size_t n = 0; n < terms_.size(); ++n) {
    const auto& t = terms_[n];
    std::string term = format_double(t.coeff);
    if (n > 0) {
      // Keep the sign attached to the coefficient so parsing restores it exactly.
      out += " + ";
    }
    for (int j = 0; j < num_vars_; ++j) {
      int e = t.powers[static_cast<std::size_t>(j)];
      if (e == 0) continue;
      term += "*qb" + std::to_string(j + 1);
      if (e != 1) term += "^" + std::to_string(e);
    }
    out += term;
  }
  return out;
}

Mat PolynomialMatrix::evaluate(const Vec& x) const {
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) m(i, k) = at(i, k)(x);
  return m;
}

Tensor3 PolynomialMatrix::derivative(const Vec& x) const {
  auto nv = static_cast<int>(x.size());
  Tensor3 slices(static_cast<std::size_t>(nv), Mat::Zero(rows, cols));
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < cols; ++k) {
      Vec g = at(i, k).gradient(x);
      for (int d = 0; d < nv; ++d) slices[static_cast<std::size_t>(d)](i, k) = g[d];
    }
  }
  return slices;
}

}  // namespace compham
