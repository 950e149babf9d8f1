#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "kimura/types.hpp"

namespace kimura {

// Sparse multivariate polynomial with double coefficients, used for the
// symbolic oracles (conjugation residual, commutator identity, eigenfunction
// checks).  Exponent vectors all share the same length nvars.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}

  static Polynomial constant(int nvars, double c) {
    Polynomial p(nvars);
    if (c != 0.0) p.terms_[std::vector<int>(nvars, 0)] = c;
    return p;
  }

  // The monomial x_var.
  static Polynomial variable(int nvars, int var) {
    Polynomial p(nvars);
    std::vector<int> e(nvars, 0);
    e[var] = 1;
    p.terms_[e] = 1.0;
    return p;
  }

  static Polynomial monomial(int nvars, const std::vector<int>& powers,
                             double coef) {
    Polynomial p(nvars);
    if (coef != 0.0) p.terms_[powers] = coef;
    return p;
  }

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }

  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        std::vector<int> e(a.nvars_);
        for (int k = 0; k < a.nvars_; ++k) e[k] = ea[k] + eb[k];
        r.add_term(e, ca * cb);
      }
    return r;
  }
  friend Polynomial operator*(double s, Polynomial p) {
    for (auto& [e, c] : p.terms_) c *= s;
    if (s == 0.0) p.terms_.clear();
    return p;
  }

  Polynomial derivative(int var) const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      std::vector<int> d = e;
      d[var] -= 1;
      r.add_term(d, c * e[var]);
    }
    return r;
  }

  double eval(const Point& z) const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) {
      double t = c;
      for (int k = 0; k < nvars_; ++k)
        for (int p = 0; p < e[k]; ++p) t *= z[k];
      s += t;
    }
    return s;
  }

  bool divisible_by_var(int var) const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [&](const auto& t) { return t.first[var] >= 1; });
  }

  // Exact division by x_var; throws unless every monomial carries the factor.
  Polynomial divide_by_var(int var) const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e[var] < 1)
        throw ContractError("polynomial not divisible by requested variable");
      std::vector<int> d = e;
      d[var] -= 1;
      r.add_term(d, c);
    }
    return r;
  }

  int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
      int s = 0;
      for (int k : e) s += k;
      d = std::max(d, s);
    }
    return d;
  }

  const std::map<std::vector<int>, double>& terms() const { return terms_; }

 private:
  void add_term(const std::vector<int>& e, double c) {
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      if (c != 0.0) terms_[e] = c;
    } else {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  int nvars_ = 0;
  std::map<std::vector<int>, double> terms_;
};

}  // namespace kimura
