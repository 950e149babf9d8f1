#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "kimura/polynomial.hpp"
#include "kimura/types.hpp"

namespace kimura {

// A scalar coefficient of the operator, evaluable together with its first and
// second derivatives.  Polynomial coefficients differentiate analytically;
// generic evaluators fall back to central finite differences with step
// fd_step.
class CoefficientField {
 public:
  using Evaluator = std::function<double(const Point&)>;

  CoefficientField() = default;

  static CoefficientField constant(double c) {
    CoefficientField f;
    f.value_ = c;
    f.kind_ = Kind::Constant;
    return f;
  }

  static CoefficientField polynomial(Polynomial p) {
    CoefficientField f;
    f.poly_ = std::move(p);
    f.kind_ = Kind::Poly;
    return f;
  }

  static CoefficientField function(Evaluator e, double fd_step = 1e-5) {
    CoefficientField f;
    f.fn_ = std::move(e);
    f.fd_step_ = fd_step;
    f.kind_ = Kind::Fn;
    return f;
  }

  double operator()(const Point& z) const {
    switch (kind_) {
      case Kind::Constant: return value_;
      case Kind::Poly: return poly_.eval(z);
      default: return fn_(z);
    }
  }

  double d(const Point& z, int var) const {
    switch (kind_) {
      case Kind::Constant: return 0.0;
      case Kind::Poly: return poly_.derivative(var).eval(z);
      default: {
        Point zp = z, zm = z;
        zp[var] += fd_step_;
        zm[var] -= fd_step_;
        return (fn_(zp) - fn_(zm)) / (2.0 * fd_step_);
      }
    }
  }

  double d2(const Point& z, int v1, int v2) const {
    switch (kind_) {
      case Kind::Constant: return 0.0;
      case Kind::Poly: return poly_.derivative(v1).derivative(v2).eval(z);
      default: {
        if (v1 == v2) {
          Point zp = z, zm = z;
          zp[v1] += fd_step_;
          zm[v1] -= fd_step_;
          return (fn_(zp) - 2.0 * fn_(z) + fn_(zm)) / (fd_step_ * fd_step_);
        }
        Point a = z, b = z, c = z, d = z;
        a[v1] += fd_step_; a[v2] += fd_step_;
        b[v1] += fd_step_; b[v2] -= fd_step_;
        c[v1] -= fd_step_; c[v2] += fd_step_;
        d[v1] -= fd_step_; d[v2] -= fd_step_;
        return (fn_(a) - fn_(b) - fn_(c) + fn_(d)) / (4.0 * fd_step_ * fd_step_);
      }
    }
  }

  bool is_constant() const { return kind_ == Kind::Constant; }
  bool is_polynomial() const { return kind_ == Kind::Poly; }
  const Polynomial& poly() const { return poly_; }

 private:
  enum class Kind { Constant, Poly, Fn };
  Kind kind_ = Kind::Constant;
  double value_ = 0.0;
  Polynomial poly_;
  Evaluator fn_;
  double fd_step_ = 1e-5;
};

}  // namespace kimura
