#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kimura/coefficient.hpp"
#include "kimura/geometry.hpp"
#include "kimura/polynomial.hpp"
#include "kimura/types.hpp"

namespace kimura {

// Generalized Kimura operator in normal form (abar_ii == 1):
//
//   Lu = sum_i (x_i u_{x_i x_i} + b_i u_{x_i})
//      + sum_{i,j} x_i x_j a_ij u_{x_i x_j}
//      + sum_{l,k} d_lk u_{y_l y_k}
//      + sum_{i,l} x_i c_il u_{x_i y_l}
//      + sum_l e_l u_{y_l} + c0 u
//
// on a corner box.  The first n0 x-directions carry zero weight (b_i = 0 on
// the face {x_i = 0}); the remaining ones satisfy b_i >= beta0 > 0 there.
struct KimuraOperator {
  int n = 0;
  int m = 0;
  int n0 = 0;
  double beta0 = 0.0;
  double lambda = 0.0;
  CornerBox box;

  std::vector<CoefficientField> abar;                // n, normal form: == 1
  std::vector<std::vector<CoefficientField>> a;      // n x n, symmetric
  std::vector<CoefficientField> b;                   // n drifts (weights)
  std::vector<std::vector<CoefficientField>> c_mix;  // n x m
  std::vector<std::vector<CoefficientField>> d;      // m x m, symmetric
  std::vector<CoefficientField> e;                   // m tangential drifts
  CoefficientField c0;                               // zeroth order

  int dim() const { return n + m; }

  static KimuraOperator make(int n, int m, int n0, double beta0, double lambda,
                             CornerBox box);
};

// Derivative record of a function at a point, all coordinates mixed together
// (x-block first).
struct DerivativeBundle {
  double value = 0.0;
  Vector grad;   // n+m
  Matrix hess;   // (n+m) x (n+m)

  static DerivativeBundle of_polynomial(const Polynomial& u, const Point& z);
};

struct CheckResult {
  bool pass = true;
  double worst_violation = 0.0;
  std::optional<Point> witness;
};

struct ValidationReport {
  CheckResult normal_form;
  CheckResult cleanness;
  CheckResult ellipticity;
  CheckResult symmetry;
  bool all_pass() const {
    return normal_form.pass && cleanness.pass && ellipticity.pass &&
           symmetry.pass;
  }
};

// Certifies the structural invariants on a finite validation lattice over the
// operator's box.  Throws MalformedOperatorError on non-finite coefficient
// values.
ValidationReport validate(const KimuraOperator& op, int lattice_resolution = 33);

// Direct summation of the operator against supplied derivative values.
double apply_pointwise(const KimuraOperator& op, const DerivativeBundle& u,
                       const Point& z);

inline double apply_pointwise(const KimuraOperator& op, const Polynomial& u,
                              const Point& z) {
  return apply_pointwise(op, DerivativeBundle::of_polynomial(u, z), z);
}

// Doob h-transform: conjugation by w^T turning zero-weight directions into
// weight-2 directions.  Identity when n0 == 0.
KimuraOperator h_transform(const KimuraOperator& op);

// max over probes of |Ltilde(w^T u) - w^T Lu| for a polynomial u divisible by
// prod_{i<n0} x_i.
double conjugation_residual(const KimuraOperator& op, const Polynomial& u,
                            const std::vector<Point>& probe_points);

}  // namespace kimura
