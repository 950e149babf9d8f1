#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "kimura/geometry.hpp"
#include "kimura/operator.hpp"
#include "kimura/types.hpp"

namespace kimura {

// Density of d mu_a on the open box:
//   prod_i x_i^{b_i(z) + a_i - 1}
// The multi-index a = 0 gives d mu itself, with the singular x_i^{-1} factor
// on the zero-weight block.
struct WeightedMeasure {
  const KimuraOperator* op = nullptr;
  std::vector<int> a;  // size n

  static WeightedMeasure mu(const KimuraOperator& op) {
    return WeightedMeasure{&op, std::vector<int>(op.n, 0)};
  }
  static WeightedMeasure mu_a(const KimuraOperator& op, std::vector<int> a) {
    if (static_cast<int>(a.size()) != op.n)
      throw ContractError("WeightedMeasure: multi-index length mismatch");
    return WeightedMeasure{&op, std::move(a)};
  }

  double exponent(const Point& z, int i) const {
    return op->b[i](z) + a[i] - 1.0;
  }

  double density(const Point& z) const {
    double w = 1.0;
    for (int i = 0; i < op->n; ++i) w *= std::pow(z[i], exponent(z, i));
    return w;
  }
};

// Tangent weight w^T = prod_{i<n0} x_i^{-1}; +inf at the tangent boundary.
inline double weight_wT(const KimuraOperator& op, const Point& z) {
  double w = 1.0;
  for (int i = 0; i < op.n0; ++i) {
    if (z[i] <= 0.0) return std::numeric_limits<double>::infinity();
    w /= z[i];
  }
  return w;
}

// Transverse weight w^pitch = prod_{j>n0} x_j^{b_j(z)-1}.
inline double weight_wPitch(const KimuraOperator& op, const Point& z) {
  double w = 1.0;
  for (int j = op.n0; j < op.n; ++j) w *= std::pow(z[j], op.b[j](z) - 1.0);
  return w;
}

struct QuadratureSpec {
  int layers = 40;           // geometric boundary layers per x-axis
  double grading_ratio = 0.5;
  int nodes_per_layer = 8;   // Gauss-Legendre nodes per layer
  int y_panels = 16;         // uniform panels per y-axis
  int eps_steps = 12;        // epsilon-sequence length for the singular block
  double eps_start = 1e-2;
  double eps_ratio = 0.25;   // three decades by default
  std::string hash() const;
};

enum class IntegralStatus { Convergent, Divergent };

struct IntegralResult {
  IntegralStatus status = IntegralStatus::Convergent;
  double value = 0.0;       // extrapolated value when convergent
  double log_slope = 0.0;   // slope vs ln(1/eps) when divergent
  bool slope_stable = false;
  int bad_axis = -1;        // axis whose exponent made the integral malformed
  std::string spec_hash;
  std::vector<double> partials;  // partial integrals over the eps-sequence
};

// Integrates f against the measure over the box.  Axes with exponent > -1 use
// graded product quadrature; the critical exponent -1 on the zero-weight block
// is probed through a decreasing epsilon-sequence with a log-slope divergence
// test.  Exponent <= -1 on a non-tangent axis throws.
IntegralResult integrate(const std::function<double(const Point&)>& f,
                         const WeightedMeasure& measure, const CornerBox& region,
                         const QuadratureSpec& spec = {});

struct EnvelopeResult {
  bool divergent = false;
  int bad_axis = -1;
  double value = 0.0;
};

// Supremum-envelope factor: the rectangle integral
//   ( int_{R_{r0}(z)} prod_{i<n0} xi^{-q/p} prod_{j>=n0} xi^{-(b_j+d_jl) q/p} dxi dy )^{1/q}
// with 1/p + 1/q = 1.  variant_l < 0 selects the base envelope; otherwise the
// exponent of axis variant_l is shifted by one.
EnvelopeResult sup_envelope(const KimuraOperator& op, const Point& z, double r0,
                            double p, int variant_l = -1,
                            const QuadratureSpec& spec = {});

}  // namespace kimura
