#pragma once

#include <map>
#include <string>
#include <vector>

#include "kimura/geometry.hpp"
#include "kimura/grid.hpp"
#include "kimura/oracles.hpp"
#include "kimura/solver.hpp"

namespace kimura {

enum class Verdict { Pass, Fail, Vacuous };

struct EstimateReport {
  std::string tag;
  std::map<std::string, double> constants;
  std::vector<double> series;  // refinement series of the headline constant
  double tolerance = 0.2;
  Verdict verdict = Verdict::Fail;
  std::string config_hash;
};

// Relative spread of a refinement series within tol, with monotone blow-up
// forcing failure.
bool refinement_stable(const std::vector<double>& series, double tol);

struct SlopeFit {
  double slope = 0.0;
  bool degenerate = false;  // field vanished on the window
};

// Least-squares slope of log|u| vs log s where every axis in `axes` is set to
// s in [lo, hi] (log-spaced samples) and the remaining coordinates come from
// `base`; snapshot nearest to t_probe.
SlopeFit vanishing_exponent(const Trajectory& traj, const KimuraOperator& op,
                            const std::vector<int>& axes, double t_probe,
                            double lo, double hi, const Point& base,
                            int samples = 24);

struct DerivativeBound {
  double sup_scaled = 0.0;  // sup over inner interior nodes of |D u| / weight
  Point witness;
};

// Theorem-shaped derivative bound: weight is prod_{i<n0, i!=k} x_i for a
// tangent index k, prod_{i<n0} x_i otherwise; sup over the inner sub-box.
DerivativeBound derivative_bound_check(const Trajectory& traj,
                                       const KimuraOperator& op, int k,
                                       double t_probe);

struct CylinderRatio {
  double ratio = 0.0;
  bool vacuous = false;  // 0/0 convention
};

// sup_{Q_r} wT u over the anchored value wT(A_r) u(t + r^2, A_r).
CylinderRatio carleson_constant(const Trajectory& traj, const KimuraOperator& op,
                                const ParabolicCylinder& cyl);

// anchored value wT(A_r) u(t - 2r^2, A_r) over inf_{Q_r} wT u.
CylinderRatio hopf_oleinik_constant(const Trajectory& traj,
                                    const KimuraOperator& op,
                                    const ParabolicCylinder& cyl);

struct QuotientBounds {
  double sup_form = 0.0;    // sup v / v(anchor), v = u1/u2
  double inf_form = 0.0;    // inf v / v(anchor)
  double global_ratio = 0.0;  // sup v / inf v
  bool vacuous = false;
};

QuotientBounds quotient_bounds(const Trajectory& traj1, const Trajectory& traj2,
                               const KimuraOperator& op,
                               const ParabolicCylinder& cyl);

struct HolderScan {
  double alpha = 0.0;      // largest passing scan value, 0 when none
  double alpha_hat = 0.0;  // regression estimate from shell oscillations
  int shells = 0;
  bool insufficient = false;
  bool pass = false;
};

// Oscillation of v = u1/u2 over dyadic shells of the parabolic intrinsic
// distance; a scan value alpha passes when it does not exceed the fitted
// decay rate by more than 25%.
HolderScan holder_quotient_alpha(const Trajectory& traj1,
                                 const Trajectory& traj2,
                                 const KimuraOperator& op,
                                 const ParabolicCylinder& cyl);

// sup/inf of wT u over the spatial slab (t - r^2, t) x interior box.
CylinderRatio elliptic_harnack(const Trajectory& traj, const KimuraOperator& op,
                               double t, double r);

struct SobolevCheck {
  double lhs = 0.0;      // sup_{s >= t} || D^a D^b u(s) ||^2_{L2(ball, dmu_a)}
  double rhs = 0.0;      // ||f||^2 + time integral of ||u||^2, full box
  double fitted_c = 0.0;
  bool divergent = false;
};

SobolevCheck sobolev_sup_check(const Trajectory& traj, const KimuraOperator& op,
                               const std::vector<int>& a,
                               const std::vector<int>& b, double t, double r,
                               const Field& f);

}  // namespace kimura
