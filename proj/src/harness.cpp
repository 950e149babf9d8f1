#include "kimura/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kimura/cell_quadrature.hpp"
#include "kimura/measure.hpp"

namespace kimura {

namespace {

// least-squares slope of y against x
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int k = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < k; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

// snapshot indices whose times fall in (lo, hi); falls back to the nearest
// snapshot when the window misses every saved time
std::vector<size_t> snapshots_in(const Trajectory& traj, double lo, double hi) {
  std::vector<size_t> out;
  for (size_t s = 0; s < traj.times.size(); ++s)
    if (traj.times[s] > lo && traj.times[s] < hi) out.push_back(s);
  if (out.empty()) {
    const double mid = 0.5 * (lo + hi);
    size_t best = 0;
    for (size_t s = 1; s < traj.times.size(); ++s)
      if (std::abs(traj.times[s] - mid) < std::abs(traj.times[best] - mid))
        best = s;
    out.push_back(best);
  }
  return out;
}

double field_at(const Trajectory& traj, double t, const Point& z) {
  double actual = 0.0;
  const Vector& state = traj.at_time_nearest(t, &actual);
  Field f{traj.grid, state, actual};
  return f.interpolate(z);
}

bool interior_node(const KimuraOperator& op, const Point& z) {
  for (int i = 0; i < op.n; ++i)
    if (z[i] <= 0.0) return false;
  return true;
}

}  // namespace

bool refinement_stable(const std::vector<double>& series, double tol) {
  if (series.size() < 2) return false;
  double lo = series[0], hi = series[0];
  for (double v : series) {
    if (!std::isfinite(v)) return false;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // monotone blow-up across the series fails regardless of spread
  bool monotone_up = true;
  for (size_t k = 1; k < series.size(); ++k)
    if (series[k] <= series[k - 1]) monotone_up = false;
  const double scale = std::max(std::abs(hi), 1e-300);
  if (monotone_up && (hi - lo) / scale > tol) return false;
  return (hi - lo) / scale <= tol;
}

SlopeFit vanishing_exponent(const Trajectory& traj, const KimuraOperator& op,
                            const std::vector<int>& axes, double t_probe,
                            double lo, double hi, const Point& base,
                            int samples) {
  SlopeFit fit;
  std::vector<double> xs, ys;
  for (int k = 0; k < samples; ++k) {
    const double s = lo * std::pow(hi / lo, double(k) / (samples - 1));
    Point z = base;
    for (int ax : axes) z[ax] = s;
    const double u = field_at(traj, t_probe, z);
    if (std::abs(u) < 1e-300) continue;
    xs.push_back(std::log(s));
    ys.push_back(std::log(std::abs(u)));
  }
  if (xs.size() < 3) {
    fit.degenerate = true;
    return fit;
  }
  fit.slope = ls_slope(xs, ys);
  return fit;
}

DerivativeBound derivative_bound_check(const Trajectory& traj,
                                       const KimuraOperator& op, int k,
                                       double t_probe) {
  const TensorGrid& grid = *traj.grid;
  double actual = 0.0;
  const Vector& state = traj.at_time_nearest(t_probe, &actual);
  const Vector du = stencil_derivative(state, grid, k);

  DerivativeBound out;
  out.witness = Point::Zero(grid.dim());
  for (Index f = 0; f < grid.num_nodes(); ++f) {
    const Point z = grid.node(f);
    if (!interior_node(op, z)) continue;
    bool inner = true;  // measurements restricted to the inner half-box
    for (int i = 0; i < op.n; ++i)
      if (z[i] > 0.5 * op.box.x_extent[i]) inner = false;
    for (int l = 0; l < op.m; ++l)
      if (std::abs(z[op.n + l] - op.box.y_center[l]) > 0.5 * op.box.y_radius)
        inner = false;
    if (!inner) continue;
    double weight = 1.0;
    for (int i = 0; i < op.n0; ++i)
      if (i != k) weight *= z[i];
    const double scaled = std::abs(du[f]) / weight;
    if (scaled > out.sup_scaled) {
      out.sup_scaled = scaled;
      out.witness = z;
    }
  }
  return out;
}

namespace {

struct SupInf {
  double sup = -std::numeric_limits<double>::infinity();
  double inf = std::numeric_limits<double>::infinity();
  bool any = false;
};

// extremes of wT u over grid nodes in the cylinder across its snapshots
SupInf wT_extremes(const Trajectory& traj, const KimuraOperator& op,
                   const ParabolicCylinder& cyl) {
  const TensorGrid& grid = *traj.grid;
  SupInf e;
  for (size_t s : snapshots_in(traj, cyl.time_lo(), cyl.time_hi())) {
    const Vector& u = traj.states[s];
    for (Index f = 0; f < grid.num_nodes(); ++f) {
      const Point z = grid.node(f);
      if (!interior_node(op, z) || !cyl.contains_space(z)) continue;
      const double v = weight_wT(op, z) * u[f];
      e.sup = std::max(e.sup, v);
      e.inf = std::min(e.inf, v);
      e.any = true;
    }
  }
  return e;
}

}  // namespace

CylinderRatio carleson_constant(const Trajectory& traj, const KimuraOperator& op,
                                const ParabolicCylinder& cyl) {
  const SupInf e = wT_extremes(traj, op, cyl);
  const Point a = a_r_point(cyl.anchor, cyl.r, op.n);
  const double denom =
      weight_wT(op, a) * field_at(traj, cyl.t + cyl.r * cyl.r, a);
  CylinderRatio out;
  if (!e.any || (std::abs(denom) < 1e-300 && std::abs(e.sup) < 1e-300)) {
    out.vacuous = true;
    return out;
  }
  out.ratio = e.sup / denom;
  return out;
}

CylinderRatio hopf_oleinik_constant(const Trajectory& traj,
                                    const KimuraOperator& op,
                                    const ParabolicCylinder& cyl) {
  const SupInf e = wT_extremes(traj, op, cyl);
  const Point a = a_r_point(cyl.anchor, cyl.r, op.n);
  const double anchor =
      weight_wT(op, a) * field_at(traj, cyl.t - 2.0 * cyl.r * cyl.r, a);
  CylinderRatio out;
  if (!e.any || (std::abs(anchor) < 1e-300 && std::abs(e.inf) < 1e-300)) {
    out.vacuous = true;
    return out;
  }
  out.ratio = anchor / e.inf;
  return out;
}

QuotientBounds quotient_bounds(const Trajectory& traj1, const Trajectory& traj2,
                               const KimuraOperator& op,
                               const ParabolicCylinder& cyl) {
  const TensorGrid& grid = *traj1.grid;
  QuotientBounds out;
  double sup = -std::numeric_limits<double>::infinity();
  double inf = std::numeric_limits<double>::infinity();
  bool any = false;
  for (size_t s : snapshots_in(traj1, cyl.time_lo(), cyl.time_hi())) {
    const Vector& u1 = traj1.states[s];
    const Vector& u2 = traj2.at_time_nearest(traj1.times[s]);
    for (Index f = 0; f < grid.num_nodes(); ++f) {
      const Point z = grid.node(f);
      if (!interior_node(op, z) || !cyl.contains_space(z)) continue;
      if (u2[f] <= 0.0)
        throw ContractError("quotient_bounds: denominator not positive");
      sup = std::max(sup, u1[f] / u2[f]);
      inf = std::min(inf, u1[f] / u2[f]);
      any = true;
    }
  }
  if (!any) {
    out.vacuous = true;
    return out;
  }
  const Point a = a_r_point(cyl.anchor, cyl.r, op.n);
  const double v1 = field_at(traj1, cyl.t, a);
  const double v2 = field_at(traj2, cyl.t, a);
  if (v2 <= 0.0)
    throw ContractError("quotient_bounds: anchor denominator not positive");
  const double va = v1 / v2;
  out.sup_form = sup / va;
  out.inf_form = inf / va;
  out.global_ratio = sup / inf;
  return out;
}

HolderScan holder_quotient_alpha(const Trajectory& traj1,
                                 const Trajectory& traj2,
                                 const KimuraOperator& op,
                                 const ParabolicCylinder& cyl) {
  const TensorGrid& grid = *traj1.grid;
  struct Sample {
    double t;
    Point z;
    double v;
  };
  std::vector<Sample> pts;
  for (size_t s : snapshots_in(traj1, cyl.time_lo(), cyl.time_hi())) {
    const Vector& u1 = traj1.states[s];
    const Vector& u2 = traj2.at_time_nearest(traj1.times[s]);
    for (Index f = 0; f < grid.num_nodes(); ++f) {
      const Point z = grid.node(f);
      if (!interior_node(op, z) || !cyl.contains_space(z)) continue;
      if (u2[f] <= 0.0)
        throw ContractError("holder_quotient_alpha: denominator not positive");
      pts.push_back({traj1.times[s], z, u1[f] / u2[f]});
    }
  }
  HolderScan out;
  // cap the pair count
  while (pts.size() > 500) {
    std::vector<Sample> thin;
    for (size_t k = 0; k < pts.size(); k += 2) thin.push_back(pts[k]);
    pts.swap(thin);
  }
  if (pts.size() < 8) {
    out.insufficient = true;
    return out;
  }

  double dmax = 0.0;
  auto dist = [&](const Sample& a, const Sample& b) {
    return std::sqrt(std::abs(a.t - b.t)) + rho(a.z, b.z, op.n);
  };
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      dmax = std::max(dmax, dist(pts[i], pts[j]));
  if (dmax <= 0.0) {
    out.insufficient = true;
    return out;
  }

  const int kmax = 8;
  std::vector<double> osc(kmax, 0.0);
  std::vector<int> cnt(kmax, 0);
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      const double d = dist(pts[i], pts[j]);
      if (d <= 0.0) continue;
      const int shell =
          std::min(kmax - 1, static_cast<int>(std::floor(std::log2(dmax / d))));
      osc[shell] = std::max(osc[shell], std::abs(pts[i].v - pts[j].v));
      ++cnt[shell];
    }

  std::vector<double> ks, logs;
  double scale = 0.0;
  for (int k = 0; k < kmax; ++k) scale = std::max(scale, osc[k]);
  for (int k = 0; k < kmax; ++k) {
    if (cnt[k] < 4) continue;
    out.shells += 1;
    if (osc[k] > 1e-14 * std::max(scale, 1.0)) {
      ks.push_back(double(k));
      logs.push_back(std::log2(osc[k]));
    }
  }
  if (out.shells < 4) {
    out.insufficient = true;
    return out;
  }
  if (scale <= 1e-14) {
    // constant quotient: every scan value passes
    out.alpha_hat = std::numeric_limits<double>::infinity();
    out.alpha = 0.95;
    out.pass = true;
    return out;
  }
  if (ks.size() < 3) {
    out.insufficient = true;
    return out;
  }
  out.alpha_hat = -ls_slope(ks, logs);
  for (double a = 0.95; a >= 0.049; a -= 0.05) {
    if (a <= 1.25 * out.alpha_hat) {
      out.alpha = a;
      out.pass = true;
      break;
    }
  }
  return out;
}

CylinderRatio elliptic_harnack(const Trajectory& traj, const KimuraOperator& op,
                               double t, double r) {
  const TensorGrid& grid = *traj.grid;
  SupInf e;
  ParabolicCylinder slab;
  slab.t = t;
  slab.r = r;
  slab.n = op.n;
  for (size_t s : snapshots_in(traj, t - r * r, t)) {
    const Vector& u = traj.states[s];
    for (Index f = 0; f < grid.num_nodes(); ++f) {
      const Point z = grid.node(f);
      if (!interior_node(op, z)) continue;
      if (is_outer_boundary_node(op, grid, f)) continue;
      const double v = weight_wT(op, z) * u[f];
      e.sup = std::max(e.sup, v);
      e.inf = std::min(e.inf, v);
      e.any = true;
    }
  }
  CylinderRatio out;
  if (!e.any || (std::abs(e.sup) < 1e-300 && std::abs(e.inf) < 1e-300)) {
    out.vacuous = true;
    return out;
  }
  out.ratio = e.sup / e.inf;
  return out;
}

SobolevCheck sobolev_sup_check(const Trajectory& traj, const KimuraOperator& op,
                               const std::vector<int>& a,
                               const std::vector<int>& b, double t, double r,
                               const Field& f) {
  const TensorGrid& grid = *traj.grid;
  if (static_cast<int>(a.size()) != op.n || static_cast<int>(b.size()) != op.m)
    throw ContractError("sobolev_sup_check: multi-index lengths");
  int order = 0;
  for (int v : a) order += v;
  for (int v : b) order += v;
  if (order > 2)
    throw ContractError("sobolev_sup_check: |a| + |b| <= 2 at desk scale");

  const WeightedMeasure mu = WeightedMeasure::mu(op);
  const WeightedMeasure mua = WeightedMeasure::mu_a(op, a);

  // intrinsic ball of radius r around the box midpoint
  Point center(grid.dim());
  for (int i = 0; i < op.n; ++i) center[i] = 0.25 * op.box.x_extent[i];
  for (int l = 0; l < op.m; ++l) center[op.n + l] = op.box.y_center[l];

  auto masked_l2sq = [&](const Vector& vals, const WeightedMeasure& meas) {
    double acc = 0.0;
    for_each_cell_gauss(grid, [&](const CellGaussPoint& p) {
      if (rho(p.z, center, op.n) >= r) return;
      double v = 0.0;
      for (size_t c = 0; c < p.corners.size(); ++c)
        v += p.value_w[c] * vals[p.corners[c]];
      acc += p.weight * meas.density(p.z) * v * v;
    });
    return acc;
  };

  SobolevCheck out;
  for (size_t s = 0; s < traj.states.size(); ++s) {
    if (traj.times[s] < t) continue;
    Vector d = traj.states[s];
    for (int i = 0; i < op.n; ++i)
      for (int rep = 0; rep < a[i]; ++rep)
        d = stencil_derivative(d, grid, i);
    for (int l = 0; l < op.m; ++l)
      for (int rep = 0; rep < b[l]; ++rep)
        d = stencil_derivative(d, grid, op.n + l);
    out.lhs = std::max(out.lhs, masked_l2sq(d, mua));
  }
  if (!std::isfinite(out.lhs)) out.divergent = true;

  double fsq = field_l2_mu(f.values, grid, mu);
  fsq *= fsq;
  double time_int = 0.0;
  for (size_t s = 0; s + 1 < traj.states.size(); ++s) {
    const double nrm = field_l2_mu(traj.states[s], grid, mu);
    time_int += nrm * nrm * (traj.times[s + 1] - traj.times[s]);
  }
  out.rhs = fsq + time_int;
  out.fitted_c = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  return out;
}

}  // namespace kimura
