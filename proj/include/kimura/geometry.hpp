#pragma once

#include <cmath>
#include <vector>

#include "kimura/types.hpp"

namespace kimura {

// Coordinate box in \bar S_{n,m}: per x-axis [0, R_i), per y-axis
// (c_l - R_y, c_l + R_y).
struct CornerBox {
  int n = 0;
  int m = 0;
  Vector x_extent;   // n entries, R_i > 0
  Vector y_center;   // m entries
  double y_radius = 0.0;

  static CornerBox centered(int n, int m, double radius) {
    CornerBox b;
    b.n = n;
    b.m = m;
    b.x_extent = Vector::Constant(n, radius);
    b.y_center = Vector::Zero(m);
    b.y_radius = radius;
    return b;
  }

  int dim() const { return n + m; }

  bool contains(const Point& z, bool closed = true) const {
    const double slack = closed ? 1e-14 : -1e-14;
    for (int i = 0; i < n; ++i)
      if (z[i] < -slack || z[i] > x_extent[i] + slack) return false;
    for (int l = 0; l < m; ++l)
      if (std::abs(z[n + l] - y_center[l]) > y_radius + slack) return false;
    return true;
  }
};

// Intrinsic distance, Euclidean in sqrt-x coordinates.
inline double rho(const Point& z, const Point& z2, int n) {
  if (z.size() != z2.size()) throw ContractError("rho: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    if (z[i] < 0.0 || z2[i] < 0.0)
      throw DomainError("rho: negative coordinate on an x-axis");
    const double d = std::sqrt(z[i]) - std::sqrt(z2[i]);
    s += d * d;
  }
  for (Index k = n; k < z.size(); ++k) {
    const double d = z[k] - z2[k];
    s += d * d;
  }
  return std::sqrt(s);
}

// Interior anchor point: offsets r^2/(4n) on each x-axis and r/(2 sqrt(m)) on
// each y-axis; always within intrinsic distance r of z.
inline Point a_r_point(const Point& z, double r, int n) {
  if (r <= 0.0) throw ContractError("a_r_point: r must be positive");
  Point a = z;
  const int m = static_cast<int>(z.size()) - n;
  for (int i = 0; i < n; ++i) a[i] += r * r / (4.0 * n);
  for (int l = 0; l < m; ++l) a[n + l] += r / (2.0 * std::sqrt(double(m)));
  return a;
}

enum class CylinderVariant { Centered, Plus, Minus };

// Space-time cylinder Q_r / Q_r^+ / Q_r^- anchored at a boundary point in the
// intrinsic metric.
struct ParabolicCylinder {
  double t = 0.0;
  Point anchor;
  double r = 0.0;
  int n = 0;
  CylinderVariant variant = CylinderVariant::Centered;

  double time_lo() const {
    switch (variant) {
      case CylinderVariant::Centered: return t - r * r;
      case CylinderVariant::Plus: return t + r * r;
      default: return t - 3.0 * r * r;
    }
  }
  double time_hi() const {
    switch (variant) {
      case CylinderVariant::Centered: return t;
      case CylinderVariant::Plus: return t + 2.0 * r * r;
      default: return t - 2.0 * r * r;
    }
  }

  bool contains_time(double s) const { return s > time_lo() && s < time_hi(); }
  bool contains_space(const Point& z) const { return rho(anchor, z, n) < r; }
  bool contains(double s, const Point& z) const {
    return contains_time(s) && contains_space(z);
  }

  ParabolicCylinder with_variant(CylinderVariant v) const {
    ParabolicCylinder c = *this;
    c.variant = v;
    return c;
  }
};

// Replaces the first n0 x-coordinates of z by the supplied block
// (pi-projection); a zero block gives pi(z).
inline Point project_tangent(const Point& z, int n0, const Vector& block) {
  if (block.size() != n0) throw ContractError("project_tangent: block length");
  Point p = z;
  for (int i = 0; i < n0; ++i) p[i] = block[i];
  return p;
}

inline Point project_tangent(const Point& z, int n0) {
  return project_tangent(z, n0, Vector::Zero(n0));
}

// pi_k: replaces all tangent coordinates except the k-th (0-based) by the
// supplied block of length n0-1.
inline Point project_tangent_k(const Point& z, int n0, int k,
                               const Vector& block) {
  if (k < 0 || k >= n0) throw ContractError("project_tangent_k: bad index");
  if (block.size() != n0 - 1)
    throw ContractError("project_tangent_k: block length");
  Point p = z;
  int j = 0;
  for (int i = 0; i < n0; ++i)
    if (i != k) p[i] = block[j++];
  return p;
}

inline Point project_tangent_k(const Point& z, int n0, int k) {
  return project_tangent_k(z, n0, k, Vector::Zero(n0 > 0 ? n0 - 1 : 0));
}

}  // namespace kimura
