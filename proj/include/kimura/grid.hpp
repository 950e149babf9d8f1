#pragma once

#include <string>
#include <vector>

#include "kimura/geometry.hpp"
#include "kimura/types.hpp"

namespace kimura {

// Tensor-product grid on a corner box.  x-axes start exactly at 0 and are
// graded toward the face; y-axes are uniform.
struct TensorGrid {
  int n = 0;
  int m = 0;
  std::vector<Vector> axes;  // n + m node vectors, strictly increasing

  int dim() const { return n + m; }
  Index axis_size(int k) const { return axes[k].size(); }

  Index num_nodes() const {
    Index t = 1;
    for (const auto& ax : axes) t *= ax.size();
    return t;
  }

  // axis 0 varies fastest
  Index flat(const std::vector<Index>& idx) const {
    Index f = 0;
    for (int k = dim() - 1; k >= 0; --k) f = f * axes[k].size() + idx[k];
    return f;
  }

  std::vector<Index> unflat(Index f) const {
    std::vector<Index> idx(dim());
    for (int k = 0; k < dim(); ++k) {
      idx[k] = f % axes[k].size();
      f /= axes[k].size();
    }
    return idx;
  }

  Point node(Index f) const {
    Point z(dim());
    for (int k = 0; k < dim(); ++k) {
      z[k] = axes[k][f % axes[k].size()];
      f /= axes[k].size();
    }
    return z;
  }

  void check_valid() const;
};

// Geometric grading toward x = 0 (ratio 0.5 boundary layers), uniform beyond.
Vector graded_axis(double extent, int num_nodes, int layers = 10,
                   double ratio = 0.5);

Vector uniform_axis(double lo, double hi, int num_nodes);

TensorGrid make_grid(const CornerBox& box, const std::vector<int>& nodes_per_axis,
                     int layers = 10, double ratio = 0.5);

// Scalar samples on a grid, optionally time-stamped.
struct Field {
  const TensorGrid* grid = nullptr;
  Vector values;
  double time = 0.0;

  static Field zero(const TensorGrid& g) {
    return Field{&g, Vector::Zero(g.num_nodes()), 0.0};
  }

  template <typename F>
  static Field sample(const TensorGrid& g, F&& f) {
    Field fld{&g, Vector(g.num_nodes()), 0.0};
    for (Index k = 0; k < g.num_nodes(); ++k) fld.values[k] = f(g.node(k));
    return fld;
  }

  // multilinear interpolation
  double interpolate(const Point& z) const;
};

// Flat binary snapshot (header: dims + node arrays, payload: values in flat
// order) with a JSON sidecar for scheme metadata.  Round-trip is bit-exact.
void save_snapshot(const std::string& path, const TensorGrid& grid,
                   const Vector& values, double time,
                   const std::string& sidecar_json);
struct Snapshot {
  TensorGrid grid;
  Vector values;
  double time = 0.0;
  std::string sidecar_json;
};
Snapshot load_snapshot(const std::string& path);

}  // namespace kimura
