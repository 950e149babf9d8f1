#pragma once

#include <vector>

#include "kimura/grid.hpp"
#include "kimura/types.hpp"

namespace kimura {

// One tensor Gauss point inside a grid cell, together with the multilinear
// interpolation stencil: corner flat indices, value weights, and per-axis
// derivative weights.
struct CellGaussPoint {
  Point z;
  double weight = 0.0;                  // cell-volume Gauss weight
  std::vector<Index> corners;           // 2^dim flat indices
  std::vector<double> value_w;          // per corner
  std::vector<std::vector<double>> deriv_w;  // per axis, per corner
};

// Visits every 2^dim-point Gauss rule of every cell.  Gauss points are strictly
// interior to each cell, so singular measure densities stay finite there.
template <typename F>
void for_each_cell_gauss(const TensorGrid& grid, F&& visit) {
  const int dim = grid.dim();
  const double g0 = 0.5 - 0.5 / std::sqrt(3.0);
  const double g1 = 0.5 + 0.5 / std::sqrt(3.0);
  const int ncorner = 1 << dim;

  std::vector<Index> cell(dim, 0);
  CellGaussPoint p;
  p.z.resize(dim);
  p.corners.resize(ncorner);
  p.value_w.resize(ncorner);
  p.deriv_w.assign(dim, std::vector<double>(ncorner));

  while (true) {
    for (int gp = 0; gp < (1 << dim); ++gp) {
      double w = 1.0;
      std::vector<double> t(dim), h(dim);
      for (int k = 0; k < dim; ++k) {
        const Vector& ax = grid.axes[k];
        const double a = ax[cell[k]], b = ax[cell[k] + 1];
        h[k] = b - a;
        t[k] = (gp & (1 << k)) ? g1 : g0;
        p.z[k] = a + t[k] * h[k];
        w *= 0.5 * h[k];
      }
      p.weight = w;
      for (int c = 0; c < ncorner; ++c) {
        std::vector<Index> idx(dim);
        double vw = 1.0;
        for (int k = 0; k < dim; ++k) {
          const bool hi = c & (1 << k);
          idx[k] = cell[k] + (hi ? 1 : 0);
          vw *= hi ? t[k] : 1.0 - t[k];
        }
        p.corners[c] = grid.flat(idx);
        p.value_w[c] = vw;
        for (int j = 0; j < dim; ++j) {
          double dw = 1.0;
          for (int k = 0; k < dim; ++k) {
            const bool hi = c & (1 << k);
            if (k == j)
              dw *= (hi ? 1.0 : -1.0) / h[k];
            else
              dw *= hi ? t[k] : 1.0 - t[k];
          }
          p.deriv_w[j][c] = dw;
        }
      }
      visit(p);
    }
    int k = 0;
    for (; k < dim; ++k) {
      if (++cell[k] < grid.axes[k].size() - 1) break;
      cell[k] = 0;
    }
    if (k == dim) break;
  }
}

}  // namespace kimura
