#pragma once

#include <map>
#include <string>
#include <vector>

#include "kimura/grid.hpp"
#include "kimura/operator.hpp"

namespace kimura {

// Named operator families used by configs and tests:
//   model1d_zero    x u''                       (zero weight, absorbing face)
//   model1d_b       x u'' + b u'                (transverse face, param b)
//   model1d_bx      x u'' + x u'                (weight vanishing on the face)
//   kimura_classic  x(1-x) u''                  (param extent, default 0.5)
//   model_s20       sum_i x_i d^2_{x_i}         (two zero-weight directions)
//   model_s11       x d^2_x + d^2_y             (zero weight plus one y-axis)
//   model_s21       x1 d^2_{x1} + x2 d^2_{x2} + d_{x2} + d^2_y
// Common params: extent (box radius), c0 (zeroth-order shift).
KimuraOperator make_builtin(const std::string& family,
                            const std::map<std::string, double>& params = {});

std::vector<std::string> builtin_families();

// Default Dirichlet-class initial data for a family's box: a product mode
// vanishing on the tangent faces and the outer boundary.
Field default_initial_data(const KimuraOperator& op, const TensorGrid& grid);

}  // namespace kimura
