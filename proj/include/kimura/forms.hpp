#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "kimura/grid.hpp"
#include "kimura/measure.hpp"
#include "kimura/operator.hpp"
#include "kimura/polynomial.hpp"
#include "kimura/solver.hpp"

namespace kimura {

enum class FormKind { Qsym, Full, Mass, H1 };

// Quadratic form in grid unknowns; immutable once assembled.
struct DiscreteForm {
  const TensorGrid* grid = nullptr;
  SparseMatrix mat;
  WeightedMeasure measure;
  FormKind kind = FormKind::Qsym;

  double operator()(const Vector& u, const Vector& v) const {
    return u.dot(mat * v);
  }
};

// Symmetric Dirichlet form
//   Q_sym(u,v) = int [ sum_i x_i abar_i u_{x_i} v_{x_i}
//                    + sum_{i,j} x_i x_j a_ij u_{x_i} v_{x_j}
//                    + sum_{i,l} x_i c_il (u_{x_i} v_{y_l} + v_{x_i} u_{y_l})/2
//                    + sum_{l,k} d_lk u_{y_l} v_{y_k} ] dmu
// by per-cell Gauss quadrature with multilinear derivative stencils.
DiscreteForm assemble_qsym(const KimuraOperator& op, const TensorGrid& grid);

// Full form Q(u,v) = -(Lu, v)_{L2(dmu)} through the difference operator and
// the Gauss mass matrix.
DiscreteForm assemble_q(const KimuraOperator& op, const TensorGrid& grid);

// Mass form (u, v)_{L2(dmu_a)}, optionally weighted by a coefficient field.
DiscreteForm assemble_mass(const KimuraOperator& op, const TensorGrid& grid,
                           const WeightedMeasure& measure,
                           const CoefficientField* weight = nullptr);

// The first-order residual Q - Q_sym - (c0 u, v): exposes the drift vector
// field of the form decomposition without knowing its coefficients.
SparseMatrix v_term(const KimuraOperator& op, const DiscreteForm& q,
                    const DiscreteForm& qsym, const TensorGrid& grid);

// Weighted H1(dmu) norm of a grid field; infinity when u fails to vanish on a
// tangent face (the L2(dmu) part diverges).
double h1_norm(const Field& u, const KimuraOperator& op, const TensorGrid& grid,
               bool* divergent = nullptr);

// Smooth cutoff with analytic gradient.
struct Cutoff {
  std::function<double(const Point&)> value;
  std::function<Vector(const Point&)> grad;

  static Cutoff one(int dim);
  // Smoothstep cutoff equal to 1 on the inner part of the box and 0 within
  // `margin` (fraction of extent) of the outer boundary.
  static Cutoff outer_bump(const CornerBox& box, double margin = 0.25);
};

// Random Dirichlet-class probe: polynomial times prod_{i<n0} x_i times a bump
// vanishing near the outer box boundary.
Field random_dirichlet_probe(const KimuraOperator& op, const TensorGrid& grid,
                             std::mt19937_64& rng);

struct GardingResult {
  bool feasible = false;
  double c2 = 0.0;
  double c3 = 0.0;
  int binding_probe = -1;
};

// Scans c2 downward from 1 and reports the largest c2 for which some bounded
// c3 >= 0 gives Q(u,u) >= c2 ||u||_H1^2 - c3 ||u||_L2^2 over random probes.
GardingResult garding_probe(const KimuraOperator& op, const TensorGrid& grid,
                            int trials, std::uint64_t seed,
                            double c3_cap = 1e6);

// Commutator [L, phi]u at z, with phi and u polynomial so the identity
// L(phi u) = phi Lu + [L, phi]u is exact (zeroth-order part excluded).
double commutator_apply(const KimuraOperator& op, const Polynomial& phi,
                        const Polynomial& u, const Point& z);

double commutator_identity_residual(const KimuraOperator& op,
                                    const Polynomial& phi, const Polynomial& u,
                                    const Point& z);

struct HardyResult {
  double lhs = 0.0;        // int u^2 phi^2 dmu
  double rhs_energy = 0.0; // weighted gradient term against dmu_{e_i}
  double rhs_l2 = 0.0;     // int (phi^2 + |grad phi|^2) u^2 dmu_{e_i}
  double fitted_c = 0.0;   // smallest C with lhs <= rhs_energy + C rhs_l2
  bool divergent = false;
};

HardyResult hardy_check(const KimuraOperator& op, const TensorGrid& grid,
                        const Field& u, const Cutoff& phi, int i);

// Coordinate-format text export (one "row col value" line per entry).
void write_form_coordinate(const std::string& path, const DiscreteForm& form);

}  // namespace kimura
