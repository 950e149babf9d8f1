#pragma once

#include <Eigen/SparseCore>
#include <functional>
#include <string>
#include <vector>

#include "kimura/grid.hpp"
#include "kimura/measure.hpp"
#include "kimura/operator.hpp"

namespace kimura {

using SparseMatrix = Eigen::SparseMatrix<double>;

// How rows at constrained nodes (tangent faces and the outer artificial
// boundary) are emitted: Identity for stationary-system use, Zero for time
// stepping (values are pinned by the initial data), None for pure operator
// rows everywhere (form assembly).
enum class BoundaryRows { Identity, Zero, None };

// Node classification on the grid.
bool is_tangent_face_node(const KimuraOperator& op, const TensorGrid& grid,
                          Index flat);
bool is_outer_boundary_node(const KimuraOperator& op, const TensorGrid& grid,
                            Index flat);
inline bool is_constrained_node(const KimuraOperator& op, const TensorGrid& grid,
                                Index flat) {
  return is_tangent_face_node(op, grid, flat) ||
         is_outer_boundary_node(op, grid, flat);
}

// Finite-difference discretization of L on the tensor grid.  Transverse faces
// (x_i = 0, i >= n0) keep operator rows with the drift one-sided inward; the
// degenerate x_i d^2/dx_i^2 term vanishes there by itself.
SparseMatrix discretize(const KimuraOperator& op, const TensorGrid& grid,
                        BoundaryRows rows = BoundaryRows::Identity);

enum class Scheme { ImplicitEuler, CrankNicolson };

struct Trajectory {
  const TensorGrid* grid = nullptr;
  std::vector<double> times;
  std::vector<Vector> states;
  Scheme scheme = Scheme::CrankNicolson;
  double dt = 0.0;

  const Vector& at_time_nearest(double t, double* actual = nullptr) const;
};

// theta-scheme time stepping with homogeneous Dirichlet data pinned on the
// tangent and outer boundaries.  Crank-Nicolson starts with two implicit
// half-steps to damp the nonsmooth-data transient.
Trajectory solve_ivp(const KimuraOperator& op, const TensorGrid& grid,
                     const Field& u0, double t_end, double dt, Scheme scheme,
                     int save_every = 1, bool rannacher = true);

struct ConvergenceStudy {
  std::vector<double> h;          // 1 / nodes per axis
  std::vector<double> sup_error;
  std::vector<double> l2_error;   // weighted L2(d mu)
  double fitted_order = 0.0;
};

ConvergenceStudy convergence_study(
    const KimuraOperator& op, const std::function<double(double, const Point&)>& exact,
    const std::vector<int>& grid_sizes, double t_end,
    const std::function<double(double)>& dt_rule, Scheme scheme,
    int grading_layers = 10);

struct EnergyReport {
  double sup_l2 = 0.0;       // sup_t ||u(t)||_{L2(dmu)}
  double h1_time_integral = 0.0;
  double data_norm = 0.0;    // ||f|| + ||g||
  double fitted_c = 0.0;
  bool divergent_data = false;
};

EnergyReport energy_check(const Trajectory& traj, const KimuraOperator& op,
                          const TensorGrid& grid, const Field& f,
                          const Field* g = nullptr);

// Weighted L2(d mu_a) norm of a nodal field by per-cell Gauss quadrature.
double field_l2_mu(const Vector& values, const TensorGrid& grid,
                   const WeightedMeasure& measure);

// H1(d mu) norm: gradient terms weighted by x_i on degenerate axes plus the
// L2 term.  Returns infinity (flag) when the field does not vanish on a
// tangent face while n0 >= 1.
double field_h1_mu(const Vector& values, const TensorGrid& grid,
                   const KimuraOperator& op, bool* divergent = nullptr);

// First-derivative stencil along one axis applied to a nodal field (central
// in the interior, one-sided second order at the ends).
Vector stencil_derivative(const Vector& values, const TensorGrid& grid, int axis);

}  // namespace kimura
