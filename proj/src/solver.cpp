#include "kimura/solver.hpp"

#include <Eigen/SparseLU>
#include <cmath>

#include "kimura/cell_quadrature.hpp"

namespace kimura {

namespace {

struct Stencil3 {
  Index i0, i1, i2;
  double c0, c1, c2;
};

// central 3-point first derivative on a nonuniform axis
Stencil3 d1_central(const Vector& ax, Index i) {
  const double h1 = ax[i] - ax[i - 1], h2 = ax[i + 1] - ax[i];
  return {i - 1, i, i + 1, -h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2),
          h1 / (h2 * (h1 + h2))};
}

// one-sided second-order first derivative at the left end
Stencil3 d1_right(const Vector& ax, Index i) {
  const double h1 = ax[i + 1] - ax[i], h2 = ax[i + 2] - ax[i + 1];
  return {i, i + 1, i + 2, -(2.0 * h1 + h2) / (h1 * (h1 + h2)),
          (h1 + h2) / (h1 * h2), -h1 / (h2 * (h1 + h2))};
}

Stencil3 d2_central(const Vector& ax, Index i) {
  const double h1 = ax[i] - ax[i - 1], h2 = ax[i + 1] - ax[i];
  return {i - 1, i, i + 1, 2.0 / (h1 * (h1 + h2)), -2.0 / (h1 * h2),
          2.0 / (h2 * (h1 + h2))};
}

}  // namespace

bool is_tangent_face_node(const KimuraOperator& op, const TensorGrid& grid,
                          Index flat) {
  const auto idx = grid.unflat(flat);
  for (int i = 0; i < op.n0; ++i)
    if (idx[i] == 0) return true;
  return false;
}

bool is_outer_boundary_node(const KimuraOperator& op, const TensorGrid& grid,
                            Index flat) {
  const auto idx = grid.unflat(flat);
  for (int i = 0; i < op.n; ++i)
    if (idx[i] == grid.axes[i].size() - 1) return true;
  for (int l = 0; l < op.m; ++l) {
    const Index k = op.n + l;
    if (idx[k] == 0 || idx[k] == grid.axes[k].size() - 1) return true;
  }
  return false;
}

SparseMatrix discretize(const KimuraOperator& op, const TensorGrid& grid,
                        BoundaryRows rows) {
  if (grid.n != op.n || grid.m != op.m)
    throw ContractError("discretize: grid/operator dimension mismatch");
  grid.check_valid();

  const Index nn = grid.num_nodes();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(nn * (2 * grid.dim() + 1));

  std::vector<Index> strides(grid.dim());
  Index s = 1;
  for (int k = 0; k < grid.dim(); ++k) {
    strides[k] = s;
    s *= grid.axes[k].size();
  }

  for (Index row = 0; row < nn; ++row) {
    if (is_constrained_node(op, grid, row)) {
      if (rows == BoundaryRows::Identity) trip.emplace_back(row, row, 1.0);
      continue;
    }
    const auto idx = grid.unflat(row);
    const Point z = grid.node(row);

    auto add1 = [&](int axis, const Stencil3& st, double coef) {
      const Index base = row - idx[axis] * strides[axis];
      trip.emplace_back(row, base + st.i0 * strides[axis], coef * st.c0);
      trip.emplace_back(row, base + st.i1 * strides[axis], coef * st.c1);
      trip.emplace_back(row, base + st.i2 * strides[axis], coef * st.c2);
    };
    auto add_mixed = [&](int ax1, int ax2, double coef) {
      const Stencil3 s1 = d1_central(grid.axes[ax1], idx[ax1]);
      const Stencil3 s2 = d1_central(grid.axes[ax2], idx[ax2]);
      const Index base =
          row - idx[ax1] * strides[ax1] - idx[ax2] * strides[ax2];
      const Index i1[3] = {s1.i0, s1.i1, s1.i2};
      const double c1[3] = {s1.c0, s1.c1, s1.c2};
      const Index i2[3] = {s2.i0, s2.i1, s2.i2};
      const double c2[3] = {s2.c0, s2.c1, s2.c2};
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          trip.emplace_back(row, base + i1[a] * strides[ax1] + i2[b] * strides[ax2],
                            coef * c1[a] * c2[b]);
    };

    // x-block
    for (int i = 0; i < op.n; ++i) {
      const bool at_face = idx[i] == 0;  // transverse face (tangent is constrained)
      const double xi = z[i];
      const double diag2 = xi * op.abar[i](z) + xi * xi * op.a[i][i](z);
      if (std::abs(diag2) > 0.0)
        add1(i, d2_central(grid.axes[i], idx[i]), diag2);
      const double bi = op.b[i](z);
      if (std::abs(bi) > 0.0)
        add1(i, at_face ? d1_right(grid.axes[i], idx[i])
                        : d1_central(grid.axes[i], idx[i]),
             bi);
      for (int j = i + 1; j < op.n; ++j) {
        const double coef = 2.0 * xi * z[j] * op.a[i][j](z);
        if (std::abs(coef) > 0.0) add_mixed(i, j, coef);
      }
      for (int l = 0; l < op.m; ++l) {
        const double coef = xi * op.c_mix[i][l](z);
        if (std::abs(coef) > 0.0) add_mixed(i, op.n + l, coef);
      }
    }

    // y-block
    for (int l = 0; l < op.m; ++l) {
      const int k = op.n + l;
      const double dll = op.d[l][l](z);
      if (std::abs(dll) > 0.0) add1(k, d2_central(grid.axes[k], idx[k]), dll);
      for (int l2 = l + 1; l2 < op.m; ++l2) {
        const double coef = 2.0 * op.d[l][l2](z);
        if (std::abs(coef) > 0.0) add_mixed(k, op.n + l2, coef);
      }
      const double el = op.e[l](z);
      if (std::abs(el) > 0.0) add1(k, d1_central(grid.axes[k], idx[k]), el);
    }

    const double c0 = op.c0(z);
    if (std::abs(c0) > 0.0) trip.emplace_back(row, row, c0);
  }

  SparseMatrix A(nn, nn);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

const Vector& Trajectory::at_time_nearest(double t, double* actual) const {
  size_t best = 0;
  double bd = std::abs(times[0] - t);
  for (size_t k = 1; k < times.size(); ++k) {
    const double d = std::abs(times[k] - t);
    if (d < bd) {
      bd = d;
      best = k;
    }
  }
  if (actual) *actual = times[best];
  return states[best];
}

Trajectory solve_ivp(const KimuraOperator& op, const TensorGrid& grid,
                     const Field& u0, double t_end, double dt, Scheme scheme,
                     int save_every, bool rannacher) {
  if (dt <= 0.0) throw ContractError("solve_ivp: dt must be positive");
  const Index nn = grid.num_nodes();
  Vector u = u0.values;
  for (Index k = 0; k < nn; ++k) {
    if (is_tangent_face_node(op, grid, k) && std::abs(u[k]) > 1e-12)
      throw ContractError("solve_ivp: u0 must vanish on the tangent boundary");
    if (is_outer_boundary_node(op, grid, k)) u[k] = 0.0;  // artificial Dirichlet
  }

  const SparseMatrix A = discretize(op, grid, BoundaryRows::Zero);
  SparseMatrix I(nn, nn);
  I.setIdentity();

  const double theta = scheme == Scheme::ImplicitEuler ? 1.0 : 0.5;

  Eigen::SparseLU<SparseMatrix> lu_main;
  {
    SparseMatrix M = I - theta * dt * A;
    lu_main.compute(M);
    if (lu_main.info() != Eigen::Success)
      throw std::runtime_error("solve_ivp: factorization failed");
  }
  Eigen::SparseLU<SparseMatrix> lu_half;
  const bool use_rannacher = rannacher && scheme == Scheme::CrankNicolson;
  if (use_rannacher) {
    SparseMatrix M = I - 0.5 * dt * A;
    lu_half.compute(M);
    if (lu_half.info() != Eigen::Success)
      throw std::runtime_error("solve_ivp: startup factorization failed");
  }

  Trajectory traj;
  traj.grid = &grid;
  traj.scheme = scheme;
  traj.dt = dt;
  traj.times.push_back(0.0);
  traj.states.push_back(u);

  std::vector<Index> pinned;
  for (Index k = 0; k < nn; ++k)
    if (is_constrained_node(op, grid, k)) pinned.push_back(k);

  const long nsteps = std::lround(t_end / dt);
  double t = 0.0;
  auto check_residual = [&](const SparseMatrix& M, const Vector& x,
                            const Vector& rhs) {
    const double rn = (M * x - rhs).norm();
    const double bn = rhs.norm();
    if (bn > 0.0 && rn / bn > 1e-10)
      throw std::runtime_error("solve_ivp: linear solve stagnated, residual " +
                               std::to_string(rn / bn));
  };

  for (long step = 0; step < nsteps; ++step) {
    if (use_rannacher && step == 0) {
      // two implicit-Euler half steps
      const SparseMatrix Mh = I - 0.5 * dt * A;
      for (int half = 0; half < 2; ++half) {
        const Vector rhs = u;
        u = lu_half.solve(rhs);
        check_residual(Mh, u, rhs);
      }
    } else {
      const Vector rhs = u + (1.0 - theta) * dt * (A * u);
      const SparseMatrix Mm = I - theta * dt * A;
      u = lu_main.solve(rhs);
      check_residual(Mm, u, rhs);
    }
    for (Index k : pinned) u[k] = 0.0;  // keep Dirichlet rows exact
    t += dt;
    if ((step + 1) % save_every == 0 || step + 1 == nsteps) {
      traj.times.push_back(t);
      traj.states.push_back(u);
    }
  }
  return traj;
}

double field_l2_mu(const Vector& values, const TensorGrid& grid,
                   const WeightedMeasure& measure) {
  double acc = 0.0;
  for_each_cell_gauss(grid, [&](const CellGaussPoint& p) {
    double v = 0.0;
    for (size_t c = 0; c < p.corners.size(); ++c)
      v += p.value_w[c] * values[p.corners[c]];
    acc += p.weight * measure.density(p.z) * v * v;
  });
  return std::sqrt(acc);
}

double field_h1_mu(const Vector& values, const TensorGrid& grid,
                   const KimuraOperator& op, bool* divergent) {
  if (divergent) *divergent = false;
  if (op.n0 >= 1) {
    for (Index k = 0; k < grid.num_nodes(); ++k)
      if (is_tangent_face_node(op, grid, k) && std::abs(values[k]) > 1e-9) {
        if (divergent) *divergent = true;
        return std::numeric_limits<double>::infinity();
      }
  }
  const WeightedMeasure mu = WeightedMeasure::mu(op);
  double acc = 0.0;
  for_each_cell_gauss(grid, [&](const CellGaussPoint& p) {
    double v = 0.0;
    for (size_t c = 0; c < p.corners.size(); ++c)
      v += p.value_w[c] * values[p.corners[c]];
    double term = v * v;
    for (int k = 0; k < grid.dim(); ++k) {
      double dv = 0.0;
      for (size_t c = 0; c < p.corners.size(); ++c)
        dv += p.deriv_w[k][c] * values[p.corners[c]];
      term += (k < op.n ? p.z[k] : 1.0) * dv * dv;
    }
    acc += p.weight * mu.density(p.z) * term;
  });
  return std::sqrt(acc);
}

Vector stencil_derivative(const Vector& values, const TensorGrid& grid, int axis) {
  const Index nn = grid.num_nodes();
  Vector out(nn);
  std::vector<Index> strides(grid.dim());
  Index s = 1;
  for (int k = 0; k < grid.dim(); ++k) {
    strides[k] = s;
    s *= grid.axes[k].size();
  }
  const Vector& ax = grid.axes[axis];
  const Index sz = ax.size();
  for (Index row = 0; row < nn; ++row) {
    const Index i = (row / strides[axis]) % sz;
    Stencil3 st;
    if (i == 0)
      st = d1_right(ax, i);
    else if (i == sz - 1) {
      // mirror of d1_right
      const double h1 = ax[i] - ax[i - 1], h2 = ax[i - 1] - ax[i - 2];
      st = {i - 2, i - 1, i, h1 / (h2 * (h1 + h2)), -(h1 + h2) / (h1 * h2),
            (2.0 * h1 + h2) / (h1 * (h1 + h2))};
    } else
      st = d1_central(ax, i);
    const Index base = row - i * strides[axis];
    out[row] = st.c0 * values[base + st.i0 * strides[axis]] +
               st.c1 * values[base + st.i1 * strides[axis]] +
               st.c2 * values[base + st.i2 * strides[axis]];
  }
  return out;
}

ConvergenceStudy convergence_study(
    const KimuraOperator& op,
    const std::function<double(double, const Point&)>& exact,
    const std::vector<int>& grid_sizes, double t_end,
    const std::function<double(double)>& dt_rule, Scheme scheme,
    int grading_layers) {
  ConvergenceStudy cs;
  const WeightedMeasure mu = WeightedMeasure::mu(op);
  for (int N : grid_sizes) {
    std::vector<int> sizes(op.dim(), N);
    const TensorGrid grid = make_grid(op.box, sizes, grading_layers);
    const Field u0 = Field::sample(grid, [&](const Point& z) { return exact(0.0, z); });
    const double dt = dt_rule(1.0 / N);
    const Trajectory traj =
        solve_ivp(op, grid, u0, t_end, dt, scheme, /*save_every=*/1 << 30);
    const Vector& uT = traj.states.back();
    Vector err(grid.num_nodes());
    for (Index k = 0; k < grid.num_nodes(); ++k)
      err[k] = uT[k] - exact(traj.times.back(), grid.node(k));
    cs.h.push_back(1.0 / N);
    cs.sup_error.push_back(err.cwiseAbs().maxCoeff());
    cs.l2_error.push_back(field_l2_mu(err, grid, mu));
  }
  // least-squares order from sup errors
  const int k = static_cast<int>(cs.h.size());
  if (k >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int used = 0;
    for (int i = 0; i < k; ++i) {
      if (cs.sup_error[i] <= 0.0) continue;
      const double x = std::log(cs.h[i]), y = std::log(cs.sup_error[i]);
      sx += x; sy += y; sxx += x * x; sxy += x * y;
      ++used;
    }
    if (used >= 2)
      cs.fitted_order = (used * sxy - sx * sy) / (used * sxx - sx * sx);
  }
  return cs;
}

EnergyReport energy_check(const Trajectory& traj, const KimuraOperator& op,
                          const TensorGrid& grid, const Field& f,
                          const Field* g) {
  EnergyReport rep;
  const WeightedMeasure mu = WeightedMeasure::mu(op);
  for (Index k = 0; k < grid.num_nodes(); ++k)
    if (is_tangent_face_node(op, grid, k) && std::abs(f.values[k]) > 1e-9)
      rep.divergent_data = true;

  double sup = 0.0;
  double h1_int = 0.0;
  for (size_t s = 0; s < traj.states.size(); ++s) {
    sup = std::max(sup, field_l2_mu(traj.states[s], grid, mu));
    const double h1 = field_h1_mu(traj.states[s], grid, op);
    const double w = (s == 0 || s + 1 == traj.states.size()) ? 0.5 : 1.0;
    if (s + 1 < traj.states.size())
      h1_int += w * h1 * h1 * (traj.times[s + 1] - traj.times[s]);
  }
  rep.sup_l2 = sup;
  rep.h1_time_integral = h1_int;
  double data = field_l2_mu(f.values, grid, mu);
  if (g) data += field_l2_mu(g->values, grid, mu);
  rep.data_norm = data;
  rep.fitted_c =
      data > 0.0 ? std::max(sup, std::sqrt(h1_int)) / data : 0.0;
  return rep;
}

}  // namespace kimura
