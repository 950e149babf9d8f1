#include "kimura/forms.hpp"

#include <cmath>
#include <fstream>

#include "kimura/cell_quadrature.hpp"

namespace kimura {

namespace {

// accumulate coef * du[k1] * dv[k2] contributions of one Gauss point
void add_pair(std::vector<Eigen::Triplet<double>>& trip, const CellGaussPoint& p,
              int k1, int k2, double coef) {
  if (coef == 0.0) return;
  const size_t nc = p.corners.size();
  for (size_t c1 = 0; c1 < nc; ++c1)
    for (size_t c2 = 0; c2 < nc; ++c2)
      trip.emplace_back(p.corners[c1], p.corners[c2],
                        coef * p.deriv_w[k1][c1] * p.deriv_w[k2][c2]);
}

}  // namespace

DiscreteForm assemble_qsym(const KimuraOperator& op, const TensorGrid& grid) {
  const WeightedMeasure mu = WeightedMeasure::mu(op);
  std::vector<Eigen::Triplet<double>> trip;
  for_each_cell_gauss(grid, [&](const CellGaussPoint& p) {
    const double w = p.weight * mu.density(p.z);
    for (int i = 0; i < op.n; ++i) {
      add_pair(trip, p, i, i, w * p.z[i] * op.abar[i](p.z));
      for (int j = 0; j < op.n; ++j)
        add_pair(trip, p, i, j, w * p.z[i] * p.z[j] * op.a[i][j](p.z));
      for (int l = 0; l < op.m; ++l) {
        const double coef = 0.5 * w * p.z[i] * op.c_mix[i][l](p.z);
        add_pair(trip, p, i, op.n + l, coef);
        add_pair(trip, p, op.n + l, i, coef);
      }
    }
    for (int l = 0; l < op.m; ++l)
      for (int k = 0; k < op.m; ++k)
        add_pair(trip, p, op.n + l, op.n + k, w * op.d[l][k](p.z));
  });
  DiscreteForm f;
  f.grid = &grid;
  f.measure = mu;
  f.kind = FormKind::Qsym;
  f.mat.resize(grid.num_nodes(), grid.num_nodes());
  f.mat.setFromTriplets(trip.begin(), trip.end());
  return f;
}

DiscreteForm assemble_mass(const KimuraOperator& op, const TensorGrid& grid,
                           const WeightedMeasure& measure,
                           const CoefficientField* weight) {
  std::vector<Eigen::Triplet<double>> trip;
  for_each_cell_gauss(grid, [&](const CellGaussPoint& p) {
    double w = p.weight * measure.density(p.z);
    if (weight) w *= (*weight)(p.z);
    const size_t nc = p.corners.size();
    for (size_t c1 = 0; c1 < nc; ++c1)
      for (size_t c2 = 0; c2 < nc; ++c2)
        trip.emplace_back(p.corners[c1], p.corners[c2],
                          w * p.value_w[c1] * p.value_w[c2]);
  });
  DiscreteForm f;
  f.grid = &grid;
  f.measure = measure;
  f.kind = FormKind::Mass;
  f.mat.resize(grid.num_nodes(), grid.num_nodes());
  f.mat.setFromTriplets(trip.begin(), trip.end());
  return f;
}

DiscreteForm assemble_q(const KimuraOperator& op, const TensorGrid& grid) {
  const SparseMatrix A = discretize(op, grid, BoundaryRows::Zero);
  const DiscreteForm mass = assemble_mass(op, grid, WeightedMeasure::mu(op));
  DiscreteForm f;
  f.grid = &grid;
  f.measure = mass.measure;
  f.kind = FormKind::Full;
  f.mat = (-(A.transpose() * mass.mat)).pruned();
  return f;
}

SparseMatrix v_term(const KimuraOperator& op, const DiscreteForm& q,
                    const DiscreteForm& qsym, const TensorGrid& grid) {
  const DiscreteForm c0mass =
      assemble_mass(op, grid, WeightedMeasure::mu(op), &op.c0);
  return (q.mat - qsym.mat - c0mass.mat).pruned();
}

double h1_norm(const Field& u, const KimuraOperator& op, const TensorGrid& grid,
               bool* divergent) {
  return field_h1_mu(u.values, grid, op, divergent);
}

Cutoff Cutoff::one(int dim) {
  Cutoff c;
  c.value = [](const Point&) { return 1.0; };
  c.grad = [dim](const Point&) { return Vector::Zero(dim); };
  return c;
}

namespace {

// smoothstep ramp: 0 below 0, 1 above 1, C^1 in between
double ramp(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * (3.0 - 2.0 * s);
}
double dramp(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return 6.0 * s * (1.0 - s);
}

}  // namespace

Cutoff Cutoff::outer_bump(const CornerBox& box, double margin) {
  const int dim = box.dim();
  auto axis_val = [box, margin](const Point& z, int k) {
    if (k < box.n) {
      const double R = box.x_extent[k];
      return ramp((R - z[k]) / (margin * R));
    }
    const double lo = box.y_center[k - box.n] - box.y_radius;
    const double hi = box.y_center[k - box.n] + box.y_radius;
    const double mr = margin * box.y_radius;
    return ramp((z[k] - lo) / mr) * ramp((hi - z[k]) / mr);
  };
  auto axis_der = [box, margin](const Point& z, int k) {
    if (k < box.n) {
      const double R = box.x_extent[k];
      return dramp((R - z[k]) / (margin * R)) * (-1.0 / (margin * R));
    }
    const double lo = box.y_center[k - box.n] - box.y_radius;
    const double hi = box.y_center[k - box.n] + box.y_radius;
    const double mr = margin * box.y_radius;
    return dramp((z[k] - lo) / mr) / mr * ramp((hi - z[k]) / mr) +
           ramp((z[k] - lo) / mr) * dramp((hi - z[k]) / mr) * (-1.0 / mr);
  };
  Cutoff c;
  c.value = [dim, axis_val](const Point& z) {
    double v = 1.0;
    for (int k = 0; k < dim; ++k) v *= axis_val(z, k);
    return v;
  };
  c.grad = [dim, axis_val, axis_der](const Point& z) {
    Vector g(dim);
    for (int k = 0; k < dim; ++k) {
      double v = axis_der(z, k);
      for (int j = 0; j < dim; ++j)
        if (j != k) v *= axis_val(z, j);
      g[k] = v;
    }
    return g;
  };
  return c;
}

Field random_dirichlet_probe(const KimuraOperator& op, const TensorGrid& grid,
                             std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const int dim = op.dim();
  // random polynomial of degree <= 2
  std::vector<double> c0{coef(rng)}, lin(dim), quad(dim);
  for (int k = 0; k < dim; ++k) lin[k] = coef(rng);
  for (int k = 0; k < dim; ++k) quad[k] = coef(rng);
  const Cutoff bump = Cutoff::outer_bump(op.box);
  return Field::sample(grid, [&](const Point& z) {
    double p = c0[0];
    for (int k = 0; k < dim; ++k) p += lin[k] * z[k] + quad[k] * z[k] * z[k];
    double v = p * bump.value(z);
    for (int i = 0; i < op.n0; ++i) v *= z[i];
    return v;
  });
}

GardingResult garding_probe(const KimuraOperator& op, const TensorGrid& grid,
                            int trials, std::uint64_t seed, double c3_cap) {
  if (trials < 1) throw ContractError("garding_probe: trials must be >= 1");
  const DiscreteForm q = assemble_q(op, grid);
  const WeightedMeasure mu = WeightedMeasure::mu(op);
  std::mt19937_64 rng(seed);

  std::vector<double> qv, h1v, l2v;
  for (int t = 0; t < trials; ++t) {
    const Field u = random_dirichlet_probe(op, grid, rng);
    const double l2 = field_l2_mu(u.values, grid, mu);
    if (l2 < 1e-14) continue;  // vacuous probe
    const double h1 = field_h1_mu(u.values, grid, op);
    qv.push_back(q(u.values, u.values));
    h1v.push_back(h1 * h1);
    l2v.push_back(l2 * l2);
  }
  GardingResult res;
  for (double c2 = 1.0; c2 > 1e-6; c2 -= 0.05) {
    double c3 = 0.0;
    int binding = -1;
    for (size_t k = 0; k < qv.size(); ++k) {
      const double need = (c2 * h1v[k] - qv[k]) / l2v[k];
      if (need > c3) {
        c3 = need;
        binding = static_cast<int>(k);
      }
    }
    if (c3 <= c3_cap) {
      res.feasible = true;
      res.c2 = c2;
      res.c3 = c3;
      res.binding_probe = binding;
      return res;
    }
  }
  return res;  // infeasible: falsification witness, not a crash
}

double commutator_apply(const KimuraOperator& op, const Polynomial& phi,
                        const Polynomial& u, const Point& z) {
  const DerivativeBundle du = DerivativeBundle::of_polynomial(u, z);
  const DerivativeBundle dphi = DerivativeBundle::of_polynomial(phi, z);

  double acc = du.value * apply_pointwise(op, dphi, z);
  for (int i = 0; i < op.n; ++i) {
    acc += 2.0 * z[i] * op.abar[i](z) * du.grad[i] * dphi.grad[i];
    for (int j = 0; j < op.n; ++j)
      acc += z[i] * z[j] * op.a[i][j](z) *
             (du.grad[i] * dphi.grad[j] + du.grad[j] * dphi.grad[i]);
    for (int l = 0; l < op.m; ++l)
      acc += z[i] * op.c_mix[i][l](z) *
             (du.grad[i] * dphi.grad[op.n + l] + du.grad[op.n + l] * dphi.grad[i]);
  }
  for (int l = 0; l < op.m; ++l)
    for (int k = 0; k < op.m; ++k)
      acc += op.d[l][k](z) * (du.grad[op.n + l] * dphi.grad[op.n + k] +
                              du.grad[op.n + k] * dphi.grad[op.n + l]);
  return acc;
}

double commutator_identity_residual(const KimuraOperator& op,
                                    const Polynomial& phi, const Polynomial& u,
                                    const Point& z) {
  const double lhs = apply_pointwise(op, phi * u, z);
  const double rhs =
      phi.eval(z) * apply_pointwise(op, u, z) + commutator_apply(op, phi, u, z);
  return lhs - rhs;
}

HardyResult hardy_check(const KimuraOperator& op, const TensorGrid& grid,
                        const Field& u, const Cutoff& phi, int i) {
  if (i < op.n0 || i >= op.n)
    throw ContractError("hardy_check: index must name a transverse direction");
  HardyResult res;
  for (Index k = 0; k < grid.num_nodes(); ++k)
    if (is_tangent_face_node(op, grid, k) && std::abs(u.values[k]) > 1e-9)
      res.divergent = true;

  std::vector<int> ei(op.n, 0);
  ei[i] = 1;
  const WeightedMeasure mu = WeightedMeasure::mu(op);
  const WeightedMeasure mu_ei = WeightedMeasure::mu_a(op, ei);

  for_each_cell_gauss(grid, [&](const CellGaussPoint& p) {
    double v = 0.0;
    for (size_t c = 0; c < p.corners.size(); ++c)
      v += p.value_w[c] * u.values[p.corners[c]];
    const double ph = phi.value(p.z);
    const Vector gph = phi.grad(p.z);
    res.lhs += p.weight * mu.density(p.z) * v * v * ph * ph;
    double energy = 0.0;
    for (int k = 0; k < grid.dim(); ++k) {
      double dv = 0.0;
      for (size_t c = 0; c < p.corners.size(); ++c)
        dv += p.deriv_w[k][c] * u.values[p.corners[c]];
      energy += (k < op.n ? p.z[k] : 1.0) * dv * dv;
    }
    const double d_ei = mu_ei.density(p.z);
    res.rhs_energy += p.weight * d_ei * energy * ph * ph;
    res.rhs_l2 += p.weight * d_ei * v * v * (ph * ph + gph.squaredNorm());
  });
  if (res.lhs <= res.rhs_energy || res.rhs_l2 <= 0.0)
    res.fitted_c = 0.0;
  else
    res.fitted_c = (res.lhs - res.rhs_energy) / res.rhs_l2;
  return res;
}

void write_form_coordinate(const std::string& path, const DiscreteForm& form) {
  std::ofstream out(path);
  if (!out) throw ContractError("write_form_coordinate: cannot open " + path);
  out.precision(17);
  for (int k = 0; k < form.mat.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(form.mat, k); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace kimura
