#include "kimura/operator.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace kimura {

namespace {

constexpr double kFaceZeroTol = 1e-12;  // |b_i| below this counts as zero

std::vector<Point> validation_lattice(const CornerBox& box, int res) {
  if (res < 2) throw ContractError("validate: lattice_resolution must be >= 2");
  const int dim = box.dim();
  std::vector<Point> pts;
  std::vector<int> idx(dim, 0);
  const long total = static_cast<long>(std::pow(double(res), dim));
  pts.reserve(total);
  for (long c = 0; c < total; ++c) {
    Point z(dim);
    long rem = c;
    for (int k = 0; k < dim; ++k) {
      const int i = rem % res;
      rem /= res;
      const double t = double(i) / double(res - 1);
      if (k < box.n)
        z[k] = t * box.x_extent[k];
      else
        z[k] = box.y_center[k - box.n] + (2.0 * t - 1.0) * box.y_radius;
    }
    pts.push_back(std::move(z));
  }
  return pts;
}

void record(CheckResult& r, double violation, const Point& z) {
  if (violation > r.worst_violation) {
    r.worst_violation = violation;
    r.witness = z;
  }
  if (violation > 0.0) r.pass = false;
}

void check_finite(double v, const Point& z) {
  if (!std::isfinite(v))
    throw MalformedOperatorError("non-finite coefficient value at lattice point");
  (void)z;
}

}  // namespace

KimuraOperator KimuraOperator::make(int n, int m, int n0, double beta0,
                                    double lambda, CornerBox box) {
  KimuraOperator op;
  op.n = n;
  op.m = m;
  op.n0 = n0;
  op.beta0 = beta0;
  op.lambda = lambda;
  op.box = std::move(box);
  op.abar.assign(n, CoefficientField::constant(1.0));
  op.a.assign(n, std::vector<CoefficientField>(n, CoefficientField::constant(0.0)));
  op.b.assign(n, CoefficientField::constant(0.0));
  op.c_mix.assign(n, std::vector<CoefficientField>(m, CoefficientField::constant(0.0)));
  op.d.assign(m, std::vector<CoefficientField>(m, CoefficientField::constant(0.0)));
  for (int l = 0; l < m; ++l) op.d[l][l] = CoefficientField::constant(1.0);
  op.e.assign(m, CoefficientField::constant(0.0));
  op.c0 = CoefficientField::constant(0.0);
  return op;
}

DerivativeBundle DerivativeBundle::of_polynomial(const Polynomial& u,
                                                const Point& z) {
  const int dim = u.nvars();
  DerivativeBundle b;
  b.value = u.eval(z);
  b.grad = Vector(dim);
  b.hess = Matrix(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const Polynomial di = u.derivative(i);
    b.grad[i] = di.eval(z);
    for (int j = i; j < dim; ++j)
      b.hess(i, j) = b.hess(j, i) = di.derivative(j).eval(z);
  }
  return b;
}

ValidationReport validate(const KimuraOperator& op, int lattice_resolution) {
  for (int i = 0; i < op.n; ++i)
    if (op.box.x_extent[i] <= 0.0)
      throw ContractError("validate: box side lengths must be positive");
  ValidationReport rep;
  const auto lattice = validation_lattice(op.box, lattice_resolution);

  for (const Point& z : lattice) {
    // finiteness + normal form
    for (int i = 0; i < op.n; ++i) {
      const double ab = op.abar[i](z);
      check_finite(ab, z);
      record(rep.normal_form, std::abs(ab - 1.0) - 1e-12, z);
      check_finite(op.b[i](z), z);
      for (int j = 0; j < op.n; ++j) check_finite(op.a[i][j](z), z);
      for (int l = 0; l < op.m; ++l) check_finite(op.c_mix[i][l](z), z);
    }
    for (int l = 0; l < op.m; ++l) {
      check_finite(op.e[l](z), z);
      for (int k = 0; k < op.m; ++k) check_finite(op.d[l][k](z), z);
    }
    check_finite(op.c0(z), z);

    // symmetry of a and d
    for (int i = 0; i < op.n; ++i)
      for (int j = i + 1; j < op.n; ++j)
        record(rep.symmetry, std::abs(op.a[i][j](z) - op.a[j][i](z)) - 1e-12, z);
    for (int l = 0; l < op.m; ++l)
      for (int k = l + 1; k < op.m; ++k)
        record(rep.symmetry, std::abs(op.d[l][k](z) - op.d[k][l](z)) - 1e-12, z);

    // cleanness on faces
    for (int i = 0; i < op.n; ++i) {
      if (z[i] != 0.0) continue;
      const double bi = op.b[i](z);
      if (i < op.n0)
        record(rep.cleanness, std::abs(bi) - kFaceZeroTol, z);
      else
        record(rep.cleanness, op.beta0 - bi, z);
    }

    // strict ellipticity: minimum eigenvalue of the symbol matrix in the
    // intrinsic variables (zeta_i = sqrt(x_i) xi_i) must reach lambda
    const int dim = op.dim();
    Matrix E = Matrix::Zero(dim, dim);
    for (int i = 0; i < op.n; ++i) {
      E(i, i) += op.abar[i](z);
      for (int j = 0; j < op.n; ++j) {
        const double s = std::sqrt(z[i] * z[j]) * op.a[i][j](z);
        E(i, j) += 0.5 * s;
        E(j, i) += 0.5 * s;
      }
      for (int l = 0; l < op.m; ++l) {
        const double s = 0.5 * std::sqrt(z[i]) * op.c_mix[i][l](z);
        E(i, op.n + l) += s;
        E(op.n + l, i) += s;
      }
    }
    for (int l = 0; l < op.m; ++l)
      for (int k = 0; k < op.m; ++k) {
        const double s = 0.5 * op.d[l][k](z);
        E(op.n + l, op.n + k) += s;
        E(op.n + k, op.n + l) += s;
      }
    Eigen::SelfAdjointEigenSolver<Matrix> es(E);
    record(rep.ellipticity, op.lambda - es.eigenvalues().minCoeff() - 1e-12, z);
  }
  return rep;
}

double apply_pointwise(const KimuraOperator& op, const DerivativeBundle& u,
                       const Point& z) {
  const int dim = op.dim();
  if (u.grad.size() != dim || u.hess.rows() != dim || u.hess.cols() != dim)
    throw ContractError("apply_pointwise: derivative record has wrong shape");
  double s = 0.0;
  for (int i = 0; i < op.n; ++i) {
    s += z[i] * op.abar[i](z) * u.hess(i, i);
    s += op.b[i](z) * u.grad[i];
    for (int j = 0; j < op.n; ++j)
      s += z[i] * z[j] * op.a[i][j](z) * u.hess(i, j);
    for (int l = 0; l < op.m; ++l)
      s += z[i] * op.c_mix[i][l](z) * u.hess(i, op.n + l);
  }
  for (int l = 0; l < op.m; ++l) {
    s += op.e[l](z) * u.grad[op.n + l];
    for (int k = 0; k < op.m; ++k)
      s += op.d[l][k](z) * u.hess(op.n + l, op.n + k);
  }
  s += op.c0(z) * u.value;
  return s;
}

KimuraOperator h_transform(const KimuraOperator& op) {
  if (op.n0 == 0) return op;
  KimuraOperator out = op;
  const int n0 = op.n0;

  // drift gains: 2 + 2 x_i sum_{j<n0} a_ij for tangent i,
  //              2 x_j sum_{i<n0} a_ij for transverse j
  for (int i = 0; i < op.n; ++i) {
    const auto base = op.b[i];
    if (i < n0) {
      auto arow = op.a[i];
      out.b[i] = CoefficientField::function([base, arow, i, n0](const Point& z) {
        double s = 0.0;
        for (int j = 0; j < n0; ++j) s += arow[j](z);
        return base(z) + 2.0 + 2.0 * z[i] * s;
      });
    } else {
      std::vector<CoefficientField> acol;
      for (int k = 0; k < n0; ++k) acol.push_back(op.a[k][i]);
      out.b[i] = CoefficientField::function([base, acol, i](const Point& z) {
        double s = 0.0;
        for (const auto& aj : acol) s += aj(z);
        return base(z) + 2.0 * z[i] * s;
      });
    }
  }
  for (int l = 0; l < op.m; ++l) {
    const auto base = op.e[l];
    std::vector<CoefficientField> ccol;
    for (int i = 0; i < n0; ++i) ccol.push_back(op.c_mix[i][l]);
    out.e[l] = CoefficientField::function([base, ccol](const Point& z) {
      double s = 0.0;
      for (const auto& ci : ccol) s += ci(z);
      return base(z) + s;
    });
  }

  // zeroth order: sum_{i,j<n0} a_ij + sum_{i<n0} b_i/x_i.  The quotient is
  // smooth because b_i vanishes on {x_i = 0}; at the face it continues with
  // the difference quotient anchored one grid cell in.
  {
    const auto base = op.c0;
    auto a = op.a;
    auto b = op.b;
    out.c0 = CoefficientField::function([base, a, b, n0](const Point& z) {
      double s = base(z);
      for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n0; ++j) s += a[i][j](z);
      for (int i = 0; i < n0; ++i) {
        const double h = 1e-7;
        if (z[i] >= h) {
          Point zf = z;
          zf[i] = 0.0;
          s += (b[i](z) - b[i](zf)) / z[i];
        } else {
          Point zf = z;
          zf[i] = 0.0;
          Point zh = z;
          zh[i] = h;
          s += (b[i](zh) - b[i](zf)) / h;
        }
      }
      return s;
    });
  }

  out.n0 = 0;
  out.beta0 = std::min(2.0, op.n0 == op.n ? 2.0 : op.beta0);
  return out;
}

double conjugation_residual(const KimuraOperator& op, const Polynomial& u,
                            const std::vector<Point>& probe_points) {
  Polynomial ut = u;
  for (int i = 0; i < op.n0; ++i) ut = ut.divide_by_var(i);
  const KimuraOperator lt = h_transform(op);
  double worst = 0.0;
  for (const Point& z : probe_points) {
    for (int i = 0; i < op.n; ++i)
      if (z[i] <= 0.0)
        throw ContractError("conjugation_residual: probe not strictly interior");
    double wt = 1.0;
    for (int i = 0; i < op.n0; ++i) wt /= z[i];
    const double lhs = apply_pointwise(lt, ut, z);
    const double rhs = wt * apply_pointwise(op, u, z);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

}  // namespace kimura
