#include "kimura/builtin.hpp"

#include <cmath>

namespace kimura {

namespace {

double param(const std::map<std::string, double>& p, const std::string& key,
             double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

}  // namespace

std::vector<std::string> builtin_families() {
  return {"model1d_zero", "model1d_b",  "model1d_bx", "kimura_classic",
          "model_s20",    "model_s11",  "model_s21"};
}

KimuraOperator make_builtin(const std::string& family,
                            const std::map<std::string, double>& params) {
  const double c0 = param(params, "c0", 0.0);
  KimuraOperator op;
  if (family == "model1d_zero") {
    const double R = param(params, "extent", 1.0);
    op = KimuraOperator::make(1, 0, 1, 1.0, 0.5, CornerBox::centered(1, 0, R));
  } else if (family == "model1d_b") {
    const double R = param(params, "extent", 1.0);
    const double b = param(params, "b", 0.5);
    if (b <= 0.0) throw ContractError("model1d_b: weight b must be positive");
    op = KimuraOperator::make(1, 0, 0, b, 0.5, CornerBox::centered(1, 0, R));
    op.b[0] = CoefficientField::constant(b);
  } else if (family == "model1d_bx") {
    const double R = param(params, "extent", 1.0);
    op = KimuraOperator::make(1, 0, 1, 1.0, 0.5, CornerBox::centered(1, 0, R));
    op.b[0] = CoefficientField::polynomial(Polynomial::variable(1, 0));
  } else if (family == "kimura_classic") {
    const double R = param(params, "extent", 0.5);
    op = KimuraOperator::make(1, 0, 1, 1.0, 0.25,
                              CornerBox::centered(1, 0, R));
    op.a[0][0] = CoefficientField::constant(-1.0);  // x abar + x^2 a = x(1-x)
  } else if (family == "model_s20") {
    const double R = param(params, "extent", 1.0);
    op = KimuraOperator::make(2, 0, 2, 1.0, 0.5, CornerBox::centered(2, 0, R));
  } else if (family == "model_s11") {
    const double R = param(params, "extent", 1.0);
    op = KimuraOperator::make(1, 1, 1, 1.0, 0.5, CornerBox::centered(1, 1, R));
  } else if (family == "model_s21") {
    const double R = param(params, "extent", 1.0);
    const double b2 = param(params, "b2", 1.0);
    if (b2 <= 0.0) throw ContractError("model_s21: weight b2 must be positive");
    op = KimuraOperator::make(2, 1, 1, b2, 0.5, CornerBox::centered(2, 1, R));
    op.b[1] = CoefficientField::constant(b2);
  } else {
    throw ContractError("unknown operator family: " + family);
  }
  if (c0 != 0.0) op.c0 = CoefficientField::constant(c0);
  return op;
}

Field default_initial_data(const KimuraOperator& op, const TensorGrid& grid) {
  // product mode: x_i (R_i - x_i) / R_i on tangent axes, (R_i - x_i) / R_i on
  // transverse axes, cosine arch on y-axes
  return Field::sample(grid, [&](const Point& z) {
    double v = 1.0;
    for (int i = 0; i < op.n; ++i) {
      const double R = op.box.x_extent[i];
      if (i < op.n0)
        v *= z[i] * (R - z[i]) / R;
      else
        v *= (R - z[i]) / R;
    }
    for (int l = 0; l < op.m; ++l) {
      const double s = (z[op.n + l] - op.box.y_center[l]) / op.box.y_radius;
      v *= std::cos(0.5 * M_PI * s);
    }
    return v;
  });
}

}  // namespace kimura
