#include "kimura/measure.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace kimura {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

struct AxisRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // plain dx weights; density applied pointwise
};

// Composite Gauss panels on [lo, hi], geometrically graded toward lo when
// graded is set (lo may then be 0; panels stop after `layers`).
AxisRule graded_axis_rule(double lo, double hi, int layers, double ratio,
                          int nodes_per_panel, bool graded) {
  AxisRule rule;
  std::vector<double> gx, gw;
  gauss_legendre(nodes_per_panel, gx, gw);
  std::vector<std::pair<double, double>> panels;
  if (!graded) {
    const int np = layers;
    for (int k = 0; k < np; ++k)
      panels.emplace_back(lo + (hi - lo) * k / np, lo + (hi - lo) * (k + 1) / np);
  } else {
    double b = hi;
    for (int k = 0; k < layers; ++k) {
      double a = lo + (b - lo) * ratio;
      if (graded && lo == 0.0) a = b * ratio;
      if (a <= lo * (1.0 + 1e-14)) {
        panels.emplace_back(lo, b);
        b = lo;
        break;
      }
      panels.emplace_back(a, b);
      b = a;
    }
    if (b > lo) panels.emplace_back(lo, b);
  }
  for (const auto& [a, b] : panels) {
    if (b <= a) continue;
    const double h = 0.5 * (b - a), c = 0.5 * (b + a);
    for (int q = 0; q < nodes_per_panel; ++q) {
      rule.nodes.push_back(c + h * gx[q]);
      rule.weights.push_back(h * gw[q]);
    }
  }
  return rule;
}

// Layers needed so the dropped tail below hi*ratio^L is O(1e-9) relative for
// weight x^s.
int layers_for_exponent(double s, int base_layers, double ratio) {
  const double need = 30.0 / std::max(1e-3, (1.0 + s) * (-std::log2(ratio)));
  return std::max(base_layers, static_cast<int>(std::ceil(need)));
}

double tensor_integrate(const std::vector<AxisRule>& rules,
                        const std::function<double(const Point&)>& f) {
  const int dim = static_cast<int>(rules.size());
  std::vector<size_t> idx(dim, 0);
  Point z(dim);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (int k = 0; k < dim; ++k) {
      z[k] = rules[k].nodes[idx[k]];
      w *= rules[k].weights[idx[k]];
    }
    total += w * f(z);
    int k = 0;
    for (; k < dim; ++k) {
      if (++idx[k] < rules[k].nodes.size()) break;
      idx[k] = 0;
    }
    if (k == dim) break;
  }
  return total;
}

}  // namespace

std::string QuadratureSpec::hash() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d|%.6g|%d|%d|%d|%.6g|%.6g", layers,
                grading_ratio, nodes_per_layer, y_panels, eps_steps, eps_start,
                eps_ratio);
  uint64_t h = 1469598103934665603ull;
  for (const char* p = buf; *p; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 1099511628211ull;
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

IntegralResult integrate(const std::function<double(const Point&)>& f,
                         const WeightedMeasure& measure, const CornerBox& region,
                         const QuadratureSpec& spec) {
  const KimuraOperator& op = *measure.op;
  IntegralResult res;
  res.spec_hash = spec.hash();

  // reference exponents near each face
  Point center(region.dim());
  for (int i = 0; i < region.n; ++i) center[i] = 0.5 * region.x_extent[i];
  for (int l = 0; l < region.m; ++l) center[region.n + l] = region.y_center[l];
  std::vector<bool> critical(region.n, false);
  std::vector<double> s_ref(region.n, 0.0);
  for (int i = 0; i < region.n; ++i) {
    Point zf = center;
    zf[i] = 1e-6 * region.x_extent[i];
    s_ref[i] = measure.exponent(zf, i);
    if (i < op.n0 && measure.a[i] == 0) {
      critical[i] = true;  // exact exponent -1 block of d mu
    } else if (s_ref[i] <= -1.0 + 1e-9) {
      res.bad_axis = i;
      throw MalformedOperatorError(
          "integrate: non-integrable exponent on a non-tangent axis " +
          std::to_string(i));
    }
  }

  auto integrand = [&](const Point& z) { return f(z) * measure.density(z); };

  auto build_rules = [&](double eps_cut) {
    std::vector<AxisRule> rules(region.dim());
    for (int i = 0; i < region.n; ++i) {
      const double hi = region.x_extent[i];
      if (critical[i]) {
        const int layers = static_cast<int>(
            std::ceil(std::log(hi / eps_cut) / -std::log(spec.grading_ratio)));
        rules[i] = graded_axis_rule(eps_cut, hi, std::max(1, layers),
                                    spec.grading_ratio, spec.nodes_per_layer,
                                    true);
      } else {
        const int layers =
            layers_for_exponent(s_ref[i], spec.layers, spec.grading_ratio);
        rules[i] = graded_axis_rule(0.0, hi, layers, spec.grading_ratio,
                                    spec.nodes_per_layer, true);
      }
    }
    for (int l = 0; l < region.m; ++l) {
      rules[region.n + l] =
          graded_axis_rule(region.y_center[l] - region.y_radius,
                           region.y_center[l] + region.y_radius, spec.y_panels,
                           1.0, spec.nodes_per_layer, false);
    }
    return rules;
  };

  const bool has_critical =
      std::any_of(critical.begin(), critical.end(), [](bool c) { return c; });
  if (!has_critical) {
    res.status = IntegralStatus::Convergent;
    res.value = tensor_integrate(build_rules(0.0), integrand);
    return res;
  }

  // epsilon-sequence on the singular block
  double eps = spec.eps_start;
  for (int k = 0; k < spec.eps_steps; ++k, eps *= spec.eps_ratio)
    res.partials.push_back(tensor_integrate(build_rules(eps), integrand));

  const double log_step = -std::log(spec.eps_ratio);
  std::vector<double> increments;
  for (size_t k = 0; k + 1 < res.partials.size(); ++k)
    increments.push_back(res.partials[k + 1] - res.partials[k]);
  const double last_inc = increments.back();
  const double scale = std::max(1.0, std::abs(res.partials.back()));

  if (std::abs(last_inc) <= 1e-7 * scale) {
    res.status = IntegralStatus::Convergent;
    // first-order Richardson: increments decay geometrically with eps
    const double r = spec.eps_ratio;
    res.value = res.partials.back() + last_inc * r / (1.0 - r);
    return res;
  }

  res.status = IntegralStatus::Divergent;
  res.log_slope = last_inc / log_step;
  double dev = 0.0;
  const size_t tail = std::min<size_t>(3, increments.size());
  for (size_t k = increments.size() - tail; k < increments.size(); ++k)
    dev = std::max(dev, std::abs(increments[k] / log_step - res.log_slope));
  res.slope_stable = dev <= 0.02 * std::abs(res.log_slope);
  return res;
}

EnvelopeResult sup_envelope(const KimuraOperator& op, const Point& z, double r0,
                            double p, int variant_l, const QuadratureSpec& spec) {
  if (p <= 2.0) throw ContractError("sup_envelope: requires p > 2");
  const double q = p / (p - 1.0);
  const double qp = q / p;  // = 1/(p-1) < 1
  EnvelopeResult res;

  // exponent per x-axis, estimated at a face-adjacent reference point for the
  // divergence guard
  std::vector<double> s_ref(op.n);
  for (int j = 0; j < op.n; ++j) {
    Point zf = z;
    zf[j] = std::max(z[j], 1e-6 * r0);
    s_ref[j] = (j < op.n0) ? -qp : -(op.b[j](zf) + (j == variant_l ? 1.0 : 0.0)) * qp;
    if (z[j] < 1e-12 && s_ref[j] <= -1.0 + 1e-9) {
      res.divergent = true;
      res.bad_axis = j;
      return res;
    }
  }

  std::vector<AxisRule> rules(op.dim());
  for (int j = 0; j < op.n; ++j) {
    if (z[j] >= r0) return res;  // empty rectangle, envelope 0
    const int layers = layers_for_exponent(s_ref[j], spec.layers, spec.grading_ratio);
    rules[j] = graded_axis_rule(z[j], r0, layers, spec.grading_ratio,
                                spec.nodes_per_layer, true);
  }
  for (int l = 0; l < op.m; ++l) {
    if (z[op.n + l] >= r0) return res;
    rules[op.n + l] = graded_axis_rule(z[op.n + l], r0, spec.y_panels, 1.0,
                                       spec.nodes_per_layer, false);
  }

  auto integrand = [&](const Point& zi) {
    double w = 1.0;
    for (int j = 0; j < op.n; ++j) {
      const double s =
          (j < op.n0) ? -qp : -(op.b[j](zi) + (j == variant_l ? 1.0 : 0.0)) * qp;
      w *= std::pow(zi[j], s);
    }
    return w;
  };
  const double integral = tensor_integrate(rules, integrand);
  res.value = std::pow(std::max(0.0, integral), 1.0 / q);
  return res;
}

}  // namespace kimura
