#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "kimura/builtin.hpp"
#include "kimura/operator.hpp"

using namespace kimura;

namespace {

Point pt1(double x) {
  Point z(1);
  z[0] = x;
  return z;
}

Polynomial random_poly(int nvars, int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Polynomial p(nvars);
  std::vector<int> e(nvars, 0);
  // full tensor basis up to the per-variable degree
  std::function<void(int)> rec = [&](int k) {
    if (k == nvars) {
      int total = 0;
      for (int v : e) total += v;
      if (total <= degree) p += Polynomial::monomial(nvars, e, coef(rng));
      return;
    }
    for (e[k] = 0; e[k] <= degree; ++e[k]) rec(k + 1);
    e[k] = 0;
  };
  rec(0);
  return p;
}

}  // namespace

TEST_CASE("polynomial arithmetic and calculus") {
  const Polynomial x = Polynomial::variable(2, 0);
  const Polynomial y = Polynomial::variable(2, 1);
  const Polynomial p = (x + y) * (x + y);  // x^2 + 2xy + y^2

  Point z(2);
  z << 2.0, 3.0;
  CHECK(p.eval(z) == doctest::Approx(25.0));
  CHECK(p.derivative(0).eval(z) == doctest::Approx(10.0));  // 2x + 2y
  CHECK(p.degree() == 2);

  const Polynomial q = x * y;
  CHECK(q.divisible_by_var(0));
  CHECK(q.divide_by_var(0).eval(z) == doctest::Approx(3.0));
  CHECK_FALSE(p.divisible_by_var(0));
  CHECK_THROWS_AS(p.divide_by_var(0), ContractError);

  CHECK((p - p).is_zero());
  CHECK((0.0 * p).is_zero());
}

TEST_CASE("coefficient field derivatives") {
  const Polynomial x = Polynomial::variable(1, 0);
  const CoefficientField poly = CoefficientField::polynomial(x * x);
  CHECK(poly(pt1(3.0)) == doctest::Approx(9.0));
  CHECK(poly.d(pt1(3.0), 0) == doctest::Approx(6.0));
  CHECK(poly.d2(pt1(3.0), 0, 0) == doctest::Approx(2.0));

  const CoefficientField fn =
      CoefficientField::function([](const Point& z) { return std::sin(z[0]); });
  CHECK(fn.d(pt1(0.5), 0) == doctest::Approx(std::cos(0.5)).epsilon(1e-6));
  CHECK(fn.d2(pt1(0.5), 0, 0) == doctest::Approx(-std::sin(0.5)).epsilon(1e-3));

  const CoefficientField c = CoefficientField::constant(4.0);
  CHECK(c(pt1(7.0)) == 4.0);
  CHECK(c.d(pt1(7.0), 0) == 0.0);
}

TEST_CASE("validation accepts the built-in family") {
  for (const auto& family : builtin_families()) {
    const KimuraOperator op = make_builtin(family);
    const ValidationReport rep = validate(op, 9);
    CAPTURE(family);
    CHECK(rep.all_pass());
  }
}

TEST_CASE("validation flags structural violations") {
  KimuraOperator op = make_builtin("model1d_zero");
  op.abar[0] = CoefficientField::constant(2.0);  // breaks normal form
  CHECK_FALSE(validate(op, 5).normal_form.pass);

  KimuraOperator op2 = make_builtin("model_s20");
  op2.a[0][1] = CoefficientField::constant(0.3);  // asymmetric a
  CHECK_FALSE(validate(op2, 5).symmetry.pass);

  KimuraOperator op3 = make_builtin("model1d_zero");
  op3.b[0] = CoefficientField::constant(0.5);  // tangent face with drift
  CHECK_FALSE(validate(op3, 5).cleanness.pass);

  KimuraOperator op4 = make_builtin("model1d_zero");
  op4.c0 = CoefficientField::function(
      [](const Point& z) { return z[0] == 0.0 ? 0.0 / 0.0 : 1.0; });
  CHECK_THROWS_AS(validate(op4, 5), MalformedOperatorError);
}

TEST_CASE("ellipticity matches the degenerate symbol") {
  // x(1-x) u'': symbol 1 - x stays >= 1/2 on [0, 1/2] but dips below 1/2 on a
  // larger box with the same threshold
  KimuraOperator ok = make_builtin("kimura_classic", {{"extent", 0.5}});
  ok.lambda = 0.5 - 1e-9;
  CHECK(validate(ok, 9).ellipticity.pass);

  KimuraOperator bad = make_builtin("kimura_classic", {{"extent", 0.9}});
  bad.lambda = 0.5;
  CHECK_FALSE(validate(bad, 9).ellipticity.pass);
}

TEST_CASE("pointwise application on model operators") {
  const KimuraOperator op = make_builtin("model1d_b", {{"b", 0.7}});
  const Polynomial x = Polynomial::variable(1, 0);
  // L x^2 = 2x(1 + b)
  CHECK(apply_pointwise(op, x * x, pt1(0.4)) ==
        doctest::Approx(2.0 * 0.4 * 1.7));
  // constants are annihilated when c0 = 0
  CHECK(apply_pointwise(op, Polynomial::constant(1, 3.0), pt1(0.4)) ==
        doctest::Approx(0.0));

  const KimuraOperator classic = make_builtin("kimura_classic", {{"extent", 1.0}});
  // eigenfunction: L(x - x^2) = -2(x - x^2)
  const Polynomial u = x - x * x;
  for (double xv : {0.1, 0.3, 0.8})
    CHECK(apply_pointwise(classic, u, pt1(xv)) ==
          doctest::Approx(-2.0 * u.eval(pt1(xv))));
}

TEST_CASE("derivative bundle matches analytic derivatives") {
  const Polynomial x = Polynomial::variable(2, 0);
  const Polynomial y = Polynomial::variable(2, 1);
  Point z(2);
  z << 0.5, 2.0;
  const DerivativeBundle b = DerivativeBundle::of_polynomial(x * x * y, z);
  CHECK(b.value == doctest::Approx(0.5));
  CHECK(b.grad[0] == doctest::Approx(2.0));   // 2xy
  CHECK(b.grad[1] == doctest::Approx(0.25));  // x^2
  CHECK(b.hess(0, 0) == doctest::Approx(4.0));
  CHECK(b.hess(0, 1) == doctest::Approx(1.0));
  CHECK(b.hess(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("h-transform of the zero-weight model") {
  const KimuraOperator op = make_builtin("model1d_zero");
  const KimuraOperator ht = h_transform(op);
  CHECK(ht.n0 == 0);
  // x u'' picks up drift 2 and no zeroth-order term
  for (double xv : {1e-6, 0.2, 0.9}) {
    CHECK(ht.b[0](pt1(xv)) == doctest::Approx(2.0));
    CHECK(ht.c0(pt1(xv)) == doctest::Approx(0.0));
  }
  // idempotent on positive-weight operators
  const KimuraOperator trans = make_builtin("model1d_b", {{"b", 1.5}});
  const KimuraOperator same = h_transform(trans);
  CHECK(same.b[0](pt1(0.3)) == doctest::Approx(1.5));
}

TEST_CASE("h-transform with weight vanishing linearly") {
  // b = x: quotient b/x extends to 1 on the face
  const KimuraOperator op = make_builtin("model1d_bx");
  const KimuraOperator ht = h_transform(op);
  for (double xv : {1e-9, 1e-4, 0.5}) {
    CHECK(ht.b[0](pt1(xv)) == doctest::Approx(xv + 2.0));
    CHECK(ht.c0(pt1(xv)) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("conjugation identity on random polynomials") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unif(0.05, 0.9);
  for (const auto& family : {"model1d_zero", "model_s11", "model_s21"}) {
    const KimuraOperator op = make_builtin(family);
    const int dim = op.dim();
    for (int trial = 0; trial < 8; ++trial) {
      Polynomial u = random_poly(dim, 3, rng);
      for (int i = 0; i < op.n0; ++i) u = u * Polynomial::variable(dim, i);
      std::vector<Point> probes;
      for (int k = 0; k < 6; ++k) {
        Point z(dim);
        for (int j = 0; j < dim; ++j) z[j] = unif(rng);
        probes.push_back(z);
      }
      CAPTURE(family);
      CHECK(conjugation_residual(op, u, probes) <= 1e-8);
    }
  }
}

TEST_CASE("conjugation residual rejects boundary probes") {
  const KimuraOperator op = make_builtin("model1d_zero");
  const Polynomial u = Polynomial::variable(1, 0);
  CHECK_THROWS_AS(conjugation_residual(op, u, {pt1(0.0)}), ContractError);
}
