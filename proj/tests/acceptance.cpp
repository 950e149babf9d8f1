// Acceptance suite: one verdict line per criterion, exit code = failure count.
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "kimura/builtin.hpp"
#include "kimura/config.hpp"
#include "kimura/forms.hpp"
#include "kimura/harness.hpp"
#include "kimura/measure.hpp"
#include "kimura/oracles.hpp"
#include "kimura/solver.hpp"

using namespace kimura;

namespace {

int failures = 0;

void line(int k, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d  %-34s %s\n", ok ? "PASS" : "FAIL", k,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

Polynomial random_tangent_poly(const KimuraOperator& op, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> expd(0, 3);
  const int dim = op.dim();
  Polynomial p(dim);
  for (int t = 0; t < 8; ++t) {
    std::vector<int> e(dim, 0);
    int total = 0;
    for (int k = 0; k < dim; ++k) {
      e[k] = expd(rng);
      total += e[k];
    }
    if (total <= 3) p += Polynomial::monomial(dim, e, coef(rng));
  }
  Polynomial out = Polynomial::constant(dim, 1.0);
  for (int i = 0; i < op.n0; ++i) out = out * Polynomial::variable(dim, i);
  return out * p;
}

Point random_interior(const KimuraOperator& op, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(0.05, 0.9);
  std::uniform_real_distribution<double> uy(-0.8, 0.8);
  Point z(op.dim());
  for (int i = 0; i < op.n; ++i) z[i] = ux(rng) * op.box.x_extent[i];
  for (int l = 0; l < op.m; ++l)
    z[op.n + l] = op.box.y_center[l] + uy(rng) * op.box.y_radius;
  return z;
}

// second independent positive Dirichlet-class datum
Field squared_initial_data(const KimuraOperator& op, const TensorGrid& grid) {
  return Field::sample(grid, [&](const Point& z) {
    double v = 1.0;
    for (int i = 0; i < op.n; ++i) {
      const double R = op.box.x_extent[i];
      const double s = (R - z[i]) / R;
      v *= (i < op.n0 ? z[i] : 1.0) * s * s;
    }
    for (int l = 0; l < op.m; ++l) {
      const double s = (z[op.n + l] - op.box.y_center[l]) / op.box.y_radius;
      v *= std::cos(1.5707963267948966 * s);
    }
    return v;
  });
}

void all_monomials(int dim, int maxdeg, std::vector<int>& e, int axis,
                   int used, std::vector<Polynomial>& out) {
  if (axis == dim) {
    out.push_back(Polynomial::monomial(dim, e, 1.0));
    return;
  }
  for (int d = 0; d + used <= maxdeg; ++d) {
    e[axis] = d;
    all_monomials(dim, maxdeg, e, axis + 1, used + d, out);
  }
  e[axis] = 0;
}

bool tangent_zeros_hold(const KimuraOperator& op, const Trajectory& traj,
                        double tol) {
  const TensorGrid& g = *traj.grid;
  for (const auto& s : traj.states)
    for (Index f = 0; f < g.num_nodes(); ++f)
      if (is_tangent_face_node(op, g, f) && std::abs(s[f]) > tol) return false;
  return true;
}

double min_over_states(const Trajectory& traj) {
  double lo = 0.0;
  for (const auto& s : traj.states) lo = std::min(lo, s.minCoeff());
  return lo;
}

Trajectory scaled(const Trajectory& t, double c) {
  Trajectory out = t;
  for (auto& s : out.states) s *= c;
  return out;
}

}  // namespace

int main() {
  // 1. conjugation identity across the three corner models
  {
    std::mt19937_64 rng(1);
    double worst = 0.0;
    for (const char* fam : {"model1d_zero", "model_s11", "model_s21"}) {
      const KimuraOperator op = make_builtin(fam);
      for (int trial = 0; trial < 20; ++trial) {
        const Polynomial u = random_tangent_poly(op, rng);
        std::vector<Point> probes;
        for (int p = 0; p < 5; ++p) probes.push_back(random_interior(op, rng));
        worst = std::max(worst, conjugation_residual(op, u, probes));
      }
    }
    line(1, "conjugation identity", worst <= 1e-8,
         fmt("max residual %.3e (tol 1e-8)", worst));
  }

  // 2. exact eigen-benchmark: accuracy at 512 nodes and spatial order
  {
    const KimuraOperator op = make_builtin("kimura_classic", {{"extent", 1.0}});
    const TensorGrid g = make_grid(op.box, {512});
    const Field u0 =
        Field::sample(g, [](const Point& z) { return z[0] * (1.0 - z[0]); });
    const Trajectory traj =
        solve_ivp(op, g, u0, 1.0, 1e-3, Scheme::CrankNicolson, 1 << 30);
    double err = 0.0;
    for (Index k = 0; k < g.num_nodes(); ++k)
      err = std::max(err, std::abs(traj.states.back()[k] -
                                   exact_eigen_solution(1.0, g.axes[0][k])));
    const ConvergenceStudy cs = convergence_study(
        op,
        [](double t, const Point& z) { return exact_eigen_solution(t, z[0]); },
        {64, 128, 256}, 1.0, [](double h) { return h; },
        Scheme::CrankNicolson);
    line(2, "exact eigen-benchmark",
         err <= 1e-3 && cs.fitted_order >= 1.8,
         fmt("sup error %.3e (tol 1e-3), order %.2f (min 1.8)", err,
             cs.fitted_order));
  }

  // shared 1-D zero-weight benchmark solves
  const KimuraOperator op1 = make_builtin("model1d_zero");
  const TensorGrid g1c = make_grid(op1.box, {129}, 14);
  const TensorGrid g1f = make_grid(op1.box, {193}, 14);
  const Trajectory t1c = solve_ivp(op1, g1c, default_initial_data(op1, g1c),
                                   0.6, 2e-3, Scheme::CrankNicolson, 5);
  const Trajectory t1f = solve_ivp(op1, g1f, default_initial_data(op1, g1f),
                                   0.6, 2e-3, Scheme::CrankNicolson, 5);

  // shared 2-D product benchmark solves
  const KimuraOperator op2 = make_builtin("model_s20");
  const TensorGrid g2c = make_grid(op2.box, {65, 65}, 12);
  const TensorGrid g2f = make_grid(op2.box, {97, 97}, 12);
  const Trajectory t2c = solve_ivp(op2, g2c, default_initial_data(op2, g2c),
                                   0.6, 2e-3, Scheme::CrankNicolson, 10);
  const Trajectory t2f = solve_ivp(op2, g2f, default_initial_data(op2, g2f),
                                   0.6, 2e-3, Scheme::CrankNicolson, 10);

  // 3. boundary vanishing rates
  {
    Point b1 = Point::Zero(1);
    const SlopeFit s1 =
        vanishing_exponent(t1c, op1, {0}, 0.5, 1e-3, 1e-2, b1);
    Point b2(2);
    b2 << 0.25 * op2.box.x_extent[0], 0.25 * op2.box.x_extent[1];
    const SlopeFit s2 =
        vanishing_exponent(t2c, op2, {0, 1}, 0.5, 1e-3, 1e-2, b2);
    const bool ok = !s1.degenerate && std::abs(s1.slope - 1.0) <= 0.05 &&
                    !s2.degenerate && std::abs(s2.slope - 2.0) <= 0.1;
    line(3, "boundary vanishing rate", ok,
         fmt("1-D slope %.3f (1 +/- 0.05), 2-D joint slope %.3f (2 +/- 0.1)",
             s1.slope, s2.slope));
  }

  // 4. scaled derivative suprema finite and refinement-stable
  {
    const double d1c = derivative_bound_check(t1c, op1, 0, 0.5).sup_scaled;
    const double d1f = derivative_bound_check(t1f, op1, 0, 0.5).sup_scaled;
    const double d2c = derivative_bound_check(t2c, op2, 0, 0.5).sup_scaled;
    const double d2f = derivative_bound_check(t2f, op2, 0, 0.5).sup_scaled;
    const bool ok = std::isfinite(d1c) && std::isfinite(d2c) &&
                    refinement_stable({d1c, d1f}, 0.2) &&
                    refinement_stable({d2c, d2f}, 0.2);
    line(4, "derivative bounds", ok,
         fmt("1-D sup %.4g -> %.4g, 2-D sup %.4g -> %.4g (20%%)", d1c, d1f,
             d2c, d2f));
  }

  // positive-solution pair for the Harnack-type criteria
  const Trajectory p1c = solve_ivp(op1, g1c, default_initial_data(op1, g1c),
                                   0.5, 5e-3, Scheme::CrankNicolson);
  const Trajectory p1f = solve_ivp(op1, g1f, default_initial_data(op1, g1f),
                                   0.5, 5e-3, Scheme::CrankNicolson);
  const Trajectory q1c = solve_ivp(op1, g1c, squared_initial_data(op1, g1c),
                                   0.5, 5e-3, Scheme::CrankNicolson);
  const Trajectory q1f = solve_ivp(op1, g1f, squared_initial_data(op1, g1f),
                                   0.5, 5e-3, Scheme::CrankNicolson);
  ParabolicCylinder cyl;
  cyl.t = 0.4;
  cyl.anchor = Point::Zero(1);
  cyl.r = 0.3;
  cyl.n = 1;

  // 5. Carleson, Hopf-Oleinik, elliptic Harnack, quotient constants
  {
    auto constants = [&](const Trajectory& traj) {
      std::vector<double> out;
      out.push_back(carleson_constant(traj, op1, cyl).ratio);
      out.push_back(
          hopf_oleinik_constant(traj, op1,
                                cyl.with_variant(CylinderVariant::Minus))
              .ratio);
      return out;
    };
    const std::vector<double> a = constants(p1c), af = constants(p1f);
    const std::vector<double> b = constants(q1c), bf = constants(q1f);
    bool finite = true, stable = true;
    for (size_t k = 0; k < a.size(); ++k) {
      finite = finite && std::isfinite(a[k]) && a[k] > 0.0 &&
               std::isfinite(b[k]) && b[k] > 0.0;
      stable = stable && refinement_stable({a[k], af[k]}, 0.2) &&
               refinement_stable({b[k], bf[k]}, 0.2);
    }
    const QuotientBounds qc = quotient_bounds(p1c, q1c, op1, cyl);
    const QuotientBounds qf = quotient_bounds(p1f, q1f, op1, cyl);
    const bool quot = !qc.vacuous && std::isfinite(qc.global_ratio) &&
                      qc.global_ratio >= 1.0 && qc.sup_form >= 1.0 &&
                      refinement_stable({qc.global_ratio, qf.global_ratio}, 0.2);
    const double sc = carleson_constant(scaled(p1c, 3.0), op1, cyl).ratio;
    const bool invariant = std::abs(sc - a[0]) <= 1e-12 * std::abs(a[0]);
    const bool ok = finite && stable && quot && invariant;
    line(5, "Carleson / Hopf-Oleinik / quotient", ok,
         fmt("carleson %.3g->%.3g / %.3g->%.3g, hopf %.3g->%.3g / %.3g->%.3g, "
             "quotient %.3g->%.3g",
             a[0], af[0], b[0], bf[0], a[1], af[1], b[1], bf[1],
             qc.global_ratio, qf.global_ratio));
  }

  // 6. Holder quotient scan with a discontinuous negative control
  {
    const HolderScan hs = holder_quotient_alpha(p1c, q1c, op1, cyl);
    Trajectory denom, jump;
    denom.grid = &g1c;
    denom.times = {0.39};
    denom.states = {
        Field::sample(g1c, [](const Point& z) { return z[0]; }).values};
    jump = denom;
    jump.states = {Field::sample(g1c, [](const Point& z) {
                     return z[0] * (z[0] > 0.02 ? 10.0 : 1.0);
                   }).values};
    const HolderScan neg = holder_quotient_alpha(jump, denom, op1, cyl);
    const bool ok = hs.pass && hs.alpha >= 0.05 && !neg.pass;
    line(6, "Holder quotient scan", ok,
         fmt("alpha %.2f (alpha_hat %.2f), negative control %s", hs.alpha,
             hs.alpha_hat, neg.pass ? "PASSED (bad)" : "rejected"));
  }

  // 7. Monte Carlo cross-validation
  {
    const double b = 0.5, x0 = 0.3, t = 0.5;
    const std::int64_t n = 100000;
    const PathEnsemble exact = sample_model_exact(b, x0, t, n, 2026);
    const PathEnsemble em = sample_em(
        [](double x) { return 2.0 * std::max(0.0, x); },
        [b](double) { return b; }, x0, t, 1e-4, n, 2027);
    const double ks = ks_distance(exact, em);

    const KimuraOperator mop =
        make_builtin("model1d_b", {{"b", b}, {"extent", 6.0}});
    const TensorGrid mg = make_grid(mop.box, {513}, 14);
    const DensityCompareReport dc = density_compare(mop, mg, exact, t, 5e-4);

    const PathEnsemble zb = sample_model_exact(0.0, x0, t, n, 2028);
    double mc_loss = 0.0;
    for (auto f : zb.absorbed) mc_loss += f;
    mc_loss /= double(n);
    const KimuraOperator zop = make_builtin("model1d_zero", {{"extent", 6.0}});
    const TensorGrid zg = make_grid(zop.box, {513}, 16);
    Field ind = Field::zero(zg);
    for (Index k = 1; k < zg.num_nodes(); ++k) ind.values[k] = 1.0;
    const Trajectory zt =
        solve_ivp(zop, zg, ind, t, 5e-4, Scheme::CrankNicolson, 1 << 30);
    Point zx(1);
    zx[0] = x0;
    const double survive =
        Field{&zg, zt.states.back(), t}.interpolate(zx);
    const double pde_loss = 1.0 - survive;
    const bool mass_ok = std::abs(pde_loss - mc_loss) <= 0.02 * mc_loss;

    const bool ok = ks <= 0.02 && dc.max_se_units <= 3.0 && mass_ok;
    line(7, "Monte Carlo cross-validation", ok,
         fmt("KS %.4f (tol 0.02), pairing %.2f se (tol 3), mass %.4f vs %.4f",
             ks, dc.max_se_units, pde_loss, mc_loss));
  }

  // 8. singular measure behavior
  {
    const WeightedMeasure mu = WeightedMeasure::mu(op1);
    const IntegralResult div =
        integrate([](const Point&) { return 1.0; }, mu, op1.box);
    const IntegralResult conv =
        integrate([](const Point& z) { return z[0] * z[0]; }, mu, op1.box);
    const bool ok = div.status == IntegralStatus::Divergent &&
                    std::abs(div.log_slope - 1.0) <= 0.02 &&
                    conv.status == IntegralStatus::Convergent &&
                    std::abs(conv.value - 0.5) <= 1e-6;
    line(8, "singular measure", ok,
         fmt("log-slope %.4f (1 +/- 0.02), moment %.8f (0.5 +/- 1e-6)",
             div.log_slope, conv.value));
  }

  // 9. Hardy-type inequality over random Dirichlet fields
  {
    const KimuraOperator hop = make_builtin("model1d_b", {{"b", 1.0}});
    const Cutoff phi = Cutoff::outer_bump(hop.box);
    auto cmax_on = [&](int nodes) {
      const TensorGrid g = make_grid(hop.box, {nodes});
      std::mt19937_64 rng(5);
      double cmax = 0.0;
      bool sound = true;
      for (int k = 0; k < 50; ++k) {
        const HardyResult hr =
            hardy_check(hop, g, random_dirichlet_probe(hop, g, rng), phi, 0);
        sound = sound && !hr.divergent && std::isfinite(hr.fitted_c) &&
                hr.lhs <= hr.rhs_energy + hr.fitted_c * hr.rhs_l2 + 1e-12;
        cmax = std::max(cmax, hr.fitted_c);
      }
      return std::pair<double, bool>(cmax, sound);
    };
    const auto [cc, sc] = cmax_on(33);
    const auto [cf, sf] = cmax_on(49);
    const bool ok = sc && sf && refinement_stable({cc, cf}, 0.10);
    line(9, "Hardy-type inequality", ok,
         fmt("fitted C %.5g -> %.5g (10%%)", cc, cf));
  }

  // 10. Garding probe across the built-in family
  {
    bool ok = true;
    std::string detail;
    for (const std::string& fam : builtin_families()) {
      const KimuraOperator op = make_builtin(fam);
      std::vector<int> nodes;
      if (op.dim() == 1) nodes = {33};
      else if (op.dim() == 2) nodes = {17, 17};
      else nodes = {9, 9, 9};
      const TensorGrid g = make_grid(op.box, nodes);
      const GardingResult gr = garding_probe(op, g, 100, 7);
      ok = ok && gr.feasible && gr.c2 > 0.0;
      detail += fmt("%s %.2f ", fam.c_str(), gr.c2);
    }
    line(10, "Garding coercivity probe", ok, "c2: " + detail);
  }

  // 11. commutator identity on all polynomial pairs to degree 4
  {
    double worst = 0.0;
    std::mt19937_64 rng(3);
    for (const char* fam : {"model1d_zero", "model_s21"}) {
      const KimuraOperator op = make_builtin(fam);
      std::vector<Polynomial> monos;
      std::vector<int> e(op.dim(), 0);
      all_monomials(op.dim(), 4, e, 0, 0, monos);
      std::vector<Point> pts;
      for (int p = 0; p < 3; ++p) pts.push_back(random_interior(op, rng));
      for (const Polynomial& phi : monos)
        for (const Polynomial& u : monos)
          for (const Point& z : pts)
            worst = std::max(
                worst, std::abs(commutator_identity_residual(op, phi, u, z)));
    }
    line(11, "commutator identity", worst <= 1e-10,
         fmt("max residual %.3e (tol 1e-10)", worst));
  }

  // 12. energy estimate, Sobolev sup check, maximum principle
  {
    struct Bench {
      std::string family;
      std::vector<int> coarse, fine;
    };
    const std::vector<Bench> benches = {{"model1d_zero", {65}, {97}},
                                        {"model_s11", {17, 17}, {25, 25}}};
    bool ok = true;
    std::string detail;
    for (const Bench& bn : benches) {
      const KimuraOperator op = make_builtin(bn.family);
      std::vector<double> ec, sc;
      double worst_min = 0.0;
      bool zeros = true;
      for (const std::vector<int>& nodes : {bn.coarse, bn.fine}) {
        const TensorGrid g = make_grid(op.box, nodes);
        const Field u0 = default_initial_data(op, g);
        const Trajectory traj =
            solve_ivp(op, g, u0, 0.5, 5e-3, Scheme::CrankNicolson);
        ec.push_back(energy_check(traj, op, g, u0).fitted_c);
        std::vector<int> a(op.n, 0), b(op.m, 0);
        a[0] = 1;
        sc.push_back(
            sobolev_sup_check(traj, op, a, b, 0.1, 0.3, u0).fitted_c);
        worst_min = std::min(worst_min, min_over_states(traj));
        zeros = zeros && tangent_zeros_hold(op, traj, 1e-9);
      }
      const bool bench_ok = std::isfinite(ec[0]) && std::isfinite(sc[0]) &&
                            refinement_stable(ec, 0.25) &&
                            refinement_stable(sc, 0.25) &&
                            worst_min >= -1e-9 && zeros;
      ok = ok && bench_ok;
      detail += fmt("%s C_e %.3g->%.3g C_s %.3g->%.3g min %.1e  ",
                    bn.family.c_str(), ec[0], ec[1], sc[0], sc[1], worst_min);
    }
    line(12, "energy and Sobolev estimates", ok, detail);
  }

  std::printf("%s: %d of 12 criteria passed\n",
              failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              12 - failures);
  return failures;
}
