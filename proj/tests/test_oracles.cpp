#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "kimura/builtin.hpp"
#include "kimura/oracles.hpp"

using namespace kimura;

TEST_CASE("eigen-solution closed form") {
  for (double x : {0.0, 0.25, 0.5, 1.0})
    CHECK(exact_eigen_solution(0.0, x) == doctest::Approx(x * (1.0 - x)));
  CHECK(exact_eigen_solution(0.5, 0.5) ==
        doctest::Approx(0.091970).epsilon(1e-4));
  for (double t : {0.1, 2.0}) {
    CHECK(exact_eigen_solution(t, 0.0) == 0.0);
    CHECK(exact_eigen_solution(t, 1.0) == 0.0);
  }
  CHECK_THROWS_AS(exact_eigen_solution(-1.0, 0.5), DomainError);
  CHECK_THROWS_AS(exact_eigen_solution(0.5, 2.0), DomainError);
}

TEST_CASE("exact sampler: degenerate and moment identities") {
  CHECK_THROWS_AS(sample_model_exact(-0.1, 0.5, 1.0, 10, 1), DomainError);

  // absorbing start: every path dead at 0
  const PathEnsemble dead = sample_model_exact(0.0, 0.0, 1.0, 1000, 2);
  for (std::int64_t k = 0; k < dead.n_paths; ++k) {
    CHECK(dead.terminal[k] == 0.0);
    CHECK(dead.absorbed[k] == 1);
  }

  // generator moments: E X = x0 + bt, Var X = 2 x0 t + b t^2
  const double b = 0.5, x0 = 0.3, t = 0.5;
  const std::int64_t n = 40000;
  const PathEnsemble e = sample_model_exact(b, x0, t, n, 3);
  const double mean = e.terminal.mean();
  const double var =
      (e.terminal.array() - mean).square().sum() / double(n - 1);
  const double se_mean = std::sqrt(var / n);
  CHECK(std::abs(mean - (x0 + b * t)) <= 3.0 * se_mean);
  const double expected_var = 2.0 * x0 * t + b * t * t;
  CHECK(var == doctest::Approx(expected_var).epsilon(0.1));

  // absorbed mass for b = 0 equals exp(-x0/t)
  const PathEnsemble z = sample_model_exact(0.0, x0, t, n, 4);
  double frac = 0.0;
  for (auto f : z.absorbed) frac += f;
  frac /= double(n);
  const double p = std::exp(-x0 / t);
  CHECK(std::abs(frac - p) <= 3.0 * std::sqrt(p * (1.0 - p) / n));
}

TEST_CASE("seed determinism and shard independence from thread count") {
  const PathEnsemble a = sample_model_exact(0.5, 0.3, 0.5, 5000, 77);
  set_thread_count(1);
  const PathEnsemble b = sample_model_exact(0.5, 0.3, 0.5, 5000, 77);
  set_thread_count(8);
  for (std::int64_t k = 0; k < a.n_paths; ++k)
    CHECK(a.terminal[k] == b.terminal[k]);
  const PathEnsemble c = sample_model_exact(0.5, 0.3, 0.5, 5000, 78);
  CHECK((a.terminal - c.terminal).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("euler-maruyama: deterministic drift and contracts") {
  CHECK_THROWS_AS(sample_em([](double) { return 0.0; },
                            [](double) { return 1.0; }, 0.1, 1.0, 0.0, 10, 1),
                  ContractError);
  const PathEnsemble e =
      sample_em([](double) { return 0.0; }, [](double) { return 2.0; }, 0.5,
                1.0, 1e-3, 100, 1);
  for (std::int64_t k = 0; k < e.n_paths; ++k)
    CHECK(e.terminal[k] == doctest::Approx(2.5).epsilon(1e-10));
}

TEST_CASE("euler-maruyama agrees with the exact law") {
  const double b = 0.5, x0 = 0.3, t = 0.5;
  const std::int64_t n = 20000;
  const PathEnsemble exact = sample_model_exact(b, x0, t, n, 10);
  auto em_at = [&](double dt, std::uint64_t seed) {
    return sample_em([](double x) { return 2.0 * std::max(0.0, x); },
                     [b](double) { return b; }, x0, t, dt, n, seed);
  };
  const double ks_fine = ks_distance(exact, em_at(1e-3, 11));
  CHECK(ks_fine <= 0.05);
  // distributional agreement improves as dt decreases
  const double ks_coarse = ks_distance(exact, em_at(5e-2, 12));
  CHECK(ks_fine < ks_coarse);
}

TEST_CASE("absorption bookkeeping in the euler-maruyama sampler") {
  const PathEnsemble e =
      sample_em([](double x) { return 2.0 * std::max(0.0, x); },
                [](double) { return 0.0; }, 0.3, 0.5, 1e-3, 5000, 21);
  int dead = 0;
  for (std::int64_t k = 0; k < e.n_paths; ++k)
    if (e.absorbed[k]) {
      ++dead;
      CHECK(e.terminal[k] == 0.0);
      CHECK(e.absorption_time[k] >= 0.0);
    }
  CHECK(dead > 0);
  CHECK(dead < e.n_paths);
}

TEST_CASE("expectation pairing against the solver") {
  const double b = 0.5, x0 = 0.3, t = 0.5;
  const KimuraOperator op = make_builtin("model1d_b", {{"b", b}, {"extent", 6.0}});
  const TensorGrid g = make_grid(op.box, {129});
  const PathEnsemble ens = sample_model_exact(b, x0, t, 20000, 31);
  const DensityCompareReport rep = density_compare(op, g, ens, t, 2e-3);
  CHECK(rep.mc_values.size() == 20);
  CHECK(rep.max_se_units <= 5.0);
  CHECK(rep.l1_binned < 0.1);
  CHECK_THROWS_AS(density_compare(op, g, ens, t + 0.1, 2e-3), ContractError);
}

TEST_CASE("ensemble persistence round trip") {
  const PathEnsemble e = sample_model_exact(0.0, 0.3, 0.5, 2000, 41);
  const auto path =
      (std::filesystem::temp_directory_path() / "kimura_test.ens").string();
  save_ensemble(path, e);
  const PathEnsemble r = load_ensemble(path);
  CHECK(r.n_paths == e.n_paths);
  CHECK(r.seed == e.seed);
  CHECK(r.t == e.t);
  CHECK(r.x0 == e.x0);
  for (std::int64_t k = 0; k < e.n_paths; ++k) {
    CHECK(r.terminal[k] == e.terminal[k]);
    CHECK(r.absorbed[k] == e.absorbed[k]);
  }
  CHECK(std::filesystem::exists(path + ".json"));
}
