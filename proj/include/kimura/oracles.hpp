#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kimura/grid.hpp"
#include "kimura/operator.hpp"
#include "kimura/solver.hpp"
#include "kimura/types.hpp"

namespace kimura {

// Worker count for path sampling; defaults to KIMURA_THREADS or the hardware
// concurrency.  The shard decomposition is fixed, so results do not depend on
// this value.
void set_thread_count(int threads);
int thread_count();

// Terminal samples of a one-dimensional degenerate diffusion.
struct PathEnsemble {
  Vector terminal;
  std::vector<std::uint8_t> absorbed;  // per path
  Vector absorption_time;              // -1 when not absorbed
  double dt = 0.0;                     // 0 for the exact sampler
  double t = 0.0;
  double x0 = 0.0;
  std::int64_t n_paths = 0;
  std::uint64_t seed = 0;
};

// u(t,x) = e^{-2t} x(1-x): the principal eigen-solution of u_t = x(1-x)u_xx
// with u0 = x(1-x).
double exact_eigen_solution(double t, double x);

// Exact time-t law of the diffusion generated by x d^2/dx^2 + b d/dx via the
// squared-Bessel reduction (dimension 2b, clock t/2): with N ~ Poisson(x0/t)
// and G ~ Gamma(b + N, 1), X_t = t G; absorbed at 0 iff b = 0 and N = 0.
PathEnsemble sample_model_exact(double b, double x0, double t,
                                std::int64_t n_paths, std::uint64_t seed);

// Euler-Maruyama fallback for dX = drift(X)dt + sqrt(2 X abar(X)) dW with
// absorption at the first nonpositive step when drift(0) = 0, reflection
// otherwise.
PathEnsemble sample_em(const std::function<double(double)>& sigma2,
                       const std::function<double(double)>& drift, double x0,
                       double t, double dt, std::int64_t n_paths,
                       std::uint64_t seed);

// Two-sample Kolmogorov-Smirnov distance between terminal laws.
double ks_distance(const PathEnsemble& a, const PathEnsemble& b);

// Fixed dictionary of 20 smooth test functions on [0, extent].
std::vector<std::function<double(double)>> test_function_dictionary(
    double extent);

struct DensityCompareReport {
  double max_abs_diff = 0.0;     // over the test-function dictionary
  double max_se_units = 0.0;     // same differences in MC standard errors
  double l1_binned = 0.0;        // smoothed-indicator diagnostic
  std::vector<double> mc_values;
  std::vector<double> pde_values;
  std::vector<double> std_errors;
};

// Compares MC expectations E[phi(X_t)] against the PDE pairing u_phi(t, x0)
// where u_phi solves u_t = Lu with u0 = phi.  One 1-D solve per test function.
DensityCompareReport density_compare(const KimuraOperator& op,
                                     const TensorGrid& grid,
                                     const PathEnsemble& ensemble, double t,
                                     double dt_pde, int bins = 10);

// Columnar binary persistence with a JSON sidecar (seed, dt, counts).
void save_ensemble(const std::string& path, const PathEnsemble& ens);
PathEnsemble load_ensemble(const std::string& path);

}  // namespace kimura
