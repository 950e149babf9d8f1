#include "kimura/oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <random>
#include <thread>

#include "json.hpp"

namespace kimura {

namespace {

constexpr int kShards = 16;

int g_threads = 0;  // 0 means not yet resolved

std::uint64_t shard_seed(std::uint64_t seed, int shard) {
  return seed ^ (0x9E3779B97F4A7C15ull * (shard + 1));
}

// run fn(shard, first, last) over a fixed shard decomposition of [0, n);
// worker count only affects scheduling, never the decomposition
template <typename F>
void sharded(std::int64_t n, F&& fn) {
  const std::int64_t chunk = (n + kShards - 1) / kShards;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int s = next.fetch_add(1); s < kShards; s = next.fetch_add(1)) {
      const std::int64_t lo = s * chunk;
      const std::int64_t hi = std::min(n, lo + chunk);
      if (lo < hi) fn(s, lo, hi);
    }
  };
  const int workers = std::min(kShards, std::max(1, thread_count()));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

PathEnsemble make_ensemble(std::int64_t n, std::uint64_t seed, double t,
                           double x0, double dt) {
  PathEnsemble e;
  e.terminal = Vector::Zero(n);
  e.absorbed.assign(n, 0);
  e.absorption_time = Vector::Constant(n, -1.0);
  e.n_paths = n;
  e.seed = seed;
  e.t = t;
  e.x0 = x0;
  e.dt = dt;
  return e;
}

}  // namespace

void set_thread_count(int threads) { g_threads = std::max(1, threads); }

int thread_count() {
  if (g_threads > 0) return g_threads;
  if (const char* env = std::getenv("KIMURA_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return g_threads = v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return g_threads = hw > 0 ? static_cast<int>(hw) : 4;
}

double exact_eigen_solution(double t, double x) {
  if (t < 0.0 || x < 0.0 || x > 1.0)
    throw DomainError("exact_eigen_solution: need t >= 0, x in [0,1]");
  return std::exp(-2.0 * t) * x * (1.0 - x);
}

PathEnsemble sample_model_exact(double b, double x0, double t,
                                std::int64_t n_paths, std::uint64_t seed) {
  if (b < 0.0) throw DomainError("sample_model_exact: weight b must be >= 0");
  if (x0 < 0.0) throw DomainError("sample_model_exact: x0 must be >= 0");
  PathEnsemble e = make_ensemble(n_paths, seed, t, x0, 0.0);
  if (t == 0.0) {
    e.terminal.setConstant(x0);
    return e;
  }
  sharded(n_paths, [&](int shard, std::int64_t lo, std::int64_t hi) {
    std::mt19937_64 rng(shard_seed(seed, shard));
    std::poisson_distribution<long> pois(x0 / t);
    for (std::int64_t k = lo; k < hi; ++k) {
      const long N = x0 > 0.0 ? pois(rng) : 0;
      const double shape = b + N;
      if (shape == 0.0) {
        e.terminal[k] = 0.0;
        e.absorbed[k] = 1;
        continue;
      }
      std::gamma_distribution<double> gamma(shape, 1.0);
      e.terminal[k] = t * gamma(rng);
    }
  });
  return e;
}

PathEnsemble sample_em(const std::function<double(double)>& sigma2,
                       const std::function<double(double)>& drift, double x0,
                       double t, double dt, std::int64_t n_paths,
                       std::uint64_t seed) {
  if (dt <= 0.0) throw ContractError("sample_em: dt must be positive");
  PathEnsemble e = make_ensemble(n_paths, seed, t, x0, dt);
  const long steps = std::lround(t / dt);
  const bool absorbing = std::abs(drift(0.0)) < 1e-14;
  sharded(n_paths, [&](int shard, std::int64_t lo, std::int64_t hi) {
    std::mt19937_64 rng(shard_seed(seed, shard));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::int64_t k = lo; k < hi; ++k) {
      double x = x0;
      bool dead = absorbing && x <= 0.0;
      if (dead) {
        e.absorbed[k] = 1;
        e.absorption_time[k] = 0.0;
      }
      for (long s = 0; s < steps && !dead; ++s) {
        const double sig = std::sqrt(std::max(0.0, sigma2(x)));
        x += drift(x) * dt + sig * std::sqrt(dt) * gauss(rng);
        if (x <= 0.0) {
          if (absorbing) {
            x = 0.0;
            dead = true;
            e.absorbed[k] = 1;
            e.absorption_time[k] = (s + 1) * dt;
          } else {
            x = std::max(x, 0.0);  // reflect at the truncation
          }
        }
      }
      e.terminal[k] = dead ? 0.0 : x;
    }
  });
  return e;
}

double ks_distance(const PathEnsemble& a, const PathEnsemble& b) {
  std::vector<double> sa(a.terminal.data(), a.terminal.data() + a.n_paths);
  std::vector<double> sb(b.terminal.data(), b.terminal.data() + b.n_paths);
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double d = 0.0;
  size_t ia = 0, ib = 0;
  while (ia < sa.size() && ib < sb.size()) {
    if (sa[ia] <= sb[ib])
      ++ia;
    else
      ++ib;
    const double fa = static_cast<double>(ia) / sa.size();
    const double fb = static_cast<double>(ib) / sb.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

std::vector<std::function<double(double)>> test_function_dictionary(double) {
  using Fn = std::function<double(double)>;
  std::vector<Fn> dict;
  dict.push_back([](double) { return 1.0; });
  dict.push_back([](double x) { return std::exp(-x); });
  dict.push_back([](double x) { return std::exp(-2.0 * x); });
  dict.push_back([](double x) { return std::exp(-0.5 * x); });
  dict.push_back([](double x) { return x * std::exp(-x); });
  dict.push_back([](double x) { return x * x * std::exp(-x); });
  dict.push_back([](double x) { return x * x * x * std::exp(-2.0 * x); });
  dict.push_back([](double x) { return 1.0 / (1.0 + x); });
  dict.push_back([](double x) { return 1.0 / (1.0 + x * x); });
  dict.push_back([](double x) { return std::sin(x) * std::exp(-x); });
  dict.push_back([](double x) { return std::cos(x) * std::exp(-x); });
  dict.push_back([](double x) { return std::sin(2.0 * x) * std::exp(-x); });
  dict.push_back([](double x) { return std::exp(-x * x); });
  dict.push_back([](double x) { return x * std::exp(-x * x); });
  dict.push_back([](double x) { return std::tanh(x) * std::exp(-x); });
  dict.push_back([](double x) { return std::exp(-(x - 1.0) * (x - 1.0)); });
  dict.push_back(
      [](double x) { return std::exp(-4.0 * (x - 0.5) * (x - 0.5)); });
  dict.push_back([](double x) { return x / (1.0 + x * x); });
  dict.push_back([](double x) { return std::log1p(x) * std::exp(-x); });
  dict.push_back([](double x) { return (1.0 - std::exp(-x)) * std::exp(-x); });
  return dict;
}

DensityCompareReport density_compare(const KimuraOperator& op,
                                     const TensorGrid& grid,
                                     const PathEnsemble& ensemble, double t,
                                     double dt_pde, int bins) {
  if (op.n != 1 || op.m != 0)
    throw ContractError("density_compare: one-dimensional model only");
  if (std::abs(ensemble.t - t) > 1e-12)
    throw ContractError("density_compare: ensemble time does not match");

  // u(t, x0) = E_{x0}[phi(X_t)], shifting by phi(0) when the origin is a
  // tangent (absorbing) face so the initial data is Dirichlet class
  auto pde_expectation = [&](const std::function<double(double)>& phi) {
    const double phi0 = op.n0 >= 1 ? phi(0.0) : 0.0;
    const Field u0 =
        Field::sample(grid, [&](const Point& z) { return phi(z[0]) - phi0; });
    const Trajectory traj = solve_ivp(op, grid, u0, t, dt_pde,
                                      Scheme::CrankNicolson, 1 << 30);
    Point probe(1);
    probe[0] = ensemble.x0;
    Field uT{&grid, traj.states.back(), t};
    return phi0 + uT.interpolate(probe);
  };
  auto mc_stats = [&](const std::function<double(double)>& phi, double* se) {
    double s = 0.0, s2 = 0.0;
    for (std::int64_t k = 0; k < ensemble.n_paths; ++k) {
      const double v = phi(ensemble.terminal[k]);
      s += v;
      s2 += v * v;
    }
    const double mean = s / ensemble.n_paths;
    const double var = std::max(0.0, s2 / ensemble.n_paths - mean * mean);
    *se = std::sqrt(var / ensemble.n_paths);
    return mean;
  };

  DensityCompareReport rep;
  for (const auto& phi : test_function_dictionary(op.box.x_extent[0])) {
    double se = 0.0;
    const double mc = mc_stats(phi, &se);
    const double pde = pde_expectation(phi);
    rep.mc_values.push_back(mc);
    rep.pde_values.push_back(pde);
    rep.std_errors.push_back(se);
    const double diff = std::abs(mc - pde);
    rep.max_abs_diff = std::max(rep.max_abs_diff, diff);
    if (se > 0.0) rep.max_se_units = std::max(rep.max_se_units, diff / se);
  }

  // smoothed-indicator diagnostic over Gaussian bumps
  const double span = std::max(1.0, ensemble.x0 + 4.0 * std::sqrt(t));
  for (int b = 0; b < bins; ++b) {
    const double c = span * (b + 0.5) / bins;
    const double w = span / bins;
    auto bump = [c, w](double x) {
      const double s = (x - c) / w;
      return std::exp(-s * s);
    };
    double se = 0.0;
    rep.l1_binned += std::abs(mc_stats(bump, &se) - pde_expectation(bump));
  }
  return rep;
}

namespace {
constexpr char kEnsMagic[8] = {'K', 'I', 'M', 'E', 'N', 'S', '0', '1'};
}

void save_ensemble(const std::string& path, const PathEnsemble& ens) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("save_ensemble: cannot open " + path);
  out.write(kEnsMagic, 8);
  out.write(reinterpret_cast<const char*>(&ens.n_paths), 8);
  out.write(reinterpret_cast<const char*>(&ens.seed), 8);
  out.write(reinterpret_cast<const char*>(&ens.dt), 8);
  out.write(reinterpret_cast<const char*>(&ens.t), 8);
  out.write(reinterpret_cast<const char*>(&ens.x0), 8);
  out.write(reinterpret_cast<const char*>(ens.terminal.data()),
            8 * ens.n_paths);
  out.write(reinterpret_cast<const char*>(ens.absorbed.data()), ens.n_paths);
  out.write(reinterpret_cast<const char*>(ens.absorption_time.data()),
            8 * ens.n_paths);
  std::int64_t n_absorbed = 0;
  for (auto f : ens.absorbed) n_absorbed += f;
  nlohmann::json side{{"paths", ens.n_paths},
                      {"absorbed", n_absorbed},
                      {"seed", ens.seed},
                      {"dt", ens.dt},
                      {"t", ens.t},
                      {"x0", ens.x0}};
  std::ofstream(path + ".json") << side.dump(2) << '\n';
}

PathEnsemble load_ensemble(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("load_ensemble: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, kEnsMagic, 8) != 0)
    throw ContractError("load_ensemble: bad magic");
  PathEnsemble e;
  in.read(reinterpret_cast<char*>(&e.n_paths), 8);
  in.read(reinterpret_cast<char*>(&e.seed), 8);
  in.read(reinterpret_cast<char*>(&e.dt), 8);
  in.read(reinterpret_cast<char*>(&e.t), 8);
  in.read(reinterpret_cast<char*>(&e.x0), 8);
  e.terminal.resize(e.n_paths);
  e.absorbed.resize(e.n_paths);
  e.absorption_time.resize(e.n_paths);
  in.read(reinterpret_cast<char*>(e.terminal.data()), 8 * e.n_paths);
  in.read(reinterpret_cast<char*>(e.absorbed.data()), e.n_paths);
  in.read(reinterpret_cast<char*>(e.absorption_time.data()), 8 * e.n_paths);
  return e;
}

}  // namespace kimura
