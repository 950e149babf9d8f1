#include "kimura/grid.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace kimura {

void TensorGrid::check_valid() const {
  if (static_cast<int>(axes.size()) != n + m)
    throw ContractError("TensorGrid: axis count mismatch");
  for (int k = 0; k < dim(); ++k) {
    const Vector& ax = axes[k];
    if (ax.size() < 2) throw ContractError("TensorGrid: axis too short");
    for (Index i = 1; i < ax.size(); ++i)
      if (ax[i] <= ax[i - 1])
        throw ContractError("TensorGrid: nodes not strictly increasing");
    if (k < n && ax[0] != 0.0)
      throw ContractError("TensorGrid: first x-node must be exactly 0");
  }
}

Vector graded_axis(double extent, int num_nodes, int layers, double ratio) {
  if (num_nodes < 3) throw ContractError("graded_axis: too few nodes");
  // segment breakpoints: 0, R*ratio^layers, ..., R*ratio, R
  std::vector<double> brk{0.0};
  for (int k = layers; k >= 1; --k) brk.push_back(extent * std::pow(ratio, k));
  brk.push_back(extent);
  const int nseg = static_cast<int>(brk.size()) - 1;
  const int intervals = num_nodes - 1;
  std::vector<int> per(nseg, intervals / nseg);
  int rem = intervals - (intervals / nseg) * nseg;
  for (int k = nseg - 1; rem > 0; --k, --rem) per[k] += 1;  // extra in coarse part
  for (int k = 0; k < nseg; ++k)
    if (per[k] < 1) per[k] = 1;

  std::vector<double> nodes{0.0};
  for (int k = 0; k < nseg; ++k)
    for (int j = 1; j <= per[k]; ++j)
      nodes.push_back(brk[k] + (brk[k + 1] - brk[k]) * j / per[k]);
  Vector v(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) v[i] = nodes[i];
  return v;
}

Vector uniform_axis(double lo, double hi, int num_nodes) {
  Vector v(num_nodes);
  for (int i = 0; i < num_nodes; ++i)
    v[i] = lo + (hi - lo) * i / (num_nodes - 1);
  return v;
}

TensorGrid make_grid(const CornerBox& box, const std::vector<int>& nodes_per_axis,
                     int layers, double ratio) {
  if (static_cast<int>(nodes_per_axis.size()) != box.dim())
    throw ContractError("make_grid: nodes_per_axis length mismatch");
  TensorGrid g;
  g.n = box.n;
  g.m = box.m;
  for (int i = 0; i < box.n; ++i)
    g.axes.push_back(graded_axis(box.x_extent[i], nodes_per_axis[i], layers, ratio));
  for (int l = 0; l < box.m; ++l)
    g.axes.push_back(uniform_axis(box.y_center[l] - box.y_radius,
                                  box.y_center[l] + box.y_radius,
                                  nodes_per_axis[box.n + l]));
  g.check_valid();
  return g;
}

double Field::interpolate(const Point& z) const {
  const TensorGrid& g = *grid;
  const int dim = g.dim();
  std::vector<Index> lo(dim);
  std::vector<double> t(dim);
  for (int k = 0; k < dim; ++k) {
    const Vector& ax = g.axes[k];
    Index i = 0;
    while (i + 2 < ax.size() && ax[i + 1] <= z[k]) ++i;
    lo[k] = i;
    t[k] = (z[k] - ax[i]) / (ax[i + 1] - ax[i]);
    t[k] = std::min(1.0, std::max(0.0, t[k]));
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << dim); ++corner) {
    double w = 1.0;
    std::vector<Index> idx(dim);
    for (int k = 0; k < dim; ++k) {
      const bool hi = corner & (1 << k);
      idx[k] = lo[k] + (hi ? 1 : 0);
      w *= hi ? t[k] : 1.0 - t[k];
    }
    acc += w * values[g.flat(idx)];
  }
  return acc;
}

namespace {
constexpr char kMagic[8] = {'K', 'I', 'M', 'S', 'N', 'P', '0', '1'};
}

void save_snapshot(const std::string& path, const TensorGrid& grid,
                   const Vector& values, double time,
                   const std::string& sidecar_json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("save_snapshot: cannot open " + path);
  out.write(kMagic, 8);
  const int32_t n = grid.n, m = grid.m;
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&m), 4);
  out.write(reinterpret_cast<const char*>(&time), 8);
  for (const auto& ax : grid.axes) {
    const int64_t sz = ax.size();
    out.write(reinterpret_cast<const char*>(&sz), 8);
    out.write(reinterpret_cast<const char*>(ax.data()), 8 * sz);
  }
  const int64_t nv = values.size();
  out.write(reinterpret_cast<const char*>(&nv), 8);
  out.write(reinterpret_cast<const char*>(values.data()), 8 * nv);
  std::ofstream side(path + ".json");
  side << sidecar_json;
}

Snapshot load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("load_snapshot: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0)
    throw ContractError("load_snapshot: bad magic");
  Snapshot s;
  int32_t n, m;
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&m), 4);
  in.read(reinterpret_cast<char*>(&s.time), 8);
  s.grid.n = n;
  s.grid.m = m;
  for (int k = 0; k < n + m; ++k) {
    int64_t sz;
    in.read(reinterpret_cast<char*>(&sz), 8);
    Vector ax(sz);
    in.read(reinterpret_cast<char*>(ax.data()), 8 * sz);
    s.grid.axes.push_back(std::move(ax));
  }
  int64_t nv;
  in.read(reinterpret_cast<char*>(&nv), 8);
  s.values.resize(nv);
  in.read(reinterpret_cast<char*>(s.values.data()), 8 * nv);
  std::ifstream side(path + ".json");
  s.sidecar_json.assign(std::istreambuf_iterator<char>(side), {});
  return s;
}

}  // namespace kimura
