#pragma once

// Slow, direct reference implementations used to check the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "voxelgraph/gcn.hpp"
#include "voxelgraph/rng.hpp"
#include "voxelgraph/uncertainty.hpp"
#include "voxelgraph/volume.hpp"

namespace oracle {

using namespace voxelgraph;

inline double entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p) / std::log(2.0);
  if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p) / std::log(2.0);
  return h;
}

// Root of entropy(p) = alpha on [lo, hi], where entropy(lo) - alpha and
// entropy(hi) - alpha have opposite signs.
inline double bisect_root(double alpha, double lo, double hi) {
  const double f_lo = entropy(lo) - alpha;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if ((entropy(mid) - alpha > 0.0) == (f_lo > 0.0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct Band {
  double lo, hi;
};

inline Band band(double alpha) { return {bisect_root(alpha, 0.0, 0.5), bisect_root(alpha, 0.5, 1.0)}; }

// Per-voxel role by exhaustive search of the dilation neighborhood.
// Returns -1 for non-nodes, otherwise the Role value.
inline std::vector<int> roles(const Volume3& prob, double alpha, double beta,
                              Connectivity conn, int radius) {
  const Band b = band(alpha);
  const Dims d = prob.dims();
  const std::size_t n = prob.size();
  std::vector<char> e(n), u(n);
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = prob[i] > beta;
    u[i] = prob[i] > b.lo && prob[i] < b.hi;
  }
  std::vector<int> out(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i]) {
      out[i] = static_cast<int>(Role::test);
      continue;
    }
    if (e[i]) {
      out[i] = static_cast<int>(Role::train_positive);
      continue;
    }
    const Coord c = prob.coord(i);
    bool near = false;
    for (std::int64_t dz = -radius; dz <= radius && !near; ++dz) {
      for (std::int64_t dy = -radius; dy <= radius && !near; ++dy) {
        for (std::int64_t dx = -radius; dx <= radius && !near; ++dx) {
          const std::int64_t reach =
              conn == Connectivity::face6
                  ? std::abs(dz) + std::abs(dy) + std::abs(dx)
                  : std::max({std::abs(dz), std::abs(dy), std::abs(dx)});
          if (reach > radius) continue;
          const Coord q{c.z + dz, c.y + dy, c.x + dx};
          if (q.z < 0 || q.y < 0 || q.x < 0 || q.z >= d.nz || q.y >= d.ny || q.x >= d.nx) {
            continue;
          }
          const std::size_t j = prob.index(q);
          near = e[j] || u[j];
        }
      }
    }
    if (near) out[i] = static_cast<int>(Role::train_negative);
  }
  return out;
}

using Dense = std::vector<std::vector<double>>;

// D^-1/2 (A + I) D^-1/2 from an undirected edge list.
inline Dense normalized_adjacency(const std::vector<std::pair<int, int>>& edges, int n) {
  Dense a(n, std::vector<double>(n, 0.0));
  for (auto [u, v] : edges) {
    a[u][v] = 1.0;
    a[v][u] = 1.0;
  }
  for (int i = 0; i < n; ++i) a[i][i] = 1.0;
  std::vector<double> deg(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) deg[i] += a[i][j];
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i][j] /= std::sqrt(deg[i]) * std::sqrt(deg[j]);
  }
  return a;
}

inline Dense multiply(const Dense& a, const Dense& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  Dense c(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < k; ++t) {
      for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][t] * b[t][j];
    }
  }
  return c;
}

inline Dense to_dense(const DenseMatrix& m) {
  Dense d(m.rows, std::vector<double>(m.cols));
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) d[i][j] = m(i, j);
  }
  return d;
}

// Regularized weighted BCE of the two-layer GCN, evaluated densely.
inline double gcn_loss(const Dense& norm, const Dense& x, const Dense& w0,
                       const Dense& w1, const std::vector<Role>& roles,
                       double pos_weight, double lambda) {
  Dense h = multiply(multiply(norm, x), w0);
  for (auto& row : h) {
    for (double& v : row) v = std::max(v, 0.0);
  }
  const Dense z = multiply(norm, multiply(h, w1));
  double sum = 0.0;
  int m = 0;
  for (std::size_t i = 0; i < roles.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-z[i][0]));
    if (roles[i] == Role::train_positive) {
      sum -= pos_weight * std::log(p);
      ++m;
    } else if (roles[i] == Role::train_negative) {
      sum -= std::log(1.0 - p);
      ++m;
    }
  }
  double reg = 0.0;
  for (const auto& row : w0) {
    for (double v : row) reg += v * v;
  }
  for (const auto& row : w1) {
    for (double v : row) reg += v * v;
  }
  return sum / m + lambda * reg;
}

// Voxels with a face neighbor outside the mask or outside the volume.
inline std::vector<Coord> surface(const Mask3& m) {
  const Dims d = m.dims();
  std::vector<Coord> out;
  for (std::int64_t z = 0; z < d.nz; ++z) {
    for (std::int64_t y = 0; y < d.ny; ++y) {
      for (std::int64_t x = 0; x < d.nx; ++x) {
        if (!m.test(m.index({z, y, x}))) continue;
        const Coord nb[6] = {{z - 1, y, x}, {z + 1, y, x}, {z, y - 1, x},
                             {z, y + 1, x}, {z, y, x - 1}, {z, y, x + 1}};
        bool edge = false;
        for (const Coord& q : nb) {
          if (q.z < 0 || q.y < 0 || q.x < 0 || q.z >= d.nz || q.y >= d.ny || q.x >= d.nx ||
              !m.test(m.index(q))) {
            edge = true;
          }
        }
        if (edge) out.push_back({z, y, x});
      }
    }
  }
  return out;
}

inline std::vector<double> directed(const std::vector<Coord>& from,
                                    const std::vector<Coord>& to, const Spacing& s) {
  std::vector<double> out;
  for (const Coord& a : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const Coord& b : to) {
      const double dz = s.sz * static_cast<double>(a.z - b.z);
      const double dy = s.sy * static_cast<double>(a.y - b.y);
      const double dx = s.sx * static_cast<double>(a.x - b.x);
      best = std::min(best, dz * dz + dy * dy + dx * dx);
    }
    out.push_back(std::sqrt(best));
  }
  return out;
}

// Linear-interpolation percentile, q in [0, 1].
inline double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const double f = std::floor(h);
  const auto i = static_cast<std::size_t>(f);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (h - f) * (v[i + 1] - v[i]);
}

inline double dice(const Mask3& a, const Mask3& b) {
  double inter = 0, sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a.test(i) && b.test(i);
    sa += a.test(i);
    sb += b.test(i);
  }
  return sa + sb == 0 ? 1.0 : 2.0 * inter / (sa + sb);
}

}  // namespace oracle
