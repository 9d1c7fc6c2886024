#include "voxelgraph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "voxelgraph/morphology.hpp"
#include "voxelgraph/parallel.hpp"

namespace voxelgraph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One pass of the Felzenszwalb-Huttenlocher lower-envelope transform along
// a line of n samples spaced `s` apart:
//   out[p] = min_q (s (p - q))^2 + f[q]
// Infinite samples are skipped; an all-infinite line stays infinite.
void edt_line(const double* f, double* out, std::size_t n, double s,
              std::vector<std::size_t>& v, std::vector<double>& z) {
  v.resize(n);
  z.resize(n + 1);
  std::ptrdiff_t k = -1;
  const auto key = [&](std::size_t q) {
    const double x = s * static_cast<double>(q);
    return f[q] + x * x;
  };
  for (std::size_t q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double cross;
    while (true) {
      const std::size_t r = v[static_cast<std::size_t>(k)];
      cross = (key(q) - key(r)) / (2.0 * s * static_cast<double>(q - r));
      if (cross > z[static_cast<std::size_t>(k)]) break;
      --k;  // z[0] = -inf keeps k >= 0
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = cross;
    z[static_cast<std::size_t>(k) + 1] = kInf;
  }
  if (k < 0) {
    std::fill(out, out + n, kInf);
    return;
  }
  std::size_t j = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const double x = s * static_cast<double>(p);
    while (z[j + 1] < x) ++j;
    const double d = s * (static_cast<double>(p) - static_cast<double>(v[j]));
    out[p] = d * d + f[v[j]];
  }
}

// Squared Euclidean distance from every voxel to the nearest site.
std::vector<double> squared_distance_field(const Dims& dims,
                                           std::span<const Coord> sites,
                                           const Spacing& spacing) {
  const auto nz = static_cast<std::size_t>(dims.nz);
  const auto ny = static_cast<std::size_t>(dims.ny);
  const auto nx = static_cast<std::size_t>(dims.nx);
  std::vector<double> field(nz * ny * nx, kInf);
  for (const Coord& c : sites) {
    field[(static_cast<std::size_t>(c.z) * ny + static_cast<std::size_t>(c.y)) * nx +
          static_cast<std::size_t>(c.x)] = 0.0;
  }

  // Runs the 1D transform over every line along one axis.
  const auto pass = [&](std::size_t lines, std::size_t len, std::size_t stride,
                        double s, auto line_start) {
    parallel_for(lines, [&](std::size_t begin, std::size_t end) {
      std::vector<double> in(len), out(len), z;
      std::vector<std::size_t> v;
      for (std::size_t l = begin; l < end; ++l) {
        const std::size_t base = line_start(l);
        for (std::size_t i = 0; i < len; ++i) in[i] = field[base + i * stride];
        edt_line(in.data(), out.data(), len, s, v, z);
        for (std::size_t i = 0; i < len; ++i) field[base + i * stride] = out[i];
      }
    });
  };
  pass(nz * ny, nx, 1, spacing.sx, [&](std::size_t l) { return l * nx; });
  pass(nz * nx, ny, nx, spacing.sy, [&](std::size_t l) {
    return (l / nx) * ny * nx + (l % nx);
  });
  pass(ny * nx, nz, ny * nx, spacing.sz, [&](std::size_t l) { return l; });
  return field;
}

std::vector<double> directed(const std::vector<Coord>& from,
                             const std::vector<Coord>& to, const Dims& dims,
                             const Spacing& spacing) {
  const std::vector<double> field = squared_distance_field(dims, to, spacing);
  std::vector<double> out(from.size());
  const auto ny = static_cast<std::size_t>(dims.ny);
  const auto nx = static_cast<std::size_t>(dims.nx);
  for (std::size_t i = 0; i < from.size(); ++i) {
    const Coord& c = from[i];
    out[i] = std::sqrt(field[(static_cast<std::size_t>(c.z) * ny +
                              static_cast<std::size_t>(c.y)) * nx +
                             static_cast<std::size_t>(c.x)]);
  }
  return out;
}

double hd95_of(const SurfaceDistances& d) {
  return std::max(percentile(d.a_to_b, 0.95), percentile(d.b_to_a, 0.95));
}

double assd_of(const SurfaceDistances& d) {
  double forward = 0.0, backward = 0.0;
  for (double v : d.a_to_b) forward += v;
  for (double v : d.b_to_a) backward += v;
  return (forward + backward) /
         static_cast<double>(d.a_to_b.size() + d.b_to_a.size());
}

}  // namespace

double dice(const Mask3& pred, const Mask3& gt) {
  require_same_dims(pred.dims(), gt.dims(), "dice");
  std::size_t inter = 0, np = 0, ng = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    np += pred[i];
    ng += gt[i];
    inter += pred[i] & gt[i];
  }
  if (np + ng == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(np + ng);
}

SurfaceDistances surface_distances(const Mask3& a, const Mask3& b,
                                   const Spacing& spacing) {
  require_same_dims(a.dims(), b.dims(), "surface_distances");
  validate_spacing(spacing);
  const std::vector<Coord> sa = surface_voxels(a);
  const std::vector<Coord> sb = surface_voxels(b);
  if (sa.empty() || sb.empty()) {
    throw Error(Errc::metric_undefined,
                "surface distance is undefined for an empty mask");
  }
  return {directed(sa, sb, a.dims(), spacing), directed(sb, sa, a.dims(), spacing)};
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(Errc::input, "percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double hd95(const Mask3& pred, const Mask3& gt, const Spacing& spacing) {
  return hd95_of(surface_distances(pred, gt, spacing));
}

double assd(const Mask3& pred, const Mask3& gt, const Spacing& spacing) {
  return assd_of(surface_distances(pred, gt, spacing));
}

MetricsReport evaluate(const Mask3& pred, const Mask3& gt,
                       const Spacing& spacing) {
  MetricsReport r;
  r.dice = dice(pred, gt);
  r.spacing = spacing;
  r.surface_pred = surface_voxels(pred).size();
  r.surface_gt = surface_voxels(gt).size();
  if (r.surface_pred > 0 && r.surface_gt > 0) {
    const SurfaceDistances d = surface_distances(pred, gt, spacing);
    r.hd95 = hd95_of(d);
    r.assd = assd_of(d);
  }
  return r;
}

}  // namespace voxelgraph
