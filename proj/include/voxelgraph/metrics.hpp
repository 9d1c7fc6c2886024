#pragma once

#include <optional>
#include <span>
#include <vector>

#include "voxelgraph/volume.hpp"

namespace voxelgraph {

/// 2|P ∩ G| / (|P| + |G|); 1.0 when both masks are empty.
double dice(const Mask3& pred, const Mask3& gt);

struct SurfaceDistances {
  std::vector<double> a_to_b;  // one entry per surface voxel of a, in order
  std::vector<double> b_to_a;
};

/// Euclidean distance (in the units of `spacing`) from every surface voxel
/// of each mask to the nearest surface voxel of the other, using voxel
/// centers. Throws Errc::metric_undefined when either mask is empty.
SurfaceDistances surface_distances(const Mask3& a, const Mask3& b,
                                   const Spacing& spacing);

/// Linear interpolation between closest ranks: with values sorted, the
/// result is v[lo] + (pos - lo) * (v[lo + 1] - v[lo]) where
/// pos = q * (n - 1) and lo = floor(pos). q in [0, 1]; values nonempty.
double percentile(std::vector<double> values, double q);

/// max of the two directed 95th percentiles.
double hd95(const Mask3& pred, const Mask3& gt, const Spacing& spacing);

/// (Σ d(pred→gt) + Σ d(gt→pred)) / (|S_pred| + |S_gt|).
double assd(const Mask3& pred, const Mask3& gt, const Spacing& spacing);

struct MetricsReport {
  double dice = 0.0;
  std::optional<double> hd95;  // empty when either mask is empty
  std::optional<double> assd;
  std::size_t surface_pred = 0;
  std::size_t surface_gt = 0;
  Spacing spacing;
};

MetricsReport evaluate(const Mask3& pred, const Mask3& gt,
                       const Spacing& spacing);

}  // namespace voxelgraph
