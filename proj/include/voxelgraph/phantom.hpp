#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "voxelgraph/volume.hpp"

namespace voxelgraph {

struct Lesion {
  Coord center;
  std::array<double, 3> radii{4.0, 4.0, 4.0};  // ellipsoid semi-axes (z, y, x), voxels
  double pet_intensity = 6.0;                   // mean uptake inside the lesion
};

/// Over-segmented region: the CNN is unsure about it (probability inside
/// the uncertain band) but it is not tumor.
struct FalsePositive {
  Coord center;
  std::array<double, 3> radii{3.0, 3.0, 3.0};
  double prob_level = 0.65;    // inside (max(beta, p_lo), p_hi)
  double pet_intensity = 1.0;  // background-like by default
};

struct BackgroundStats {
  double pet_mean = 1.0;
  double pet_sd = 0.3;
  double ct_mean = 40.0;
  double ct_sd = 15.0;
};

struct PhantomSpec {
  Dims dims{64, 64, 64};
  Spacing spacing{2.0, 2.0, 2.0};
  std::vector<Lesion> lesions;
  std::vector<FalsePositive> false_positives;
  BackgroundStats background;
  double noise_sd = 0.02;         // probability-map noise
  int blur_radius = 1;            // PET box blur half-width, voxels
  std::uint64_t seed = 0;
  double alpha = 0.8;             // band the probabilities are clamped against
  double beta = 0.5;
  double lesion_prob = 0.95;
  double background_prob = 0.02;
  double ct_lesion_offset = 30.0;
};

/// Throws Errc::config naming the offending field or list entry.
void validate(const PhantomSpec& spec);

struct Phantom {
  Volume3 ct;
  Volume3 pet;
  Mask3 gt;              // union of lesion ellipsoids
  Volume3 prob;
  Mask3 false_positive;  // false-positive ellipsoids minus gt
};

/// Deterministic given the spec: per-voxel noise is keyed on the voxel
/// index, so results do not depend on evaluation order.
///  - pet: region mean (lesion / false positive / background) plus Gaussian
///    noise, then a separable box blur;
///  - ct: background noise plus ct_lesion_offset inside lesions;
///  - prob: lesion_prob above the uncertain band inside lesions, prob_level
///    inside false positives, background_prob below the band elsewhere,
///    each with noise and clamped to stay on its side of the band.
Phantom generate_phantom(const PhantomSpec& spec);

}  // namespace voxelgraph
