#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "voxelgraph/volume.hpp"

namespace voxelgraph {

enum class Connectivity { face6, full26 };

std::string to_string(Connectivity c);
/// Accepts "face6" or "full26"; throws Errc::config otherwise.
Connectivity connectivity_from_string(std::string_view s);

/// Neighbor offsets (dz, dy, dx) for the given connectivity.
std::span<const Coord> neighbor_offsets(Connectivity c);

struct StructuringElement {
  Connectivity connectivity = Connectivity::face6;
  int radius = 2;  // number of one-step dilations, >= 1
};

/// Morphological dilation: `radius` iterations of the one-step dilation by
/// the element's neighborhood. Throws Errc::config for radius < 1.
Mask3 dilate(const Mask3& mask, const StructuringElement& se);

struct ComponentLabels {
  Grid<std::int32_t> labels;  // 0 = background, components numbered from 1
  std::int32_t count = 0;
};

/// Connected-component labeling. Components are numbered in ascending
/// order of their smallest linear index, so labels are reproducible.
ComponentLabels connected_components(const Mask3& mask, Connectivity c);

/// Foreground voxels with at least one face neighbor that is background or
/// outside the volume, in ascending linear-index order.
std::vector<Coord> surface_voxels(const Mask3& mask);

}  // namespace voxelgraph
