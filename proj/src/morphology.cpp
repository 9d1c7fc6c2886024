#include "voxelgraph/morphology.hpp"

#include <array>

namespace voxelgraph {

namespace {

constexpr std::array<Coord, 6> kFace6 = {{
    {-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1},
}};

constexpr std::array<Coord, 26> make_full26() {
  std::array<Coord, 26> out{};
  std::size_t k = 0;
  for (std::int64_t dz = -1; dz <= 1; ++dz) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        if (dz == 0 && dy == 0 && dx == 0) continue;
        out[k++] = {dz, dy, dx};
      }
    }
  }
  return out;
}

constexpr std::array<Coord, 26> kFull26 = make_full26();

Mask3 dilate_once(const Mask3& in, std::span<const Coord> offsets) {
  const Dims& d = in.dims();
  Mask3 out = in;
  for (std::int64_t z = 0; z < d.nz; ++z) {
    for (std::int64_t y = 0; y < d.ny; ++y) {
      for (std::int64_t x = 0; x < d.nx; ++x) {
        if (!in.test(in.index(z, y, x))) continue;
        for (const Coord& o : offsets) {
          const std::int64_t zz = z + o.z, yy = y + o.y, xx = x + o.x;
          if (in.contains(zz, yy, xx)) out.set(in.index(zz, yy, xx), true);
        }
      }
    }
  }
  return out;
}

}  // namespace

std::string to_string(Connectivity c) {
  return c == Connectivity::face6 ? "face6" : "full26";
}

Connectivity connectivity_from_string(std::string_view s) {
  if (s == "face6") return Connectivity::face6;
  if (s == "full26") return Connectivity::full26;
  throw Error(Errc::config, "unknown connectivity \"" + std::string(s) +
                                "\" (expected face6 or full26)");
}

std::span<const Coord> neighbor_offsets(Connectivity c) {
  if (c == Connectivity::face6) return kFace6;
  return kFull26;
}

Mask3 dilate(const Mask3& mask, const StructuringElement& se) {
  if (se.radius < 1) {
    throw Error(Errc::config, "structuring element radius must be >= 1, got " +
                                  std::to_string(se.radius));
  }
  Mask3 out = mask;
  for (int r = 0; r < se.radius; ++r) {
    out = dilate_once(out, neighbor_offsets(se.connectivity));
  }
  return out;
}

ComponentLabels connected_components(const Mask3& mask, Connectivity c) {
  ComponentLabels result{Grid<std::int32_t>(mask.dims(), mask.spacing(), 0), 0};
  std::vector<std::int32_t> labels(mask.size(), 0);
  const auto offsets = neighbor_offsets(c);
  std::vector<std::size_t> stack;

  // Scanning in linear order and flooding from the first unlabeled voxel
  // numbers components by their smallest linear index.
  for (std::size_t seed = 0; seed < mask.size(); ++seed) {
    if (!mask.test(seed) || labels[seed] != 0) continue;
    const std::int32_t id = ++result.count;
    labels[seed] = id;
    stack.push_back(seed);
    while (!stack.empty()) {
      const Coord p = mask.coord(stack.back());
      stack.pop_back();
      for (const Coord& o : offsets) {
        const std::int64_t z = p.z + o.z, y = p.y + o.y, x = p.x + o.x;
        if (!mask.contains(z, y, x)) continue;
        const std::size_t j = mask.index(z, y, x);
        if (mask.test(j) && labels[j] == 0) {
          labels[j] = id;
          stack.push_back(j);
        }
      }
    }
  }
  result.labels = Grid<std::int32_t>(mask.dims(), mask.spacing(), std::move(labels));
  return result;
}

std::vector<Coord> surface_voxels(const Mask3& mask) {
  std::vector<Coord> out;
  const Dims& d = mask.dims();
  for (std::int64_t z = 0; z < d.nz; ++z) {
    for (std::int64_t y = 0; y < d.ny; ++y) {
      for (std::int64_t x = 0; x < d.nx; ++x) {
        if (!mask.test(mask.index(z, y, x))) continue;
        for (const Coord& o : kFace6) {
          const std::int64_t zz = z + o.z, yy = y + o.y, xx = x + o.x;
          if (!mask.contains(zz, yy, xx) || !mask.test(mask.index(zz, yy, xx))) {
            out.push_back({z, y, x});
            break;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace voxelgraph
