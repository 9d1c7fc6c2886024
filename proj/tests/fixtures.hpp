#pragma once

// Seeded inputs shared by the unit tests and the acceptance suite.

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "voxelgraph/gcn.hpp"
#include "voxelgraph/graph.hpp"
#include "voxelgraph/phantom.hpp"
#include "voxelgraph/rng.hpp"

namespace fixture {

using namespace voxelgraph;

inline Dims random_dims(SplitMix64& rng, std::int64_t max_side) {
  return {1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(max_side))),
          1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(max_side))),
          1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(max_side)))};
}

inline Spacing random_spacing(SplitMix64& rng) {
  return {0.5 + 2.5 * rng.uniform(), 0.5 + 2.5 * rng.uniform(), 0.5 + 2.5 * rng.uniform()};
}

// Probability volume mixing exact 0/1, values near beta and values spread
// over the whole interval.
inline Volume3 random_prob(SplitMix64& rng, Dims dims) {
  std::vector<double> v(static_cast<std::size_t>(dims.size()));
  for (double& p : v) {
    switch (rng.below(4)) {
      case 0: p = static_cast<double>(rng.below(2)); break;
      case 1: p = 0.02 + 0.96 * rng.uniform(); break;
      case 2: p = rng.uniform() < 0.5 ? 0.02 : 0.97; break;
      default: p = 0.5 + 0.3 * (rng.uniform() - 0.5); break;
    }
  }
  return Volume3(dims, {1.0, 1.0, 1.0}, DType::float64, std::move(v));
}

// Blobby random mask: a few random boxes, sometimes empty.
inline Mask3 random_mask(SplitMix64& rng, Dims dims, Spacing spacing) {
  Mask3 m(dims, spacing);
  const auto boxes = rng.below(4);
  for (std::uint64_t b = 0; b < boxes; ++b) {
    const auto pick = [&](std::int64_t n) {
      const auto a = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
      const auto c = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
      return std::pair{std::min(a, c), std::max(a, c)};
    };
    const auto [z0, z1] = pick(dims.nz);
    const auto [y0, y1] = pick(dims.ny);
    const auto [x0, x1] = pick(dims.nx);
    for (auto z = z0; z <= z1; ++z) {
      for (auto y = y0; y <= y1; ++y) {
        for (auto x = x0; x <= x1; ++x) m.set(m.index(z, y, x), true);
      }
    }
  }
  // Sprinkle isolated voxels so surfaces are not only box faces.
  const auto extra = rng.below(6);
  for (std::uint64_t k = 0; k < extra; ++k) m.set(rng.below(m.size()), true);
  return m;
}

// Undirected simple graph on n nodes with roughly `density` of all pairs.
inline std::vector<Edge> random_edges(SplitMix64& rng, std::size_t n, double density) {
  std::vector<Edge> edges;
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      if (rng.uniform() < density) edges.push_back({a, b, EdgeSource::neighborhood});
    }
  }
  return edges;
}

// Nodes laid out on a 1 x 1 x n strip with the given roles.
inline NodeSet strip_nodes(const std::vector<Role>& roles) {
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < roles.size(); ++i) nodes.push_back({i, roles[i]});
  return NodeSet({1, 1, static_cast<std::int64_t>(roles.size())}, std::move(nodes));
}

struct Communities {
  NodeSet nodes;
  SparseGraph graph;
  FeatureMatrix features;
  std::vector<int> community;  // 1 = positive community
};

// Two 100-node communities: dense random edges inside each, a handful of
// bridges, features whose means differ by community. Ten nodes of each
// community are labeled, the rest are test nodes.
inline Communities two_communities(std::uint64_t seed) {
  constexpr std::size_t kHalf = 100;
  constexpr std::size_t kLabeled = 10;
  SplitMix64 rng(mix64(seed ^ 0x636f6d6d756eULL));
  std::vector<Role> roles(2 * kHalf, Role::test);
  std::vector<int> community(2 * kHalf);
  for (std::size_t i = 0; i < 2 * kHalf; ++i) {
    community[i] = i < kHalf ? 0 : 1;
    if (i % kHalf < kLabeled) {
      roles[i] = community[i] == 1 ? Role::train_positive : Role::train_negative;
    }
  }

  std::vector<Edge> edges;
  for (NodeId i = 0; i < 2 * kHalf; ++i) {
    const NodeId base = i < kHalf ? 0 : kHalf;
    for (int k = 0; k < 6; ++k) {
      const NodeId j = base + static_cast<NodeId>(rng.below(kHalf));
      if (j != i) edges.push_back({std::min(i, j), std::max(i, j), EdgeSource::neighborhood});
    }
  }
  for (int k = 0; k < 10; ++k) {
    const auto a = static_cast<NodeId>(rng.below(kHalf));
    const auto b = static_cast<NodeId>(kHalf + rng.below(kHalf));
    edges.push_back({a, b, EdgeSource::global});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& l, const Edge& r) {
    return std::pair{l.a, l.b} < std::pair{r.a, r.b};
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& l, const Edge& r) { return l.a == r.a && l.b == r.b; }),
              edges.end());

  FeatureMatrix x(2 * kHalf, kFeatureCount);
  for (std::size_t i = 0; i < 2 * kHalf; ++i) {
    const double sign = community[i] == 1 ? 1.0 : -1.0;
    for (std::size_t c = 0; c < kFeatureCount; ++c) {
      const double noise = 2.0 * rng.uniform() - 1.0;
      x(i, c) = (c < 2 ? sign : 0.0) + 0.8 * noise;
    }
  }
  return {strip_nodes(roles), normalize_adjacency(edges, 2 * kHalf), std::move(x),
          std::move(community)};
}

// 64^3 phantom with one lesion and one distant false-positive blob whose
// PET and CT look like background.
inline PhantomSpec lesion_and_blob(std::uint64_t seed) {
  SplitMix64 rng(mix64(seed ^ 0x7068616e746fULL));
  const auto jitter = [&](std::int64_t base) {
    return base + static_cast<std::int64_t>(rng.below(9)) - 4;
  };
  PhantomSpec spec;
  spec.seed = seed;
  Lesion lesion;
  lesion.center = {jitter(20), jitter(20), jitter(20)};
  const double r = 5.0 + 2.0 * rng.uniform();
  lesion.radii = {r, r, r};
  lesion.pet_intensity = 6.0;
  spec.lesions.push_back(lesion);

  FalsePositive blob;
  blob.center = {jitter(44), jitter(44), jitter(44)};
  const double rb = 3.0 + 1.5 * rng.uniform();
  blob.radii = {rb, rb, rb};
  blob.prob_level = 0.55 + 0.17 * rng.uniform();
  blob.pet_intensity = spec.background.pet_mean;
  spec.false_positives.push_back(blob);
  return spec;
}

}  // namespace fixture
