#include "voxelgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "voxelgraph/rng.hpp"

namespace voxelgraph {

namespace {

// Stream salts so global and uncertain draws use independent sequences.
constexpr std::uint64_t kGlobalStream = 0x676c6f62616cULL;
constexpr std::uint64_t kUncertainStream = 0x756e63657274ULL;

// Marks nodes already drawn for the current source node without clearing
// an n-sized array per node.
class DrawScratch {
 public:
  explicit DrawScratch(std::size_t n) : stamp_(n, 0) {}

  void next_round() { ++epoch_; }
  bool taken(NodeId v) const { return stamp_[v] == epoch_; }
  void take(NodeId v) { stamp_[v] = epoch_; }

 private:
  std::vector<std::uint64_t> stamp_;
  std::uint64_t epoch_ = 1;
};

// Draws up to k distinct members of a pool (pool_at(i) for i < pool_size)
// that are not yet taken, marking and appending them to `out`. `available`
// is the number of untaken members. Returns the number drawn.
template <typename PoolAt>
std::size_t draw_distinct(std::size_t pool_size, std::size_t available,
                          std::size_t k, PoolAt pool_at, SplitMix64& rng,
                          DrawScratch& scratch, std::vector<NodeId>& out) {
  if (k == 0 || available == 0) return 0;
  if (k >= available) {
    std::size_t drawn = 0;
    for (std::size_t i = 0; i < pool_size; ++i) {
      const NodeId v = pool_at(i);
      if (!scratch.taken(v)) {
        scratch.take(v);
        out.push_back(v);
        ++drawn;
      }
    }
    return drawn;
  }
  if (2 * k <= available) {
    // Rejection: at least half the pool is still free.
    for (std::size_t drawn = 0; drawn < k;) {
      const NodeId v = pool_at(rng.below(pool_size));
      if (scratch.taken(v)) continue;
      scratch.take(v);
      out.push_back(v);
      ++drawn;
    }
    return k;
  }
  // Dense case: partial Fisher-Yates over the free members.
  std::vector<NodeId> free;
  free.reserve(available);
  for (std::size_t i = 0; i < pool_size; ++i) {
    const NodeId v = pool_at(i);
    if (!scratch.taken(v)) free.push_back(v);
  }
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(free.size() - i);
    std::swap(free[i], free[j]);
    scratch.take(free[i]);
    out.push_back(free[i]);
  }
  return k;
}

}  // namespace

PartAssignment partition_parts(const Mask3& e_b, const NodeSet& nodes,
                               Connectivity connectivity) {
  require_same_dims(e_b.dims(), nodes.dims(), "partition_parts");
  const ComponentLabels cc = connected_components(e_b, connectivity);
  PartAssignment out;
  out.count = cc.count;
  out.part.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out.part[i] = cc.labels[nodes[i].voxel];
  }
  return out;
}

std::string_view to_string(UncertainMode m) {
  switch (m) {
    case UncertainMode::none: return "none";
    case UncertainMode::to_certain: return "to_certain";
    case UncertainMode::to_random: return "to_random";
  }
  return "unknown";
}

UncertainMode uncertain_mode_from_string(std::string_view s) {
  if (s == "none") return UncertainMode::none;
  if (s == "to_certain") return UncertainMode::to_certain;
  if (s == "to_random") return UncertainMode::to_random;
  throw Error(Errc::config, "unknown uncer_mode \"" + std::string(s) +
                                "\" (expected none, to_certain or to_random)");
}

EdgeList build_edges(const NodeSet& nodes, const PartAssignment& parts,
                     const EdgeConfig& cfg) {
  const std::size_t n = nodes.size();
  if (n == 0) throw Error(Errc::input, "build_edges: node set is empty");
  if (n > std::numeric_limits<NodeId>::max()) {
    throw Error(Errc::input, "build_edges: too many nodes");
  }
  if (parts.part.size() != n) {
    throw Error(Errc::input, "build_edges: part assignment does not match nodes");
  }

  std::vector<Edge> raw;
  EdgeList result;
  const auto add = [&raw](NodeId u, NodeId v, EdgeSource s) {
    if (u == v) return;
    raw.push_back({std::min(u, v), std::max(u, v), s});
  };

  // Face neighbors in the positive direction of each axis; every adjacent
  // pair is seen exactly once.
  const Dims& d = nodes.dims();
  const std::size_t plane = static_cast<std::size_t>(d.ny * d.nx);
  for (NodeId i = 0; i < n; ++i) {
    const std::size_t v = nodes[i].voxel;
    const auto z = static_cast<std::int64_t>(v / plane);
    const auto y = static_cast<std::int64_t>((v % plane) / static_cast<std::size_t>(d.nx));
    const auto x = static_cast<std::int64_t>(v % static_cast<std::size_t>(d.nx));
    if (z + 1 < d.nz) {
      if (const auto j = nodes.node_at(v + plane); j != NodeSet::kNone) {
        add(i, static_cast<NodeId>(j), EdgeSource::neighborhood);
      }
    }
    if (y + 1 < d.ny) {
      if (const auto j = nodes.node_at(v + static_cast<std::size_t>(d.nx)); j != NodeSet::kNone) {
        add(i, static_cast<NodeId>(j), EdgeSource::neighborhood);
      }
    }
    if (x + 1 < d.nx) {
      if (const auto j = nodes.node_at(v + 1); j != NodeSet::kNone) {
        add(i, static_cast<NodeId>(j), EdgeSource::neighborhood);
      }
    }
  }

  DrawScratch scratch(n);
  std::vector<NodeId> picks;
  const auto whole = [](std::size_t i) { return static_cast<NodeId>(i); };

  // Global edges.
  if (cfg.k_rand > 0) {
    std::vector<std::vector<NodeId>> members(
        static_cast<std::size_t>(parts.count) + 1);
    for (NodeId i = 0; i < n; ++i) {
      members[static_cast<std::size_t>(parts.part[i])].push_back(i);
    }
    const bool stratified = parts.count >= 2;
    SplitMix64 rng(mix64(cfg.seed ^ kGlobalStream));
    std::vector<std::size_t> quota(members.size());

    for (NodeId i = 0; i < n; ++i) {
      scratch.next_round();
      scratch.take(i);
      picks.clear();
      std::size_t remaining = cfg.k_rand;

      if (stratified) {
        // Round-robin quotas over the other parts, capped by part size.
        const std::int32_t own = parts.part[i];
        std::fill(quota.begin(), quota.end(), 0);
        bool progress = true;
        while (remaining > 0 && progress) {
          progress = false;
          for (std::int32_t p = 1; p <= parts.count && remaining > 0; ++p) {
            const auto ps = static_cast<std::size_t>(p);
            if (p == own || quota[ps] >= members[ps].size()) continue;
            ++quota[ps];
            --remaining;
            progress = true;
          }
        }
        for (std::int32_t p = 1; p <= parts.count; ++p) {
          const auto& pool = members[static_cast<std::size_t>(p)];
          const auto q = quota[static_cast<std::size_t>(p)];
          if (q == 0) continue;
          draw_distinct(pool.size(), pool.size(), q,
                        [&pool](std::size_t k) { return pool[k]; }, rng,
                        scratch, picks);
        }
      }
      if (remaining > 0) {
        const std::size_t available = n - 1 - picks.size();
        const std::size_t got =
            draw_distinct(n, available, remaining, whole, rng, scratch, picks);
        if (got < remaining) ++result.saturated_nodes;
      }
      for (NodeId t : picks) add(i, t, EdgeSource::global);
    }
  }

  // Extra edges for test nodes.
  if (cfg.k_uncer > 0 && cfg.uncer_mode != UncertainMode::none) {
    SplitMix64 rng(mix64(cfg.seed ^ kUncertainStream));
    std::vector<NodeId> certain;
    if (cfg.uncer_mode == UncertainMode::to_certain) {
      for (NodeId i = 0; i < n; ++i) {
        if (nodes[i].role != Role::test) certain.push_back(i);
      }
    }
    for (NodeId i = 0; i < n; ++i) {
      if (nodes[i].role != Role::test) continue;
      scratch.next_round();
      scratch.take(i);
      picks.clear();
      std::size_t got = 0;
      if (cfg.uncer_mode == UncertainMode::to_certain) {
        got = draw_distinct(certain.size(), certain.size(), cfg.k_uncer,
                            [&certain](std::size_t k) { return certain[k]; },
                            rng, scratch, picks);
      } else {
        got = draw_distinct(n, n - 1, cfg.k_uncer, whole, rng, scratch, picks);
      }
      if (got < cfg.k_uncer) ++result.saturated_nodes;
      for (NodeId t : picks) add(i, t, EdgeSource::uncertain);
    }
  }

  // Deduplicate, keeping the highest-priority source per pair.
  std::sort(raw.begin(), raw.end(), [](const Edge& l, const Edge& r) {
    if (l.a != r.a) return l.a < r.a;
    if (l.b != r.b) return l.b < r.b;
    return l.source < r.source;
  });
  for (const Edge& e : raw) {
    if (!result.edges.empty() && result.edges.back().a == e.a &&
        result.edges.back().b == e.b) {
      continue;
    }
    result.edges.push_back(e);
    ++result.by_source[static_cast<std::size_t>(e.source)];
  }
  return result;
}

SparseGraph normalize_adjacency(std::span<const Edge> edges, std::size_t n) {
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (const Edge& e : edges) {
    if (e.a >= n || e.b >= n) {
      throw Error(Errc::input, "edge (" + std::to_string(e.a) + ", " +
                                   std::to_string(e.b) +
                                   ") has an endpoint >= node count " +
                                   std::to_string(n));
    }
    if (e.a == e.b) {
      throw Error(Errc::input, "self-loop at node " + std::to_string(e.a));
    }
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }

  SparseGraph g;
  g.n = n;
  g.augmented_degree.resize(n);
  g.adjacency.n = n;
  g.normalized.n = n;
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = adj[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    g.augmented_degree[i] = static_cast<double>(row.size() + 1);
  }

  g.adjacency.row_ptr.reserve(n + 1);
  g.normalized.row_ptr.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double di = g.augmented_degree[i];
    bool diagonal_done = false;
    const auto emit_diagonal = [&] {
      g.normalized.cols.push_back(static_cast<std::uint32_t>(i));
      g.normalized.values.push_back(1.0 / std::sqrt(di * di));
      diagonal_done = true;
    };
    for (std::uint32_t j : adj[i]) {
      if (!diagonal_done && j > i) emit_diagonal();
      g.adjacency.cols.push_back(j);
      g.adjacency.values.push_back(1.0);
      // d_i * d_j is an exact integer product, so (i, j) and (j, i) get the
      // same bits.
      g.normalized.cols.push_back(j);
      g.normalized.values.push_back(1.0 / std::sqrt(di * g.augmented_degree[j]));
    }
    if (!diagonal_done) emit_diagonal();
    g.adjacency.row_ptr.push_back(g.adjacency.cols.size());
    g.normalized.row_ptr.push_back(g.normalized.cols.size());
  }
  return g;
}

FeatureMatrix assemble_features(const NodeSet& nodes, const Volume3& ct,
                                const Volume3& pet, const Volume3& prob,
                                const Volume3& entropy) {
  require_same_dims(ct.dims(), nodes.dims(), "assemble_features (ct)");
  require_same_dims(pet.dims(), nodes.dims(), "assemble_features (pet)");
  require_same_dims(prob.dims(), nodes.dims(), "assemble_features (prob)");
  require_same_dims(entropy.dims(), nodes.dims(), "assemble_features (entropy)");

  const std::size_t n = nodes.size();
  FeatureMatrix x(n, kFeatureCount);
  const std::array<const Volume3*, kFeatureCount> sources{&ct, &pet, &prob, &entropy};
  constexpr std::array<const char*, kFeatureCount> names{"ct", "pet", "prob", "entropy"};

  for (std::size_t c = 0; c < kFeatureCount; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t v = nodes[i].voxel;
      const double value = (*sources[c])[v];
      if (!std::isfinite(value)) {
        throw Error(Errc::input, std::string(names[c]) + " value at voxel " +
                                     to_string(ct.coord(v)) + " is not finite");
      }
      x(i, c) = value;
    }
  }

  for (std::size_t c = 0; c < 2 && n > 0; ++c) {
    bool constant = true;
    for (std::size_t i = 1; i < n && constant; ++i) constant = x(i, c) == x(0, c);
    if (constant) {
      for (std::size_t i = 0; i < n; ++i) x(i, c) = 0.0;
      continue;
    }
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x(i, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (x(i, c) - mean) * (x(i, c) - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      x(i, c) = sd > 0.0 ? (x(i, c) - mean) / sd : 0.0;
    }
  }
  return x;
}

}  // namespace voxelgraph
