#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "voxelgraph/morphology.hpp"
#include "voxelgraph/sparse.hpp"
#include "voxelgraph/uncertainty.hpp"

namespace voxelgraph {

using NodeId = std::uint32_t;

/// Part (connected component of e_b) per node; 0 marks nodes outside e_b.
struct PartAssignment {
  std::vector<std::int32_t> part;
  std::int32_t count = 0;
};

PartAssignment partition_parts(const Mask3& e_b, const NodeSet& nodes,
                               Connectivity connectivity);

/// Extra edges attached to test nodes.
enum class UncertainMode {
  none,        // no extra edges
  to_certain,  // targets drawn from the labeled nodes
  to_random,   // targets drawn from every node
};

std::string_view to_string(UncertainMode m);
UncertainMode uncertain_mode_from_string(std::string_view s);

struct EdgeConfig {
  std::size_t k_rand = 16;   // global edges per node
  std::size_t k_uncer = 16;  // extra edges per test node
  UncertainMode uncer_mode = UncertainMode::to_random;
  std::uint64_t seed = 0;
};

enum class EdgeSource : std::uint8_t { neighborhood, global, uncertain };

struct Edge {
  NodeId a = 0;  // a < b
  NodeId b = 0;
  EdgeSource source = EdgeSource::neighborhood;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct EdgeList {
  std::vector<Edge> edges;  // sorted by (a, b), no duplicates or self-loops
  /// Edges per source. An edge produced by several sources is attributed to
  /// the first of neighborhood, global, uncertain.
  std::array<std::size_t, 3> by_source{};
  /// Nodes whose draws were cut short because fewer targets than requested
  /// were available.
  std::size_t saturated_nodes = 0;

  std::size_t count(EdgeSource s) const noexcept {
    return by_source[static_cast<std::size_t>(s)];
  }
};

/// Undirected, unit-weight edge set over the node set:
///  - each node to its face neighbors that are also nodes;
///  - k_rand global targets per node, drawn without replacement. With two or
///    more parts the draws go round-robin over the parts other than the
///    node's own, then fall back to uniform once those parts are exhausted;
///  - k_uncer extra targets per test node according to uncer_mode.
/// Draws are sequential in node order, so (inputs, seed) fix the result.
EdgeList build_edges(const NodeSet& nodes, const PartAssignment& parts,
                     const EdgeConfig& cfg);

/// Adjacency A with unit weights plus its propagation operator
/// D^-1/2 (A + I) D^-1/2, D being the degree matrix of A + I.
struct SparseGraph {
  std::size_t n = 0;
  CsrMatrix adjacency;
  CsrMatrix normalized;
  std::vector<double> augmented_degree;  // degree in A + I
};

/// Throws Errc::input for endpoints >= n or self-loops.
SparseGraph normalize_adjacency(std::span<const Edge> edges, std::size_t n);

/// n x 4 node features: z-scored CT, z-scored PET, probability, entropy.
using FeatureMatrix = DenseMatrix;
inline constexpr std::size_t kFeatureCount = 4;

/// CT and PET are standardized over the node voxels (population standard
/// deviation); a zero-variance channel becomes all zeros. Throws
/// Errc::input for mismatched dims or a non-finite value at a node voxel.
FeatureMatrix assemble_features(const NodeSet& nodes, const Volume3& ct,
                                const Volume3& pet, const Volume3& prob,
                                const Volume3& entropy);

}  // namespace voxelgraph
