#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "voxelgraph/gcn.hpp"
#include "voxelgraph/graph.hpp"
#include "voxelgraph/uncertainty.hpp"

namespace voxelgraph {

struct PipelineConfig {
  SelectionConfig selection;
  EdgeConfig edges;  // seed is overwritten from `seed`
  TrainConfig train; // seed is overwritten from `seed`
  Connectivity part_connectivity = Connectivity::full26;
  double tau = 0.5;
  std::uint64_t seed = 0;
};

/// Copy of cfg with sub-seeds derived from the top-level seed: edges get
/// seed, training gets seed + 1.
PipelineConfig with_derived_seeds(PipelineConfig cfg);

/// Throws Errc::config when any sub-configuration is invalid.
void validate(const PipelineConfig& cfg);

struct RunReport {
  std::array<std::size_t, 3> nodes{};  // indexed by Role
  std::int32_t part_count = 0;
  std::array<std::size_t, 3> edges{};  // indexed by EdgeSource
  std::size_t saturated_nodes = 0;
  bool training_skipped = false;
  std::size_t epochs = 0;
  std::optional<double> initial_loss;
  std::optional<double> final_loss;
  std::optional<StopReason> stop;
  std::size_t flips_one_to_zero = 0;  // test voxels removed from e_b
  std::size_t flips_zero_to_one = 0;  // test voxels added to e_b
  std::map<std::string, double> timings_ms;  // wall clock per stage

  std::size_t edge_total() const noexcept { return edges[0] + edges[1] + edges[2]; }
};

struct Refinement {
  Mask3 refined;
  Mask3 initial;  // prob > beta
  RunReport report;
};

/// Node selection -> parts -> edges -> features -> training -> relabeling.
/// With no test nodes the refined mask equals the initial one and training
/// is skipped. Errors carry the failing stage in their message.
Refinement run_refinement(const Volume3& ct, const Volume3& pet,
                          const Volume3& prob, const PipelineConfig& cfg);

}  // namespace voxelgraph
