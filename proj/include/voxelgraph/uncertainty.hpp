#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "voxelgraph/morphology.hpp"
#include "voxelgraph/volume.hpp"

namespace voxelgraph {

/// Binary entropy in bits, with 0 log 0 = 0. Result lies in [0, 1].
double binary_entropy(double p) noexcept;

/// Open interval of probabilities whose binary entropy exceeds alpha.
struct UncertainBand {
  double p_lo = 0.5;
  double p_hi = 0.5;

  bool contains(double p) const noexcept { return p > p_lo && p < p_hi; }
};

/// Roots of binary_entropy(p) = alpha on either side of 0.5, located by
/// bisection to full double precision. alpha = 1 gives an empty band and
/// alpha = 0 gives (0, 1).
UncertainBand uncertain_band(double alpha);

/// Voxelwise binary entropy. Throws Errc::input naming the first voxel
/// outside [0, 1] (NaN included).
Volume3 entropy_map(const Volume3& prob);

/// 1 where value > t (strict) or value >= t (non-strict).
Mask3 threshold_mask(const Volume3& vol, double t, bool strict = true);

enum class Role : std::uint8_t { train_positive, train_negative, test };

std::string_view to_string(Role r);

struct Node {
  std::size_t voxel = 0;  // linear index into the volume
  Role role = Role::test;
};

/// Graph nodes in ascending voxel order, with a dense voxel -> node lookup.
class NodeSet {
 public:
  static constexpr std::int32_t kNone = -1;

  NodeSet() = default;
  /// Throws Errc::input on duplicate or out-of-range voxels.
  NodeSet(Dims dims, std::vector<Node> nodes);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  const Node& operator[](std::size_t i) const noexcept { return nodes_[i]; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  /// Node id at a voxel, or kNone.
  std::int32_t node_at(std::size_t voxel) const noexcept {
    return lookup_[voxel];
  }

  std::size_t count(Role r) const noexcept {
    return counts_[static_cast<std::size_t>(r)];
  }
  std::size_t labeled_count() const noexcept {
    return count(Role::train_positive) + count(Role::train_negative);
  }

 private:
  Dims dims_{};
  std::vector<Node> nodes_;
  std::vector<std::int32_t> lookup_;
  std::array<std::size_t, 3> counts_{};
};

struct SelectionConfig {
  double alpha = 0.8;  // entropy threshold
  double beta = 0.5;   // probability threshold
  StructuringElement dilation{Connectivity::face6, 2};
};

/// Throws Errc::config when a field is out of range.
void validate(const SelectionConfig& cfg);

struct Selection {
  NodeSet nodes;
  Volume3 entropy;
  Mask3 e_b;  // prob > beta
  Mask3 u_b;  // entropy > alpha
};

enum class ClassCheck { require_both, allow_missing };

/// Splits voxels into training positives (e_b minus u_b), test nodes (u_b)
/// and training negatives (the dilation shell around e_b | u_b). With
/// ClassCheck::require_both an empty positive or negative set raises
/// Errc::selection.
Selection select_nodes(const Volume3& prob, const SelectionConfig& cfg,
                       ClassCheck check = ClassCheck::require_both);

}  // namespace voxelgraph
