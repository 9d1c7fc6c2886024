#include "voxelgraph/uncertainty.hpp"

#include <algorithm>
#include <cmath>


namespace voxelgraph {

double binary_entropy(double p) noexcept {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  const double q = 1.0 - p;
  if (q > 0.0) h -= q * std::log2(q);
  return h;
}

UncertainBand uncertain_band(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(Errc::config, "alpha must lie in [0, 1], got " +
                                  std::to_string(alpha));
  }
  if (alpha >= 1.0) return {0.5, 0.5};
  if (alpha <= 0.0) return {0.0, 1.0};

  // Entropy rises on [0, 0.5] and falls on [0.5, 1]. Each root is bisected
  // separately until the bracket stops shrinking, so membership agrees with
  // binary_entropy(p) > alpha as evaluated in double precision.
  double lo = 0.0, hi = 0.5;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (binary_entropy(mid) > alpha ? hi : lo) = mid;
  }
  const double p_lo = lo;  // largest probe with entropy <= alpha

  lo = 0.5;
  hi = 1.0;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (binary_entropy(mid) > alpha ? lo : hi) = mid;
  }
  return {p_lo, hi};  // hi: smallest probe with entropy <= alpha
}

Volume3 entropy_map(const Volume3& prob) {
  std::vector<double> out(prob.size());
  const auto values = prob.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double p = values[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(Errc::input, "probability at voxel " +
                                   to_string(prob.coord(i)) + " is " +
                                   std::to_string(p) + ", outside [0, 1]");
    }
    out[i] = binary_entropy(p);
  }
  return Volume3(prob.dims(), prob.spacing(), DType::float64, std::move(out));
}

Mask3 threshold_mask(const Volume3& vol, double t, bool strict) {
  Mask3 m(vol.dims(), vol.spacing());
  for (std::size_t i = 0; i < vol.size(); ++i) {
    m.set(i, strict ? vol[i] > t : vol[i] >= t);
  }
  return m;
}

std::string_view to_string(Role r) {
  switch (r) {
    case Role::train_positive: return "train_positive";
    case Role::train_negative: return "train_negative";
    case Role::test: return "test";
  }
  return "unknown";
}

NodeSet::NodeSet(Dims dims, std::vector<Node> nodes)
    : dims_(dims), nodes_(std::move(nodes)) {
  validate_dims(dims_);
  std::sort(nodes_.begin(), nodes_.end(),
            [](const Node& a, const Node& b) { return a.voxel < b.voxel; });
  lookup_.assign(dims_.size(), kNone);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const std::size_t v = nodes_[i].voxel;
    if (v >= lookup_.size()) {
      throw Error(Errc::input, "node voxel index " + std::to_string(v) +
                                   " out of bounds");
    }
    if (lookup_[v] != kNone) {
      throw Error(Errc::input, "duplicate node at voxel " + std::to_string(v));
    }
    lookup_[v] = static_cast<std::int32_t>(i);
    ++counts_[static_cast<std::size_t>(nodes_[i].role)];
  }
}

void validate(const SelectionConfig& cfg) {
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) {
    throw Error(Errc::config, "selection.alpha must lie in [0, 1], got " +
                                  std::to_string(cfg.alpha));
  }
  if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) {
    throw Error(Errc::config, "selection.beta must lie in (0, 1), got " +
                                  std::to_string(cfg.beta));
  }
  if (cfg.dilation.radius < 1) {
    throw Error(Errc::config, "selection.dilation.radius must be >= 1, got " +
                                  std::to_string(cfg.dilation.radius));
  }
}

Selection select_nodes(const Volume3& prob, const SelectionConfig& cfg,
                       ClassCheck check) {
  validate(cfg);
  Volume3 entropy = entropy_map(prob);
  Mask3 u_b = threshold_mask(entropy, cfg.alpha);
  Mask3 e_b = threshold_mask(prob, cfg.beta);
  const Mask3 both = mask_union(e_b, u_b);
  const Mask3 shell = mask_difference(dilate(both, cfg.dilation), both);

  std::vector<Node> nodes;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    if (u_b.test(i)) {
      nodes.push_back({i, Role::test});
    } else if (e_b.test(i)) {
      nodes.push_back({i, Role::train_positive});
    } else if (shell.test(i)) {
      nodes.push_back({i, Role::train_negative});
    }
  }
  NodeSet set(prob.dims(), std::move(nodes));

  if (check == ClassCheck::require_both) {
    if (set.count(Role::train_positive) == 0) {
      throw Error(Errc::selection,
                  "no training positives: every voxel above beta is uncertain");
    }
    if (set.count(Role::train_negative) == 0) {
      throw Error(Errc::selection,
                  "no training negatives: the dilation shell is empty");
    }
  }
  return {std::move(set), std::move(entropy), std::move(e_b), std::move(u_b)};
}

}  // namespace voxelgraph
