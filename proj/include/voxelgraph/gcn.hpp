#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "voxelgraph/graph.hpp"
#include "voxelgraph/sparse.hpp"
#include "voxelgraph/uncertainty.hpp"

namespace voxelgraph {

/// Two-layer graph convolution: Y = sigmoid(N relu(N X W0) W1), where N is
/// the normalized adjacency of a SparseGraph.
struct GcnModel {
  DenseMatrix w0;  // kFeatureCount x hidden
  DenseMatrix w1;  // hidden x 1

  std::size_t hidden() const noexcept { return w0.cols; }
  friend bool operator==(const GcnModel&, const GcnModel&) = default;
};

/// Glorot-uniform weights, each drawn from ±sqrt(6 / (fan_in + fan_out)).
/// Throws Errc::config for hidden == 0.
GcnModel init_model(std::size_t hidden, std::uint64_t seed);

struct ForwardPass {
  DenseMatrix propagated;  // N X
  DenseMatrix pre_hidden;  // N X W0
  DenseMatrix hidden;      // relu(N X W0)
  std::vector<double> logits;       // N H W1
  std::vector<double> predictions;  // sigmoid(logits), clamped into (0, 1)
};

/// Throws Errc::input on shape mismatch.
ForwardPass gcn_forward(const GcnModel& model, const SparseGraph& g,
                        const FeatureMatrix& x);

/// Mean binary cross-entropy over labeled nodes (test nodes are ignored):
/// -[pos_weight * y * log p + (1 - y) * log(1 - p)]. Throws Errc::input when
/// no node is labeled or the sizes disagree.
double bce_loss(std::span<const double> predictions, const NodeSet& nodes,
                double pos_weight);

struct TrainConfig {
  double learning_rate = 0.01;
  double weight_decay = 5e-4;  // L2 coefficient on both weight matrices
  std::size_t max_epochs = 200;
  std::size_t patience = 20;
  double min_delta = 1e-6;
  double pos_weight = 1.0;
  std::size_t hidden = 16;
  std::uint64_t seed = 0;
};

/// Throws Errc::config when a field is out of range.
void validate(const TrainConfig& cfg);

struct Gradients {
  DenseMatrix d_w0;
  DenseMatrix d_w1;
  double loss = 0.0;  // bce + weight_decay * (|W0|^2 + |W1|^2)
};

/// Exact gradients of the regularized loss. The ReLU derivative at 0 is 0.
Gradients gcn_gradients(const GcnModel& model, const SparseGraph& g,
                        const FeatureMatrix& x, const NodeSet& nodes,
                        const TrainConfig& cfg);

enum class StopReason { max_epochs, converged };

std::string_view to_string(StopReason r);

struct TrainReport {
  std::vector<double> losses;  // regularized loss at the start of each epoch
  std::size_t epochs = 0;
  double final_loss = 0.0;     // loss at the returned weights
  StopReason stop = StopReason::max_epochs;

  friend bool operator==(const TrainReport&, const TrainReport&) = default;
};

struct TrainResult {
  GcnModel model;
  TrainReport report;
};

/// Full-batch Adam (beta1 0.9, beta2 0.999, eps 1e-8). Stops after
/// max_epochs or once the loss has failed to improve on its best value by
/// min_delta for `patience` consecutive epochs. Throws Errc::selection when
/// a class is missing and Errc::training when the loss turns non-finite.
TrainResult train_gcn(const SparseGraph& g, const FeatureMatrix& x,
                      const NodeSet& nodes, const TrainConfig& cfg);

/// e_b with every test voxel replaced by (prediction >= tau).
Mask3 refine_segmentation(const Mask3& e_b, const NodeSet& nodes,
                          std::span<const double> predictions,
                          double tau = 0.5);

}  // namespace voxelgraph
