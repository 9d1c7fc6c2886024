#include "voxelgraph/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "voxelgraph/rng.hpp"

namespace voxelgraph {

namespace {

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow.
double softplus(double t) noexcept {
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

constexpr double kPredMin = std::numeric_limits<double>::min();
constexpr double kPredMax = 1.0 - 0x1.0p-53;

void check_shapes(const GcnModel& model, const SparseGraph& g,
                  const FeatureMatrix& x) {
  if (x.rows != g.n || x.cols != kFeatureCount) {
    throw Error(Errc::input, "feature matrix is " + std::to_string(x.rows) +
                                 "x" + std::to_string(x.cols) + ", expected " +
                                 std::to_string(g.n) + "x" +
                                 std::to_string(kFeatureCount));
  }
  if (model.w0.rows != kFeatureCount || model.w1.rows != model.w0.cols ||
      model.w1.cols != 1) {
    throw Error(Errc::input, "model weights have inconsistent shapes");
  }
}

ForwardPass forward_from(const GcnModel& model, const SparseGraph& g,
                         DenseMatrix propagated) {
  ForwardPass f;
  f.propagated = std::move(propagated);
  f.pre_hidden = matmul(f.propagated, model.w0);
  f.hidden = f.pre_hidden;
  for (double& v : f.hidden.data) v = std::max(v, 0.0);
  const DenseMatrix z = g.normalized.multiply(matmul(f.hidden, model.w1));
  f.logits = z.data;
  f.predictions.resize(f.logits.size());
  for (std::size_t i = 0; i < f.logits.size(); ++i) {
    f.predictions[i] = std::clamp(sigmoid(f.logits[i]), kPredMin, kPredMax);
  }
  return f;
}

double squared_norm(const DenseMatrix& m) {
  double s = 0.0;
  for (double v : m.data) s += v * v;
  return s;
}

void require_labels(const NodeSet& nodes) {
  if (nodes.count(Role::train_positive) == 0 ||
      nodes.count(Role::train_negative) == 0) {
    throw Error(Errc::selection,
                "training needs both positive and negative nodes (have " +
                    std::to_string(nodes.count(Role::train_positive)) + " / " +
                    std::to_string(nodes.count(Role::train_negative)) + ")");
  }
}

// Loss and gradients given a cached N X.
Gradients gradients_from(const GcnModel& model, const SparseGraph& g,
                         const DenseMatrix& propagated, const NodeSet& nodes,
                         const TrainConfig& cfg) {
  const ForwardPass f = forward_from(model, g, propagated);
  const std::size_t n = g.n;
  const double m = static_cast<double>(nodes.labeled_count());
  if (m == 0.0) throw Error(Errc::input, "no labeled nodes");

  // dL/dlogit, computed from the logits so saturated nodes stay exact.
  DenseMatrix d_logit(n, 1);
  double bce = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = f.logits[i];
    switch (nodes[i].role) {
      case Role::train_positive:
        bce += cfg.pos_weight * softplus(-z);
        d_logit.data[i] = -cfg.pos_weight * sigmoid(-z) / m;
        break;
      case Role::train_negative:
        bce += softplus(z);
        d_logit.data[i] = sigmoid(z) / m;
        break;
      case Role::test:
        break;
    }
  }

  const double lambda = cfg.weight_decay;
  Gradients out;
  out.loss = bce / m + lambda * (squared_norm(model.w0) + squared_norm(model.w1));

  // N is symmetric, so N^T d_logit = N d_logit.
  const DenseMatrix d_hw = g.normalized.multiply(d_logit);
  out.d_w1 = matmul_tn(f.hidden, d_hw);
  DenseMatrix d_pre = matmul_nt(d_hw, model.w1);
  for (std::size_t k = 0; k < d_pre.data.size(); ++k) {
    if (!(f.pre_hidden.data[k] > 0.0)) d_pre.data[k] = 0.0;
  }
  out.d_w0 = matmul_tn(f.propagated, d_pre);

  for (std::size_t k = 0; k < out.d_w0.data.size(); ++k) {
    out.d_w0.data[k] += 2.0 * lambda * model.w0.data[k];
  }
  for (std::size_t k = 0; k < out.d_w1.data.size(); ++k) {
    out.d_w1.data[k] += 2.0 * lambda * model.w1.data[k];
  }
  return out;
}

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;

  explicit AdamState(std::size_t size) : m(size, 0.0), v(size, 0.0) {}

  void step(std::vector<double>& w, const std::vector<double>& grad,
            double lr, std::size_t t) {
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t));
    for (std::size_t k = 0; k < w.size(); ++k) {
      m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * grad[k];
      v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * grad[k] * grad[k];
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      w[k] -= lr * m_hat / (std::sqrt(v_hat) + kEps);
    }
  }
};

}  // namespace

GcnModel init_model(std::size_t hidden, std::uint64_t seed) {
  if (hidden == 0) throw Error(Errc::config, "hidden width must be >= 1");
  SplitMix64 rng(mix64(seed));
  GcnModel model{DenseMatrix(kFeatureCount, hidden), DenseMatrix(hidden, 1)};
  const auto fill = [&rng](DenseMatrix& w, std::size_t fan_in, std::size_t fan_out) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : w.data) v = bound * (2.0 * rng.uniform() - 1.0);
  };
  fill(model.w0, kFeatureCount, hidden);
  fill(model.w1, hidden, 1);
  return model;
}

ForwardPass gcn_forward(const GcnModel& model, const SparseGraph& g,
                        const FeatureMatrix& x) {
  check_shapes(model, g, x);
  return forward_from(model, g, g.normalized.multiply(x));
}

double bce_loss(std::span<const double> predictions, const NodeSet& nodes,
                double pos_weight) {
  if (predictions.size() != nodes.size()) {
    throw Error(Errc::input, "prediction count does not match node count");
  }
  if (nodes.labeled_count() == 0) throw Error(Errc::input, "no labeled nodes");
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double p = predictions[i];
    if (nodes[i].role == Role::train_positive) {
      sum -= pos_weight * std::log(p);
    } else if (nodes[i].role == Role::train_negative) {
      sum -= std::log1p(-p);
    }
  }
  return sum / static_cast<double>(nodes.labeled_count());
}

void validate(const TrainConfig& cfg) {
  const auto fail = [](const std::string& what) {
    throw Error(Errc::config, "train." + what);
  };
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
    fail("learning_rate must be > 0");
  }
  if (!(cfg.weight_decay >= 0.0) || !std::isfinite(cfg.weight_decay)) {
    fail("weight_decay must be >= 0");
  }
  if (cfg.max_epochs < 1) fail("max_epochs must be >= 1");
  if (!(cfg.min_delta >= 0.0)) fail("min_delta must be >= 0");
  if (!(cfg.pos_weight > 0.0) || !std::isfinite(cfg.pos_weight)) {
    fail("pos_weight must be > 0");
  }
  if (cfg.hidden < 1) fail("hidden must be >= 1");
}

Gradients gcn_gradients(const GcnModel& model, const SparseGraph& g,
                        const FeatureMatrix& x, const NodeSet& nodes,
                        const TrainConfig& cfg) {
  check_shapes(model, g, x);
  if (nodes.size() != g.n) {
    throw Error(Errc::input, "node count does not match graph size");
  }
  return gradients_from(model, g, g.normalized.multiply(x), nodes, cfg);
}

std::string_view to_string(StopReason r) {
  return r == StopReason::converged ? "converged" : "max_epochs";
}

TrainResult train_gcn(const SparseGraph& g, const FeatureMatrix& x,
                      const NodeSet& nodes, const TrainConfig& cfg) {
  validate(cfg);
  require_labels(nodes);
  if (nodes.size() != g.n) {
    throw Error(Errc::input, "node count does not match graph size");
  }

  TrainResult result{init_model(cfg.hidden, cfg.seed), {}};
  GcnModel& model = result.model;
  TrainReport& report = result.report;
  check_shapes(model, g, x);

  const DenseMatrix propagated = g.normalized.multiply(x);
  AdamState adam0(model.w0.data.size());
  AdamState adam1(model.w1.data.size());

  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const Gradients grad = gradients_from(model, g, propagated, nodes, cfg);
    if (!std::isfinite(grad.loss)) {
      throw Error(Errc::training,
                  "loss became non-finite at epoch " + std::to_string(epoch));
    }
    report.losses.push_back(grad.loss);
    report.epochs = epoch;

    adam0.step(model.w0.data, grad.d_w0.data, cfg.learning_rate, epoch);
    adam1.step(model.w1.data, grad.d_w1.data, cfg.learning_rate, epoch);

    if (grad.loss < best - cfg.min_delta) {
      best = grad.loss;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      report.stop = StopReason::converged;
      break;
    }
  }

  report.final_loss = gradients_from(model, g, propagated, nodes, cfg).loss;
  if (!std::isfinite(report.final_loss)) {
    throw Error(Errc::training, "loss became non-finite after epoch " +
                                    std::to_string(report.epochs));
  }
  return result;
}

Mask3 refine_segmentation(const Mask3& e_b, const NodeSet& nodes,
                          std::span<const double> predictions, double tau) {
  require_same_dims(e_b.dims(), nodes.dims(), "refine_segmentation");
  if (predictions.size() != nodes.size()) {
    throw Error(Errc::input, "prediction count does not match node count");
  }
  Mask3 out = e_b;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].role == Role::test) {
      out.set(nodes[i].voxel, predictions[i] >= tau);
    }
  }
  return out;
}

}  // namespace voxelgraph
