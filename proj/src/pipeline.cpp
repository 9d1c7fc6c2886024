#include "voxelgraph/pipeline.hpp"

#include <chrono>
#include <utility>

namespace voxelgraph {

namespace {

class StageTimer {
 public:
  explicit StageTimer(RunReport& report) : report_(report) {}

  template <typename F>
  auto run(const char* stage, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(body())>) {
        body();
        record(stage, start);
      } else {
        auto out = body();
        record(stage, start);
        return out;
      }
    } catch (const Error& e) {
      throw e.tagged(stage);
    }
  }

 private:
  void record(const char* stage, std::chrono::steady_clock::time_point start) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    report_.timings_ms[stage] +=
        std::chrono::duration<double, std::milli>(elapsed).count();
  }

  RunReport& report_;
};

void require_compatible(const Volume3& a, const Volume3& b, const char* what) {
  require_same_dims(a.dims(), b.dims(), what);
  if (!(a.spacing() == b.spacing())) {
    throw Error(Errc::input, std::string(what) + ": spacing mismatch");
  }
}

}  // namespace

PipelineConfig with_derived_seeds(PipelineConfig cfg) {
  cfg.edges.seed = cfg.seed;
  cfg.train.seed = cfg.seed + 1;
  return cfg;
}

void validate(const PipelineConfig& cfg) {
  validate(cfg.selection);
  validate(cfg.train);
  if (!(cfg.tau >= 0.0 && cfg.tau <= 1.0)) {
    throw Error(Errc::config, "tau must lie in [0, 1]");
  }
}

Refinement run_refinement(const Volume3& ct, const Volume3& pet,
                          const Volume3& prob, const PipelineConfig& config) {
  validate(config);
  const PipelineConfig cfg = with_derived_seeds(config);
  RunReport report;
  StageTimer timer(report);

  timer.run("input", [&] {
    require_compatible(ct, prob, "ct vs prob");
    require_compatible(pet, prob, "pet vs prob");
  });

  Selection sel = timer.run("selection", [&] {
    return select_nodes(prob, cfg.selection, ClassCheck::allow_missing);
  });
  const NodeSet& nodes = sel.nodes;
  for (Role r : {Role::train_positive, Role::train_negative, Role::test}) {
    report.nodes[static_cast<std::size_t>(r)] = nodes.count(r);
  }

  Mask3 initial = sel.e_b;
  if (nodes.count(Role::test) == 0) {
    report.training_skipped = true;
    report.part_count = connected_components(sel.e_b, cfg.part_connectivity).count;
    return {initial, std::move(initial), std::move(report)};
  }
  timer.run("selection", [&] {
    if (nodes.count(Role::train_positive) == 0) {
      throw Error(Errc::selection,
                  "no training positives: every voxel above beta is uncertain");
    }
    if (nodes.count(Role::train_negative) == 0) {
      throw Error(Errc::selection, "no training negatives: the dilation shell is empty");
    }
  });

  const PartAssignment parts = timer.run("parts", [&] {
    return partition_parts(sel.e_b, nodes, cfg.part_connectivity);
  });
  report.part_count = parts.count;

  const EdgeList edges = timer.run("edges", [&] {
    return build_edges(nodes, parts, cfg.edges);
  });
  report.edges = edges.by_source;
  report.saturated_nodes = edges.saturated_nodes;

  const SparseGraph graph = timer.run("graph", [&] {
    return normalize_adjacency(edges.edges, nodes.size());
  });
  const FeatureMatrix features = timer.run("features", [&] {
    return assemble_features(nodes, ct, pet, prob, sel.entropy);
  });

  const TrainResult trained = timer.run("training", [&] {
    return train_gcn(graph, features, nodes, cfg.train);
  });
  report.epochs = trained.report.epochs;
  report.initial_loss = trained.report.losses.front();
  report.final_loss = trained.report.final_loss;
  report.stop = trained.report.stop;

  Mask3 refined = timer.run("refinement", [&] {
    const ForwardPass f = gcn_forward(trained.model, graph, features);
    return refine_segmentation(sel.e_b, nodes, f.predictions, cfg.tau);
  });

  for (const Node& node : nodes.nodes()) {
    if (node.role != Role::test) continue;
    const bool before = initial.test(node.voxel);
    const bool after = refined.test(node.voxel);
    if (before && !after) ++report.flips_one_to_zero;
    if (!before && after) ++report.flips_zero_to_one;
  }
  return {std::move(refined), std::move(initial), std::move(report)};
}

}  // namespace voxelgraph
