#include "voxelgraph/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "voxelgraph/json_io.hpp"
#include "voxelgraph/metrics.hpp"
#include "voxelgraph/nifti.hpp"
#include "voxelgraph/phantom.hpp"
#include "voxelgraph/pipeline.hpp"

namespace voxelgraph {

namespace fs = std::filesystem;

namespace {

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::training:
      return kExitRuntime;
    case Errc::format:
    case Errc::io:
    case Errc::input:
    case Errc::config:
    case Errc::selection:
    case Errc::metric_undefined:
      return kExitData;
  }
  return kExitRuntime;
}

PipelineConfig load_config(const std::string& path) {
  try {
    return pipeline_config_from_json(read_json_file(path));
  } catch (const Error& e) {
    throw e.tagged("config");
  }
}

// "sz,sy,sx" in millimeters.
std::optional<Spacing> parse_spacing(const std::string& text) {
  double v[3];
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    const std::size_t end = k < 2 ? text.find(',', pos) : text.size();
    if (end == std::string::npos) return std::nullopt;
    const char* first = text.data() + pos;
    const char* last = text.data() + end;
    auto [ptr, ec] = std::from_chars(first, last, v[k]);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    pos = end + 1;
  }
  return Spacing{v[0], v[1], v[2]};
}

struct RefineArgs {
  std::string ct, pet, prob, config, out, report, initial_out;
};

int cmd_refine(const RefineArgs& a, std::ostream& out) {
  const PipelineConfig cfg = load_config(a.config);
  const Volume3 ct = load_volume(a.ct);
  const Volume3 pet = load_volume(a.pet);
  const Volume3 prob = load_volume(a.prob);
  const Refinement r = run_refinement(ct, pet, prob, cfg);

  save_mask(r.refined, a.out);
  if (!a.initial_out.empty()) save_mask(r.initial, a.initial_out);
  write_json_file(to_json(r.report), a.report);

  const RunReport& rep = r.report;
  out << "nodes: pos=" << rep.nodes[static_cast<std::size_t>(Role::train_positive)]
      << " neg=" << rep.nodes[static_cast<std::size_t>(Role::train_negative)]
      << " test=" << rep.nodes[static_cast<std::size_t>(Role::test)]
      << "; flips: 1->0=" << rep.flips_one_to_zero << " 0->1=" << rep.flips_zero_to_one
      << "; final_loss=";
  if (rep.final_loss) {
    out << *rep.final_loss;
  } else {
    out << "n/a (training skipped)";
  }
  out << '\n';
  return kExitOk;
}

struct EvaluateArgs {
  std::string pred, gt, spacing, out;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  std::optional<Spacing> spacing;
  if (!a.spacing.empty()) {
    spacing = parse_spacing(a.spacing);
    if (!spacing) {
      err << "error: --spacing expects \"sz,sy,sx\", got \"" << a.spacing << "\"\n";
      return kExitUsage;
    }
    validate_spacing(*spacing);
  }
  const Mask3 pred = load_mask(a.pred);
  const Mask3 gt = load_mask(a.gt);
  require_same_dims(pred.dims(), gt.dims(), "pred vs gt");
  if (!spacing) {
    if (!(pred.spacing() == gt.spacing())) {
      throw Error(Errc::input,
                  "pred and gt headers disagree on spacing; pass --spacing");
    }
    spacing = pred.spacing();
  }
  const MetricsReport m = evaluate(pred, gt, *spacing);
  write_json_file(to_json(m), a.out);
  out << "dice=" << m.dice;
  out << " hd95=";
  if (m.hd95) out << *m.hd95; else out << "null";
  out << " assd=";
  if (m.assd) out << *m.assd; else out << "null";
  out << '\n';
  return kExitOk;
}

struct PhantomArgs {
  std::string spec, out;
};

int cmd_phantom(const PhantomArgs& a, std::ostream& out) {
  PhantomSpec spec;
  try {
    spec = phantom_spec_from_json(read_json_file(a.spec));
  } catch (const Error& e) {
    throw e.tagged("spec");
  }
  const Phantom p = generate_phantom(spec);
  const fs::path dir(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::io, "cannot create " + dir.string() + ": " + ec.message());
  save_volume(p.ct, dir / "ct.nii");
  save_volume(p.pet, dir / "pet.nii");
  save_mask(p.gt, dir / "gt.nii");
  save_volume(p.prob, dir / "prob.nii");
  out << "wrote ct.nii pet.nii gt.nii prob.nii to " << dir.string() << '\n';
  return kExitOk;
}

struct InspectArgs {
  std::string prob, config, out, masks_out;
};

int cmd_inspect_nodes(const InspectArgs& a, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = load_config(a.config);
  const Volume3 prob = load_volume(a.prob);
  const Selection sel = select_nodes(prob, cfg.selection, ClassCheck::allow_missing);
  const UncertainBand band = uncertain_band(cfg.selection.alpha);
  const std::int32_t parts = connected_components(sel.e_b, cfg.part_connectivity).count;

  Json warnings = Json::array();
  if (sel.nodes.count(Role::train_positive) == 0) {
    warnings.push_back("no train_positive nodes: refine would fail on this input");
  }
  if (sel.nodes.count(Role::train_negative) == 0) {
    warnings.push_back("no train_negative nodes: refine would fail on this input");
  }

  Json j;
  j["train_positive"] = sel.nodes.count(Role::train_positive);
  j["train_negative"] = sel.nodes.count(Role::train_negative);
  j["test"] = sel.nodes.count(Role::test);
  j["part_count"] = parts;
  j["uncertain_band"] = {{"p_lo", band.p_lo}, {"p_hi", band.p_hi}};
  j["warnings"] = warnings;
  write_json_file(j, a.out);

  if (!a.masks_out.empty()) {
    const fs::path dir(a.masks_out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::io, "cannot create " + dir.string() + ": " + ec.message());
    for (Role role : {Role::train_positive, Role::train_negative, Role::test}) {
      Mask3 m(prob.dims(), prob.spacing());
      for (const Node& n : sel.nodes.nodes()) {
        if (n.role == role) m.set(n.voxel, true);
      }
      save_mask(m, dir / (std::string(to_string(role)) + ".nii"));
    }
  }

  for (const auto& w : warnings) err << "warning: " << w.get<std::string>() << '\n';
  out << "train_positive=" << j["train_positive"] << " train_negative="
      << j["train_negative"] << " test=" << j["test"] << " parts=" << parts << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Uncertainty-guided graph refinement of 3D tumor segmentations", "voxelgraph"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "voxelgraph 0.1.0");
  app.footer(
      "Exit codes: 0 success, 1 usage error, 2 data or validation error, "
      "3 runtime or training error.\n"
      "VOXELGRAPH_THREADS sets the worker count (default 1).");

  RefineArgs refine;
  auto* sub_refine = app.add_subcommand("refine", "Refine a probability map with the GCN");
  sub_refine->add_option("--ct", refine.ct, "CT volume (NIfTI)")->required();
  sub_refine->add_option("--pet", refine.pet, "PET volume (NIfTI)")->required();
  sub_refine->add_option("--prob", refine.prob, "Foreground probability map (NIfTI)")->required();
  sub_refine->add_option("--config", refine.config, "Pipeline config (JSON)")->required();
  sub_refine->add_option("--out", refine.out, "Refined mask output (NIfTI)")->required();
  sub_refine->add_option("--report", refine.report, "Run report output (JSON)")->required();
  sub_refine->add_option("--initial-out", refine.initial_out,
                         "Optional output for the thresholded input mask (NIfTI)");

  EvaluateArgs evaluate_args;
  auto* sub_eval = app.add_subcommand("evaluate", "Dice, HD95 and ASSD between two masks");
  sub_eval->add_option("--pred", evaluate_args.pred, "Predicted mask (NIfTI)")->required();
  sub_eval->add_option("--gt", evaluate_args.gt, "Reference mask (NIfTI)")->required();
  sub_eval->add_option("--spacing", evaluate_args.spacing,
                       "Voxel spacing \"sz,sy,sx\" in mm; overrides the file headers");
  sub_eval->add_option("--out", evaluate_args.out, "Metrics output (JSON)")->required();

  PhantomArgs phantom;
  auto* sub_phantom = app.add_subcommand("phantom", "Generate a synthetic PET/CT phantom");
  sub_phantom->add_option("--spec", phantom.spec, "Phantom spec (JSON)")->required();
  sub_phantom->add_option("--out", phantom.out,
                          "Output directory for ct.nii, pet.nii, gt.nii, prob.nii")
      ->required();

  InspectArgs inspect;
  auto* sub_inspect =
      app.add_subcommand("inspect-nodes", "Report node selection counts without training");
  sub_inspect->add_option("--prob", inspect.prob, "Foreground probability map (NIfTI)")->required();
  sub_inspect->add_option("--config", inspect.config, "Pipeline config (JSON)")->required();
  sub_inspect->add_option("--out", inspect.out, "Selection summary output (JSON)")->required();
  sub_inspect->add_option("--masks-out", inspect.masks_out,
                          "Optional directory for train_positive.nii, train_negative.nii, test.nii");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sub_refine->parsed()) return cmd_refine(refine, out);
    if (sub_eval->parsed()) return cmd_evaluate(evaluate_args, out, err);
    if (sub_phantom->parsed()) return cmd_phantom(phantom, out);
    if (sub_inspect->parsed()) return cmd_inspect_nodes(inspect, out, err);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace voxelgraph
