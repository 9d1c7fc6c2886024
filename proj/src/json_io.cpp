#include "voxelgraph/json_io.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <type_traits>

namespace voxelgraph {

namespace {

// Reads fields from a JSON object while tracking which keys were consumed,
// so that leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const Json& v = j_.at(key);
    if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) fail(where(key), "expected a non-negative integer");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(where(key), "expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(where(key), "expected a number");
    }
    try {
      out = j_.at(key).template get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(where(key), "wrong type");
    }
  }

  const Json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string where(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(where(it.key()), "unknown key");
    }
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw Error(Errc::config, (where.empty() ? std::string("document") : where) + ": " + what);
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename T>
T parse_enum(const Json& j, const std::string& where, T (*convert)(std::string_view)) {
  if (!j.is_string()) ObjectReader::fail(where, "expected a string");
  try {
    return convert(j.get<std::string>());
  } catch (const Error& e) {
    ObjectReader::fail(where, e.what());
  }
}

Coord coord_from(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) ObjectReader::fail(where, "expected [z, y, x]");
  try {
    return {j[0].get<std::int64_t>(), j[1].get<std::int64_t>(), j[2].get<std::int64_t>()};
  } catch (const nlohmann::json::exception&) {
    ObjectReader::fail(where, "expected three integers");
  }
}

std::array<double, 3> triple_from(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) ObjectReader::fail(where, "expected [z, y, x]");
  try {
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  } catch (const nlohmann::json::exception&) {
    ObjectReader::fail(where, "expected three numbers");
  }
}

Json coord_json(const Coord& c) { return Json::array({c.z, c.y, c.x}); }
Json triple_json(const std::array<double, 3>& t) { return Json::array({t[0], t[1], t[2]}); }
Json spacing_json(const Spacing& s) { return Json::array({s.sz, s.sy, s.sx}); }

}  // namespace

PipelineConfig pipeline_config_from_json(const Json& j) {
  PipelineConfig cfg;
  ObjectReader top(j, "");
  top.get("seed", cfg.seed);
  top.get("tau", cfg.tau);
  if (const Json* c = top.child("part_connectivity")) {
    cfg.part_connectivity =
        parse_enum(*c, "part_connectivity", connectivity_from_string);
  }

  if (const Json* s = top.child("selection")) {
    ObjectReader r(*s, "selection");
    r.get("alpha", cfg.selection.alpha);
    r.get("beta", cfg.selection.beta);
    if (const Json* d = r.child("dilation")) {
      ObjectReader dr(*d, "selection.dilation");
      if (const Json* c = dr.child("connectivity")) {
        cfg.selection.dilation.connectivity =
            parse_enum(*c, "selection.dilation.connectivity", connectivity_from_string);
      }
      dr.get("radius", cfg.selection.dilation.radius);
      dr.finish();
    }
    r.finish();
  }

  if (const Json* e = top.child("edges")) {
    ObjectReader r(*e, "edges");
    r.get("k_rand", cfg.edges.k_rand);
    r.get("k_uncer", cfg.edges.k_uncer);
    if (const Json* m = r.child("uncer_mode")) {
      cfg.edges.uncer_mode = parse_enum(*m, "edges.uncer_mode", uncertain_mode_from_string);
    }
    r.finish();
  }

  if (const Json* t = top.child("train")) {
    ObjectReader r(*t, "train");
    r.get("learning_rate", cfg.train.learning_rate);
    r.get("weight_decay", cfg.train.weight_decay);
    r.get("max_epochs", cfg.train.max_epochs);
    r.get("patience", cfg.train.patience);
    r.get("min_delta", cfg.train.min_delta);
    r.get("pos_weight", cfg.train.pos_weight);
    r.get("hidden", cfg.train.hidden);
    r.finish();
  }
  top.finish();
  validate(cfg);
  return with_derived_seeds(cfg);
}

Json to_json(const PipelineConfig& cfg) {
  Json j;
  j["seed"] = cfg.seed;
  j["tau"] = cfg.tau;
  j["part_connectivity"] = to_string(cfg.part_connectivity);
  j["selection"] = {
      {"alpha", cfg.selection.alpha},
      {"beta", cfg.selection.beta},
      {"dilation",
       {{"connectivity", to_string(cfg.selection.dilation.connectivity)},
        {"radius", cfg.selection.dilation.radius}}},
  };
  j["edges"] = {
      {"k_rand", cfg.edges.k_rand},
      {"k_uncer", cfg.edges.k_uncer},
      {"uncer_mode", std::string(to_string(cfg.edges.uncer_mode))},
  };
  j["train"] = {
      {"learning_rate", cfg.train.learning_rate},
      {"weight_decay", cfg.train.weight_decay},
      {"max_epochs", cfg.train.max_epochs},
      {"patience", cfg.train.patience},
      {"min_delta", cfg.train.min_delta},
      {"pos_weight", cfg.train.pos_weight},
      {"hidden", cfg.train.hidden},
  };
  return j;
}

PhantomSpec phantom_spec_from_json(const Json& j) {
  PhantomSpec spec;
  ObjectReader top(j, "");
  if (const Json* d = top.child("dims")) {
    const Coord c = coord_from(*d, "dims");
    spec.dims = {c.z, c.y, c.x};
  }
  if (const Json* s = top.child("spacing")) {
    const auto t = triple_from(*s, "spacing");
    spec.spacing = {t[0], t[1], t[2]};
  }
  if (const Json* list = top.child("lesions")) {
    if (!list->is_array()) ObjectReader::fail("lesions", "expected an array");
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string where = "lesions[" + std::to_string(i) + "]";
      ObjectReader r((*list)[i], where);
      Lesion l;
      if (const Json* c = r.child("center")) l.center = coord_from(*c, where + ".center");
      else ObjectReader::fail(where, "center is required");
      if (const Json* c = r.child("radii")) l.radii = triple_from(*c, where + ".radii");
      r.get("pet_intensity", l.pet_intensity);
      r.finish();
      spec.lesions.push_back(l);
    }
  }
  if (const Json* list = top.child("false_positives")) {
    if (!list->is_array()) ObjectReader::fail("false_positives", "expected an array");
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string where = "false_positives[" + std::to_string(i) + "]";
      ObjectReader r((*list)[i], where);
      FalsePositive f;
      if (const Json* c = r.child("center")) f.center = coord_from(*c, where + ".center");
      else ObjectReader::fail(where, "center is required");
      if (const Json* c = r.child("radii")) f.radii = triple_from(*c, where + ".radii");
      r.get("prob_level", f.prob_level);
      r.get("pet_intensity", f.pet_intensity);
      r.finish();
      spec.false_positives.push_back(f);
    }
  }
  if (const Json* b = top.child("background")) {
    ObjectReader r(*b, "background");
    r.get("pet_mean", spec.background.pet_mean);
    r.get("pet_sd", spec.background.pet_sd);
    r.get("ct_mean", spec.background.ct_mean);
    r.get("ct_sd", spec.background.ct_sd);
    r.finish();
  }
  top.get("noise_sd", spec.noise_sd);
  top.get("blur_radius", spec.blur_radius);
  top.get("seed", spec.seed);
  top.get("alpha", spec.alpha);
  top.get("beta", spec.beta);
  top.get("lesion_prob", spec.lesion_prob);
  top.get("background_prob", spec.background_prob);
  top.get("ct_lesion_offset", spec.ct_lesion_offset);
  top.finish();
  validate(spec);
  return spec;
}

Json to_json(const PhantomSpec& spec) {
  Json j;
  j["dims"] = Json::array({spec.dims.nz, spec.dims.ny, spec.dims.nx});
  j["spacing"] = spacing_json(spec.spacing);
  j["lesions"] = Json::array();
  for (const Lesion& l : spec.lesions) {
    j["lesions"].push_back({{"center", coord_json(l.center)},
                            {"radii", triple_json(l.radii)},
                            {"pet_intensity", l.pet_intensity}});
  }
  j["false_positives"] = Json::array();
  for (const FalsePositive& f : spec.false_positives) {
    j["false_positives"].push_back({{"center", coord_json(f.center)},
                                    {"radii", triple_json(f.radii)},
                                    {"prob_level", f.prob_level},
                                    {"pet_intensity", f.pet_intensity}});
  }
  j["background"] = {{"pet_mean", spec.background.pet_mean},
                     {"pet_sd", spec.background.pet_sd},
                     {"ct_mean", spec.background.ct_mean},
                     {"ct_sd", spec.background.ct_sd}};
  j["noise_sd"] = spec.noise_sd;
  j["blur_radius"] = spec.blur_radius;
  j["seed"] = spec.seed;
  j["alpha"] = spec.alpha;
  j["beta"] = spec.beta;
  j["lesion_prob"] = spec.lesion_prob;
  j["background_prob"] = spec.background_prob;
  j["ct_lesion_offset"] = spec.ct_lesion_offset;
  return j;
}

Json to_json(const RunReport& r, bool include_timings) {
  Json j;
  j["nodes"] = {{"train_positive", r.nodes[static_cast<std::size_t>(Role::train_positive)]},
                {"train_negative", r.nodes[static_cast<std::size_t>(Role::train_negative)]},
                {"test", r.nodes[static_cast<std::size_t>(Role::test)]}};
  j["part_count"] = r.part_count;
  j["edges"] = {{"neighborhood", r.edges[static_cast<std::size_t>(EdgeSource::neighborhood)]},
                {"global", r.edges[static_cast<std::size_t>(EdgeSource::global)]},
                {"uncertain", r.edges[static_cast<std::size_t>(EdgeSource::uncertain)]},
                {"total", r.edge_total()}};
  j["saturated_nodes"] = r.saturated_nodes;
  j["training"] = {
      {"skipped", r.training_skipped},
      {"epochs", r.epochs},
      {"initial_loss", r.initial_loss ? Json(*r.initial_loss) : Json(nullptr)},
      {"final_loss", r.final_loss ? Json(*r.final_loss) : Json(nullptr)},
      {"stop_reason", r.stop ? Json(std::string(to_string(*r.stop))) : Json(nullptr)},
  };
  j["flips"] = {{"one_to_zero", r.flips_one_to_zero}, {"zero_to_one", r.flips_zero_to_one}};
  if (include_timings) {
    Json t = Json::object();
    for (const auto& [stage, ms] : r.timings_ms) t[stage] = ms;
    j["timings_ms"] = t;
  }
  return j;
}

Json to_json(const MetricsReport& r) {
  Json j;
  j["dice"] = r.dice;
  j["hd95"] = r.hd95 ? Json(*r.hd95) : Json(nullptr);
  j["assd"] = r.assd ? Json(*r.assd) : Json(nullptr);
  j["surfaces"] = {{"pred", r.surface_pred}, {"gt", r.surface_gt}};
  j["spacing"] = spacing_json(r.spacing);
  return j;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::config, path.string() + ": invalid JSON: " + e.what());
  }
}

void write_json_file(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(Errc::io, "write failed for " + path.string());
}

}  // namespace voxelgraph
