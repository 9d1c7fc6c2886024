#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>
#include "voxelgraph/metrics.hpp"
#include "voxelgraph/phantom.hpp"
#include "voxelgraph/pipeline.hpp"

namespace voxelgraph {

using Json = nlohmann::ordered_json;

// Readers accept partial documents (missing keys keep their defaults) and
// reject unknown keys or wrongly typed values with Errc::config.
PipelineConfig pipeline_config_from_json(const Json& j);
Json to_json(const PipelineConfig& cfg);

PhantomSpec phantom_spec_from_json(const Json& j);
Json to_json(const PhantomSpec& spec);

/// Wall-clock timings are included only when requested so that reports
/// from repeated runs can be compared byte for byte.
Json to_json(const RunReport& report, bool include_timings = true);

/// hd95 and assd are null when undefined.
Json to_json(const MetricsReport& report);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const Json& j, const std::filesystem::path& path);

}  // namespace voxelgraph
