#include "voxelgraph/error.hpp"

namespace voxelgraph {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::format: return "format";
    case Errc::io: return "io";
    case Errc::input: return "input";
    case Errc::config: return "config";
    case Errc::selection: return "selection";
    case Errc::training: return "training";
    case Errc::metric_undefined: return "metric_undefined";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

Error Error::tagged(std::string_view stage) const {
  return Error(code_, std::string(stage) + ": " + what());
}

}  // namespace voxelgraph
