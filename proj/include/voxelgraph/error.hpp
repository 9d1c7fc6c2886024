#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace voxelgraph {

/// Failure categories. The CLI maps each onto an exit code.
enum class Errc {
  format,            // malformed or unsupported volume file
  io,                // file could not be opened, read or written
  input,             // data violates a domain contract (range, NaN, dims)
  config,            // configuration or phantom spec rejected
  selection,         // node selection produced a missing class
  training,          // optimizer diverged
  metric_undefined,  // distance metric requested on an empty mask
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

  /// Same error with "stage: " prepended to the message.
  Error tagged(std::string_view stage) const;

 private:
  Errc code_;
};

}  // namespace voxelgraph
