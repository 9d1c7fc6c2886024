#pragma once

#include <filesystem>

#include "voxelgraph/volume.hpp"

namespace voxelgraph {

// Minimal NIfTI-1 single-file (.nii) subset: 348-byte little-endian header,
// dim[0] = 3, datatype 2/16/64, vox_offset 352, magic "n+1\0". Header
// pixdim[1..3] carries (sx, sy, sz); the payload is x-fastest, which is the
// same memory order as Grid. All other header fields are written as zero
// and ignored on read.

inline constexpr std::int16_t kNiftiUint8 = 2;
inline constexpr std::int16_t kNiftiFloat32 = 16;
inline constexpr std::int16_t kNiftiFloat64 = 64;

/// Throws Errc::io when the file cannot be read and Errc::format for a
/// malformed header or truncated payload, naming the offending field.
Volume3 load_volume(const std::filesystem::path& path);

/// Throws Errc::io on write failure and Errc::input when an extent does not
/// fit the header's int16 dim fields.
void save_volume(const Volume3& vol, const std::filesystem::path& path);

void save_mask(const Mask3& mask, const std::filesystem::path& path);

/// load_volume followed by Mask3::from_volume.
Mask3 load_mask(const std::filesystem::path& path);

}  // namespace voxelgraph
