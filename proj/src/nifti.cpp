#include "voxelgraph/nifti.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace voxelgraph {

namespace {

static_assert(std::endian::native == std::endian::little,
              "NIfTI I/O assumes a little-endian host");

constexpr std::size_t kHeaderSize = 348;
constexpr std::size_t kVoxOffset = 352;

// Byte offsets of the fields this subset touches.
constexpr std::size_t kOffSizeofHdr = 0;
constexpr std::size_t kOffDim = 40;
constexpr std::size_t kOffDatatype = 70;
constexpr std::size_t kOffBitpix = 72;
constexpr std::size_t kOffPixdim = 76;
constexpr std::size_t kOffVoxOffset = 108;
constexpr std::size_t kOffMagic = 344;

template <typename T>
T read_le(const std::vector<char>& buf, std::size_t off) {
  T v;
  std::memcpy(&v, buf.data() + off, sizeof(T));
  return v;
}

template <typename T>
void write_le(std::vector<char>& buf, std::size_t off, T v) {
  std::memcpy(buf.data() + off, &v, sizeof(T));
}

[[noreturn]] void format_error(const std::filesystem::path& path,
                               const std::string& field,
                               const std::string& detail) {
  throw Error(Errc::format,
              path.string() + ": invalid " + field + " (" + detail + ")");
}

std::int16_t datatype_code(DType t) {
  switch (t) {
    case DType::uint8: return kNiftiUint8;
    case DType::float32: return kNiftiFloat32;
    case DType::float64: return kNiftiFloat64;
  }
  return 0;
}

std::size_t bytes_per_voxel(DType t) {
  switch (t) {
    case DType::uint8: return 1;
    case DType::float32: return 4;
    case DType::float64: return 8;
  }
  return 0;
}

}  // namespace

Volume3 load_volume(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());

  if (bytes.size() < kHeaderSize) {
    format_error(path, "sizeof_hdr",
                 "file is " + std::to_string(bytes.size()) +
                     " bytes, shorter than the 348-byte header");
  }
  const auto sizeof_hdr = read_le<std::int32_t>(bytes, kOffSizeofHdr);
  if (sizeof_hdr != static_cast<std::int32_t>(kHeaderSize)) {
    format_error(path, "sizeof_hdr",
                 "expected 348, found " + std::to_string(sizeof_hdr));
  }
  if (std::memcmp(bytes.data() + kOffMagic, "n+1\0", 4) != 0) {
    format_error(path, "magic", "expected \"n+1\\0\" single-file NIfTI-1");
  }

  std::array<std::int16_t, 8> dim{};
  for (std::size_t k = 0; k < 8; ++k) {
    dim[k] = read_le<std::int16_t>(bytes, kOffDim + 2 * k);
  }
  if (dim[0] != 3) {
    // Trailing singleton dimensions are tolerated; anything else is 4D+.
    bool singleton_tail = dim[0] > 3 && dim[0] <= 7;
    for (int k = 4; singleton_tail && k <= dim[0]; ++k) {
      singleton_tail = dim[k] == 1;
    }
    if (!singleton_tail) {
      format_error(path, "dim[0]",
                   "expected 3, found " + std::to_string(dim[0]));
    }
  }
  for (int k = 1; k <= 3; ++k) {
    if (dim[k] <= 0) {
      format_error(path, "dim[" + std::to_string(k) + "]",
                   "must be positive, found " + std::to_string(dim[k]));
    }
  }

  const auto code = read_le<std::int16_t>(bytes, kOffDatatype);
  DType dtype;
  switch (code) {
    case kNiftiUint8: dtype = DType::uint8; break;
    case kNiftiFloat32: dtype = DType::float32; break;
    case kNiftiFloat64: dtype = DType::float64; break;
    default:
      format_error(path, "datatype",
                   "unsupported code " + std::to_string(code) +
                       " (supported: 2 uint8, 16 float32, 64 float64)");
  }
  const auto bitpix = read_le<std::int16_t>(bytes, kOffBitpix);
  const std::size_t bpv = bytes_per_voxel(dtype);
  if (bitpix != static_cast<std::int16_t>(8 * bpv)) {
    format_error(path, "bitpix",
                 "expected " + std::to_string(8 * bpv) + " for datatype " +
                     std::to_string(code) + ", found " +
                     std::to_string(bitpix));
  }

  const Spacing spacing{read_le<float>(bytes, kOffPixdim + 4 * 3),
                        read_le<float>(bytes, kOffPixdim + 4 * 2),
                        read_le<float>(bytes, kOffPixdim + 4 * 1)};
  for (int k = 1; k <= 3; ++k) {
    const float p = read_le<float>(bytes, kOffPixdim + 4 * k);
    if (!(p > 0.0f) || !std::isfinite(p)) {
      format_error(path, "pixdim[" + std::to_string(k) + "]",
                   "must be finite and > 0, found " + std::to_string(p));
    }
  }

  const float vox_offset_f = read_le<float>(bytes, kOffVoxOffset);
  if (!(vox_offset_f >= static_cast<float>(kHeaderSize)) ||
      vox_offset_f != std::floor(vox_offset_f)) {
    format_error(path, "vox_offset",
                 "expected an integral offset >= 348, found " +
                     std::to_string(vox_offset_f));
  }
  const auto vox_offset = static_cast<std::size_t>(vox_offset_f);

  const Dims dims{dim[3], dim[2], dim[1]};
  const std::size_t n = dims.size();
  const std::size_t need = vox_offset + n * bpv;
  if (bytes.size() < need) {
    format_error(path, "payload",
                 "truncated: need " + std::to_string(need) +
                     " bytes, file has " + std::to_string(bytes.size()));
  }

  std::vector<double> data(n);
  const char* p = bytes.data() + vox_offset;
  switch (dtype) {
    case DType::uint8:
      for (std::size_t i = 0; i < n; ++i) {
        data[i] = static_cast<unsigned char>(p[i]);
      }
      break;
    case DType::float32:
      for (std::size_t i = 0; i < n; ++i) {
        float v;
        std::memcpy(&v, p + 4 * i, 4);
        data[i] = v;
      }
      break;
    case DType::float64:
      std::memcpy(data.data(), p, 8 * n);
      break;
  }
  return Volume3(dims, spacing, dtype, std::move(data));
}

void save_volume(const Volume3& vol, const std::filesystem::path& path) {
  const Dims& d = vol.dims();
  constexpr auto kMaxDim = std::numeric_limits<std::int16_t>::max();
  if (d.nx > kMaxDim || d.ny > kMaxDim || d.nz > kMaxDim) {
    throw Error(Errc::input, "volume extent exceeds the NIfTI-1 limit of " +
                                 std::to_string(kMaxDim));
  }

  const DType dtype = vol.dtype();
  const std::size_t bpv = bytes_per_voxel(dtype);
  const std::size_t n = vol.size();
  std::vector<char> bytes(kVoxOffset + n * bpv, 0);

  write_le<std::int32_t>(bytes, kOffSizeofHdr, kHeaderSize);
  write_le<std::int16_t>(bytes, kOffDim + 0, 3);
  write_le<std::int16_t>(bytes, kOffDim + 2, static_cast<std::int16_t>(d.nx));
  write_le<std::int16_t>(bytes, kOffDim + 4, static_cast<std::int16_t>(d.ny));
  write_le<std::int16_t>(bytes, kOffDim + 6, static_cast<std::int16_t>(d.nz));
  write_le<std::int16_t>(bytes, kOffDatatype, datatype_code(dtype));
  write_le<std::int16_t>(bytes, kOffBitpix,
                         static_cast<std::int16_t>(8 * bpv));
  const Spacing& s = vol.spacing();
  write_le<float>(bytes, kOffPixdim + 4, static_cast<float>(s.sx));
  write_le<float>(bytes, kOffPixdim + 8, static_cast<float>(s.sy));
  write_le<float>(bytes, kOffPixdim + 12, static_cast<float>(s.sz));
  write_le<float>(bytes, kOffVoxOffset, static_cast<float>(kVoxOffset));
  std::memcpy(bytes.data() + kOffMagic, "n+1\0", 4);

  char* p = bytes.data() + kVoxOffset;
  const auto values = vol.values();
  switch (dtype) {
    case DType::uint8:
      for (std::size_t i = 0; i < n; ++i) {
        p[i] = static_cast<char>(static_cast<unsigned char>(values[i]));
      }
      break;
    case DType::float32:
      for (std::size_t i = 0; i < n; ++i) {
        const auto v = static_cast<float>(values[i]);
        std::memcpy(p + 4 * i, &v, 4);
      }
      break;
    case DType::float64:
      std::memcpy(p, values.data(), 8 * n);
      break;
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io, "write failed for " + path.string());
}

void save_mask(const Mask3& mask, const std::filesystem::path& path) {
  save_volume(mask.to_volume(), path);
}

Mask3 load_mask(const std::filesystem::path& path) {
  try {
    return Mask3::from_volume(load_volume(path));
  } catch (const Error& e) {
    if (e.code() == Errc::input) throw e.tagged(path.string());
    throw;
  }
}

}  // namespace voxelgraph
