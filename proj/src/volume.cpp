#include "voxelgraph/volume.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace voxelgraph {

std::string to_string(DType t) {
  switch (t) {
    case DType::uint8: return "uint8";
    case DType::float32: return "float32";
    case DType::float64: return "float64";
  }
  return "unknown";
}

std::string to_string(const Coord& c) {
  return "(z=" + std::to_string(c.z) + ", y=" + std::to_string(c.y) +
         ", x=" + std::to_string(c.x) + ")";
}

void validate_dims(const Dims& d) {
  if (d.nz <= 0 || d.ny <= 0 || d.nx <= 0) {
    throw Error(Errc::input, "dims must be positive, got (" +
                                 std::to_string(d.nz) + ", " +
                                 std::to_string(d.ny) + ", " +
                                 std::to_string(d.nx) + ")");
  }
}

void validate_spacing(const Spacing& s) {
  for (double v : {s.sz, s.sy, s.sx}) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw Error(Errc::input, "spacing components must be finite and > 0");
    }
  }
}

void require_same_dims(const Dims& a, const Dims& b, std::string_view what) {
  if (!(a == b)) {
    throw Error(Errc::input,
                std::string(what) + ": dims mismatch (" + std::to_string(a.nz) +
                    "," + std::to_string(a.ny) + "," + std::to_string(a.nx) +
                    ") vs (" + std::to_string(b.nz) + "," +
                    std::to_string(b.ny) + "," + std::to_string(b.nx) + ")");
  }
}

Spacing quantize_spacing(const Spacing& s) {
  // volatile keeps GCC 11 at -O3 from vectorizing the round trip through
  // float into a no-op for the first two lanes.
  const auto f32 = [](double v) {
    volatile float f = static_cast<float>(v);
    return static_cast<double>(f);
  };
  return {f32(s.sz), f32(s.sy), f32(s.sx)};
}

// ---------------------------------------------------------------- Volume3

Volume3::Volume3(Dims dims, Spacing spacing, DType dtype, double fill)
    : Grid<double>(dims, quantize_spacing(spacing)), dtype_(dtype) {
  validate_spacing(spacing_);
  const double q = quantize(fill);
  std::fill(data_.begin(), data_.end(), q);
}

Volume3::Volume3(Dims dims, Spacing spacing, DType dtype,
                 std::vector<double> data)
    : Grid<double>(dims, quantize_spacing(spacing), std::move(data)),
      dtype_(dtype) {
  validate_spacing(spacing_);
  for (double& v : data_) v = quantize(v);
}

double Volume3::quantize(double v) const {
  switch (dtype_) {
    case DType::float64:
      return v;
    case DType::float32:
      return static_cast<double>(static_cast<float>(v));
    case DType::uint8:
      if (!(v >= 0.0 && v <= 255.0) || v != std::floor(v)) {
        throw Error(Errc::input, "value " + std::to_string(v) +
                                     " is not representable as uint8");
      }
      return v;
  }
  return v;
}

void Volume3::set(std::size_t i, double v) { data_[i] = quantize(v); }

bool operator==(const Volume3& a, const Volume3& b) {
  if (!(a.dims_ == b.dims_) || !(a.spacing_ == b.spacing_) ||
      a.dtype_ != b.dtype_) {
    return false;
  }
  // Bitwise so NaN payloads compare equal to themselves.
  return std::memcmp(a.data_.data(), b.data_.data(),
                     a.data_.size() * sizeof(double)) == 0;
}

// ---------------------------------------------------------------- Mask3

Mask3::Mask3(Dims dims, Spacing spacing)
    : Grid<std::uint8_t>(dims, quantize_spacing(spacing), std::uint8_t{0}) {}

Mask3::Mask3(Dims dims, Spacing spacing, std::vector<std::uint8_t> data)
    : Grid<std::uint8_t>(dims, quantize_spacing(spacing), std::move(data)) {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (data_[i] > 1) {
      throw Error(Errc::input, "mask voxel " + to_string(coord(i)) +
                                   " has value " + std::to_string(data_[i]) +
                                   ", expected 0 or 1");
    }
  }
}

Mask3 Mask3::from_volume(const Volume3& v) {
  Mask3 m(v.dims(), v.spacing());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = v[i];
    if (x == 1.0) {
      m.data_[i] = 1;
    } else if (x != 0.0) {
      throw Error(Errc::input, "mask voxel " + to_string(v.coord(i)) +
                                   " has value " + std::to_string(x) +
                                   ", expected 0 or 1");
    }
  }
  return m;
}

Volume3 Mask3::to_volume() const {
  std::vector<double> values(data_.begin(), data_.end());
  return Volume3(dims_, spacing_, DType::uint8, std::move(values));
}

std::size_t Mask3::count() const noexcept {
  std::size_t n = 0;
  for (auto v : data_) n += v;
  return n;
}

Mask3 mask_union(const Mask3& a, const Mask3& b) {
  require_same_dims(a.dims(), b.dims(), "mask_union");
  Mask3 out(a.dims(), a.spacing());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a.test(i) || b.test(i));
  return out;
}

Mask3 mask_difference(const Mask3& a, const Mask3& b) {
  require_same_dims(a.dims(), b.dims(), "mask_difference");
  Mask3 out(a.dims(), a.spacing());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a.test(i) && !b.test(i));
  return out;
}

}  // namespace voxelgraph
