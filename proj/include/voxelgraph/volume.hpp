#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "voxelgraph/error.hpp"

namespace voxelgraph {

/// Grid extent, z outermost.
struct Dims {
  std::int64_t nz = 0;
  std::int64_t ny = 0;
  std::int64_t nx = 0;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(nz * ny * nx);
  }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Voxel size in millimeters, same axis order as Dims.
struct Spacing {
  double sz = 1.0;
  double sy = 1.0;
  double sx = 1.0;

  friend bool operator==(const Spacing&, const Spacing&) = default;
};

struct Coord {
  std::int64_t z = 0;
  std::int64_t y = 0;
  std::int64_t x = 0;

  friend bool operator==(const Coord&, const Coord&) = default;
};

enum class DType : std::uint8_t { uint8, float32, float64 };

std::string to_string(DType t);
std::string to_string(const Coord& c);

/// Throws Errc::input unless every extent is positive.
void validate_dims(const Dims& dims);
/// Throws Errc::input unless every component is finite and > 0.
void validate_spacing(const Spacing& spacing);

/// Dense 3D grid, row-major with x fastest.
template <typename T>
class Grid {
 public:
  Grid() = default;

  Grid(Dims dims, Spacing spacing, T fill = T{})
      : dims_(dims), spacing_(spacing) {
    validate_dims(dims_);
    validate_spacing(spacing_);
    data_.assign(dims_.size(), fill);
  }

  Grid(Dims dims, Spacing spacing, std::vector<T> data)
      : dims_(dims), spacing_(spacing), data_(std::move(data)) {
    validate_dims(dims_);
    validate_spacing(spacing_);
    if (data_.size() != dims_.size()) {
      throw Error(Errc::input, "grid data length " +
                                   std::to_string(data_.size()) +
                                   " does not match dims product " +
                                   std::to_string(dims_.size()));
    }
  }

  const Dims& dims() const noexcept { return dims_; }
  const Spacing& spacing() const noexcept { return spacing_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::span<const T> values() const noexcept { return data_; }

  const T& operator[](std::size_t i) const noexcept { return data_[i]; }
  const T& at(std::int64_t z, std::int64_t y, std::int64_t x) const noexcept {
    return data_[index(z, y, x)];
  }

  std::size_t index(std::int64_t z, std::int64_t y,
                    std::int64_t x) const noexcept {
    return static_cast<std::size_t>((z * dims_.ny + y) * dims_.nx + x);
  }
  std::size_t index(const Coord& c) const noexcept {
    return index(c.z, c.y, c.x);
  }
  Coord coord(std::size_t i) const noexcept {
    const auto li = static_cast<std::int64_t>(i);
    const std::int64_t plane = dims_.ny * dims_.nx;
    return {li / plane, (li % plane) / dims_.nx, li % dims_.nx};
  }
  bool contains(std::int64_t z, std::int64_t y, std::int64_t x) const noexcept {
    return z >= 0 && y >= 0 && x >= 0 && z < dims_.nz && y < dims_.ny &&
           x < dims_.nx;
  }

 protected:
  Dims dims_{};
  Spacing spacing_{};
  std::vector<T> data_;
};

/// Scalar volume. Values are held as double and quantized to the dtype on
/// every write, so saving and reloading reproduces them bit for bit.
/// Spacing is quantized to float32 for the same reason.
class Volume3 : public Grid<double> {
 public:
  Volume3() = default;
  Volume3(Dims dims, Spacing spacing, DType dtype, double fill = 0.0);
  Volume3(Dims dims, Spacing spacing, DType dtype, std::vector<double> data);

  DType dtype() const noexcept { return dtype_; }
  void set(std::size_t i, double v);

  friend bool operator==(const Volume3& a, const Volume3& b);

 private:
  double quantize(double v) const;
  DType dtype_ = DType::float64;
};

/// Binary volume: every element is 0 or 1.
class Mask3 : public Grid<std::uint8_t> {
 public:
  Mask3() = default;
  Mask3(Dims dims, Spacing spacing);
  Mask3(Dims dims, Spacing spacing, std::vector<std::uint8_t> data);

  /// Throws Errc::input naming the first voxel that is not 0 or 1.
  static Mask3 from_volume(const Volume3& v);
  Volume3 to_volume() const;

  void set(std::size_t i, bool on) noexcept { data_[i] = on ? 1 : 0; }
  bool test(std::size_t i) const noexcept { return data_[i] != 0; }
  std::size_t count() const noexcept;

  friend bool operator==(const Mask3& a, const Mask3& b) {
    return a.dims_ == b.dims_ && a.spacing_ == b.spacing_ && a.data_ == b.data_;
  }
};

Spacing quantize_spacing(const Spacing& s);

/// Element-wise set operations; operands must share dims.
Mask3 mask_union(const Mask3& a, const Mask3& b);
Mask3 mask_difference(const Mask3& a, const Mask3& b);

/// Throws Errc::input when dims differ.
void require_same_dims(const Dims& a, const Dims& b, std::string_view what);

}  // namespace voxelgraph
