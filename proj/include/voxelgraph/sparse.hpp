#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace voxelgraph {

/// Row-major dense matrix of doubles.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) noexcept {
    return data[i * cols + j];
  }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data[i * cols + j];
  }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data.data() + i * cols, cols};
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;
};

/// Square sparse matrix in compressed-row form; column indices within a row
/// are strictly increasing.
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> cols;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return cols.size(); }

  /// Stored value at (i, j), or 0 when absent.
  double at(std::size_t i, std::size_t j) const noexcept;

  /// this * rhs. Rows are computed independently and each row's sum runs
  /// in column order, so the result does not depend on the worker count.
  DenseMatrix multiply(const DenseMatrix& rhs) const;
};

/// a * b for dense operands (a.cols == b.rows).
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// aᵀ * b (a.rows == b.rows).
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
/// a * bᵀ (a.cols == b.cols).
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace voxelgraph
