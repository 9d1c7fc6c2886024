#include "voxelgraph/sparse.hpp"

#include <algorithm>
#include <stdexcept>

#include "voxelgraph/parallel.hpp"

namespace voxelgraph {

double CsrMatrix::at(std::size_t i, std::size_t j) const noexcept {
  const auto first = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
  const auto last = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(j));
  if (it == last || *it != j) return 0.0;
  return values[static_cast<std::size_t>(it - cols.begin())];
}

DenseMatrix CsrMatrix::multiply(const DenseMatrix& rhs) const {
  if (rhs.rows != n) throw std::invalid_argument("CsrMatrix::multiply: shape mismatch");
  DenseMatrix out(n, rhs.cols);
  const std::size_t k = rhs.cols;
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double* dst = out.data.data() + i * k;
      for (std::size_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e) {
        const double w = values[e];
        const double* src = rhs.data.data() + static_cast<std::size_t>(cols[e]) * k;
        for (std::size_t c = 0; c < k; ++c) dst[c] += w * src[c];
      }
    }
  });
  return out;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: shape mismatch");
  DenseMatrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t p = 0; p < a.cols; ++p) {
      const double v = a(i, p);
      for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += v * b(p, j);
    }
  }
  return out;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows != b.rows) throw std::invalid_argument("matmul_tn: shape mismatch");
  DenseMatrix out(a.cols, b.cols);
  for (std::size_t r = 0; r < a.rows; ++r) {
    for (std::size_t i = 0; i < a.cols; ++i) {
      const double v = a(r, i);
      for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += v * b(r, j);
    }
  }
  return out;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.cols) throw std::invalid_argument("matmul_nt: shape mismatch");
  DenseMatrix out(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < b.rows; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols; ++p) s += a(i, p) * b(j, p);
      out(i, j) = s;
    }
  }
  return out;
}

}  // namespace voxelgraph
