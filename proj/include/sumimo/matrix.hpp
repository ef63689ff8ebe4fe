#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "sumimo/complex.hpp"

namespace sumimo {

// Dense row-major complex matrix. Sized for link-level work (at most a
// thousand or so per side), so no blocking or external BLAS.
struct ComplexMatrix {
  int rows = 1;
  int cols = 1;
  std::vector<Complex> entries;

  ComplexMatrix(int r, int c) : rows(r), cols(c) {
    if (r < 1 || c < 1) throw std::invalid_argument("ComplexMatrix: rows and cols must be >= 1");
    entries.assign(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), Complex{});
  }

  Complex& operator()(int i, int j) {
    return entries[static_cast<std::size_t>(i) * cols + static_cast<std::size_t>(j)];
  }
  const Complex& operator()(int i, int j) const {
    return entries[static_cast<std::size_t>(i) * cols + static_cast<std::size_t>(j)];
  }
};

inline ComplexMatrix hermitian(const ComplexMatrix& m) {
  ComplexMatrix out(m.cols, m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out(j, i) = std::conj(m(i, j));
  return out;
}

inline std::vector<Complex> mat_vec_mul(const ComplexMatrix& m, std::span<const Complex> v) {
  if (static_cast<int>(v.size()) != m.cols)
    throw std::invalid_argument("mat_vec_mul: dimension mismatch");
  std::vector<Complex> out(static_cast<std::size_t>(m.rows));
  for (int i = 0; i < m.rows; ++i) {
    Complex acc{};
    for (int j = 0; j < m.cols; ++j) acc += m(i, j) * v[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

}  // namespace sumimo
