#pragma once

#include "ncg/operator_core.hpp"

#include <random>

namespace ncg::testing {

inline CMatrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g;
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline CMatrix random_matrix(std::mt19937_64& rng, int d) { return random_matrix(rng, d, d); }

inline CMatrix random_hermitian(std::mt19937_64& rng, int d) {
  CMatrix m = random_matrix(rng, d);
  return 0.5 * (m + m.adjoint());
}

inline CMatrix diag(std::initializer_list<double> v) {
  CMatrix m = CMatrix::Zero(static_cast<int>(v.size()), static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) m(i, i) = x, ++i;
  return m;
}

}  // namespace ncg::testing
