#pragma once

#include <cmath>

#include "morphotag/diff.hpp"

namespace morphotag {

// Uniform Glorot (Xavier) initialization: U(-a, a), a = sqrt(6 / (rows + cols)).
inline diff::Tensor glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  diff::Tensor t(diff::Shape{rows, cols});
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  for (auto& v : t.data) v = rng.uniform(-limit, limit);
  return t;
}

}  // namespace morphotag
