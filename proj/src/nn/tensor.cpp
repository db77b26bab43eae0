#include "discus/nn/tensor.hpp"

#include <algorithm>

#include "discus/core/error.hpp"

namespace discus::nn {

void Tensor::resize(int n_, int c_, int h_, int w_) {
  if (n_ < 0 || c_ < 0 || h_ < 0 || w_ < 0) throw DimensionError("tensor extents must be non-negative");
  n = n_;
  c = c_;
  h = h_;
  w = w_;
  data.resize(static_cast<std::size_t>(n) * c * h * w);
}

void Tensor::zero() { std::fill(data.begin(), data.end(), 0.0f); }

}  // namespace discus::nn
