#pragma once

#include <cstddef>
#include <vector>

namespace discus::nn {

// Dense NCHW float tensor. Storage is reused across resize() calls.
struct Tensor {
  int n = 0;
  int c = 0;
  int h = 0;
  int w = 0;
  std::vector<float> data;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_) { resize(n_, c_, h_, w_); }

  void resize(int n_, int c_, int h_, int w_);
  void zero();

  std::size_t size() const noexcept { return data.size(); }
  std::size_t plane() const noexcept { return static_cast<std::size_t>(h) * static_cast<std::size_t>(w); }
  std::size_t sample_size() const noexcept { return static_cast<std::size_t>(c) * plane(); }

  float* sample(int b) noexcept { return data.data() + static_cast<std::size_t>(b) * sample_size(); }
  const float* sample(int b) const noexcept { return data.data() + static_cast<std::size_t>(b) * sample_size(); }
  float* channel(int b, int ch) noexcept { return sample(b) + static_cast<std::size_t>(ch) * plane(); }
  const float* channel(int b, int ch) const noexcept {
    return sample(b) + static_cast<std::size_t>(ch) * plane();
  }
  float& at(int b, int ch, int y, int x) noexcept {
    return channel(b, ch)[static_cast<std::size_t>(y) * w + x];
  }
  float at(int b, int ch, int y, int x) const noexcept {
    return channel(b, ch)[static_cast<std::size_t>(y) * w + x];
  }
};

}  // namespace discus::nn
