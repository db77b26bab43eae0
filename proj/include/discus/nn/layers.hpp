#pragma once

// Forward and backward passes of the few layer types the generator needs.
// Parameters live in caller-owned flat arrays; gradients are accumulated.

#include <vector>

#include "discus/nn/tensor.hpp"

namespace discus::nn {

struct ConvShape {
  int cin = 0;
  int cout = 0;
  int kernel = 1;  // square, odd
  int stride = 1;

  int pad() const noexcept { return kernel / 2; }
  int out_extent(int in) const noexcept { return (in + 2 * pad() - kernel) / stride + 1; }
  std::size_t weight_count() const noexcept {
    return static_cast<std::size_t>(cout) * cin * kernel * kernel;
  }
  std::size_t patch() const noexcept { return static_cast<std::size_t>(cin) * kernel * kernel; }
};

// im2col scratch, tiled so a tile never exceeds a fixed float budget.
struct ConvWorkspace {
  std::vector<float> col;
  std::vector<float> dcol;
};

inline constexpr std::size_t kColumnBudget = std::size_t{1} << 21;

void im2col(const float* x, int h, int w, const ConvShape& s, int wo, int p0, int p1, float* col);
void col2im_add(const float* col, int h, int w, const ConvShape& s, int wo, int p0, int p1, float* x);

void conv2d_forward(const Tensor& x, const ConvShape& s, const float* weight, const float* bias, Tensor& y,
                    ConvWorkspace& ws);

// dx may be null. When accumulate_dx is false dx is overwritten.
void conv2d_backward(const Tensor& x, const Tensor& dy, const ConvShape& s, const float* weight, float* dweight,
                     float* dbias, Tensor* dx, bool accumulate_dx, ConvWorkspace& ws);

inline constexpr float kBatchNormEps = 1e-5f;

struct ChannelStats {
  std::vector<float> mean;
  std::vector<float> invstd;
};

// Biased per-channel statistics over batch and space.
ChannelStats channel_statistics(const Tensor& x);

// y = act(gamma * (x - mean) * invstd + beta). slope == 1 means no activation.
void batch_norm_act_forward(const Tensor& x, const ChannelStats& stats, const float* gamma, const float* beta,
                            float slope, Tensor& y);

// Backward through batch-statistics normalization. y is the forward output.
void batch_norm_act_backward(const Tensor& x, const Tensor& y, const ChannelStats& stats, const float* gamma,
                             float slope, const Tensor& dy, float* dgamma, float* dbeta, Tensor& dx);

void upsample2x_forward(const Tensor& x, Tensor& y);
void upsample2x_backward(const Tensor& dy, Tensor& dx);

}  // namespace discus::nn
