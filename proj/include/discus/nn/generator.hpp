#pragma once

// Skip-connected encoder-decoder generator. Each resolution level has a
// 1x1 skip branch, two 3x3 convolutions on the way down (the first strided)
// and a normalized concat followed by 3x3 and 1x1 convolutions on the way up.
// A final 1x1 convolution with bias maps to the output channels.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "discus/nn/layers.hpp"
#include "discus/nn/tensor.hpp"

namespace discus::nn {

struct GeneratorConfig {
  int scales = 6;
  int channels = 128;
  int skip_channels = 128;
  int in_channels = 4;
  int out_channels = 2;
  float slope = 0.2f;

  void validate() const;
  // Spatial extents are padded up to a multiple of this.
  int grid_multiple() const noexcept { return 1 << scales; }
};

// Closed-form parameter count for a configuration.
std::size_t generator_param_count(const GeneratorConfig& cfg);

class Generator {
 public:
  Generator(const GeneratorConfig& cfg, std::uint64_t seed);
  ~Generator();
  Generator(const Generator&) = delete;
  Generator& operator=(const Generator&) = delete;
  Generator(Generator&&) noexcept;
  Generator& operator=(Generator&&) noexcept;

  const GeneratorConfig& config() const noexcept { return cfg_; }
  std::size_t param_count() const noexcept { return theta_.size(); }

  std::span<float> parameters() noexcept { return theta_; }
  std::span<const float> parameters() const noexcept { return theta_; }
  std::span<float> gradients() noexcept { return grad_; }
  std::span<const float> gradients() const noexcept { return grad_; }
  void zero_grad();

  // Batch-statistics forward pass (N, in, H, W) -> (N, out, H, W) that keeps
  // what backward() needs.
  const Tensor& forward_train(const Tensor& input);
  // Accumulates parameter gradients and returns the input gradient.
  const Tensor& backward(const Tensor& grad_output);

  // Normalization statistics for evaluation. Each accumulated batch runs a
  // batch-statistics forward pass; the frozen mean and variance of every
  // layer are the averages over the accumulated batches.
  void begin_calibration();
  void accumulate_statistics(const Tensor& input);
  void end_calibration();
  // Single-batch shorthand for the three calls above.
  void freeze_statistics(const Tensor& input);
  bool has_frozen_statistics() const noexcept { return frozen_; }
  // Forward pass with frozen statistics. Throws if none were frozen.
  Tensor forward_eval(const Tensor& input);

  // Frozen per-channel (mean, invstd) pairs, layer by layer.
  std::vector<float> normalization_state() const;
  void set_normalization_state(std::span<const float> state);

 private:
  struct Level;
  enum class Mode { train, eval, calibrate };

  void build(std::uint64_t seed);
  const Tensor& run(const Tensor& input, Mode mode);
  void forward_level(int i, const Tensor& x, Mode mode);
  void backward_level(int i, const Tensor& x, const Tensor& dout, Tensor& dx);

  GeneratorConfig cfg_;
  std::vector<float> theta_;
  std::vector<float> grad_;
  std::vector<std::unique_ptr<Level>> levels_;
  ConvShape final_shape_{};
  std::size_t final_w_ = 0;
  std::size_t final_b_ = 0;
  bool frozen_ = false;
  int calibration_batches_ = -1;
  bool cached_ = false;
  int in_h_ = 0;
  int in_w_ = 0;
  Tensor padded_in_;
  Tensor out_full_;
  Tensor out_;
  Tensor grad_full_;
  Tensor grad_in_full_;
  Tensor grad_in_;
  ConvWorkspace ws_;
};

}  // namespace discus::nn
