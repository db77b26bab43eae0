#include "discus/nn/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "discus/core/error.hpp"

namespace discus::nn {

namespace {

struct ConvParams {
  ConvShape shape;
  std::size_t w = 0;
  std::size_t b = 0;
};

}  // namespace

struct BnParams {
  int ch = 0;
  std::size_t gamma = 0;
  std::size_t beta = 0;
  ChannelStats batch;
  ChannelStats frozen;
  std::vector<double> acc_mean;
  std::vector<double> acc_var;
};

struct Generator::Level {
  ConvParams skip, down1, down2, up1, up2;
  BnParams skip_bn, down1_bn, down2_bn, cat_bn, up1_bn, up2_bn;

  Tensor skip_pre, skip_out, d1_pre, d1_out, d2_pre, d2_out;
  Tensor up, cat, cat_n, u1_pre, u1_out, u2_pre, u2_out;
  Tensor g_a, g_b, g_deeper, g_d2;
};

void GeneratorConfig::validate() const {
  if (scales < 1) throw ConfigError("generator needs at least one scale");
  if (scales > 12) throw ConfigError("generator scale count is unreasonably large");
  if (channels < 1) throw ConfigError("generator channel count must be positive");
  if (skip_channels < 0) throw ConfigError("skip channel count must be non-negative");
  if (in_channels < 2) throw ConfigError("generator needs at least two input channels");
  if (out_channels != 2) throw ConfigError("generator output must have two channels");
  if (!(slope > 0.0f && slope <= 1.0f)) throw ConfigError("activation slope must lie in (0, 1]");
}

std::size_t generator_param_count(const GeneratorConfig& cfg) {
  cfg.validate();
  const std::size_t c = cfg.channels;
  const std::size_t s = cfg.skip_channels;
  std::size_t total = 0;
  for (int i = 0; i < cfg.scales; ++i) {
    const std::size_t cin = i == 0 ? cfg.in_channels : c;
    if (s > 0) total += cin * s + s + 2 * s;
    total += cin * c * 9 + c + 2 * c;
    total += c * c * 9 + c + 2 * c;
    total += 2 * (s + c);
    total += (s + c) * c * 9 + c + 2 * c;
    total += c * c + c + 2 * c;
  }
  total += c * cfg.out_channels + cfg.out_channels;
  return total;
}

Generator::Generator(const GeneratorConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  build(seed);
}

Generator::~Generator() = default;
Generator::Generator(Generator&&) noexcept = default;
Generator& Generator::operator=(Generator&&) noexcept = default;

void Generator::build(std::uint64_t seed) {
  std::size_t cursor = 0;
  auto conv = [&](int cin, int cout, int k, int stride) {
    ConvParams p;
    p.shape = ConvShape{cin, cout, k, stride};
    p.w = cursor;
    cursor += p.shape.weight_count();
    p.b = cursor;
    cursor += static_cast<std::size_t>(cout);
    return p;
  };
  auto bn = [&](int ch) {
    BnParams p;
    p.ch = ch;
    p.gamma = cursor;
    cursor += static_cast<std::size_t>(ch);
    p.beta = cursor;
    cursor += static_cast<std::size_t>(ch);
    return p;
  };

  const int c = cfg_.channels;
  const int s = cfg_.skip_channels;
  for (int i = 0; i < cfg_.scales; ++i) {
    auto lv = std::make_unique<Level>();
    const int cin = i == 0 ? cfg_.in_channels : c;
    if (s > 0) {
      lv->skip = conv(cin, s, 1, 1);
      lv->skip_bn = bn(s);
    }
    lv->down1 = conv(cin, c, 3, 2);
    lv->down1_bn = bn(c);
    lv->down2 = conv(c, c, 3, 1);
    lv->down2_bn = bn(c);
    lv->cat_bn = bn(s + c);
    lv->up1 = conv(s + c, c, 3, 1);
    lv->up1_bn = bn(c);
    lv->up2 = conv(c, c, 1, 1);
    lv->up2_bn = bn(c);
    levels_.push_back(std::move(lv));
  }
  final_shape_ = ConvShape{c, cfg_.out_channels, 1, 1};
  final_w_ = cursor;
  cursor += final_shape_.weight_count();
  final_b_ = cursor;
  cursor += static_cast<std::size_t>(cfg_.out_channels);

  theta_.assign(cursor, 0.0f);
  grad_.assign(cursor, 0.0f);

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases, unit
  // scale and zero shift for normalization layers.
  std::mt19937_64 rng(seed);
  auto init_conv = [&](const ConvParams& p) {
    if (p.shape.cout == 0) return;
    const float bound = 1.0f / std::sqrt(static_cast<float>(p.shape.patch()));
    std::uniform_real_distribution<float> u(-bound, bound);
    for (std::size_t j = 0; j < p.shape.weight_count(); ++j) theta_[p.w + j] = u(rng);
    for (int j = 0; j < p.shape.cout; ++j) theta_[p.b + j] = u(rng);
  };
  auto init_bn = [&](const BnParams& p) {
    for (int j = 0; j < p.ch; ++j) theta_[p.gamma + j] = 1.0f;
  };
  for (auto& lv : levels_) {
    if (s > 0) {
      init_conv(lv->skip);
      init_bn(lv->skip_bn);
    }
    init_conv(lv->down1);
    init_bn(lv->down1_bn);
    init_conv(lv->down2);
    init_bn(lv->down2_bn);
    init_bn(lv->cat_bn);
    init_conv(lv->up1);
    init_bn(lv->up1_bn);
    init_conv(lv->up2);
    init_bn(lv->up2_bn);
  }
  init_conv(ConvParams{final_shape_, final_w_, final_b_});
}

void Generator::zero_grad() { std::fill(grad_.begin(), grad_.end(), 0.0f); }

namespace {

const ChannelStats& select_stats(BnParams& bn, const Tensor& pre, int mode) {
  // mode: 0 train, 1 eval, 2 calibrate
  if (mode == 1) return bn.frozen;
  bn.batch = channel_statistics(pre);
  if (mode == 2) {
    bn.acc_mean.resize(bn.ch, 0.0);
    bn.acc_var.resize(bn.ch, 0.0);
    for (int c = 0; c < bn.ch; ++c) {
      const double is = bn.batch.invstd[c];
      bn.acc_mean[c] += bn.batch.mean[c];
      bn.acc_var[c] += 1.0 / (is * is) - kBatchNormEps;
    }
  }
  return bn.batch;
}

}  // namespace

void Generator::forward_level(int i, const Tensor& x, Mode mode) {
  Level& L = *levels_[i];
  const int m = static_cast<int>(mode);
  const float* th = theta_.data();
  const float slope = cfg_.slope;
  const bool has_skip = cfg_.skip_channels > 0;

  if (has_skip) {
    conv2d_forward(x, L.skip.shape, th + L.skip.w, th + L.skip.b, L.skip_pre, ws_);
    batch_norm_act_forward(L.skip_pre, select_stats(L.skip_bn, L.skip_pre, m), th + L.skip_bn.gamma,
                           th + L.skip_bn.beta, slope, L.skip_out);
  }
  conv2d_forward(x, L.down1.shape, th + L.down1.w, th + L.down1.b, L.d1_pre, ws_);
  batch_norm_act_forward(L.d1_pre, select_stats(L.down1_bn, L.d1_pre, m), th + L.down1_bn.gamma,
                         th + L.down1_bn.beta, slope, L.d1_out);
  conv2d_forward(L.d1_out, L.down2.shape, th + L.down2.w, th + L.down2.b, L.d2_pre, ws_);
  batch_norm_act_forward(L.d2_pre, select_stats(L.down2_bn, L.d2_pre, m), th + L.down2_bn.gamma,
                         th + L.down2_bn.beta, slope, L.d2_out);

  const Tensor* deeper = &L.d2_out;
  if (i + 1 < cfg_.scales) {
    forward_level(i + 1, L.d2_out, mode);
    deeper = &levels_[i + 1]->u2_out;
  }
  upsample2x_forward(*deeper, L.up);

  const int s = cfg_.skip_channels;
  L.cat.resize(x.n, s + L.up.c, L.up.h, L.up.w);
  for (int b = 0; b < x.n; ++b) {
    float* dst = L.cat.sample(b);
    if (has_skip) dst = std::copy_n(L.skip_out.sample(b), L.skip_out.sample_size(), dst);
    std::copy_n(L.up.sample(b), L.up.sample_size(), dst);
  }
  batch_norm_act_forward(L.cat, select_stats(L.cat_bn, L.cat, m), th + L.cat_bn.gamma, th + L.cat_bn.beta, 1.0f,
                         L.cat_n);
  conv2d_forward(L.cat_n, L.up1.shape, th + L.up1.w, th + L.up1.b, L.u1_pre, ws_);
  batch_norm_act_forward(L.u1_pre, select_stats(L.up1_bn, L.u1_pre, m), th + L.up1_bn.gamma, th + L.up1_bn.beta,
                         slope, L.u1_out);
  conv2d_forward(L.u1_out, L.up2.shape, th + L.up2.w, th + L.up2.b, L.u2_pre, ws_);
  batch_norm_act_forward(L.u2_pre, select_stats(L.up2_bn, L.u2_pre, m), th + L.up2_bn.gamma, th + L.up2_bn.beta,
                         slope, L.u2_out);
}

const Tensor& Generator::run(const Tensor& input, Mode mode) {
  if (input.c != cfg_.in_channels) throw DimensionError("generator input has the wrong channel count");
  if (input.n < 1 || input.h < 1 || input.w < 1) throw DimensionError("generator input is empty");
  if (mode == Mode::eval && !frozen_) throw Error("generator has no frozen normalization statistics");

  const int g = cfg_.grid_multiple();
  const int hp = (input.h + g - 1) / g * g;
  const int wp = (input.w + g - 1) / g * g;
  in_h_ = input.h;
  in_w_ = input.w;
  padded_in_.resize(input.n, input.c, hp, wp);
  padded_in_.zero();
  for (int b = 0; b < input.n; ++b)
    for (int ch = 0; ch < input.c; ++ch)
      for (int y = 0; y < input.h; ++y)
        std::copy_n(input.channel(b, ch) + static_cast<std::size_t>(y) * input.w, input.w,
                    padded_in_.channel(b, ch) + static_cast<std::size_t>(y) * wp);

  forward_level(0, padded_in_, mode);
  conv2d_forward(levels_[0]->u2_out, final_shape_, theta_.data() + final_w_, theta_.data() + final_b_, out_full_,
                 ws_);

  out_.resize(input.n, cfg_.out_channels, input.h, input.w);
  for (int b = 0; b < input.n; ++b)
    for (int ch = 0; ch < cfg_.out_channels; ++ch)
      for (int y = 0; y < input.h; ++y)
        std::copy_n(out_full_.channel(b, ch) + static_cast<std::size_t>(y) * wp, input.w,
                    out_.channel(b, ch) + static_cast<std::size_t>(y) * input.w);
  cached_ = mode == Mode::train;
  return out_;
}

const Tensor& Generator::forward_train(const Tensor& input) { return run(input, Mode::train); }

void Generator::begin_calibration() {
  for (auto& lv : levels_)
    for (BnParams* bn : {&lv->skip_bn, &lv->down1_bn, &lv->down2_bn, &lv->cat_bn, &lv->up1_bn, &lv->up2_bn}) {
      bn->acc_mean.assign(bn->ch, 0.0);
      bn->acc_var.assign(bn->ch, 0.0);
    }
  calibration_batches_ = 0;
}

void Generator::accumulate_statistics(const Tensor& input) {
  if (calibration_batches_ < 0) throw Error("accumulate_statistics() outside a calibration");
  run(input, Mode::calibrate);
  ++calibration_batches_;
}

void Generator::end_calibration() {
  if (calibration_batches_ <= 0) throw Error("calibration accumulated no batches");
  const double inv = 1.0 / calibration_batches_;
  for (auto& lv : levels_)
    for (BnParams* bn : {&lv->skip_bn, &lv->down1_bn, &lv->down2_bn, &lv->cat_bn, &lv->up1_bn, &lv->up2_bn}) {
      bn->frozen.mean.resize(bn->ch);
      bn->frozen.invstd.resize(bn->ch);
      for (int c = 0; c < bn->ch; ++c) {
        bn->frozen.mean[c] = static_cast<float>(bn->acc_mean[c] * inv);
        bn->frozen.invstd[c] = static_cast<float>(1.0 / std::sqrt(std::max(0.0, bn->acc_var[c] * inv) + kBatchNormEps));
      }
    }
  calibration_batches_ = -1;
  frozen_ = true;
}

void Generator::freeze_statistics(const Tensor& input) {
  begin_calibration();
  accumulate_statistics(input);
  end_calibration();
}

Tensor Generator::forward_eval(const Tensor& input) { return run(input, Mode::eval); }

void Generator::backward_level(int i, const Tensor& x, const Tensor& dout, Tensor& dx) {
  Level& L = *levels_[i];
  const float* th = theta_.data();
  float* gr = grad_.data();
  const float slope = cfg_.slope;
  const int s = cfg_.skip_channels;

  batch_norm_act_backward(L.u2_pre, L.u2_out, L.up2_bn.batch, th + L.up2_bn.gamma, slope, dout,
                          gr + L.up2_bn.gamma, gr + L.up2_bn.beta, L.g_a);
  conv2d_backward(L.u1_out, L.g_a, L.up2.shape, th + L.up2.w, gr + L.up2.w, gr + L.up2.b, &L.g_b, false, ws_);
  batch_norm_act_backward(L.u1_pre, L.u1_out, L.up1_bn.batch, th + L.up1_bn.gamma, slope, L.g_b,
                          gr + L.up1_bn.gamma, gr + L.up1_bn.beta, L.g_a);
  conv2d_backward(L.cat_n, L.g_a, L.up1.shape, th + L.up1.w, gr + L.up1.w, gr + L.up1.b, &L.g_b, false, ws_);
  // g_a: gradient with respect to the concatenation.
  batch_norm_act_backward(L.cat, L.cat_n, L.cat_bn.batch, th + L.cat_bn.gamma, 1.0f, L.g_b, gr + L.cat_bn.gamma,
                          gr + L.cat_bn.beta, L.g_a);

  // Split: first s channels feed the skip branch, the rest the upsampled path.
  L.g_b.resize(L.up.n, L.up.c, L.up.h, L.up.w);
  for (int b = 0; b < L.up.n; ++b)
    std::copy_n(L.g_a.sample(b) + static_cast<std::size_t>(s) * L.g_a.plane(), L.up.sample_size(), L.g_b.sample(b));
  upsample2x_backward(L.g_b, L.g_deeper);

  const Tensor* d_d2 = &L.g_deeper;
  if (i + 1 < cfg_.scales) {
    backward_level(i + 1, L.d2_out, L.g_deeper, L.g_d2);
    d_d2 = &L.g_d2;
  }

  if (s > 0) {
    // Keep only the skip part of the concat gradient in g_b.
    L.g_b.resize(L.skip_out.n, L.skip_out.c, L.skip_out.h, L.skip_out.w);
    for (int b = 0; b < L.skip_out.n; ++b) std::copy_n(L.g_a.sample(b), L.skip_out.sample_size(), L.g_b.sample(b));
  }

  batch_norm_act_backward(L.d2_pre, L.d2_out, L.down2_bn.batch, th + L.down2_bn.gamma, slope, *d_d2,
                          gr + L.down2_bn.gamma, gr + L.down2_bn.beta, L.g_a);
  Tensor& tmp = L.g_deeper;  // no longer needed
  conv2d_backward(L.d1_out, L.g_a, L.down2.shape, th + L.down2.w, gr + L.down2.w, gr + L.down2.b, &tmp, false, ws_);
  batch_norm_act_backward(L.d1_pre, L.d1_out, L.down1_bn.batch, th + L.down1_bn.gamma, slope, tmp,
                          gr + L.down1_bn.gamma, gr + L.down1_bn.beta, L.g_a);
  conv2d_backward(x, L.g_a, L.down1.shape, th + L.down1.w, gr + L.down1.w, gr + L.down1.b, &dx, false, ws_);

  if (s > 0) {
    batch_norm_act_backward(L.skip_pre, L.skip_out, L.skip_bn.batch, th + L.skip_bn.gamma, slope, L.g_b,
                            gr + L.skip_bn.gamma, gr + L.skip_bn.beta, L.g_a);
    conv2d_backward(x, L.g_a, L.skip.shape, th + L.skip.w, gr + L.skip.w, gr + L.skip.b, &dx, true, ws_);
  }
}

const Tensor& Generator::backward(const Tensor& grad_output) {
  if (!cached_) throw Error("backward() requires a preceding forward_train()");
  if (grad_output.n != out_.n || grad_output.c != out_.c || grad_output.h != out_.h || grad_output.w != out_.w)
    throw DimensionError("output gradient does not match the last forward pass");
  const int hp = padded_in_.h;
  const int wp = padded_in_.w;
  grad_full_.resize(grad_output.n, grad_output.c, hp, wp);
  grad_full_.zero();
  for (int b = 0; b < grad_output.n; ++b)
    for (int ch = 0; ch < grad_output.c; ++ch)
      for (int y = 0; y < in_h_; ++y)
        std::copy_n(grad_output.channel(b, ch) + static_cast<std::size_t>(y) * in_w_, in_w_,
                    grad_full_.channel(b, ch) + static_cast<std::size_t>(y) * wp);

  Level& top = *levels_[0];
  Tensor d_top;
  conv2d_backward(top.u2_out, grad_full_, final_shape_, theta_.data() + final_w_, grad_.data() + final_w_,
                  grad_.data() + final_b_, &d_top, false, ws_);
  backward_level(0, padded_in_, d_top, grad_in_full_);

  grad_in_.resize(padded_in_.n, padded_in_.c, in_h_, in_w_);
  for (int b = 0; b < grad_in_.n; ++b)
    for (int ch = 0; ch < grad_in_.c; ++ch)
      for (int y = 0; y < in_h_; ++y)
        std::copy_n(grad_in_full_.channel(b, ch) + static_cast<std::size_t>(y) * wp, in_w_,
                    grad_in_.channel(b, ch) + static_cast<std::size_t>(y) * in_w_);
  return grad_in_;
}

std::vector<float> Generator::normalization_state() const {
  if (!frozen_) throw Error("generator has no frozen normalization statistics");
  std::vector<float> out;
  const bool has_skip = cfg_.skip_channels > 0;
  for (const auto& lv : levels_) {
    for (const BnParams* bn : {&lv->skip_bn, &lv->down1_bn, &lv->down2_bn, &lv->cat_bn, &lv->up1_bn, &lv->up2_bn}) {
      if (bn == &lv->skip_bn && !has_skip) continue;
      out.insert(out.end(), bn->frozen.mean.begin(), bn->frozen.mean.end());
      out.insert(out.end(), bn->frozen.invstd.begin(), bn->frozen.invstd.end());
    }
  }
  return out;
}

void Generator::set_normalization_state(std::span<const float> state) {
  const bool has_skip = cfg_.skip_channels > 0;
  std::size_t need = 0;
  for (const auto& lv : levels_)
    for (const BnParams* bn : {&lv->skip_bn, &lv->down1_bn, &lv->down2_bn, &lv->cat_bn, &lv->up1_bn, &lv->up2_bn})
      if (bn != &lv->skip_bn || has_skip) need += 2 * static_cast<std::size_t>(bn->ch);
  if (state.size() != need) throw DimensionError("normalization state has the wrong length");
  std::size_t pos = 0;
  for (auto& lv : levels_) {
    for (BnParams* bn : {&lv->skip_bn, &lv->down1_bn, &lv->down2_bn, &lv->cat_bn, &lv->up1_bn, &lv->up2_bn}) {
      if (bn == &lv->skip_bn && !has_skip) continue;
      bn->frozen.mean.assign(state.begin() + pos, state.begin() + pos + bn->ch);
      pos += bn->ch;
      bn->frozen.invstd.assign(state.begin() + pos, state.begin() + pos + bn->ch);
      pos += bn->ch;
    }
  }
  frozen_ = true;
}

}  // namespace discus::nn
