#include "discus/engine/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>

#include "discus/core/error.hpp"
#include "discus/engine/group_sparsity.hpp"
#include "discus/mri/forward.hpp"
#include "discus/nn/adam.hpp"

namespace discus {

void TrainConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be a finite value >= 0");
  if (iterations < 1) throw ConfigError("iterations must be positive");
  if (batch_frames < 1) throw ConfigError("batch_frames must be positive");
  if (!(lr_start > 0.0)) throw ConfigError("lr_start must be positive");
  if (lr_step < 1) throw ConfigError("lr_step must be positive");
  if (!(lr_gamma > 0.0)) throw ConfigError("lr_gamma must be positive");
  if (!(input_noise_std >= 0.0)) throw ConfigError("input_noise_std must be non-negative");
  if (!(code_std > 0.0)) throw ConfigError("code_std must be positive");
  if (static_channels < 1) throw ConfigError("static_channels must be positive");
  if (lambda_warmup < 0) throw ConfigError("lambda_warmup must be non-negative");
}

namespace {

enum Stream : std::uint64_t { kNetwork = 1, kCodes, kBatches, kNoise };

// Bytes of activations one frame costs in a forward pass, roughly.
std::size_t frame_footprint(const nn::GeneratorConfig& g, int ny, int nx) {
  const std::size_t m = static_cast<std::size_t>(g.grid_multiple());
  const std::size_t pix = (ny + m - 1) / m * m * ((nx + m - 1) / m * m);
  return pix * static_cast<std::size_t>(g.channels + g.skip_channels) * 12 * sizeof(float);
}

void check_problem(const KSpaceSeries& k, const CoilSensitivities& maps) {
  if (k.frames < 1 || k.coils < 1) throw DimensionError("k-space series is empty");
  if (maps.coils() != k.coils || maps.ny() != k.ny || maps.nx() != k.nx)
    throw DimensionError("coil maps do not match the k-space series");
  if (k.mask.frames() != k.frames || k.mask.pe() != k.ny) throw DimensionError("mask does not match the k-space series");
  if (k.samples.size() != static_cast<std::size_t>(k.frames) * k.frame_size())
    throw DimensionError("k-space sample buffer has the wrong size");
  if (!all_finite(std::span<const cfloat>(k.samples))) throw NonFiniteError("k-space contains non-finite values");
}

// Data-consistency term for one frame of the generator output and its
// gradient with respect to the two output channels.
class Fidelity {
 public:
  Fidelity(const CoilSensitivities& maps) : op_(maps), image_(maps.pixels()), kspace_(op_.kspace_size()) {}

  double accumulate(const nn::Tensor& out, int b, std::span<const cfloat> y, std::span<const std::uint8_t> mask,
                    nn::Tensor* grad) {
    const std::size_t n = image_.size();
    const float* re = out.channel(b, 0);
    const float* im = out.channel(b, 1);
    for (std::size_t i = 0; i < n; ++i) image_[i] = {re[i], im[i]};
    op_.forward(image_, mask, kspace_);
    double loss = 0.0;
    for (std::size_t i = 0; i < kspace_.size(); ++i) {
      kspace_[i] -= y[i];
      loss += std::norm(std::complex<double>(kspace_[i]));
    }
    if (grad != nullptr) {
      op_.adjoint(kspace_, mask, image_);
      float* gre = grad->channel(b, 0);
      float* gim = grad->channel(b, 1);
      for (std::size_t i = 0; i < n; ++i) {
        gre[i] = 2.0f * image_[i].real();
        gim[i] = 2.0f * image_[i].imag();
      }
    }
    return loss;
  }

 private:
  SenseOperator op_;
  std::vector<cfloat> image_;
  std::vector<cfloat> kspace_;
};

void fill_input(nn::Tensor& in, int b, const CodeVectors& z, int t) {
  const std::size_t n = z.pixels();
  float* dst = in.sample(b);
  std::copy(z.z_static.begin(), z.z_static.end(), dst);
  const auto zt = z.dynamic_frame(t);
  std::copy(zt.begin(), zt.end(), dst + static_cast<std::size_t>(z.static_channels) * n);
}

ComplexImage to_complex(const nn::Tensor& out, int b, double scale) {
  ComplexImage img(out.h, out.w);
  const float* re = out.channel(b, 0);
  const float* im = out.channel(b, 1);
  const float inv = static_cast<float>(1.0 / scale);
  auto px = img.span();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = cfloat(re[i], im[i]) * inv;
  return img;
}

// Evaluation-mode statistics from noiseless inputs, then every frame.
std::vector<ComplexImage> finalize_codes(nn::Generator& g, const CodeVectors& z, int chunk, double scale) {
  const int frames = z.frames;
  nn::Tensor in;
  g.begin_calibration();
  for (int t0 = 0; t0 < frames; t0 += chunk) {
    const int n = std::min(chunk, frames - t0);
    in.resize(n, z.static_channels + 1, z.ny, z.nx);
    for (int b = 0; b < n; ++b) fill_input(in, b, z, t0 + b);
    g.accumulate_statistics(in);
  }
  g.end_calibration();
  std::vector<ComplexImage> out;
  for (int t0 = 0; t0 < frames; t0 += chunk) {
    const int n = std::min(chunk, frames - t0);
    in.resize(n, z.static_channels + 1, z.ny, z.nx);
    for (int b = 0; b < n; ++b) fill_input(in, b, z, t0 + b);
    const nn::Tensor y = g.forward_eval(in);
    for (int b = 0; b < n; ++b) out.push_back(to_complex(y, b, scale));
  }
  return out;
}

int calibration_chunk(const nn::GeneratorConfig& g, const TrainConfig& cfg, int frames, int ny, int nx) {
  constexpr std::size_t kBudget = std::size_t{1} << 30;
  const std::size_t fit = kBudget / std::max<std::size_t>(1, frame_footprint(g, ny, nx));
  return std::clamp(static_cast<int>(std::min<std::size_t>(fit, frames)), std::min(cfg.batch_frames, frames), frames);
}

}  // namespace

ComplexImage generate_frame(nn::Generator& g, const CodeVectors& codes, int t) {
  codes.validate();
  if (t < 0 || t >= codes.frames) throw DimensionError("frame index out of range");
  if (g.config().in_channels != codes.static_channels + 1)
    throw DimensionError("generator input channels do not match the codes");
  nn::Tensor in(1, codes.static_channels + 1, codes.ny, codes.nx);
  fill_input(in, 0, codes, t);
  return to_complex(g.forward_eval(in), 0, 1.0);
}

double evaluate_fidelity(nn::Generator& g, const CodeVectors& codes, const KSpaceSeries& k,
                         const CoilSensitivities& maps) {
  check_problem(k, maps);
  if (codes.frames != k.frames || codes.ny != k.ny || codes.nx != k.nx)
    throw DimensionError("codes do not match the k-space series");
  std::vector<cdouble> image(maps.pixels()), maps_d(maps.values().size()), pred(k.frame_size());
  std::transform(maps.values().begin(), maps.values().end(), maps_d.begin(), [](cfloat v) { return cdouble(v); });
  double total = 0.0;
  for (int t = 0; t < k.frames; ++t) {
    const ComplexImage x = generate_frame(g, codes, t);
    std::transform(x.span().begin(), x.span().end(), image.begin(), [](cfloat v) { return cdouble(v); });
    sense_forward<double>(image, maps_d, k.coils, k.ny, k.nx, k.mask.row(t), pred);
    const auto y = k.frame(t);
    for (std::size_t i = 0; i < pred.size(); ++i) total += std::norm(pred[i] - cdouble(y[i]));
  }
  return total;
}

ReconResult train_discus(const KSpaceSeries& k, const CoilSensitivities& maps, const TrainConfig& cfg,
                         const nn::GeneratorConfig& gcfg) {
  cfg.validate();
  gcfg.validate();
  check_problem(k, maps);
  if (gcfg.in_channels != cfg.static_channels + 1)
    throw ConfigError("generator in_channels must equal static_channels + 1");

  const int frames = k.frames;
  const int ny = k.ny;
  const int nx = k.nx;
  const std::size_t pixels = static_cast<std::size_t>(ny) * nx;
  const int batch = std::min(cfg.batch_frames, frames);
  const int kc = cfg.static_channels;

  nn::Generator g(gcfg, derive_seed(cfg.seed, kNetwork));
  CodeVectors z = random_codes(kc, frames, ny, nx, cfg.code_std, derive_seed(cfg.seed, kCodes));
  std::mt19937_64 batch_rng(derive_seed(cfg.seed, kBatches));
  std::mt19937_64 noise_rng(derive_seed(cfg.seed, kNoise));
  std::normal_distribution<float> noise(0.0f, static_cast<float>(cfg.input_noise_std));

  nn::Adam opt;
  const auto g_theta = opt.add_group(g.param_count());
  const auto g_static = opt.add_group(z.z_static.size());
  const auto g_dynamic = opt.add_group(z.z_dynamic.size());
  std::vector<float> grad_static(z.z_static.size());
  std::vector<float> grad_dynamic(z.z_dynamic.size());

  Fidelity fidelity(maps);
  std::deque<int> order;
  std::vector<int> perm(frames);
  std::vector<int> picked(batch);
  nn::Tensor input;
  nn::Tensor grad_out;

  ReconResult res;
  res.method = cfg.lambda > 0.0 ? "discus" : "dgs";
  res.lambda = cfg.lambda;
  res.generator = gcfg;
  res.loss_trace.reserve(cfg.iterations);

  for (int it = 0; it < cfg.iterations; ++it) {
    while (static_cast<int>(order.size()) < batch) {
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), batch_rng);
      order.insert(order.end(), perm.begin(), perm.end());
    }
    for (int b = 0; b < batch; ++b) {
      picked[b] = order.front();
      order.pop_front();
    }

    input.resize(batch, kc + 1, ny, nx);
    for (int b = 0; b < batch; ++b) fill_input(input, b, z, picked[b]);
    if (cfg.input_noise_std > 0.0)
      for (float& v : input.data) v += noise(noise_rng);

    const nn::Tensor& out = g.forward_train(input);
    grad_out.resize(batch, 2, ny, nx);
    double fid = 0.0;
    for (int b = 0; b < batch; ++b)
      fid += fidelity.accumulate(out, b, k.frame(picked[b]), k.mask.row(picked[b]), &grad_out);

    g.zero_grad();
    const nn::Tensor& grad_in = g.backward(grad_out);
    std::fill(grad_static.begin(), grad_static.end(), 0.0f);
    std::fill(grad_dynamic.begin(), grad_dynamic.end(), 0.0f);
    for (int b = 0; b < batch; ++b) {
      const float* gin = grad_in.sample(b);
      for (std::size_t i = 0; i < grad_static.size(); ++i) grad_static[i] += gin[i];
      const float* gdyn = gin + static_cast<std::size_t>(kc) * pixels;
      float* dst = grad_dynamic.data() + static_cast<std::size_t>(picked[b]) * pixels;
      for (std::size_t i = 0; i < pixels; ++i) dst[i] += gdyn[i];
    }
    const double lambda = cfg.lambda_warmup > 0 ? cfg.lambda * std::min(1.0, static_cast<double>(it) / cfg.lambda_warmup)
                                                : cfg.lambda;
    const double pen = group_sparsity_accumulate_gradient(z.z_dynamic, frames, pixels, lambda, grad_dynamic);

    const double loss = fid + lambda * pen;
    res.loss_trace.push_back(loss);
    if (!std::isfinite(loss)) throw TrainingFailure("training diverged at iteration " + std::to_string(it), res.loss_trace);
    if (cfg.progress) cfg.progress(it, loss);

    opt.set_lr(static_cast<float>(nn::step_lr(cfg.lr_start, cfg.lr_step, cfg.lr_gamma, it)));
    opt.begin_step();
    opt.update(g_theta, g.gradients(), g.parameters());
    opt.update(g_static, grad_static, z.z_static);
    opt.update(g_dynamic, grad_dynamic, z.z_dynamic);
  }

  const int chunk = calibration_chunk(gcfg, cfg, frames, ny, nx);
  std::vector<ComplexImage> recon = finalize_codes(g, z, chunk, k.scale);
  for (const auto& f : recon)
    if (!all_finite(std::span<const cfloat>(f.span())))
      throw TrainingFailure("reconstruction contains non-finite values", res.loss_trace);
  res.frames.frames = std::move(recon);
  res.manifold = manifold_dimensionality(z.z_dynamic, frames, pixels);
  res.final_fidelity = evaluate_fidelity(g, z, k, maps);
  res.final_penalty = group_sparsity_norm(z.z_dynamic, frames, pixels);
  res.theta.assign(g.parameters().begin(), g.parameters().end());
  res.normalization = g.normalization_state();
  res.codes = std::move(z);
  return res;
}

ReconResult train_dgs(const KSpaceSeries& k, const CoilSensitivities& maps, TrainConfig cfg,
                      const nn::GeneratorConfig& gcfg) {
  cfg.lambda = 0.0;
  return train_discus(k, maps, cfg, gcfg);
}

ReconResult train_dip_per_frame(const KSpaceSeries& k, const CoilSensitivities& maps, const TrainConfig& cfg,
                                const nn::GeneratorConfig& gcfg) {
  cfg.validate();
  gcfg.validate();
  check_problem(k, maps);
  const int frames = k.frames;
  const int ny = k.ny;
  const int nx = k.nx;
  const int cin = gcfg.in_channels;

  ReconResult res;
  res.method = "dip";
  res.generator = gcfg;
  res.loss_trace.assign(cfg.iterations, 0.0);
  Fidelity fidelity(maps);
  nn::Tensor code(1, cin, ny, nx);
  nn::Tensor input;
  nn::Tensor grad_out(1, 2, ny, nx);

  for (int t = 0; t < frames; ++t) {
    const std::uint64_t fseed = derive_seed(cfg.seed, 100 + static_cast<std::uint64_t>(t));
    nn::Generator g(gcfg, derive_seed(fseed, kNetwork));
    std::mt19937_64 code_rng(derive_seed(fseed, kCodes));
    std::normal_distribution<float> cd(0.0f, static_cast<float>(cfg.code_std));
    for (float& v : code.data) v = cd(code_rng);
    std::mt19937_64 noise_rng(derive_seed(fseed, kNoise));
    std::normal_distribution<float> noise(0.0f, static_cast<float>(cfg.input_noise_std));

    nn::Adam opt;
    const auto g_theta = opt.add_group(g.param_count());
    const auto g_code = opt.add_group(code.size());
    const auto y = k.frame(t);
    const auto mask = k.mask.row(t);

    for (int it = 0; it < cfg.iterations; ++it) {
      input = code;
      if (cfg.input_noise_std > 0.0)
        for (float& v : input.data) v += noise(noise_rng);
      const nn::Tensor& out = g.forward_train(input);
      const double fid = fidelity.accumulate(out, 0, y, mask, &grad_out);
      res.loss_trace[it] += fid;
      if (!std::isfinite(fid))
        throw TrainingFailure("frame " + std::to_string(t) + " diverged at iteration " + std::to_string(it),
                              res.loss_trace);
      if (cfg.progress) cfg.progress(t * cfg.iterations + it, fid);
      g.zero_grad();
      const nn::Tensor& grad_in = g.backward(grad_out);
      opt.set_lr(static_cast<float>(nn::step_lr(cfg.lr_start, cfg.lr_step, cfg.lr_gamma, it)));
      opt.begin_step();
      opt.update(g_theta, g.gradients(), g.parameters());
      opt.update(g_code, grad_in.data, code.data);
    }
    g.freeze_statistics(code);
    ComplexImage x = to_complex(g.forward_eval(code), 0, k.scale);
    if (!all_finite(std::span<const cfloat>(x.span())))
      throw TrainingFailure("frame " + std::to_string(t) + " reconstruction is non-finite", res.loss_trace);
    res.final_fidelity += fidelity.accumulate(g.forward_eval(code), 0, y, mask, nullptr);
    res.frames.frames.push_back(std::move(x));
  }
  return res;
}

}  // namespace discus
