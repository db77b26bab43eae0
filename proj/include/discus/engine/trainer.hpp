#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "discus/core/types.hpp"
#include "discus/engine/codes.hpp"
#include "discus/engine/manifold.hpp"
#include "discus/mri/kspace.hpp"
#include "discus/nn/generator.hpp"

namespace discus {

struct TrainConfig {
  double lambda = 0.01;
  // Iterations over which the sparsity weight ramps linearly from 0 to
  // lambda; 0 applies the full weight from the first iteration.
  int lambda_warmup = 0;
  int iterations = 10000;
  int batch_frames = 8;
  double lr_start = 1e-3;
  int lr_step = 500;
  double lr_gamma = 0.97;
  double input_noise_std = 0.05;
  double code_std = 0.1;
  int static_channels = 3;
  std::uint64_t seed = 0;
  // Optional per-iteration observer (iteration, loss).
  std::function<void(int, double)> progress;

  void validate() const;
};

struct ReconResult {
  std::string method;
  ImageSeries frames;               // de-normalized reconstruction
  std::vector<double> loss_trace;   // fidelity + lambda * norm per iteration
  CodeVectors codes;                // DISCUS/DGS only
  ManifoldReport manifold;          // DISCUS/DGS only
  nn::GeneratorConfig generator;
  std::vector<float> theta;         // DISCUS/DGS only
  std::vector<float> normalization; // frozen statistics, DISCUS/DGS only
  double lambda = 0.0;
  double final_fidelity = 0.0;      // all frames, evaluation mode, normalized units
  double final_penalty = 0.0;       // group norm of the final dynamic codes
  double final_objective() const noexcept { return final_fidelity + lambda * final_penalty; }
};

// Concatenates z0 and z_t and maps the 2-channel output to one complex frame.
// The generator must hold frozen normalization statistics.
ComplexImage generate_frame(nn::Generator& g, const CodeVectors& codes, int t);

// sum_t ||A_t G(z0, z_t) - y_t||^2 over every frame in evaluation mode,
// accumulated in double precision.
double evaluate_fidelity(nn::Generator& g, const CodeVectors& codes, const KSpaceSeries& k,
                         const CoilSensitivities& maps);

ReconResult train_discus(const KSpaceSeries& k, const CoilSensitivities& maps, const TrainConfig& cfg,
                         const nn::GeneratorConfig& gcfg);

// The group-sparsity ablation: train_discus with lambda forced to 0.
ReconResult train_dgs(const KSpaceSeries& k, const CoilSensitivities& maps, TrainConfig cfg,
                      const nn::GeneratorConfig& gcfg);

// One independent generator and code per frame; no sparsity term. The
// reported trace is the per-iteration sum over frames.
ReconResult train_dip_per_frame(const KSpaceSeries& k, const CoilSensitivities& maps, const TrainConfig& cfg,
                                const nn::GeneratorConfig& gcfg);

}  // namespace discus
