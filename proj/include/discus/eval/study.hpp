#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "discus/baselines/cs.hpp"
#include "discus/baselines/lps.hpp"
#include "discus/core/types.hpp"
#include "discus/engine/trainer.hpp"
#include "discus/eval/metrics.hpp"
#include "discus/io/config.hpp"
#include "discus/mri/kspace.hpp"
#include "discus/nn/generator.hpp"
#include "discus/sim/motion.hpp"

namespace discus {

struct StudyConfig {
  // [phantom]
  std::string phantom = "shepplogan";  // or "cardiac"
  int size = 64;
  int frames = 32;
  double phase_amplitude = 0.5;
  double rotation_range_deg = 3.0;
  double translation_range_px = 3.0;
  std::vector<std::string> motions{"rotation", "translation", "both"};
  double breathing_amplitude_px = 3.0;
  double contrast_drift = 0.0;
  bool scar = false;
  int coils = 1;
  // [mask]
  std::string mask_kind = "central-random";  // or "gro"
  double accel = 2.0;
  int acs_lines = 6;
  double density_power = 1.5;
  // [noise]
  double snr_db = 25.0;
  // [train]
  TrainConfig train;
  nn::GeneratorConfig generator{6, 16, 16, 4, 2, 0.2f};
  int dip_iterations = 3000;
  // [methods]
  std::vector<std::string> methods{"cs", "lps", "dip", "dgs", "discus"};
  int discus_repeats = 10;
  CsConfig cs;
  LpsConfig lps;
  std::vector<int> frame_counts{8, 16, 32};  // ablation only
  std::uint64_t master_seed = 0;

  void validate() const;
};

StudyConfig study1_defaults();
StudyConfig ablation_defaults();
// Overrides `base` with every key present in the document. Unknown
// sections or keys are rejected.
StudyConfig study_config_from(const ConfigDocument& doc, StudyConfig base);

// One simulated acquisition: the noiseless reference and normalized,
// noisy, undersampled k-space.
struct SimulatedProblem {
  std::string series;  // "rotation", "translation", "both" or "cardiac"
  ImageSeries reference;
  CoilSensitivities maps;
  KSpaceSeries kspace;
  int true_dimensionality = -1;  // -1 when unknown
  SimulatedProblem first_frames(int t) const;
};

SimulatedProblem simulate_problem(const StudyConfig& cfg, const std::string& series);

struct RunRecord {
  MetricsReport metrics;
  ImageSeries recon;
  std::vector<float> z_dynamic;  // (T, Ny, Nx); empty for methods without codes
  std::vector<double> loss_trace;
  double seconds = 0.0;
};

struct SummaryRow {
  std::string method;
  std::string series;
  double accel = 1.0;
  int frames = 0;
  int runs = 0;
  double mean_nmse = 0.0;
  double sem_nmse = 0.0;  // SD / sqrt(runs), 0 for a single run
  double mean_ssim = 0.0;
  double sem_ssim = 0.0;
};

struct StudyResult {
  std::string study;
  std::vector<RunRecord> runs;
  std::map<std::string, ImageSeries> references;  // keyed by series label

  std::vector<SummaryRow> summary() const;
  // series -> (dimensionality -> number of runs), DISCUS runs only.
  std::map<std::string, std::map<int, int>> dimensionality_counts() const;
  // Mean NMSE of one (method, series, frames) cell; frames 0 matches any.
  double mean_nmse(const std::string& method, const std::string& series, int frames = 0) const;
};

using StudyLog = std::function<void(const std::string&)>;

// Seed used for the i-th repetition of a learned method.
std::uint64_t repeat_seed(std::uint64_t master, int repeat) noexcept;

// Runs one of cs, lps, dip, dgs, discus on a problem.
RunRecord run_method(const std::string& method, const SimulatedProblem& p, const StudyConfig& cfg,
                     std::uint64_t seed);

// Every configured motion series with every configured method; DISCUS is
// repeated `discus_repeats` times with distinct seeds.
StudyResult run_study1(const StudyConfig& cfg, const StudyLog& log = {});
// Cardiac stand-in at each of `frame_counts`, first T frames of one acquisition.
StudyResult run_ablation(const StudyConfig& cfg, const StudyLog& log = {});

struct SweepPoint {
  double value = 0.0;
  double mean_nmse = 0.0;
  double mean_ssim = 0.0;
};

// Grid sweep of one parameter ("discus.lambda", "discus.code_std",
// "cs.lambda_w", "lps.lambda_l", "lps.lambda_s", "dip.iterations") on the
// first configured series.
std::vector<SweepPoint> sweep_parameter(const StudyConfig& cfg, const std::string& parameter,
                                        const std::vector<double>& values, const StudyLog& log = {});

}  // namespace discus
