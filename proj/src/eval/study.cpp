#include "discus/eval/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "discus/core/error.hpp"
#include "discus/mri/mask.hpp"
#include "discus/sim/cardiac.hpp"
#include "discus/sim/coils.hpp"
#include "discus/sim/phantom.hpp"

namespace discus {
namespace {

enum Stream : std::uint64_t { kMotion = 11, kMask, kNoise, kCoils, kCardiac, kRepeat = 100 };

const std::vector<std::string> kMethods{"cs", "lps", "dip", "dgs", "discus"};

bool known_method(const std::string& m) { return std::find(kMethods.begin(), kMethods.end(), m) != kMethods.end(); }

void note(const StudyLog& log, const std::string& msg) {
  if (log) log(msg);
}

std::string describe(const RunRecord& r) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << r.metrics.method << " [" << r.metrics.series << ", T=" << r.metrics.frames << ", seed " << r.metrics.seed
    << "]: NMSE " << r.metrics.mean_nmse << " dB, SSIM ";
  s.precision(4);
  s << r.metrics.mean_ssim;
  if (r.metrics.dimensionality >= 0) s << ", dim " << r.metrics.dimensionality;
  s.precision(1);
  s << " (" << r.seconds << " s)";
  return s.str();
}

RunRecord checked_run(const std::string& method, const SimulatedProblem& p, const StudyConfig& cfg,
                      std::uint64_t seed, const StudyLog& log) {
  try {
    RunRecord r = run_method(method, p, cfg, seed);
    note(log, describe(r));
    return r;
  } catch (const Error& e) {
    std::ostringstream s;
    s << method << " on " << p.series << " (T=" << p.kspace.frames << ", seed " << seed << "): " << e.what();
    throw Error(s.str());
  }
}

double sample_sem(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
}

}  // namespace

void StudyConfig::validate() const {
  if (phantom != "shepplogan" && phantom != "cardiac") throw ConfigError("phantom must be shepplogan or cardiac");
  if (size < 32) throw ConfigError("phantom size must be at least 32");
  if (frames < 1) throw ConfigError("frame count must be positive");
  if (coils < 1) throw ConfigError("coil count must be positive");
  if (mask_kind != "central-random" && mask_kind != "gro") throw ConfigError("mask kind must be central-random or gro");
  if (!(accel >= 1.0)) throw ConfigError("acceleration must be >= 1");
  if (acs_lines < 0 || acs_lines > size) throw ConfigError("ACS line count out of range");
  if (!(snr_db > 0.0)) throw ConfigError("SNR must be positive (use inf for noiseless data)");
  if (methods.empty()) throw ConfigError("no methods selected");
  for (const auto& m : methods)
    if (!known_method(m)) throw ConfigError("unknown method '" + m + "'");
  if (discus_repeats < 1) throw ConfigError("discus_repeats must be positive");
  if (dip_iterations < 1) throw ConfigError("dip_iterations must be positive");
  if (phantom == "shepplogan") {
    if (motions.empty()) throw ConfigError("no motion series selected");
    for (const auto& m : motions) motion_mode_from_name(m);
  }
  train.validate();
  generator.validate();
  cs.validate();
  lps.validate();
}

// Desk-scale recipe: sparsity weight and warm-up chosen by sweep on the
// rotation series, L+S thresholds by NMSE on the same series.
StudyConfig study1_defaults() {
  StudyConfig c;
  c.train.iterations = 3000;
  c.train.lambda = 3.0;
  c.train.lambda_warmup = 1000;
  c.lps.lambda_l = 0.01;
  c.lps.lambda_s = 0.05;
  return c;
}

StudyConfig ablation_defaults() {
  StudyConfig c = study1_defaults();
  c.phantom = "cardiac";
  c.coils = 4;
  c.mask_kind = "gro";
  c.accel = 4.0;
  c.methods = {"lps", "dgs", "discus"};
  c.discus_repeats = 1;
  c.motions.clear();
  return c;
}

StudyConfig study_config_from(const ConfigDocument& doc, StudyConfig c) {
  doc.require_sections({"phantom", "mask", "noise", "train", "methods"});
  doc.require_known("phantom", {"kind", "size", "frames", "phase_amplitude", "rotation_range", "translation_range",
                                "motions", "breathing_amplitude", "contrast_drift", "scar", "coils"});
  doc.require_known("mask", {"kind", "accel", "acs", "density_power"});
  doc.require_known("noise", {"snr_db"});
  doc.require_known("train", {"lambda", "lambda_warmup", "iterations", "batch_frames", "lr", "lr_step", "lr_gamma",
                              "input_noise", "code_std", "static_channels", "scales", "channels", "skip_channels",
                              "dip_iterations"});
  doc.require_known("methods", {"run", "discus_repeats", "frame_counts", "seed", "cs_lambda", "cs_iterations",
                                "cs_levels", "lps_lambda_l", "lps_lambda_s", "lps_iterations", "lps_tolerance"});
  auto as_int = [](std::int64_t v) { return static_cast<int>(v); };

  c.phantom = doc.get_string("phantom", "kind", c.phantom);
  c.size = as_int(doc.get_int("phantom", "size", c.size));
  c.frames = as_int(doc.get_int("phantom", "frames", c.frames));
  c.phase_amplitude = doc.get_double("phantom", "phase_amplitude", c.phase_amplitude);
  c.rotation_range_deg = doc.get_double("phantom", "rotation_range", c.rotation_range_deg);
  c.translation_range_px = doc.get_double("phantom", "translation_range", c.translation_range_px);
  c.motions = doc.get_strings("phantom", "motions", c.motions);
  c.breathing_amplitude_px = doc.get_double("phantom", "breathing_amplitude", c.breathing_amplitude_px);
  c.contrast_drift = doc.get_double("phantom", "contrast_drift", c.contrast_drift);
  c.scar = doc.get_bool("phantom", "scar", c.scar);
  c.coils = as_int(doc.get_int("phantom", "coils", c.coils));

  c.mask_kind = doc.get_string("mask", "kind", c.mask_kind);
  c.accel = doc.get_double("mask", "accel", c.accel);
  c.acs_lines = as_int(doc.get_int("mask", "acs", c.acs_lines));
  c.density_power = doc.get_double("mask", "density_power", c.density_power);

  c.snr_db = doc.get_double("noise", "snr_db", c.snr_db);

  c.train.lambda = doc.get_double("train", "lambda", c.train.lambda);
  c.train.lambda_warmup = as_int(doc.get_int("train", "lambda_warmup", c.train.lambda_warmup));
  c.train.iterations = as_int(doc.get_int("train", "iterations", c.train.iterations));
  c.train.batch_frames = as_int(doc.get_int("train", "batch_frames", c.train.batch_frames));
  c.train.lr_start = doc.get_double("train", "lr", c.train.lr_start);
  c.train.lr_step = as_int(doc.get_int("train", "lr_step", c.train.lr_step));
  c.train.lr_gamma = doc.get_double("train", "lr_gamma", c.train.lr_gamma);
  c.train.input_noise_std = doc.get_double("train", "input_noise", c.train.input_noise_std);
  c.train.code_std = doc.get_double("train", "code_std", c.train.code_std);
  c.train.static_channels = as_int(doc.get_int("train", "static_channels", c.train.static_channels));
  c.generator.scales = as_int(doc.get_int("train", "scales", c.generator.scales));
  c.generator.channels = as_int(doc.get_int("train", "channels", c.generator.channels));
  c.generator.skip_channels = as_int(doc.get_int("train", "skip_channels", c.generator.skip_channels));
  c.generator.in_channels = c.train.static_channels + 1;
  c.dip_iterations = as_int(doc.get_int("train", "dip_iterations", c.dip_iterations));

  c.methods = doc.get_strings("methods", "run", c.methods);
  c.discus_repeats = as_int(doc.get_int("methods", "discus_repeats", c.discus_repeats));
  std::vector<std::int64_t> fc(c.frame_counts.begin(), c.frame_counts.end());
  fc = doc.get_ints("methods", "frame_counts", fc);
  c.frame_counts.assign(fc.begin(), fc.end());
  const std::int64_t seed = doc.get_int("methods", "seed", static_cast<std::int64_t>(c.master_seed));
  if (seed < 0) throw ConfigError("[methods] seed must be non-negative");
  c.master_seed = static_cast<std::uint64_t>(seed);
  c.cs.lambda_w = doc.get_double("methods", "cs_lambda", c.cs.lambda_w);
  c.cs.iterations = as_int(doc.get_int("methods", "cs_iterations", c.cs.iterations));
  c.cs.levels = as_int(doc.get_int("methods", "cs_levels", c.cs.levels));
  c.lps.lambda_l = doc.get_double("methods", "lps_lambda_l", c.lps.lambda_l);
  c.lps.lambda_s = doc.get_double("methods", "lps_lambda_s", c.lps.lambda_s);
  c.lps.iterations = as_int(doc.get_int("methods", "lps_iterations", c.lps.iterations));
  c.lps.tolerance = doc.get_double("methods", "lps_tolerance", c.lps.tolerance);
  c.validate();
  return c;
}

SimulatedProblem SimulatedProblem::first_frames(int t) const {
  SimulatedProblem out;
  out.series = series;
  out.maps = maps;
  out.true_dimensionality = true_dimensionality;
  out.reference.frame_period = reference.frame_period;
  out.reference.frames.assign(reference.frames.begin(), reference.frames.begin() + t);
  out.kspace = normalize_kspace(kspace.first_frames(t));
  return out;
}

SimulatedProblem simulate_problem(const StudyConfig& cfg, const std::string& series) {
  cfg.validate();
  SimulatedProblem p;
  p.series = series;
  if (cfg.phantom == "cardiac") {
    if (series != "cardiac") throw ConfigError("the cardiac phantom only provides the 'cardiac' series");
    CardiacSpec spec;
    spec.ny = spec.nx = cfg.size;
    spec.frames = cfg.frames;
    spec.breathing_amplitude_px = cfg.breathing_amplitude_px;
    spec.contrast_drift = cfg.contrast_drift;
    spec.scar = cfg.scar;
    spec.seed = derive_seed(cfg.master_seed, kCardiac);
    p.reference = make_cardiac_series(spec).series;
  } else {
    MotionSpec ms;
    ms.mode = motion_mode_from_name(series);
    ms.rotation_range_deg = cfg.rotation_range_deg;
    ms.translation_range_px = cfg.translation_range_px;
    ms.seed = derive_seed(cfg.master_seed, kMotion);
    auto [frames, record] = make_dynamic_series(shepp_logan(cfg.size, cfg.phase_amplitude), cfg.frames, ms);
    p.reference = std::move(frames);
    p.true_dimensionality = record.true_dimensionality();
  }
  p.maps = cfg.coils == 1 ? CoilSensitivities::ones(cfg.size, cfg.size)
                          : normalize_coil_maps(simulate_coil_maps(cfg.size, cfg.size, cfg.coils,
                                                                   derive_seed(cfg.master_seed, kCoils)));
  const SamplingMask mask =
      cfg.mask_kind == "gro"
          ? gro_mask(cfg.size, cfg.frames, cfg.accel, cfg.acs_lines, cfg.density_power)
          : central_random_mask(cfg.size, cfg.accel, cfg.acs_lines, cfg.frames, derive_seed(cfg.master_seed, kMask));
  p.kspace = normalize_kspace(
      add_noise(simulate_kspace(p.reference, p.maps, mask), cfg.snr_db, derive_seed(cfg.master_seed, kNoise)));
  return p;
}

std::uint64_t repeat_seed(std::uint64_t master, int repeat) noexcept {
  return derive_seed(master, kRepeat + static_cast<std::uint64_t>(repeat));
}

RunRecord run_method(const std::string& method, const SimulatedProblem& p, const StudyConfig& cfg,
                     std::uint64_t seed) {
  if (!known_method(method)) throw ConfigError("unknown method '" + method + "'");
  const auto start = std::chrono::steady_clock::now();
  RunRecord r;
  TrainConfig tc = cfg.train;
  tc.seed = seed;
  nn::GeneratorConfig gc = cfg.generator;
  gc.in_channels = tc.static_channels + 1;
  double lambda = 0.0;
  int dimensionality = -1;

  if (method == "cs") {
    CsResult res = recon_cs(p.kspace, p.maps, cfg.cs);
    r.recon = std::move(res.frames);
    lambda = cfg.cs.lambda_w;
    for (const auto& f : res.objective)
      if (!f.empty()) r.loss_trace.push_back(f.back());
  } else if (method == "lps") {
    LpsResult res = recon_lps(p.kspace, p.maps, cfg.lps);
    r.recon = std::move(res.recon);
    r.loss_trace = std::move(res.objective);
    lambda = cfg.lps.lambda_s;
  } else {
    ReconResult res;
    if (method == "dip") {
      tc.iterations = cfg.dip_iterations;
      res = train_dip_per_frame(p.kspace, p.maps, tc, gc);
    } else if (method == "dgs") {
      res = train_dgs(p.kspace, p.maps, tc, gc);
    } else {
      res = train_discus(p.kspace, p.maps, tc, gc);
    }
    r.recon = std::move(res.frames);
    r.loss_trace = std::move(res.loss_trace);
    lambda = res.lambda;
    if (method != "dip") {
      r.z_dynamic = std::move(res.codes.z_dynamic);
      dimensionality = static_cast<int>(res.manifold.dimensionality);
    }
  }

  r.metrics = evaluate_series(p.reference, r.recon, method);
  r.metrics.series = p.series;
  r.metrics.seed = (method == "cs" || method == "lps") ? 0 : seed;
  r.metrics.lambda = lambda;
  r.metrics.accel = p.kspace.mask.acceleration();
  r.metrics.dimensionality = dimensionality;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<SummaryRow> StudyResult::summary() const {
  std::vector<SummaryRow> rows;
  for (const auto& run : runs) {
    const auto& m = run.metrics;
    auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& s) {
      return s.method == m.method && s.series == m.series && s.frames == m.frames && s.accel == m.accel;
    });
    if (it == rows.end()) {
      SummaryRow s;
      s.method = m.method;
      s.series = m.series;
      s.frames = m.frames;
      s.accel = m.accel;
      rows.push_back(s);
    }
  }
  for (auto& s : rows) {
    std::vector<double> nm, ss;
    for (const auto& run : runs) {
      const auto& m = run.metrics;
      if (m.method == s.method && m.series == s.series && m.frames == s.frames && m.accel == s.accel) {
        nm.push_back(m.mean_nmse);
        ss.push_back(m.mean_ssim);
      }
    }
    s.runs = static_cast<int>(nm.size());
    for (double v : nm) s.mean_nmse += v;
    for (double v : ss) s.mean_ssim += v;
    s.mean_nmse /= s.runs;
    s.mean_ssim /= s.runs;
    s.sem_nmse = sample_sem(nm, s.mean_nmse);
    s.sem_ssim = sample_sem(ss, s.mean_ssim);
  }
  return rows;
}

std::map<std::string, std::map<int, int>> StudyResult::dimensionality_counts() const {
  std::map<std::string, std::map<int, int>> out;
  for (const auto& run : runs)
    if (run.metrics.method == "discus") ++out[run.metrics.series][run.metrics.dimensionality];
  return out;
}

double StudyResult::mean_nmse(const std::string& method, const std::string& series, int frames) const {
  double sum = 0.0;
  int n = 0;
  for (const auto& run : runs) {
    const auto& m = run.metrics;
    if (m.method == method && m.series == series && (frames == 0 || m.frames == frames)) {
      sum += m.mean_nmse;
      ++n;
    }
  }
  if (n == 0) throw ConfigError("no runs for " + method + " on " + series);
  return sum / n;
}

StudyResult run_study1(const StudyConfig& cfg, const StudyLog& log) {
  cfg.validate();
  if (cfg.phantom != "shepplogan") throw ConfigError("study1 needs the shepplogan phantom");
  StudyResult out;
  out.study = "study1";
  for (const auto& series : cfg.motions) {
    const SimulatedProblem p = simulate_problem(cfg, series);
    out.references[series] = p.reference;
    note(log, "series " + series + ": " + std::to_string(p.reference.frame_count()) + " frames");
    for (const auto& method : cfg.methods) {
      const int repeats = method == "discus" ? cfg.discus_repeats : 1;
      for (int i = 0; i < repeats; ++i)
        out.runs.push_back(checked_run(method, p, cfg, repeat_seed(cfg.master_seed, i), log));
    }
  }
  return out;
}

StudyResult run_ablation(const StudyConfig& cfg, const StudyLog& log) {
  cfg.validate();
  if (cfg.frame_counts.empty()) throw ConfigError("ablation needs at least one frame count");
  for (int t : cfg.frame_counts)
    if (t < 1 || t > cfg.frames) throw ConfigError("ablation frame counts must lie in [1, frames]");
  StudyResult out;
  out.study = "ablation";
  const std::string label = cfg.phantom == "cardiac" ? "cardiac" : cfg.motions.front();
  const SimulatedProblem full = simulate_problem(cfg, label);
  out.references[label] = full.reference;
  for (int t : cfg.frame_counts) {
    const SimulatedProblem p = full.first_frames(t);
    note(log, label + ": first " + std::to_string(t) + " frames");
    for (const auto& method : cfg.methods) {
      const int repeats = method == "discus" ? cfg.discus_repeats : 1;
      for (int i = 0; i < repeats; ++i)
        out.runs.push_back(checked_run(method, p, cfg, repeat_seed(cfg.master_seed, i), log));
    }
  }
  return out;
}

std::vector<SweepPoint> sweep_parameter(const StudyConfig& cfg, const std::string& parameter,
                                        const std::vector<double>& values, const StudyLog& log) {
  cfg.validate();
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  const std::string label = cfg.phantom == "cardiac" ? "cardiac" : cfg.motions.front();
  const SimulatedProblem p = simulate_problem(cfg, label);
  const auto dot = parameter.find('.');
  if (dot == std::string::npos) throw ConfigError("sweep parameter must look like method.name");
  const std::string method = parameter.substr(0, dot);
  std::vector<SweepPoint> out;
  for (double v : values) {
    StudyConfig c = cfg;
    if (parameter == "discus.lambda") c.train.lambda = v;
    else if (parameter == "discus.code_std") c.train.code_std = v;
    else if (parameter == "cs.lambda_w") c.cs.lambda_w = v;
    else if (parameter == "lps.lambda_l") c.lps.lambda_l = v;
    else if (parameter == "lps.lambda_s") c.lps.lambda_s = v;
    else if (parameter == "dip.iterations") c.dip_iterations = static_cast<int>(v);
    else throw ConfigError("unknown sweep parameter '" + parameter + "'");
    c.validate();
    const RunRecord r = checked_run(method, p, c, repeat_seed(c.master_seed, 0), log);
    out.push_back({v, r.metrics.mean_nmse, r.metrics.mean_ssim});
  }
  return out;
}

}  // namespace discus
