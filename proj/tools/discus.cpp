// Command-line front end: simulation, sampling, reconstruction, evaluation
// and the desk-scale studies.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "discus/baselines/cs.hpp"
#include "discus/baselines/lps.hpp"
#include "discus/core/archive.hpp"
#include "discus/core/error.hpp"
#include "discus/engine/trainer.hpp"
#include "discus/eval/metrics.hpp"
#include "discus/eval/report.hpp"
#include "discus/eval/study.hpp"
#include "discus/io/config.hpp"
#include "discus/io/datasets.hpp"
#include "discus/mri/kspace.hpp"
#include "discus/mri/mask.hpp"
#include "discus/sim/cardiac.hpp"
#include "discus/sim/coils.hpp"
#include "discus/sim/motion.hpp"
#include "discus/sim/phantom.hpp"

using namespace discus;

namespace {

void log_line(const std::string& s) { std::cerr << s << std::endl; }

StudyConfig load_study(const std::string& path, StudyConfig defaults) {
  if (path.empty()) {
    defaults.validate();
    return defaults;
  }
  return study_config_from(load_config(path), std::move(defaults));
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void print_summary(const StudyResult& r) {
  for (const auto& row : r.summary())
    std::cout << row.method << " " << row.series << " R=" << row.accel << " T=" << row.frames << " n=" << row.runs
              << "  NMSE " << fmt(row.mean_nmse) << " +- " << fmt(row.sem_nmse) << " dB  SSIM " << fmt(row.mean_ssim)
              << " +- " << fmt(row.sem_ssim) << "\n";
  for (const auto& [series, counts] : r.dimensionality_counts()) {
    std::cout << "dimensionality " << series << ":";
    for (const auto& [d, n] : counts) std::cout << " " << d << "x" << n;
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic MRI reconstruction with group-sparse generator codes"};
  app.require_subcommand(1);

  // phantom
  auto* phantom = app.add_subcommand("phantom", "Simulate a dynamic image series");
  std::string kind = "shepplogan", motion = "rotation", out;
  int size = 64, frames = 32, coils = 1;
  double phase = 0.5, rot_range = 3.0, shift_range = 3.0, breathing = 3.0, drift = 0.0;
  bool scar = false;
  std::uint64_t seed = 0;
  phantom->add_option("--kind", kind)->check(CLI::IsMember({"shepplogan", "cardiac"}));
  phantom->add_option("--size", size);
  phantom->add_option("--frames", frames);
  phantom->add_option("--motion", motion)->check(CLI::IsMember({"rotation", "translation", "both"}));
  phantom->add_option("--phase", phase, "Quadratic phase amplitude (rad)");
  phantom->add_option("--rotation-range", rot_range, "Rotation range (deg)");
  phantom->add_option("--translation-range", shift_range, "Translation range (px)");
  phantom->add_option("--breathing", breathing, "Cardiac breathing excursion (px)");
  phantom->add_option("--drift", drift, "Cardiac contrast drift");
  phantom->add_flag("--scar", scar);
  phantom->add_option("--coils", coils);
  phantom->add_option("--seed", seed);
  phantom->add_option("--out", out)->required();

  // mask
  auto* mask_cmd = app.add_subcommand("mask", "Generate a phase-encoding sampling mask");
  int pe = 64, acs = 6;
  double accel = 2.0, density = 1.5;
  std::string mask_kind = "central-random";
  mask_cmd->add_option("--pe", pe);
  mask_cmd->add_option("--frames", frames);
  mask_cmd->add_option("--accel", accel);
  mask_cmd->add_option("--acs", acs);
  mask_cmd->add_option("--kind", mask_kind)->check(CLI::IsMember({"gro", "central-random"}));
  mask_cmd->add_option("--density", density, "GRO centre densification power");
  mask_cmd->add_option("--seed", seed);
  mask_cmd->add_option("--out", out)->required();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Noisy undersampled k-space from a series and a mask");
  std::string series_path, mask_path;
  double snr = 25.0;
  simulate->add_option("--series", series_path)->required();
  simulate->add_option("--mask", mask_path)->required();
  simulate->add_option("--snr", snr, "SNR in dB (inf for noiseless)");
  simulate->add_option("--seed", seed);
  simulate->add_option("--out", out)->required();

  // recon
  auto* recon = app.add_subcommand("recon", "Reconstruct a k-space archive");
  std::string method = "discus", kspace_path, maps_path, config_path;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  int iters = 0;
  recon->add_option("--method", method)->check(CLI::IsMember({"discus", "dgs", "dip", "cs", "lps"}));
  recon->add_option("--kspace", kspace_path)->required();
  recon->add_option("--maps", maps_path, "Archive holding coil_maps (default: single unit coil)");
  recon->add_option("--config", config_path, "TOML file with [train] and [methods] settings");
  recon->add_option("--lambda", lambda, "Sparsity weight (cs: lambda_w, lps: lambda_s)");
  recon->add_option("--iters", iters);
  recon->add_option("--seed", seed);
  recon->add_option("--out", out)->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Per-frame NMSE / SSIM of a reconstruction");
  std::string ref_path, est_path;
  eval->add_option("--ref", ref_path)->required();
  eval->add_option("--est", est_path)->required();
  eval->add_option("--out", out)->required();

  // studies
  auto* study1 = app.add_subcommand("study1", "Motion-phantom study: all methods, repeated DISCUS runs");
  auto* ablation = app.add_subcommand("ablation", "Cardiac stand-in: DISCUS vs DGS vs L+S over frame counts");
  std::vector<std::string> report_methods;
  for (auto* s : {study1, ablation}) {
    s->add_option("--config", config_path);
    s->add_option("--out", out)->required();
    s->add_option("--methods", report_methods, "Restrict the report to these methods");
  }
  auto* sweep = app.add_subcommand("sweep", "Grid sweep of one free parameter");
  std::string parameter;
  std::vector<double> values;
  sweep->add_option("--config", config_path);
  sweep->add_option("--param", parameter)->required();
  sweep->add_option("--values", values)->required();
  sweep->add_option("--out", out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (phantom->parsed()) {
      std::optional<MotionRecord> record;
      ImageSeries series;
      if (kind == "cardiac") {
        series = make_cardiac_series(size, size, frames, breathing, drift, scar, seed);
      } else {
        MotionSpec ms;
        ms.mode = motion_mode_from_name(motion);
        ms.rotation_range_deg = rot_range;
        ms.translation_range_px = shift_range;
        ms.seed = seed;
        auto [s, r] = make_dynamic_series(shepp_logan(size, phase), frames, ms);
        series = std::move(s);
        record = std::move(r);
      }
      const CoilSensitivities maps = coils == 1 ? CoilSensitivities::ones(size, size)
                                                : normalize_coil_maps(simulate_coil_maps(size, size, coils, seed));
      save_archive(series_archive(series, maps, record), out);
    } else if (mask_cmd->parsed()) {
      const SamplingMask m = mask_kind == "gro" ? gro_mask(pe, frames, accel, acs, density)
                                                : central_random_mask(pe, accel, acs, frames, seed);
      save_archive(mask_archive(m), out);
    } else if (simulate->parsed()) {
      const NamedArrayArchive s = load_archive(series_path);
      const KSpaceSeries k = simulate_kspace(series_from_archive(s), maps_from_archive(s),
                                             mask_from_archive(load_archive(mask_path)));
      save_archive(kspace_archive(normalize_kspace(add_noise(k, snr, seed))), out);
    } else if (recon->parsed()) {
      StudyConfig cfg = load_study(config_path, study1_defaults());
      const KSpaceSeries k = kspace_from_archive(load_archive(kspace_path));
      const CoilSensitivities maps =
          maps_path.empty() ? CoilSensitivities::ones(k.ny, k.nx) : maps_from_archive(load_archive(maps_path));
      ReconResult r;
      r.method = method;
      if (method == "cs") {
        if (!std::isnan(lambda)) cfg.cs.lambda_w = lambda;
        if (iters > 0) cfg.cs.iterations = iters;
        CsResult res = recon_cs(k, maps, cfg.cs);
        r.frames = std::move(res.frames);
        r.lambda = cfg.cs.lambda_w;
        for (const auto& f : res.objective)
          if (!f.empty()) r.loss_trace.push_back(f.back());
      } else if (method == "lps") {
        if (!std::isnan(lambda)) cfg.lps.lambda_s = lambda;
        if (iters > 0) cfg.lps.iterations = iters;
        LpsResult res = recon_lps(k, maps, cfg.lps);
        r.frames = std::move(res.recon);
        r.loss_trace = std::move(res.objective);
        r.lambda = cfg.lps.lambda_s;
      } else {
        TrainConfig tc = cfg.train;
        if (!std::isnan(lambda)) tc.lambda = lambda;
        tc.iterations = iters > 0 ? iters : (method == "dip" ? cfg.dip_iterations : tc.iterations);
        tc.seed = seed;
        tc.progress = [&](int it, double loss) {
          if (it % 100 == 0) log_line("iteration " + std::to_string(it) + " loss " + fmt(loss));
        };
        nn::GeneratorConfig gc = cfg.generator;
        gc.in_channels = tc.static_channels + 1;
        r = method == "discus" ? train_discus(k, maps, tc, gc)
            : method == "dgs"  ? train_dgs(k, maps, tc, gc)
                               : train_dip_per_frame(k, maps, tc, gc);
        if (method != "dip") std::cout << "dimensionality " << r.manifold.dimensionality << "\n";
      }
      save_archive(result_archive(r), out);
    } else if (eval->parsed()) {
      const ImageSeries ref = series_from_archive(load_archive(ref_path));
      const NamedArrayArchive est = load_archive(est_path);
      std::string label = "unknown";
      if (auto it = est.metadata().find("method"); it != est.metadata().end()) label = it->second;
      const MetricsReport m = evaluate_series(ref, recon_from_archive(est), label);
      std::ostringstream csv;
      csv << "method,frame,NMSE_dB,SSIM\n";
      for (int t = 0; t < m.frames; ++t) csv << label << ',' << t << ',' << fmt(m.nmse[t]) << ',' << fmt(m.ssim[t]) << '\n';
      csv << label << ",mean," << fmt(m.mean_nmse) << ',' << fmt(m.mean_ssim) << '\n';
      write_file(out, csv.str());
      std::cout << "NMSE " << fmt(m.mean_nmse) << " dB  SSIM " << fmt(m.mean_ssim) << "\n";
    } else if (study1->parsed() || ablation->parsed()) {
      const bool first = study1->parsed();
      const StudyConfig cfg = load_study(config_path, first ? study1_defaults() : ablation_defaults());
      const StudyResult r = first ? run_study1(cfg, log_line) : run_ablation(cfg, log_line);
      make_report(r, out, report_methods);
      print_summary(r);
    } else if (sweep->parsed()) {
      const StudyConfig cfg = load_study(config_path, study1_defaults());
      const auto points = sweep_parameter(cfg, parameter, values, log_line);
      std::ostringstream csv;
      csv << "parameter,value,NMSE_dB,SSIM\n";
      for (const auto& p : points) csv << parameter << ',' << p.value << ',' << fmt(p.mean_nmse) << ',' << fmt(p.mean_ssim) << '\n';
      write_file(out, csv.str());
      std::cout << csv.str();
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
