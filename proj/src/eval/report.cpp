#include "discus/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "discus/core/error.hpp"

namespace discus {
namespace {

// Fixed-format numbers so repeated runs produce identical bytes.
std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool selected(const std::vector<std::string>& methods, const std::string& m) {
  return methods.empty() || std::find(methods.begin(), methods.end(), m) != methods.end();
}

std::vector<const RunRecord*> filter_runs(const StudyResult& r, const std::vector<std::string>& methods) {
  std::vector<const RunRecord*> out;
  for (const auto& run : r.runs)
    if (selected(methods, run.metrics.method)) out.push_back(&run);
  if (out.empty()) throw ConfigError("report: no runs match the method filter");
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

GrayImage magnitude_image(const ComplexImage& img, double scale) {
  GrayImage g{img.nx(), img.ny(), std::vector<std::uint8_t>(img.size())};
  for (std::size_t i = 0; i < img.size(); ++i) g.pixels[i] = to_gray(std::abs(img[i]), scale);
  return g;
}

double max_magnitude(const ComplexImage& img) {
  double m = 0.0;
  for (const auto& v : img.values()) m = std::max(m, static_cast<double>(std::abs(v)));
  return m;
}

std::string cell_name(const RunRecord& run) {
  return run.metrics.method + "_" + run.metrics.series + "_T" + std::to_string(run.metrics.frames);
}

}  // namespace

std::string runs_csv(const StudyResult& r, const std::vector<std::string>& methods) {
  std::ostringstream s;
  s << "study,method,series,R,T,seed,lambda,NMSE_dB,SSIM,dimensionality\n";
  for (const RunRecord* run : filter_runs(r, methods)) {
    const auto& m = run->metrics;
    s << r.study << ',' << m.method << ',' << m.series << ',' << num(m.accel, 2) << ',' << m.frames << ',' << m.seed
      << ',' << sci(m.lambda) << ',' << num(m.mean_nmse) << ',' << num(m.mean_ssim) << ',';
    if (m.dimensionality >= 0) s << m.dimensionality;
    s << '\n';
  }
  return s.str();
}

std::string frames_csv(const StudyResult& r, const std::vector<std::string>& methods) {
  std::ostringstream s;
  s << "method,series,R,T,seed,frame,NMSE_dB,SSIM\n";
  for (const RunRecord* run : filter_runs(r, methods)) {
    const auto& m = run->metrics;
    for (int t = 0; t < m.frames; ++t)
      s << m.method << ',' << m.series << ',' << num(m.accel, 2) << ',' << m.frames << ',' << m.seed << ',' << t
        << ',' << num(m.nmse[t]) << ',' << num(m.ssim[t]) << '\n';
  }
  return s.str();
}

std::string summary_csv(const StudyResult& r, const std::vector<std::string>& methods) {
  filter_runs(r, methods);
  std::ostringstream s;
  s << "method,series,R,T,runs,NMSE_dB_mean,NMSE_dB_sem,SSIM_mean,SSIM_sem\n";
  for (const auto& row : r.summary()) {
    if (!selected(methods, row.method)) continue;
    s << row.method << ',' << row.series << ',' << num(row.accel, 2) << ',' << row.frames << ',' << row.runs << ','
      << num(row.mean_nmse) << ',' << num(row.sem_nmse) << ',' << num(row.mean_ssim) << ',' << num(row.sem_ssim)
      << '\n';
  }
  return s.str();
}

GrayImage error_panel(const ComplexImage& ref, const ComplexImage& est) {
  if (!ref.same_shape(est)) throw DimensionError("error panel: frames differ in shape");
  const double scale = max_magnitude(ref);
  if (!(scale > 0.0)) throw UndefinedError("error panel: reference frame is zero");
  GrayImage err{ref.nx(), ref.ny(), std::vector<std::uint8_t>(ref.size())};
  for (std::size_t i = 0; i < ref.size(); ++i)
    err.pixels[i] = to_gray(kErrorGain * std::abs(ref[i] - est[i]), scale);
  return hconcat({magnitude_image(ref, scale), magnitude_image(est, scale), err});
}

std::vector<GrayImage> code_frames(const std::vector<float>& z, int frames, int ny, int nx) {
  const std::size_t n = static_cast<std::size_t>(ny) * nx;
  if (z.size() != n * frames) throw DimensionError("code frames: size mismatch");
  double peak = 0.0;
  for (float v : z) peak = std::max(peak, static_cast<double>(std::abs(v)));
  std::vector<GrayImage> out;
  for (int t = 0; t < frames; ++t) {
    GrayImage g{nx, ny, std::vector<std::uint8_t>(n)};
    for (std::size_t i = 0; i < n; ++i)
      g.pixels[i] = peak > 0.0 ? to_gray(0.5 * (1.0 + z[t * n + i] / peak), 1.0) : 128;
    out.push_back(std::move(g));
  }
  return out;
}

void make_report(const StudyResult& r, const std::filesystem::path& out_dir, const std::vector<std::string>& methods) {
  const auto runs = filter_runs(r, methods);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) throw IoError("cannot create report directory " + out_dir.string());
  write_text(out_dir / "runs.csv", runs_csv(r, methods));
  write_text(out_dir / "frames.csv", frames_csv(r, methods));
  write_text(out_dir / "summary.csv", summary_csv(r, methods));

  std::set<std::string> done;
  for (const RunRecord* run : runs) {
    const std::string name = cell_name(*run);
    if (!done.insert(name).second) continue;
    auto ref_it = r.references.find(run->metrics.series);
    if (ref_it == r.references.end()) continue;
    const ImageSeries& ref = ref_it->second;
    write_png(error_panel(ref.frames[0], run->recon.frames[0]), out_dir / (name + "_panel.png"));

    std::vector<GrayImage> movie;
    for (int t = 0; t < run->recon.frame_count(); ++t) {
      const double scale = max_magnitude(ref.frames[t]);
      movie.push_back(magnitude_image(run->recon.frames[t], scale));
    }
    write_gif(movie, 10, out_dir / (name + "_series.gif"));
    if (!run->z_dynamic.empty())
      write_gif(code_frames(run->z_dynamic, run->recon.frame_count(), run->recon.ny(), run->recon.nx()), 10,
                out_dir / (name + "_codes.gif"));
  }
}

}  // namespace discus
