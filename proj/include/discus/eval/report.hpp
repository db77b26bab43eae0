#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "discus/eval/study.hpp"
#include "discus/io/image.hpp"

namespace discus {

// One row per run: study, method, series, R, T, seed, lambda, NMSE_dB, SSIM,
// dimensionality (empty when not applicable).
std::string runs_csv(const StudyResult& r, const std::vector<std::string>& methods);
// One row per (run, frame).
std::string frames_csv(const StudyResult& r, const std::vector<std::string>& methods);
// Mean +- SEM per (method, series, R, T) cell.
std::string summary_csv(const StudyResult& r, const std::vector<std::string>& methods);

// Reference | reconstruction | 5x absolute error, each scaled by the
// reference maximum magnitude of that frame.
inline constexpr double kErrorGain = 5.0;
GrayImage error_panel(const ComplexImage& ref, const ComplexImage& est);

// Frames of a dynamic code series, symmetric gray scale around zero.
std::vector<GrayImage> code_frames(const std::vector<float>& z_dynamic, int frames, int ny, int nx);

// Writes runs.csv, frames.csv, summary.csv, and for the first run of every
// (method, series, T) cell a PNG panel of frame 0 and GIFs of the series
// (and of z_dynamic when present). An empty method filter means every
// method in the result; a filter that matches no run is an error.
void make_report(const StudyResult& r, const std::filesystem::path& out_dir,
                 const std::vector<std::string>& methods = {});

}  // namespace discus
