#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace discus {

// 8-bit grayscale raster, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

// Maps v / scale to [0, 255] with clipping and rounding to nearest.
std::uint8_t to_gray(double v, double scale) noexcept;

void write_png(const GrayImage& img, const std::filesystem::path& path);
GrayImage read_png(const std::filesystem::path& path);

// Looping animated GIF with a 256-level gray palette. All frames must share
// one size; `delay_cs` is the per-frame delay in hundredths of a second.
void write_gif(const std::vector<GrayImage>& frames, int delay_cs, const std::filesystem::path& path);
// GIF byte stream without touching the filesystem.
std::vector<std::uint8_t> encode_gif(const std::vector<GrayImage>& frames, int delay_cs);

// Side-by-side concatenation of equally tall images with `gap` black columns.
GrayImage hconcat(const std::vector<GrayImage>& parts, int gap = 2);

}  // namespace discus
