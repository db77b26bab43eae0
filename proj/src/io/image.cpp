#include "discus/io/image.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "discus/core/error.hpp"

namespace discus {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f != nullptr) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

void check_image(const GrayImage& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.pixels.size() != static_cast<std::size_t>(img.width) * img.height)
    throw DimensionError("gray image dimensions do not match its pixel buffer");
}

// Variable-width LSB-first code packer with 255-byte sub-blocks.
class BitSink {
 public:
  explicit BitSink(std::vector<std::uint8_t>& out) : out_(out) {}
  void put(unsigned code, int width) {
    acc_ |= static_cast<std::uint32_t>(code) << nbits_;
    nbits_ += width;
    while (nbits_ >= 8) {
      byte(static_cast<std::uint8_t>(acc_ & 0xFF));
      acc_ >>= 8;
      nbits_ -= 8;
    }
  }
  void finish() {
    if (nbits_ > 0) byte(static_cast<std::uint8_t>(acc_ & 0xFF));
    flush_block();
    out_.push_back(0);
  }

 private:
  void byte(std::uint8_t b) {
    block_.push_back(b);
    if (block_.size() == 255) flush_block();
  }
  void flush_block() {
    if (block_.empty()) return;
    out_.push_back(static_cast<std::uint8_t>(block_.size()));
    out_.insert(out_.end(), block_.begin(), block_.end());
    block_.clear();
  }
  std::vector<std::uint8_t>& out_;
  std::vector<std::uint8_t> block_;
  std::uint32_t acc_ = 0;
  int nbits_ = 0;
};

void lzw_encode(const std::vector<std::uint8_t>& px, std::vector<std::uint8_t>& out) {
  constexpr int kMinCode = 8;
  constexpr unsigned kClear = 1u << kMinCode;
  constexpr unsigned kEnd = kClear + 1;
  out.push_back(kMinCode);
  BitSink sink(out);
  // Dictionary as (prefix code, next byte) -> code, flat table.
  std::vector<int> table(4096 * 256, -1);
  unsigned next = kEnd + 1;
  int width = kMinCode + 1;
  sink.put(kClear, width);
  int prefix = px[0];
  for (std::size_t i = 1; i < px.size(); ++i) {
    const std::uint8_t c = px[i];
    const int found = table[static_cast<std::size_t>(prefix) * 256 + c];
    if (found >= 0) {
      prefix = found;
      continue;
    }
    sink.put(static_cast<unsigned>(prefix), width);
    if (next < 4096) {
      table[static_cast<std::size_t>(prefix) * 256 + c] = static_cast<int>(next);
      if (next == (1u << width) && width < 12) ++width;
      ++next;
    } else {
      sink.put(kClear, width);
      std::fill(table.begin(), table.end(), -1);
      next = kEnd + 1;
      width = kMinCode + 1;
    }
    prefix = c;
  }
  sink.put(static_cast<unsigned>(prefix), width);
  sink.put(kEnd, width);
  sink.finish();
}

void put16(std::vector<std::uint8_t>& out, unsigned v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
}

}  // namespace

std::uint8_t to_gray(double v, double scale) noexcept {
  if (!(scale > 0.0) || !std::isfinite(v)) return 0;
  const double g = std::round(255.0 * v / scale);
  return static_cast<std::uint8_t>(g < 0.0 ? 0.0 : (g > 255.0 ? 255.0 : g));
}

void write_png(const GrayImage& img, const std::filesystem::path& path) {
  check_image(img);
  File f(std::fopen(path.string().c_str(), "wb"));
  if (!f) throw IoError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng failed while writing " + path.string());
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height; ++y)
    png_write_row(png, img.pixels.data() + static_cast<std::size_t>(y) * img.width);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

GrayImage read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str()))
    throw IoError("cannot read PNG " + path.string());
  image.format = PNG_FORMAT_GRAY;
  GrayImage out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    png_image_free(&image);
    throw IoError("cannot decode PNG " + path.string());
  }
  return out;
}

std::vector<std::uint8_t> encode_gif(const std::vector<GrayImage>& frames, int delay_cs) {
  if (frames.empty()) throw DimensionError("GIF needs at least one frame");
  for (const auto& f : frames) {
    check_image(f);
    if (f.width != frames[0].width || f.height != frames[0].height)
      throw DimensionError("GIF frames must share one size");
  }
  if (frames[0].width > 65535 || frames[0].height > 65535) throw DimensionError("GIF frame too large");
  std::vector<std::uint8_t> out{'G', 'I', 'F', '8', '9', 'a'};
  put16(out, static_cast<unsigned>(frames[0].width));
  put16(out, static_cast<unsigned>(frames[0].height));
  out.push_back(0xF7);  // global table, 8 bits, 256 entries
  out.push_back(0);
  out.push_back(0);
  for (int i = 0; i < 256; ++i)
    for (int k = 0; k < 3; ++k) out.push_back(static_cast<std::uint8_t>(i));
  const char loop[] = "NETSCAPE2.0";
  out.insert(out.end(), {0x21, 0xFF, 0x0B});
  out.insert(out.end(), loop, loop + 11);
  out.insert(out.end(), {0x03, 0x01, 0x00, 0x00, 0x00});
  for (const auto& f : frames) {
    out.insert(out.end(), {0x21, 0xF9, 0x04, 0x00});
    put16(out, static_cast<unsigned>(delay_cs < 0 ? 0 : delay_cs));
    out.insert(out.end(), {0x00, 0x00});
    out.push_back(0x2C);
    put16(out, 0);
    put16(out, 0);
    put16(out, static_cast<unsigned>(f.width));
    put16(out, static_cast<unsigned>(f.height));
    out.push_back(0);
    lzw_encode(f.pixels, out);
  }
  out.push_back(0x3B);
  return out;
}

void write_gif(const std::vector<GrayImage>& frames, int delay_cs, const std::filesystem::path& path) {
  const auto bytes = encode_gif(frames, delay_cs);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

GrayImage hconcat(const std::vector<GrayImage>& parts, int gap) {
  if (parts.empty()) throw DimensionError("nothing to concatenate");
  GrayImage out;
  out.height = parts[0].height;
  for (const auto& p : parts) {
    check_image(p);
    if (p.height != out.height) throw DimensionError("hconcat needs equal heights");
    out.width += p.width;
  }
  out.width += gap * static_cast<int>(parts.size() - 1);
  out.pixels.assign(static_cast<std::size_t>(out.width) * out.height, 0);
  int x0 = 0;
  for (const auto& p : parts) {
    for (int y = 0; y < p.height; ++y)
      std::copy_n(p.pixels.begin() + static_cast<std::ptrdiff_t>(y) * p.width, p.width,
                  out.pixels.begin() + static_cast<std::ptrdiff_t>(y) * out.width + x0);
    x0 += p.width + gap;
  }
  return out;
}

}  // namespace discus
