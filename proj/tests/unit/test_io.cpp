#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include "discus/core/error.hpp"
#include "discus/io/config.hpp"
#include "discus/io/datasets.hpp"
#include "discus/io/image.hpp"
#include "discus/mri/mask.hpp"
#include "discus/sim/coils.hpp"
#include "discus/sim/motion.hpp"
#include "discus/sim/phantom.hpp"

using namespace discus;

namespace {

// Minimal GIF reader (global palette, full-frame images) written
// independently of the encoder, used to check what it produces.
std::vector<std::vector<std::uint8_t>> decode_gif(const std::vector<std::uint8_t>& b, int& w, int& h) {
  std::size_t p = 6;
  auto u16 = [&](std::size_t at) { return b[at] | (b[at + 1] << 8); };
  w = u16(p);
  h = u16(p + 2);
  const int flags = b[p + 4];
  p += 7;
  if (flags & 0x80) p += 3 * (1u << ((flags & 7) + 1));
  std::vector<std::vector<std::uint8_t>> frames;
  while (p < b.size()) {
    const int tag = b[p++];
    if (tag == 0x3B) break;
    if (tag == 0x21) {
      ++p;
      while (b[p] != 0) p += b[p] + 1;
      ++p;
      continue;
    }
    REQUIRE(tag == 0x2C);
    p += 9;
    const int min_code = b[p++];
    std::vector<std::uint8_t> data;
    while (b[p] != 0) {
      data.insert(data.end(), b.begin() + p + 1, b.begin() + p + 1 + b[p]);
      p += b[p] + 1;
    }
    ++p;
    const int clear = 1 << min_code, end = clear + 1;
    std::vector<std::vector<std::uint8_t>> dict;
    auto reset = [&] {
      dict.assign(clear + 2, {});
      for (int i = 0; i < clear; ++i) dict[i] = {static_cast<std::uint8_t>(i)};
    };
    reset();
    int width = min_code + 1;
    std::size_t bit = 0;
    std::vector<std::uint8_t> out;
    int prev = -1;
    while (true) {
      int code = 0;
      for (int i = 0; i < width; ++i, ++bit) code |= ((data[bit / 8] >> (bit % 8)) & 1) << i;
      if (code == clear) {
        reset();
        width = min_code + 1;
        prev = -1;
        continue;
      }
      if (code == end) break;
      std::vector<std::uint8_t> entry;
      if (code < static_cast<int>(dict.size())) {
        entry = dict[code];
      } else {
        entry = dict[prev];
        entry.push_back(dict[prev][0]);
      }
      out.insert(out.end(), entry.begin(), entry.end());
      if (prev >= 0 && dict.size() < 4096) {
        auto e = dict[prev];
        e.push_back(entry[0]);
        dict.push_back(e);
        if (dict.size() == (1u << width) && width < 12) ++width;
      }
      prev = code;
    }
    frames.push_back(out);
  }
  return frames;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("config subset parser") {
    const auto doc = parse_config(R"(# leading comment
[train]
lambda = 1.5e-2      # trailing comment
iterations = 3_000
name = "a \"quoted\" # not a comment"
flag = true
neg = -4
inf_value = +inf
[methods]
run = [
  "cs",   # inline
  "lps",
]
values = [1, 2.5, -3]
empty = []
)");
    CHECK(doc.get_double("train", "lambda", 0) == 0.015);
    CHECK(doc.get_int("train", "iterations", 0) == 3000);
    CHECK(doc.get_string("train", "name", "") == "a \"quoted\" # not a comment");
    CHECK(doc.get_bool("train", "flag", false));
    CHECK(doc.get_int("train", "neg", 0) == -4);
    CHECK(std::isinf(doc.get_double("train", "inf_value", 0)));
    CHECK(doc.get_double("train", "iterations", 0) == 3000.0);
    CHECK(doc.get_strings("methods", "run", {}) == std::vector<std::string>{"cs", "lps"});
    CHECK(doc.get_doubles("methods", "values", {}) == std::vector<double>{1, 2.5, -3});
    CHECK(doc.get_doubles("methods", "empty", {1.0}).empty());
    CHECK(doc.get_int("train", "missing", 7) == 7);
    CHECK_THROWS_AS(doc.get_int("train", "lambda", 0), ConfigError);
    CHECK_THROWS_AS(doc.get_string("train", "flag", ""), ConfigError);
    CHECK_THROWS_AS(doc.get_ints("methods", "values", {}), ConfigError);
    CHECK_NOTHROW(doc.require_known("train", {"lambda", "iterations", "name", "flag", "neg", "inf_value"}));
    CHECK_THROWS_AS(doc.require_known("train", {"lambda"}), ConfigError);
    CHECK_THROWS_AS(doc.require_sections({"train"}), ConfigError);

    for (const char* bad : {"[train\nx = 1\n", "x 1\n", "[a]\nx = \"open\n", "[a]\nx = [1, 2\n", "[a]\nx = 1 2\n",
                            "[a]\nx = 1\nx = 2\n", "[a]\nx = 0x1g\n", "[a]\nx = \"\\q\"\n"})
      CHECK_THROWS_AS(parse_config(bad), ConfigError);
    try {
      parse_config("[a]\n\nx = ?\n");
      FAIL("expected a parse error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config("/nonexistent.toml"), IoError);
  }

  TEST_CASE("series, mask and k-space archives round trip") {
    MotionSpec ms;
    ms.mode = MotionMode::both;
    ms.seed = 4;
    auto [series, record] = make_dynamic_series(shepp_logan(32, 0.4), 5, ms);
    const auto maps = normalize_coil_maps(simulate_coil_maps(32, 32, 2, 1));
    const auto a = NamedArrayArchive::deserialize(series_archive(series, maps, record).serialize());
    CHECK(series_from_archive(a).frames == series.frames);
    CHECK(maps_from_archive(a) == maps);
    const auto m = motion_from_archive(a);
    REQUIRE(m.has_value());
    CHECK(m->true_dimensionality() == 2);
    CHECK(m->frames[3].angle_deg == doctest::Approx(record.frames[3].angle_deg).epsilon(1e-6));

    const SamplingMask mask = gro_mask(32, 5, 3.0, 4);
    CHECK(mask_from_archive(NamedArrayArchive::deserialize(mask_archive(mask).serialize())) == mask);

    const KSpaceSeries k = normalize_kspace(add_noise(simulate_kspace(series, maps, mask), 20.0, 3));
    const KSpaceSeries back = kspace_from_archive(NamedArrayArchive::deserialize(kspace_archive(k).serialize()));
    CHECK(back.samples == k.samples);
    CHECK(back.mask == k.mask);
    CHECK(back.scale == k.scale);
    CHECK(back.noise_sigma == k.noise_sigma);
    CHECK(back.coils == 2);

    NamedArrayArchive broken;
    CHECK_THROWS_AS(series_from_archive(broken), CorruptArchiveError);
    CHECK_FALSE(motion_from_archive(broken).has_value());
  }

  TEST_CASE("PNG round trip") {
    GrayImage g{13, 7, {}};
    for (int i = 0; i < 13 * 7; ++i) g.pixels.push_back(static_cast<std::uint8_t>(i * 3));
    const auto path = std::filesystem::temp_directory_path() / "discus_io_test.png";
    write_png(g, path);
    const GrayImage back = read_png(path);
    std::filesystem::remove(path);
    CHECK(back.width == 13);
    CHECK(back.height == 7);
    CHECK(back.pixels == g.pixels);
    CHECK_THROWS_AS(write_png(GrayImage{2, 2, {1, 2, 3}}, path), DimensionError);
    CHECK_THROWS_AS(write_png(g, "/proc/none/x.png"), IoError);
  }

  TEST_CASE("GIF frames decode to the encoded pixels") {
    std::mt19937_64 r(3);
    std::vector<GrayImage> frames;
    for (int k = 0; k < 3; ++k) {
      GrayImage g{90, 70, std::vector<std::uint8_t>(90 * 70)};
      for (auto& p : g.pixels) p = k == 0 ? static_cast<std::uint8_t>(r()) : k == 1 ? static_cast<std::uint8_t>(r() % 3) : 42;
      frames.push_back(g);
    }
    const auto bytes = encode_gif(frames, 7);
    CHECK(std::string(bytes.begin(), bytes.begin() + 6) == "GIF89a");
    CHECK(bytes.back() == 0x3B);
    int w = 0, h = 0;
    const auto decoded = decode_gif(bytes, w, h);
    CHECK(w == 90);
    CHECK(h == 70);
    REQUIRE(decoded.size() == 3u);
    for (int k = 0; k < 3; ++k) CHECK(decoded[k] == frames[k].pixels);
    CHECK_THROWS_AS(encode_gif({}, 5), DimensionError);
    CHECK_THROWS_AS(encode_gif({frames[0], GrayImage{2, 2, {0, 0, 0, 0}}}, 5), DimensionError);
  }

  TEST_CASE("gray mapping and concatenation") {
    CHECK(to_gray(0.5, 1.0) == 128);
    CHECK(to_gray(2.0, 1.0) == 255);
    CHECK(to_gray(-1.0, 1.0) == 0);
    CHECK(to_gray(1.0, 0.0) == 0);
    const GrayImage c = hconcat({GrayImage{2, 1, {1, 2}}, GrayImage{1, 1, {3}}}, 1);
    CHECK(c.width == 4);
    CHECK(c.pixels == std::vector<std::uint8_t>{1, 2, 0, 3});
  }
}
