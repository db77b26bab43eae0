#include "discus/io/datasets.hpp"

#include <cstdio>
#include <stdexcept>
#include <string>

#include "discus/core/error.hpp"

namespace discus {
namespace {

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::string& meta(const NamedArrayArchive& a, const std::string& key) {
  auto it = a.metadata().find(key);
  if (it == a.metadata().end()) throw CorruptArchiveError("archive metadata lacks '" + key + "'");
  return it->second;
}

double meta_double(const NamedArrayArchive& a, const std::string& key) {
  try {
    return std::stod(meta(a, key));
  } catch (const std::logic_error&) {
    throw CorruptArchiveError("archive metadata '" + key + "' is not a number");
  }
}

const ArrayEntry& require(const NamedArrayArchive& a, const std::string& name, std::size_t rank) {
  if (!a.contains(name)) throw CorruptArchiveError("archive lacks dataset '" + name + "'");
  const ArrayEntry& e = a.at(name);
  if (e.shape.size() != rank) throw CorruptArchiveError("dataset '" + name + "' has the wrong rank");
  for (auto d : e.shape)
    if (d <= 0) throw CorruptArchiveError("dataset '" + name + "' has an empty dimension");
  return e;
}

int dim(const ArrayEntry& e, std::size_t i) { return static_cast<int>(e.shape[i]); }

std::vector<cfloat> flatten(const ImageSeries& s) {
  std::vector<cfloat> v;
  v.reserve(s.frames.size() * s.frames.at(0).size());
  for (const auto& f : s.frames) v.insert(v.end(), f.values().begin(), f.values().end());
  return v;
}

ImageSeries unflatten(const std::vector<cfloat>& v, int t, int ny, int nx) {
  ImageSeries s;
  const std::size_t n = static_cast<std::size_t>(ny) * nx;
  for (int i = 0; i < t; ++i)
    s.frames.emplace_back(ny, nx, std::vector<cfloat>(v.begin() + i * n, v.begin() + (i + 1) * n));
  return s;
}

}  // namespace

NamedArrayArchive series_archive(const ImageSeries& series, const CoilSensitivities& maps,
                                 const std::optional<MotionRecord>& motion) {
  series.validate();
  if (maps.ny() != series.ny() || maps.nx() != series.nx())
    throw DimensionError("coil maps and series differ in shape");
  NamedArrayArchive a;
  a.put_complex64("frames", {series.frame_count(), series.ny(), series.nx()}, flatten(series));
  a.put_complex64("coil_maps", {maps.coils(), maps.ny(), maps.nx()}, maps.values());
  if (motion) {
    std::vector<float> m;
    for (const auto& f : motion->frames) {
      m.push_back(static_cast<float>(f.angle_deg));
      m.push_back(static_cast<float>(f.shift_x));
    }
    a.put_float32("motion_record", {static_cast<std::int64_t>(motion->frames.size()), 2}, m);
    a.metadata()["true_dimensionality"] = std::to_string(motion->true_dimensionality());
  }
  if (series.frame_period) a.metadata()["frame_period"] = exact(*series.frame_period);
  return a;
}

ImageSeries series_from_archive(const NamedArrayArchive& a) {
  const ArrayEntry& e = require(a, "frames", 3);
  ImageSeries s = unflatten(a.get_complex64("frames"), dim(e, 0), dim(e, 1), dim(e, 2));
  if (a.metadata().count("frame_period")) s.frame_period = meta_double(a, "frame_period");
  return s;
}

CoilSensitivities maps_from_archive(const NamedArrayArchive& a) {
  const ArrayEntry& e = require(a, "coil_maps", 3);
  CoilSensitivities maps(dim(e, 0), dim(e, 1), dim(e, 2));
  maps.values() = a.get_complex64("coil_maps");
  return maps;
}

std::optional<MotionRecord> motion_from_archive(const NamedArrayArchive& a) {
  if (!a.contains("motion_record")) return std::nullopt;
  const ArrayEntry& e = require(a, "motion_record", 2);
  if (e.shape[1] != 2) throw CorruptArchiveError("motion_record must be (T, 2)");
  const auto v = a.get_float32("motion_record");
  MotionRecord r;
  for (std::size_t i = 0; i + 1 < v.size(); i += 2) r.frames.push_back({v[i], v[i + 1]});
  return r;
}

NamedArrayArchive mask_archive(const SamplingMask& mask) {
  NamedArrayArchive a;
  a.put_uint8("mask", {mask.frames(), mask.pe()}, mask.pattern());
  a.metadata()["accel"] = exact(mask.acceleration());
  a.metadata()["acs_lines"] = std::to_string(mask.acs_lines());
  return a;
}

SamplingMask mask_from_archive(const NamedArrayArchive& a) {
  const ArrayEntry& e = require(a, "mask", 2);
  return SamplingMask(dim(e, 0), dim(e, 1), meta_double(a, "accel"), static_cast<int>(meta_double(a, "acs_lines")),
                      a.get_uint8("mask"));
}

NamedArrayArchive kspace_archive(const KSpaceSeries& k) {
  NamedArrayArchive a = mask_archive(k.mask);
  a.put_complex64("kspace", {k.frames, k.coils, k.ny, k.nx}, k.samples);
  a.metadata()["noise_sigma"] = exact(k.noise_sigma);
  a.metadata()["scale"] = exact(k.scale);
  return a;
}

KSpaceSeries kspace_from_archive(const NamedArrayArchive& a) {
  const ArrayEntry& e = require(a, "kspace", 4);
  KSpaceSeries k;
  k.frames = dim(e, 0);
  k.coils = dim(e, 1);
  k.ny = dim(e, 2);
  k.nx = dim(e, 3);
  k.samples = a.get_complex64("kspace");
  k.mask = mask_from_archive(a);
  if (k.mask.frames() != k.frames || k.mask.pe() != k.ny) throw CorruptArchiveError("mask does not match k-space");
  k.noise_sigma = meta_double(a, "noise_sigma");
  k.scale = meta_double(a, "scale");
  return k;
}

NamedArrayArchive result_archive(const ReconResult& r) {
  r.frames.validate();
  NamedArrayArchive a;
  a.put_complex64("recon_frames", {r.frames.frame_count(), r.frames.ny(), r.frames.nx()}, flatten(r.frames));
  std::vector<float> trace(r.loss_trace.begin(), r.loss_trace.end());
  a.put_float32("loss_trace", {static_cast<std::int64_t>(trace.size())}, trace);
  a.metadata()["method"] = r.method;
  a.metadata()["lambda"] = exact(r.lambda);
  if (!r.codes.z_dynamic.empty()) {
    const auto& c = r.codes;
    a.put_float32("z_static", {c.static_channels, c.ny, c.nx}, c.z_static);
    a.put_float32("z_dynamic", {c.frames, c.ny, c.nx}, c.z_dynamic);
    std::vector<std::uint8_t> support(c.pixels(), 0);
    for (auto i : r.manifold.support) support[i] = 1;
    a.put_uint8("manifold_support", {c.ny, c.nx}, support);
    a.put_float32("theta", {static_cast<std::int64_t>(r.theta.size())}, r.theta);
    a.put_float32("normalization", {static_cast<std::int64_t>(r.normalization.size())}, r.normalization);
    a.metadata()["dimensionality"] = std::to_string(r.manifold.dimensionality);
    a.metadata()["support_threshold"] = exact(r.manifold.threshold);
    a.metadata()["final_fidelity"] = exact(r.final_fidelity);
    a.metadata()["final_penalty"] = exact(r.final_penalty);
    a.metadata()["final_objective"] = exact(r.final_objective());
    const auto& g = r.generator;
    a.metadata()["generator"] = std::to_string(g.scales) + "," + std::to_string(g.channels) + "," +
                                std::to_string(g.skip_channels) + "," + std::to_string(g.in_channels) + "," +
                                std::to_string(g.out_channels) + "," + exact(g.slope);
  }
  return a;
}

ImageSeries recon_from_archive(const NamedArrayArchive& a) {
  const ArrayEntry& e = require(a, "recon_frames", 3);
  return unflatten(a.get_complex64("recon_frames"), dim(e, 0), dim(e, 1), dim(e, 2));
}

}  // namespace discus
