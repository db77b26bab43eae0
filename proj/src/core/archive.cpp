#include "discus/core/archive.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>

#include <json.hpp>

namespace discus {
namespace {

constexpr char kMagic[4] = {'D', 'A', 'R', 'C'};

void append_le(std::vector<std::uint8_t>& out, std::uint64_t v, int nbytes) {
  for (int i = 0; i < nbytes; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xffu));
}

std::uint64_t read_le(std::span<const std::uint8_t> in, std::size_t pos, int nbytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < nbytes; ++i) v |= static_cast<std::uint64_t>(in[pos + i]) << (8 * i);
  return v;
}

// Copies 4-byte words, swapping on big-endian hosts so the payload is always LE.
void copy_words(const void* src, void* dst, std::size_t nbytes) {
  std::memcpy(dst, src, nbytes);
  if constexpr (std::endian::native == std::endian::big) {
    auto* p = static_cast<std::uint8_t*>(dst);
    for (std::size_t i = 0; i + 3 < nbytes; i += 4) {
      std::swap(p[i], p[i + 3]);
      std::swap(p[i + 1], p[i + 2]);
    }
  }
}

std::int64_t product(const std::vector<std::int64_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::int64_t{1}, std::multiplies<>());
}

}  // namespace

const char* dtype_name(DType t) noexcept {
  switch (t) {
    case DType::complex64: return "complex64";
    case DType::float32: return "float32";
    case DType::uint8: return "uint8";
  }
  return "?";
}

std::size_t dtype_size(DType t) noexcept {
  switch (t) {
    case DType::complex64: return 8;
    case DType::float32: return 4;
    case DType::uint8: return 1;
  }
  return 0;
}

DType dtype_from_name(const std::string& name) {
  if (name == "complex64") return DType::complex64;
  if (name == "float32") return DType::float32;
  if (name == "uint8") return DType::uint8;
  throw UnsupportedFormatError("unsupported dtype '" + name + "'");
}

std::int64_t ArrayEntry::element_count() const noexcept { return product(shape); }

void NamedArrayArchive::put(ArrayEntry e) {
  for (auto d : e.shape)
    if (d < 0) throw DimensionError("negative array dimension for '" + e.name + "'");
  if (static_cast<std::size_t>(e.element_count()) * dtype_size(e.dtype) != e.bytes.size())
    throw DimensionError("array '" + e.name + "' payload does not match its shape");
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const ArrayEntry& x) { return x.name == e.name; });
  if (it != entries_.end())
    *it = std::move(e);
  else
    entries_.push_back(std::move(e));
}

void NamedArrayArchive::put_float32(const std::string& name, std::vector<std::int64_t> shape,
                                    std::span<const float> v) {
  ArrayEntry e{name, DType::float32, std::move(shape), std::vector<std::uint8_t>(v.size_bytes())};
  copy_words(v.data(), e.bytes.data(), v.size_bytes());
  put(std::move(e));
}

void NamedArrayArchive::put_complex64(const std::string& name, std::vector<std::int64_t> shape,
                                      std::span<const cfloat> v) {
  ArrayEntry e{name, DType::complex64, std::move(shape), std::vector<std::uint8_t>(v.size_bytes())};
  copy_words(v.data(), e.bytes.data(), v.size_bytes());
  put(std::move(e));
}

void NamedArrayArchive::put_uint8(const std::string& name, std::vector<std::int64_t> shape,
                                  std::span<const std::uint8_t> v) {
  put(ArrayEntry{name, DType::uint8, std::move(shape), std::vector<std::uint8_t>(v.begin(), v.end())});
}

bool NamedArrayArchive::contains(const std::string& name) const noexcept {
  return std::any_of(entries_.begin(), entries_.end(), [&](const ArrayEntry& e) { return e.name == name; });
}

const ArrayEntry& NamedArrayArchive::at(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return e;
  throw std::out_of_range("archive has no array named '" + name + "'");
}

const ArrayEntry& NamedArrayArchive::typed(const std::string& name, DType want) const {
  const auto& e = at(name);
  if (e.dtype != want)
    throw UnsupportedFormatError("array '" + name + "' is " + dtype_name(e.dtype) + ", expected " +
                                 dtype_name(want));
  return e;
}

std::vector<float> NamedArrayArchive::get_float32(const std::string& name) const {
  const auto& e = typed(name, DType::float32);
  std::vector<float> v(e.bytes.size() / 4);
  copy_words(e.bytes.data(), v.data(), e.bytes.size());
  return v;
}

std::vector<cfloat> NamedArrayArchive::get_complex64(const std::string& name) const {
  const auto& e = typed(name, DType::complex64);
  std::vector<cfloat> v(e.bytes.size() / 8);
  copy_words(e.bytes.data(), v.data(), e.bytes.size());
  return v;
}

std::vector<std::uint8_t> NamedArrayArchive::get_uint8(const std::string& name) const {
  return typed(name, DType::uint8).bytes;
}

std::vector<std::uint8_t> NamedArrayArchive::serialize() const {
  nlohmann::ordered_json manifest;
  manifest["arrays"] = nlohmann::ordered_json::array();
  std::uint64_t offset = 0;
  for (const auto& e : entries_) {
    manifest["arrays"].push_back({{"name", e.name},
                                  {"dtype", dtype_name(e.dtype)},
                                  {"shape", e.shape},
                                  {"offset", offset},
                                  {"nbytes", e.bytes.size()}});
    offset += e.bytes.size();
  }
  manifest["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : metadata_) manifest["metadata"][k] = v;
  const std::string text = manifest.dump();

  std::vector<std::uint8_t> out;
  out.reserve(10 + text.size() + offset);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  append_le(out, kVersion, 2);
  append_le(out, text.size(), 4);
  out.insert(out.end(), text.begin(), text.end());
  for (const auto& e : entries_) out.insert(out.end(), e.bytes.begin(), e.bytes.end());
  return out;
}

NamedArrayArchive NamedArrayArchive::deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 10 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin()))
    throw CorruptArchiveError("missing DARC magic");
  const auto version = read_le(bytes, 4, 2);
  if (version != kVersion) throw UnsupportedFormatError("unsupported DARC version " + std::to_string(version));
  const auto manifest_len = read_le(bytes, 6, 4);
  if (10 + manifest_len > bytes.size()) throw CorruptArchiveError("manifest extends past end of file");

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(bytes.begin() + 10, bytes.begin() + 10 + manifest_len);
  } catch (const nlohmann::json::exception& ex) {
    throw CorruptArchiveError(std::string("manifest is not valid JSON: ") + ex.what());
  }
  const auto blob = bytes.subspan(10 + manifest_len);

  NamedArrayArchive a;
  try {
    for (const auto& item : manifest.at("arrays")) {
      ArrayEntry e;
      e.name = item.at("name").get<std::string>();
      e.dtype = dtype_from_name(item.at("dtype").get<std::string>());
      e.shape = item.at("shape").get<std::vector<std::int64_t>>();
      const auto off = item.at("offset").get<std::uint64_t>();
      const auto nbytes = item.at("nbytes").get<std::uint64_t>();
      if (off > blob.size() || nbytes > blob.size() - off)
        throw CorruptArchiveError("array '" + e.name + "' lies outside the blob");
      for (auto d : e.shape)
        if (d < 0) throw CorruptArchiveError("array '" + e.name + "' has a negative dimension");
      if (static_cast<std::uint64_t>(e.element_count()) * dtype_size(e.dtype) != nbytes)
        throw CorruptArchiveError("array '" + e.name + "' byte count does not match its shape");
      if (a.contains(e.name)) throw CorruptArchiveError("duplicate array name '" + e.name + "'");
      e.bytes.assign(blob.begin() + off, blob.begin() + off + nbytes);
      a.entries_.push_back(std::move(e));
    }
    if (manifest.contains("metadata"))
      for (const auto& [k, v] : manifest.at("metadata").items()) a.metadata_[k] = v.get<std::string>();
  } catch (const nlohmann::json::exception& ex) {
    throw CorruptArchiveError(std::string("malformed manifest: ") + ex.what());
  }
  return a;
}

void save_archive(const NamedArrayArchive& a, const std::filesystem::path& path) {
  const auto bytes = a.serialize();
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

NamedArrayArchive load_archive(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return NamedArrayArchive::deserialize(bytes);
}

}  // namespace discus
