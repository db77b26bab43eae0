#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "discus/core/types.hpp"

namespace discus {

enum class DType : std::uint8_t { complex64, float32, uint8 };

const char* dtype_name(DType t) noexcept;
std::size_t dtype_size(DType t) noexcept;
/// Throws UnsupportedFormatError for unknown names.
DType dtype_from_name(const std::string& name);

/// One named array. `bytes` holds the little-endian payload.
struct ArrayEntry {
  std::string name;
  DType dtype = DType::float32;
  std::vector<std::int64_t> shape;
  std::vector<std::uint8_t> bytes;

  std::int64_t element_count() const noexcept;
  friend bool operator==(const ArrayEntry&, const ArrayEntry&) = default;
};

/// Named arrays plus free-form text metadata, stored in the DARC container:
///   "DARC" | u16 version | u32 manifest length | UTF-8 JSON manifest | blob
/// Multi-byte integers and array payloads are little-endian.
class NamedArrayArchive {
public:
  static constexpr std::uint16_t kVersion = 1;

  void put_float32(const std::string& name, std::vector<std::int64_t> shape, std::span<const float> v);
  void put_complex64(const std::string& name, std::vector<std::int64_t> shape, std::span<const cfloat> v);
  void put_uint8(const std::string& name, std::vector<std::int64_t> shape, std::span<const std::uint8_t> v);

  std::vector<float> get_float32(const std::string& name) const;
  std::vector<cfloat> get_complex64(const std::string& name) const;
  std::vector<std::uint8_t> get_uint8(const std::string& name) const;

  bool contains(const std::string& name) const noexcept;
  /// Throws std::out_of_range if absent.
  const ArrayEntry& at(const std::string& name) const;
  const std::vector<ArrayEntry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty() && metadata_.empty(); }

  std::map<std::string, std::string>& metadata() noexcept { return metadata_; }
  const std::map<std::string, std::string>& metadata() const noexcept { return metadata_; }

  std::vector<std::uint8_t> serialize() const;
  /// Throws CorruptArchiveError or UnsupportedFormatError on malformed input.
  static NamedArrayArchive deserialize(std::span<const std::uint8_t> bytes);

  friend bool operator==(const NamedArrayArchive&, const NamedArrayArchive&) = default;

private:
  void put(ArrayEntry e);
  const ArrayEntry& typed(const std::string& name, DType want) const;

  std::vector<ArrayEntry> entries_;
  std::map<std::string, std::string> metadata_;
};

void save_archive(const NamedArrayArchive& a, const std::filesystem::path& path);
NamedArrayArchive load_archive(const std::filesystem::path& path);

}  // namespace discus
