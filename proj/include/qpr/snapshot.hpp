#pragma once

// Binary container for cached stage results.
//
// Layout, all integers little-endian:
//   "QPRS" | u16 version | u16 key length | key bytes | u32 section count
//   per section: u16 name length | name | u64 value count | f64 values | u32 crc
// The CRC32 of a section covers its name, count and values.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qpr {

inline constexpr std::uint16_t snapshot_version = 1;

struct SnapshotSection {
  std::string name;
  std::vector<double> values;
};

struct Snapshot {
  std::string key;  ///< digest of the inputs that produced the payload
  std::vector<SnapshotSection> sections;

  void add(std::string name, std::vector<double> values);
  bool has(const std::string& name) const;
  /// Throws ErrorKind::integrity when the section is missing.
  const std::vector<double>& get(const std::string& name) const;
};

std::vector<unsigned char> encode_snapshot(const Snapshot& snap);
/// Throws ErrorKind::integrity on bad magic, version, truncation or CRC mismatch.
Snapshot decode_snapshot(const std::vector<unsigned char>& bytes);

/// Throws ErrorKind::io when the file cannot be written.
void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
/// Throws ErrorKind::io when unreadable and ErrorKind::integrity when corrupt.
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace qpr
