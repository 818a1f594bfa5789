#pragma once

// Output formats.
//
// CSV: header row, comma separated, RFC 4180 quoting for fields containing
// a comma, quote or newline; numbers written with 17 significant digits.
//
// Snapshot container (little-endian):
//   char[8] "FSPIFSNP" | u32 version (=1) | u32 dtype (1 = float64)
//   | u32 ndims | u64 dims[ndims] | u32 meta_len | char[meta_len] JSON metadata
//   | f64 payload[prod(dims)], row-major, first dimension slowest.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fspif {

std::string csv_escape(const std::string& field);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& fields);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
  std::size_t columns_;
};

struct Snapshot {
  std::vector<std::uint64_t> dims;
  std::string metadata;  // JSON text
  std::vector<double> values;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::uint32_t kDtypeFloat64 = 1;

void write_snapshot(const Snapshot& snap, const std::filesystem::path& path);
Snapshot read_snapshot(const std::filesystem::path& path);
// 2D snapshot as CSV with columns i, j, value.
void write_snapshot_csv(const Snapshot& snap, const std::filesystem::path& path);

}  // namespace fspif
