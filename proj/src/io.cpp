#include "fspif/io.hpp"

#include <bit>
#include <cstring>
#include <functional>
#include <numeric>
#include <sstream>

#include "fspif/types.hpp"

namespace fspif {

static_assert(std::endian::native == std::endian::little, "binary output assumes a little-endian host");

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw InputError("cannot open " + path.string() + " for writing");
  out_.precision(17);
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw InputError("CSV row has the wrong number of fields");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << csv_escape(fields[i]);
  }
  out_ << "\r\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw InputError("CSV row has the wrong number of fields");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << values[i];
  }
  out_ << "\r\n";
}

namespace {

constexpr char kMagic[8] = {'F', 'S', 'P', 'I', 'F', 'S', 'N', 'P'};

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw InputError("snapshot file truncated");
  return v;
}

std::uint64_t element_count(const std::vector<std::uint64_t>& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::uint64_t{1}, std::multiplies<>());
}

}  // namespace

void write_snapshot(const Snapshot& snap, const std::filesystem::path& path) {
  if (element_count(snap.dims) != snap.values.size()) throw InputError("snapshot dims do not match payload");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open " + path.string() + " for writing");
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, kSnapshotVersion);
  put<std::uint32_t>(os, kDtypeFloat64);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(snap.dims.size()));
  for (auto d : snap.dims) put<std::uint64_t>(os, d);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(snap.metadata.size()));
  os.write(snap.metadata.data(), static_cast<std::streamsize>(snap.metadata.size()));
  os.write(reinterpret_cast<const char*>(snap.values.data()),
           static_cast<std::streamsize>(snap.values.size() * sizeof(double)));
  if (!os) throw InputError("failed writing " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open " + path.string());
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0) throw InputError("not a snapshot file");
  if (get<std::uint32_t>(is) != kSnapshotVersion) throw InputError("unsupported snapshot version");
  if (get<std::uint32_t>(is) != kDtypeFloat64) throw InputError("unsupported snapshot dtype");
  Snapshot s;
  s.dims.resize(get<std::uint32_t>(is));
  for (auto& d : s.dims) d = get<std::uint64_t>(is);
  s.metadata.resize(get<std::uint32_t>(is));
  is.read(s.metadata.data(), static_cast<std::streamsize>(s.metadata.size()));
  s.values.resize(element_count(s.dims));
  is.read(reinterpret_cast<char*>(s.values.data()), static_cast<std::streamsize>(s.values.size() * sizeof(double)));
  if (!is) throw InputError("snapshot file truncated");
  return s;
}

void write_snapshot_csv(const Snapshot& snap, const std::filesystem::path& path) {
  if (snap.dims.size() != 2) throw InputError("CSV export needs a 2D snapshot");
  CsvWriter w(path, {"i", "j", "value"});
  const auto cols = snap.dims[1];
  for (std::uint64_t i = 0; i < snap.dims[0]; ++i) {
    for (std::uint64_t j = 0; j < cols; ++j) {
      w.row(std::vector<double>{static_cast<double>(i), static_cast<double>(j), snap.values[i * cols + j]});
    }
  }
}

}  // namespace fspif
