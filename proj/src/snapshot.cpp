#include "qpr/snapshot.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "qpr/error.hpp"

namespace qpr {

void Snapshot::add(std::string name, std::vector<double> values) {
  require(!has(name), ErrorKind::integrity, "snapshot: duplicate section " + name);
  sections.push_back({std::move(name), std::move(values)});
}

bool Snapshot::has(const std::string& name) const {
  for (const auto& s : sections) {
    if (s.name == name) return true;
  }
  return false;
}

const std::vector<double>& Snapshot::get(const std::string& name) const {
  for (const auto& s : sections) {
    if (s.name == name) return s.values;
  }
  fail(ErrorKind::integrity, "snapshot: missing section " + name);
}

namespace {

template <class T>
void put(std::vector<unsigned char>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

void put_string(std::vector<unsigned char>& out, const std::string& s) {
  require(s.size() <= 0xffff, ErrorKind::integrity, "snapshot: string too long");
  put<std::uint16_t>(out, static_cast<std::uint16_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& b) : b_(b) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(b_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }

  std::string get_string() {
    const auto len = get<std::uint16_t>();
    need(len);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), len);
    pos_ += len;
    return s;
  }

  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == b_.size(); }
  const unsigned char* at(std::size_t p) const { return b_.data() + p; }

  void need(std::size_t n) const {
    require(n <= b_.size() - pos_, ErrorKind::integrity, "snapshot: truncated data");
  }

 private:
  const std::vector<unsigned char>& b_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const unsigned char* p, std::size_t n) {
  uLong c = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    c = crc32(c, p, chunk);
    p += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(c);
}

}  // namespace

std::vector<unsigned char> encode_snapshot(const Snapshot& snap) {
  std::vector<unsigned char> out = {'Q', 'P', 'R', 'S'};
  put<std::uint16_t>(out, snapshot_version);
  put_string(out, snap.key);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(snap.sections.size()));
  for (const auto& s : snap.sections) {
    const std::size_t start = out.size();
    put_string(out, s.name);
    put<std::uint64_t>(out, s.values.size());
    for (double v : s.values) put<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    put<std::uint32_t>(out, crc_of(out.data() + start, out.size() - start));
  }
  return out;
}

Snapshot decode_snapshot(const std::vector<unsigned char>& bytes) {
  require(bytes.size() >= 4 && std::memcmp(bytes.data(), "QPRS", 4) == 0, ErrorKind::integrity,
          "snapshot: bad magic");
  Reader r(bytes);
  r.need(4);
  for (int i = 0; i < 4; ++i) r.get<std::uint8_t>();
  const auto version = r.get<std::uint16_t>();
  require(version == snapshot_version, ErrorKind::integrity,
          "snapshot: unsupported version " + std::to_string(version));
  Snapshot snap;
  snap.key = r.get_string();
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::size_t start = r.pos();
    SnapshotSection s;
    s.name = r.get_string();
    const auto n = r.get<std::uint64_t>();
    require(n <= (bytes.size() - r.pos()) / 8, ErrorKind::integrity, "snapshot: truncated data");
    s.values.resize(n);
    for (auto& v : s.values) v = std::bit_cast<double>(r.get<std::uint64_t>());
    const std::uint32_t expect = crc_of(r.at(start), r.pos() - start);
    const auto stored = r.get<std::uint32_t>();
    require(stored == expect, ErrorKind::integrity, "snapshot: CRC mismatch in section " + s.name);
    snap.sections.push_back(std::move(s));
  }
  require(r.done(), ErrorKind::integrity, "snapshot: trailing bytes");
  return snap;
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  const auto bytes = encode_snapshot(snap);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::io, "snapshot: cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorKind::io, "snapshot: write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "snapshot: cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace qpr
