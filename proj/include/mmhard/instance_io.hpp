#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/crc.hpp>

#include "mmhard/instance.hpp"

namespace mmhard {

inline constexpr char kMagic[4] = {'M', 'B', 'N', 'D'};
inline constexpr std::uint32_t kFormatVersion = 1;

enum class IoErrc { Io, BadMagic, FormatVersionMismatch, ChecksumMismatch, Malformed };

class IoError : public std::runtime_error {
 public:
  IoError(IoErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  IoErrc code() const { return code_; }

 private:
  IoErrc code_;
};

using Crc64 = boost::crc_optimal<64, 0x42F0E1EBA9EA3693ULL, ~0ULL, ~0ULL, true, true>;

inline std::uint64_t crc64(const void* data, std::size_t len) {
  Crc64 crc;
  crc.process_bytes(data, len);
  return crc.checksum();
}

namespace detail {

static_assert(std::endian::native == std::endian::little, "instance files are written on little-endian hosts");

class ByteWriter {
 public:
  template <class T>
  void put(T x) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const char*>(&x);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  template <class T>
  void put_array(const std::vector<T>& v) {
    const auto* p = reinterpret_cast<const char*>(v.data());
    buf_.insert(buf_.end(), p, p + v.size() * sizeof(T));
  }
  void put_bytes(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
  std::vector<char>& buffer() { return buf_; }

 private:
  std::vector<char> buf_;
};

class ByteReader {
 public:
  ByteReader(const char* p, std::size_t n) : p_(p), end_(p + n) {}
  template <class T>
  T get() {
    need(sizeof(T));
    T x;
    std::memcpy(&x, p_, sizeof(T));
    p_ += sizeof(T);
    return x;
  }
  template <class T>
  void get_array(std::vector<T>& v, std::uint64_t count) {
    if (count > static_cast<std::uint64_t>(end_ - p_) / sizeof(T)) throw IoError(IoErrc::Malformed, "array past end of file");
    v.resize(count);
    std::memcpy(v.data(), p_, count * sizeof(T));
    p_ += count * sizeof(T);
  }
  std::string get_string(std::uint64_t len) {
    need(len);
    std::string s(p_, len);
    p_ += len;
    return s;
  }
  bool at_end() const { return p_ == end_; }

 private:
  void need(std::uint64_t k) {
    if (k > static_cast<std::uint64_t>(end_ - p_)) throw IoError(IoErrc::Malformed, "record past end of file");
  }
  const char* p_;
  const char* end_;
};

// Write to a sibling temp file, then rename over the target.
inline void write_atomic(const std::string& path, const char* data, std::size_t len) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError(IoErrc::Io, "cannot open " + tmp + " for writing");
    os.write(data, static_cast<std::streamsize>(len));
    if (!os) throw IoError(IoErrc::Io, "write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError(IoErrc::Io, "rename " + tmp + " -> " + path + ": " + ec.message());
}

}  // namespace detail

inline void write_text_atomic(const std::string& path, const std::string& text) {
  detail::write_atomic(path, text.data(), text.size());
}

inline std::vector<char> serialize(const Instance& inst) {
  detail::ByteWriter w;
  w.put_bytes(kMagic, 4);
  w.put<std::uint32_t>(kFormatVersion);
  const std::string kv = to_kv(inst.params);
  w.put<std::uint64_t>(kv.size());
  w.put_bytes(kv.data(), kv.size());
  w.put<std::uint64_t>(inst.master_seed);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(inst.side));
  w.put<std::uint8_t>(inst.coupled ? 1 : 0);
  w.put<std::uint64_t>(inst.n);
  w.put<std::uint64_t>(inst.n_core);
  w.put<std::uint64_t>(inst.dummy_count);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(inst.L()));
  w.put<std::uint64_t>(inst.neighbors.size());
  for (const auto& level : inst.labels)
    for (const LabelEntry& e : level) {
      w.put<std::uint32_t>(e.copy);
      w.put<std::uint8_t>(static_cast<std::uint8_t>(e.kind));
      w.put<std::uint8_t>(e.part);
      w.put<std::uint16_t>(e.layer);
    }
  w.put_array(inst.vertex_side);
  w.put_array(inst.perm_seeds);
  w.put_array(inst.offsets);
  w.put_array(inst.neighbors);
  w.put_array(inst.edge_tags);
  w.put<std::uint64_t>(crc64(w.buffer().data(), w.buffer().size()));
  return std::move(w.buffer());
}

inline Instance deserialize(const std::vector<char>& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw IoError(IoErrc::BadMagic, "not an instance file (bad magic)");
  std::uint32_t version;
  std::memcpy(&version, bytes.data() + 4, 4);
  if (version != kFormatVersion)
    throw IoError(IoErrc::FormatVersionMismatch, "format version " + std::to_string(version) + ", expected " +
                                                     std::to_string(kFormatVersion));
  if (bytes.size() < 16) throw IoError(IoErrc::ChecksumMismatch, "file too short for a checksum");
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
  if (crc64(bytes.data(), bytes.size() - 8) != stored) throw IoError(IoErrc::ChecksumMismatch, "checksum mismatch");

  detail::ByteReader r(bytes.data() + 8, bytes.size() - 16);
  Instance inst;
  inst.params = from_kv(r.get_string(r.get<std::uint64_t>()));
  inst.master_seed = r.get<std::uint64_t>();
  inst.side = r.get<std::uint8_t>() ? Side::No : Side::Yes;
  inst.coupled = r.get<std::uint8_t>() != 0;
  inst.n = r.get<std::uint64_t>();
  inst.n_core = r.get<std::uint64_t>();
  inst.dummy_count = r.get<std::uint64_t>();
  const auto L = r.get<std::uint32_t>();
  const auto entries = r.get<std::uint64_t>();
  if (inst.n >= (std::uint64_t{1} << 32) || L > 127) throw IoError(IoErrc::Malformed, "implausible header");
  inst.labels.assign(L, std::vector<LabelEntry>(inst.n));
  for (auto& level : inst.labels)
    for (LabelEntry& e : level) {
      e.copy = r.get<std::uint32_t>();
      e.kind = static_cast<Kind>(r.get<std::uint8_t>());
      e.part = r.get<std::uint8_t>();
      e.layer = r.get<std::uint16_t>();
    }
  r.get_array(inst.vertex_side, inst.n);
  r.get_array(inst.perm_seeds, inst.n);
  r.get_array(inst.offsets, inst.n + 1);
  r.get_array(inst.neighbors, entries);
  r.get_array(inst.edge_tags, entries);
  if (!r.at_end()) throw IoError(IoErrc::Malformed, "trailing bytes before checksum");
  if (inst.offsets.back() != entries) throw IoError(IoErrc::Malformed, "offsets disagree with entry count");
  inst.finalize();
  return inst;
}

// Min/max core degree per top-level subset name.
inline std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> degree_table(const Instance& inst) {
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> t;
  for (std::uint32_t v = 0; v < inst.n; ++v) {
    const std::string name = subset_name(inst.label(inst.L(), v));
    const std::uint64_t d = inst.is_dummy(v) ? inst.degree(v) : inst.core_degree(v);
    auto it = t.find(name);
    if (it == t.end()) t.emplace(name, std::make_pair(d, d));
    else it->second = {std::min(it->second.first, d), std::max(it->second.second, d)};
  }
  return t;
}

inline std::string manifest(const Instance& inst, std::uint64_t crc) {
  std::ostringstream os;
  os << "format = MBND\n"
     << "format_version = " << kFormatVersion << "\n"
     << "master_seed = " << inst.master_seed << "\n"
     << "side = " << to_string(inst.side) << "\n"
     << "coupled = " << (inst.coupled ? "true (shared seed tree, experimental pairing)" : "false") << "\n"
     << "n = " << inst.n << "\n"
     << "n_core = " << inst.n_core << "\n"
     << "dummy_count = " << inst.dummy_count << "\n"
     << "core_edges = " << inst.core_edge_count() << "\n"
     << "crc64 = " << crc << "\n";
  for (auto& [name, mm] : degree_table(inst))
    os << "degree[" << name << "] = " << mm.first << (mm.first == mm.second ? "" : ".." + std::to_string(mm.second))
       << "\n";
  os << "# params\n" << to_kv(inst.params);
  return os.str();
}

inline void save(const Instance& inst, const std::string& path, bool with_manifest = true) {
  const std::vector<char> bytes = serialize(inst);
  detail::write_atomic(path, bytes.data(), bytes.size());
  if (with_manifest) {
    std::uint64_t crc;
    std::memcpy(&crc, bytes.data() + bytes.size() - 8, 8);
    write_text_atomic(path + ".manifest", manifest(inst, crc));
  }
}

inline Instance load(const std::string& path) {
  std::ifstream is(path, std::ios::binary | std::ios::ate);
  if (!is) throw IoError(IoErrc::Io, "cannot open " + path);
  const auto size = static_cast<std::size_t>(is.tellg());
  std::vector<char> bytes(size);
  is.seekg(0);
  is.read(bytes.data(), static_cast<std::streamsize>(size));
  if (!is) throw IoError(IoErrc::Io, "read failed: " + path);
  return deserialize(bytes);
}

}  // namespace mmhard
