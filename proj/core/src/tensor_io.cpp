#include "ort/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace ort {

namespace {

constexpr char kMagic[4] = {'O', 'R', 'T', 'F'};
constexpr std::uint8_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "ORTF I/O assumes a little-endian host");

bool has_suffix_lower(const std::string& s, const std::string& suf) {
  if (s.size() < suf.size()) return false;
  std::string tail = s.substr(s.size() - suf.size());
  std::transform(tail.begin(), tail.end(), tail.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return tail == suf;
}

}  // namespace

LatticeField read_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    throw io_error(path + ": bad ORTF magic");
  }
  std::uint8_t version = 0, p = 0;
  in.read(reinterpret_cast<char*>(&version), 1);
  in.read(reinterpret_cast<char*>(&p), 1);
  if (!in || version != kVersion) throw io_error(path + ": unsupported ORTF version");
  if (p == 0) throw io_error(path + ": zero-rank tensor");

  std::vector<int> dims(p);
  for (int j = 0; j < p; ++j) {
    std::uint32_t d = 0;
    in.read(reinterpret_cast<char*>(&d), 4);
    if (!in || d == 0) throw io_error(path + ": bad ORTF dims");
    dims[static_cast<std::size_t>(j)] = static_cast<int>(d);
  }
  std::int64_t n = 1;
  for (int d : dims) n *= d;
  std::vector<double> values(static_cast<std::size_t>(n));
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(n * 8));
  if (in.gcount() != static_cast<std::streamsize>(n * 8)) {
    throw io_error(path + ": truncated ORTF payload");
  }
  return LatticeField(std::move(dims), std::move(values));
}

void write_tensor(const LatticeField& field, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out.write(kMagic, 4);
  const std::uint8_t version = kVersion;
  const std::uint8_t p = static_cast<std::uint8_t>(field.dim());
  out.write(reinterpret_cast<const char*>(&version), 1);
  out.write(reinterpret_cast<const char*>(&p), 1);
  for (int d : field.dims()) {
    const std::uint32_t u = static_cast<std::uint32_t>(d);
    out.write(reinterpret_cast<const char*>(&u), 4);
  }
  const auto v = field.values();
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
  if (!out) throw io_error("write failed for " + path);
}

LatticeField read_field(const std::string& path) {
  if (has_suffix_lower(path, ".orft")) return read_tensor(path);
  return read_image(path);
}

void write_field(const LatticeField& field, const std::string& path, int depth) {
  if (has_suffix_lower(path, ".orft")) {
    write_tensor(field, path);
  } else {
    write_image(field, path, depth);
  }
}

}  // namespace ort
