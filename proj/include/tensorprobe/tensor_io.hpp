#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "tensorprobe/cp_tensor.hpp"
#include "tensorprobe/dense_tensor.hpp"
#include "tensorprobe/errors.hpp"

namespace tensorprobe {

// Binary tensor containers, little-endian throughout.
//   TNSR1: magic "TNSR1", u32 order, u32 dim, then dim^order f64 entries in
//          flat layout (last index fastest).
//   TCPD1: magic "TCPD1", u32 order, u32 dim, u32 rank, rank f64 weights,
//          then per mode a block of rank*dim f64 factor entries, vectors
//          contiguous (r-major).

namespace detail {

inline void put_u32_le(std::ostream& os, std::uint32_t v) {
  const std::array<char, 4> b = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                                 static_cast<char>((v >> 16) & 0xFF),
                                 static_cast<char>((v >> 24) & 0xFF)};
  os.write(b.data(), b.size());
}

inline void put_f64_le(std::ostream& os, double v) {
  std::uint64_t u = 0;
  std::memcpy(&u, &v, sizeof(u));
  std::array<char, 8> b;
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((u >> (8 * i)) & 0xFF);
  os.write(b.data(), b.size());
}

inline std::uint32_t get_u32_le(std::istream& is, const std::string& what) {
  std::array<unsigned char, 4> b;
  if (!is.read(reinterpret_cast<char*>(b.data()), b.size()))
    throw IoError("truncated file while reading " + what);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline double get_f64_le(std::istream& is, const std::string& what) {
  std::array<unsigned char, 8> b;
  if (!is.read(reinterpret_cast<char*>(b.data()), b.size()))
    throw IoError("truncated file while reading " + what);
  std::uint64_t u = 0;
  for (int i = 7; i >= 0; --i) u = (u << 8) | b[static_cast<std::size_t>(i)];
  double v = 0.0;
  std::memcpy(&v, &u, sizeof(v));
  return v;
}

inline void expect_eof(std::istream& is, const std::string& path) {
  char extra;
  if (is.read(&extra, 1)) throw IoError("trailing bytes after tensor payload in " + path);
}

}  // namespace detail

inline void write_dense(std::ostream& os, const DenseTensor& t) {
  os.write("TNSR1", 5);
  detail::put_u32_le(os, static_cast<std::uint32_t>(t.order()));
  detail::put_u32_le(os, static_cast<std::uint32_t>(t.dim()));
  for (double v : t.data()) detail::put_f64_le(os, v);
  if (!os) throw IoError("failed writing dense tensor stream");
}

inline void write_dense_file(const std::string& path, const DenseTensor& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_dense(os, t);
  if (!os) throw IoError("failed writing '" + path + "'");
}

inline DenseTensor read_dense(std::istream& is, const std::string& path = "<stream>") {
  std::array<char, 5> magic;
  if (!is.read(magic.data(), magic.size()) || std::string(magic.data(), 5) != "TNSR1")
    throw IoError("'" + path + "' is not a TNSR1 dense tensor file");
  const auto order = detail::get_u32_le(is, "order");
  const auto dim = detail::get_u32_le(is, "dim");
  if (order < 2) throw IoError("'" + path + "': tensor order must be at least 2");
  if (dim < 1) throw IoError("'" + path + "': tensor dim must be at least 1");
  const std::size_t n = tensor_entry_count(static_cast<int>(order), static_cast<int>(dim));
  std::vector<double> data(n);
  for (std::size_t f = 0; f < n; ++f) data[f] = detail::get_f64_le(is, "entries");
  detail::expect_eof(is, path);
  return DenseTensor(static_cast<int>(order), static_cast<int>(dim), std::move(data));
}

inline DenseTensor read_dense_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return read_dense(is, path);
}

inline void write_cp(std::ostream& os, const CpTensor& t) {
  os.write("TCPD1", 5);
  detail::put_u32_le(os, static_cast<std::uint32_t>(t.order()));
  detail::put_u32_le(os, static_cast<std::uint32_t>(t.dim()));
  detail::put_u32_le(os, static_cast<std::uint32_t>(t.rank()));
  for (double w : t.weights()) detail::put_f64_le(os, w);
  for (int m = 0; m < t.order(); ++m)
    for (double v : t.mode_block(m)) detail::put_f64_le(os, v);
  if (!os) throw IoError("failed writing CP tensor stream");
}

inline void write_cp_file(const std::string& path, const CpTensor& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_cp(os, t);
  if (!os) throw IoError("failed writing '" + path + "'");
}

inline CpTensor read_cp(std::istream& is, const std::string& path = "<stream>") {
  std::array<char, 5> magic;
  if (!is.read(magic.data(), magic.size()) || std::string(magic.data(), 5) != "TCPD1")
    throw IoError("'" + path + "' is not a TCPD1 CP tensor file");
  const auto order = detail::get_u32_le(is, "order");
  const auto dim = detail::get_u32_le(is, "dim");
  const auto rank = detail::get_u32_le(is, "rank");
  if (order < 2) throw IoError("'" + path + "': tensor order must be at least 2");
  if (dim < 1) throw IoError("'" + path + "': tensor dim must be at least 1");
  if (rank < 1) throw IoError("'" + path + "': rank must be at least 1");
  std::vector<double> weights(rank);
  for (auto& w : weights) w = detail::get_f64_le(is, "weights");
  std::vector<std::vector<double>> modes(order,
                                         std::vector<double>(static_cast<std::size_t>(rank) * dim));
  for (auto& block : modes)
    for (auto& v : block) v = detail::get_f64_le(is, "factors");
  detail::expect_eof(is, path);
  return CpTensor(static_cast<int>(order), static_cast<int>(dim), std::move(weights),
                  std::move(modes));
}

inline CpTensor read_cp_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return read_cp(is, path);
}

using AnyTensor = std::variant<DenseTensor, CpTensor>;

// Dispatch on the 5-byte magic.
inline AnyTensor read_tensor_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  std::array<char, 5> magic;
  if (!is.read(magic.data(), magic.size()))
    throw IoError("'" + path + "' is too short to hold a tensor header");
  is.seekg(0);
  const std::string tag(magic.data(), 5);
  if (tag == "TNSR1") return read_dense(is, path);
  if (tag == "TCPD1") return read_cp(is, path);
  throw IoError("'" + path + "' has unknown magic '" + tag + "' (expected TNSR1 or TCPD1)");
}

// Text probe file: order-1 lines, each dim whitespace-separated numbers.
inline std::vector<std::vector<double>> read_probe_file(const std::string& path, int order,
                                                        int dim) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open probe file '" + path + "'");
  std::vector<std::vector<double>> probes;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::vector<double> g;
    double v;
    while (ls >> v) g.push_back(v);
    if (g.empty()) continue;  // blank line
    probes.push_back(std::move(g));
  }
  if (static_cast<int>(probes.size()) != order - 1)
    throw IoError("probe file '" + path + "' holds " + std::to_string(probes.size()) +
                  " probes, expected " + std::to_string(order - 1));
  for (const auto& g : probes)
    if (static_cast<int>(g.size()) != dim)
      throw IoError("probe file '" + path + "' has a probe of length " +
                    std::to_string(g.size()) + ", expected " + std::to_string(dim));
  return probes;
}

}  // namespace tensorprobe
