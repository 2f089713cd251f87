// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

// Layout: "ROIGRID1" | domain 6 x f64 | resolution 3 x u32 | density N x f32 |
// rgb 3N x f32 | crc32 u32 over all preceding bytes. All little-endian,
// vertex order x-fastest.

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "roi/error.hpp"
#include "roi/fields.hpp"

namespace roi {

namespace {

constexpr char kMagic[8] = {'R', 'O', 'I', 'G', 'R', 'I', 'D', '1'};
constexpr std::size_t kHeaderSize = 8 + 6 * 8 + 3 * 4;

template <typename U>
void put_le(std::vector<std::uint8_t>& out, U value) {
  for (std::size_t b = 0; b < sizeof(U); ++b) out.push_back(static_cast<std::uint8_t>(value >> (8 * b)));
}

template <typename U>
U get_le(const std::uint8_t* p) {
  U value = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) value |= static_cast<U>(p[b]) << (8 * b);
  return value;
}

std::uint32_t crc(std::span<const std::uint8_t> bytes) {
  uLong c = crc32(0L, Z_NULL, 0);
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - offset, 1u << 30));
    c = crc32(c, bytes.data() + offset, chunk);
    offset += chunk;
  }
  return static_cast<std::uint32_t>(c);
}

}  // namespace

std::vector<std::uint8_t> encode_grid(const GridField& grid) {
  const auto& res = grid.resolution();
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + 16 * res.vertex_count() + 4);
  for (char c : kMagic) out.push_back(static_cast<std::uint8_t>(c));
  const auto& box = grid.bounds();
  for (int a = 0; a < 3; ++a) put_le(out, std::bit_cast<std::uint64_t>(box.min[a]));
  for (int a = 0; a < 3; ++a) put_le(out, std::bit_cast<std::uint64_t>(box.max[a]));
  put_le(out, res.nx);
  put_le(out, res.ny);
  put_le(out, res.nz);
  for (float v : grid.density()) put_le(out, std::bit_cast<std::uint32_t>(v));
  for (float v : grid.rgb()) put_le(out, std::bit_cast<std::uint32_t>(v));
  put_le(out, crc(out));
  return out;
}

GridField decode_grid(std::span<const std::uint8_t> bytes, std::string id) {
  if (bytes.size() < kHeaderSize + 4 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw Error(ErrorCode::CorruptHeader, "missing ROIGRID1 header");
  }
  const std::uint8_t* p = bytes.data() + 8;
  Aabb box;
  for (int a = 0; a < 3; ++a, p += 8) box.min[a] = std::bit_cast<double>(get_le<std::uint64_t>(p));
  for (int a = 0; a < 3; ++a, p += 8) box.max[a] = std::bit_cast<double>(get_le<std::uint64_t>(p));
  GridResolution res;
  res.nx = get_le<std::uint32_t>(p);
  res.ny = get_le<std::uint32_t>(p + 4);
  res.nz = get_le<std::uint32_t>(p + 8);
  p += 12;
  if (!box.valid() || res.nx < 2 || res.ny < 2 || res.nz < 2) {
    throw Error(ErrorCode::CorruptHeader, "invalid domain or resolution");
  }
  const std::size_t n = res.vertex_count();
  // Guard the multiplication below against absurd header values.
  if (n > (bytes.size() / 16) + 1) throw Error(ErrorCode::CorruptHeader, "truncated payload");
  const std::size_t expected = kHeaderSize + 16 * n + 4;
  if (bytes.size() != expected) {
    throw Error(ErrorCode::CorruptHeader, "payload size " + std::to_string(bytes.size()) +
                                              " != expected " + std::to_string(expected));
  }
  const std::uint32_t stored = get_le<std::uint32_t>(bytes.data() + expected - 4);
  if (stored != crc(bytes.first(expected - 4))) {
    throw Error(ErrorCode::ChecksumMismatch, "grid CRC32 does not match");
  }
  std::vector<float> density(n), rgb(3 * n);
  for (auto& v : density) {
    v = std::bit_cast<float>(get_le<std::uint32_t>(p));
    p += 4;
  }
  for (auto& v : rgb) {
    v = std::bit_cast<float>(get_le<std::uint32_t>(p));
    p += 4;
  }
  try {
    return GridField(std::move(id), box, res, std::move(density), std::move(rgb));
  } catch (const Error& e) {
    throw Error(ErrorCode::CorruptHeader, e.what());
  }
}

void save_grid(const GridField& grid, const std::filesystem::path& path) {
  const auto bytes = encode_grid(grid);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

GridField load_grid(const std::filesystem::path& path, std::string id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (id.empty()) id = path.stem().string();
  return decode_grid(bytes, std::move(id));
}

}  // namespace roi
