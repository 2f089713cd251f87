// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include "roi/image_io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "roi/error.hpp"

namespace roi {

namespace {

void put_f32(std::ostream& out, float v) {
  const auto u = std::bit_cast<std::uint32_t>(v);
  const char b[4] = {char(u & 0xff), char((u >> 8) & 0xff), char((u >> 16) & 0xff),
                     char((u >> 24) & 0xff)};
  out.write(b, 4);
}

float get_f32(const unsigned char* p, bool little) {
  std::uint32_t u = 0;
  for (int i = 0; i < 4; ++i) u |= std::uint32_t(p[little ? i : 3 - i]) << (8 * i);
  return std::bit_cast<float>(u);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

struct PfmData {
  int width = 0, height = 0, channels = 0;
  std::vector<float> values;  // top-to-bottom rows
};

PfmData read_pfm_any(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::string magic;
  PfmData d;
  double scale = 0.0;
  in >> magic >> d.width >> d.height >> scale;
  if (!in || (magic != "PF" && magic != "Pf") || d.width < 1 || d.height < 1 || scale == 0.0) {
    throw Error(ErrorCode::CorruptHeader, "bad PFM header in " + path.string());
  }
  in.get();  // single whitespace before the payload
  d.channels = magic == "PF" ? 3 : 1;
  const std::size_t n = std::size_t(d.width) * d.height * d.channels;
  std::vector<unsigned char> raw(4 * n);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw Error(ErrorCode::CorruptHeader, "truncated PFM payload in " + path.string());
  }
  d.values.resize(n);
  const std::size_t row = std::size_t(d.width) * d.channels;
  for (int y = 0; y < d.height; ++y) {
    const int src_row = d.height - 1 - y;
    for (std::size_t i = 0; i < row; ++i) {
      d.values[y * row + i] = get_f32(raw.data() + 4 * (src_row * row + i), scale < 0.0);
    }
  }
  return d;
}

}  // namespace

void write_pfm(const ImageBuffer& image, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "PF\n" << image.width << ' ' << image.height << "\n-1.0\n";
  for (int y = image.height - 1; y >= 0; --y) {
    for (int x = 0; x < image.width; ++x) {
      const Vec3 c = image.pixel(x, y);
      for (int k = 0; k < 3; ++k) put_f32(out, static_cast<float>(c[k]));
    }
  }
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

ImageBuffer read_pfm(const std::filesystem::path& path) {
  const auto d = read_pfm_any(path);
  if (d.channels != 3) throw Error(ErrorCode::CorruptHeader, "expected colour PFM");
  ImageBuffer img(d.width, d.height);
  for (std::size_t i = 0; i < d.values.size(); ++i) img.rgb[i] = d.values[i];
  return img;
}

void write_pfm_gray(std::span<const double> values, int width, int height,
                    const std::filesystem::path& path) {
  if (values.size() != std::size_t(width) * height) {
    throw Error(ErrorCode::DimensionMismatch, "gray PFM size mismatch");
  }
  auto out = open_out(path);
  out << "Pf\n" << width << ' ' << height << "\n-1.0\n";
  for (int y = height - 1; y >= 0; --y) {
    for (int x = 0; x < width; ++x) put_f32(out, static_cast<float>(values[std::size_t(y) * width + x]));
  }
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::vector<float> read_pfm_gray(const std::filesystem::path& path, int& width, int& height) {
  auto d = read_pfm_any(path);
  if (d.channels != 1) throw Error(ErrorCode::CorruptHeader, "expected single-channel PFM");
  width = d.width;
  height = d.height;
  return std::move(d.values);
}

std::uint8_t to_display_byte(double linear) {
  if (!(linear > 0.0)) return 0;
  if (linear >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::lround(std::pow(linear, 1.0 / 2.2) * 255.0));
}

void write_ppm(const ImageBuffer& image, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  for (double v : image.rgb) out.put(static_cast<char>(to_display_byte(v)));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::vector<std::uint8_t> encode_png(const ImageBuffer& image) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> pixels(image.rgb.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = to_display_byte(image.rgb[i]);
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::Io, std::string("png encode failed: ") + png.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::Io, std::string("png encode failed: ") + png.message);
  }
  out.resize(size);
  return out;
}

void write_png(const ImageBuffer& image, const std::filesystem::path& path) {
  const auto bytes = encode_png(image);
  auto out = open_out(path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  static constexpr char kTable[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kTable[(v >> 18) & 63];
    out += kTable[(v >> 12) & 63];
    out += kTable[(v >> 6) & 63];
    out += kTable[v & 63];
  }
  if (i < bytes.size()) {
    std::uint32_t v = bytes[i] << 16;
    if (i + 1 < bytes.size()) v |= bytes[i + 1] << 8;
    out += kTable[(v >> 18) & 63];
    out += kTable[(v >> 12) & 63];
    out += i + 1 < bytes.size() ? kTable[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

}  // namespace roi
