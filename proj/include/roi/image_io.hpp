// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "roi/rendering.hpp"

namespace roi {

/// Colour PFM ("PF"), little-endian f32, rows stored bottom to top.
void write_pfm(const ImageBuffer& image, const std::filesystem::path& path);
ImageBuffer read_pfm(const std::filesystem::path& path);

/// Single-channel PFM ("Pf") of `values` (width * height, row-major).
void write_pfm_gray(std::span<const double> values, int width, int height,
                    const std::filesystem::path& path);
std::vector<float> read_pfm_gray(const std::filesystem::path& path, int& width, int& height);

/// 8-bit encodings with a 2.2 display gamma.
std::uint8_t to_display_byte(double linear);
void write_ppm(const ImageBuffer& image, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_png(const ImageBuffer& image);
void write_png(const ImageBuffer& image, const std::filesystem::path& path);

std::string base64_encode(std::span<const std::uint8_t> bytes);

}  // namespace roi
