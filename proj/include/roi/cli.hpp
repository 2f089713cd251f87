// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <ostream>

#include "roi/error.hpp"
#include "roi/rendering.hpp"

namespace roi {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitValidation = 4;
inline constexpr int kExitNumeric = 5;

int exit_code(ErrorCode code);

/// Entry point of the `roi-compose` tool. Failures are reported as one JSON
/// line on `err` and mapped to the exit codes above.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes PNG, PFM or PPM depending on the extension.
void save_image(const ImageBuffer& image, const std::filesystem::path& path);

}  // namespace roi
