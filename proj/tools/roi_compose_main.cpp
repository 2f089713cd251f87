// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "roi/cli.hpp"

int main(int argc, char** argv) { return roi::run_cli(argc, argv, std::cout, std::cerr); }
