// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#include <iostream>

#include "hybridsync/cli.hpp"

int main(int argc, char** argv) { return hybridsync::cli::run(argc, argv, std::cout, std::cerr); }
