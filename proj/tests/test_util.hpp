// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hybridsync/simeng.hpp"

namespace testutil {

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hybridsync_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Two-node chain with (almost) no quantization, no fading and no drift.
inline hybridsync::sim::Topology ideal_chain() {
  using namespace hybridsync::sim;
  Topology t;
  t.name = "ideal";
  NodeSpec gmc;
  gmc.id = "gmc";
  gmc.role = Role::gmc;
  gmc.resolution_ns = 1e-6;
  NodeSpec a = gmc;
  a.id = "bc";
  a.role = Role::boundary;
  a.clock.offset_ns = 5000.0;
  NodeSpec b = a;
  b.id = "sta";
  b.role = Role::sta;
  b.clock.offset_ns = -300.0;
  t.nodes = {gmc, a, b};
  HopSpec h;
  h.from = "gmc";
  h.to = "bc";
  h.geometry = {3.0, 0.0};
  h.port_period_ns = 1e-6;
  HopSpec w = h;
  w.from = "bc";
  w.to = "sta";
  w.medium = Medium::wireless;
  w.pdp = hybridsync::chan::build_pdp("AWGN");
  w.port_period_ns = 1e-6;
  w.protocol = hybridsync::proto::wifi_ptp_preset();
  w.start_offset_s = 0.05;
  t.hops = {h, w};
  return t;
}

}  // namespace testutil
