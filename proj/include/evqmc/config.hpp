// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "evqmc/coefficient.hpp"
#include "evqmc/harness.hpp"
#include "evqmc/mesh.hpp"

namespace evqmc {

// Run description shared by all subcommands. Only `family` is required; every
// other key has the default below. Derived quantities follow fixed rules:
// the convergence dimension is max(s_list), the truncation reference rule uses
// N = max(N_list) and dimension 2 max(s_list).
struct RunConfig {
    Family family = Family::custom; // required key; custom is rejected
    int s_max = 32;
    double theta = 2.0;
    double scale = 0.5;
    double p = 0.0; // 0 keeps the family default
    DomainKind domain = DomainKind::unit_interval;
    double h = 1.0 / 64.0;
    double tol = 1e-10;
    int max_iter = 200;
    std::uint64_t seed = 0;
    std::vector<int> s_list = {2, 4, 8, 16};
    std::vector<std::uint64_t> N_list = {251, 503, 1009, 2017};
    int R = 16;
    double fd_step = 1e-3;
    FunctionalKind functional = FunctionalKind::mean;
};

// key = value lines, '#' starts a comment anywhere, blank lines ignored.
// Unknown keys, repeated keys, malformed values and composite N_list entries
// are errors naming the offending line. h accepts "1/n" or a decimal.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

// Every key in fixed order; parse_config round-trips the result exactly.
std::string serialize_config(const RunConfig& cfg);

} // namespace evqmc
