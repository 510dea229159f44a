// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace evqmc {

// constants, enclosure, gap-scan, derivative-check, truncation, convergence,
// functional, cbc
const std::vector<std::string>& subcommand_names();

// Loads the config, builds the solver and writes <name>.csv plus
// <name>.manifest (the cbc subcommand writes cbc.vec instead of a CSV) into
// out_dir. Returns 0 when every recorded check passes, 2 otherwise; errors
// propagate as exceptions.
int run_subcommand(const std::string& name, const std::string& config_path,
                   const std::string& out_dir);

} // namespace evqmc
