// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "evqmc/harness.hpp"

namespace evqmc {

// quotes a field (RFC 4180) only when it contains a comma, quote or newline
std::string csv_field(const std::string& raw);

// header row then one line per table row, comma separated, LF line ends,
// numbers in shortest round-trip form; byte-identical across reruns
void write_csv(std::ostream& os, const StudyTable& table);

// sidecar summary: subcommand, the full config, named scalars, fits, checks.
// Contains nothing volatile (no clocks, no paths), so it reruns byte-equal too.
void write_manifest(std::ostream& os, const std::string& subcommand, const std::string& serialized_config,
                    const std::vector<std::pair<std::string, std::string>>& scalars,
                    const StudyTable& table);

} // namespace evqmc
