// SPDX-License-Identifier: Apache-2.0
#include "evqmc/csv.hpp"

#include <ostream>
#include <sstream>

#include "evqmc/numformat.hpp"

namespace evqmc {

std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\n\r") == std::string::npos) return raw;
    std::string out = "\"";
    for (char c : raw) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_csv(std::ostream& os, const StudyTable& table) {
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        os << (c ? "," : "") << csv_field(table.columns[c]);
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            os << (c ? "," : "") << format_double(row[c]);
        os << '\n';
    }
}

void write_manifest(std::ostream& os, const std::string& subcommand, const std::string& serialized_config,
                    const std::vector<std::pair<std::string, std::string>>& scalars,
                    const StudyTable& table) {
    os << "subcommand " << subcommand << '\n';
    std::istringstream cfg(serialized_config);
    std::string line;
    while (std::getline(cfg, line)) os << "config " << line << '\n';
    for (const auto& [name, value] : scalars) os << "value " << name << " = " << value << '\n';
    for (const auto& [name, fit] : table.fits)
        os << "fit " << name << " slope " << format_double(fit.slope) << " intercept "
           << format_double(fit.intercept) << " r2 " << format_double(fit.r2)
           << " slope_stderr " << format_double(fit.slope_stderr) << '\n';
    for (const auto& [name, ok] : table.checks)
        os << "check " << name << ' ' << (ok ? "PASS" : "FAIL") << '\n';
}

} // namespace evqmc
