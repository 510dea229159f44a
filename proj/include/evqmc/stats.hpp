// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <span>

namespace evqmc {

// mean computed against the first entry as anchor; exactly values[0] when all
// entries are bitwise equal, so spreads of constant sequences come out as 0
inline double anchored_mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double acc = 0.0;
    for (double v : values) acc += v - values[0];
    return values[0] + acc / static_cast<double>(values.size());
}

// standard error of the mean from the sample standard deviation; 0 below 2 entries
inline double mean_std_error(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double m = anchored_mean(values);
    double ss = 0.0;
    for (double v : values) {
        const double d = v - m;
        ss += d * d;
    }
    return std::sqrt(ss / (static_cast<double>(n - 1) * static_cast<double>(n)));
}

} // namespace evqmc
