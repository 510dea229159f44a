// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>

#include "evqmc/mesh.hpp"

namespace evqmc {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Measurable coefficient field on the domain. Evaluation never throws for
// points inside [0,1]^d. support_x1, when set, marks an x-interval outside of
// which the field vanishes (all shipped families are ridge functions of x).
struct ScalarField {
    std::function<double(const Point&)> eval;
    std::optional<Interval> support_x1;

    double operator()(const Point& p) const { return eval(p); }
};

inline ScalarField constant_field(double c) {
    return ScalarField{[c](const Point&) { return c; }, std::nullopt};
}

} // namespace evqmc
