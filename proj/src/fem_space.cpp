// SPDX-License-Identifier: Apache-2.0
#include "evqmc/fem_space.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace evqmc {

FemSpace make_fem_space(Mesh mesh, const CoefficientExpansion& exp) {
    FemSpace space;
    space.mesh = std::move(mesh);
    space.mass = assemble_mass(space.mesh);
    space.unit_stiffness = assemble_stiffness(space.mesh, constant_field(1.0));
    space.base_stiffness = assemble_stiffness(space.mesh, exp.a0);
    space.base_stiffness.adopt_pattern(space.unit_stiffness);
    space.term_stiffness.reserve(exp.terms.size());
    for (const auto& term : exp.terms) {
        space.term_stiffness.push_back(assemble_stiffness(space.mesh, term));
        space.term_stiffness.back().adopt_pattern(space.unit_stiffness);
    }
    return space;
}

SymmetricSparseMatrix assemble_operator(const FemSpace& space, std::span<const double> y) {
    if (y.size() > space.term_stiffness.size())
        throw std::invalid_argument("assemble_operator: more parameters than terms");
    for (double v : y)
        if (!(std::abs(v) <= 0.5 + 1e-12))
            throw std::invalid_argument("assemble_operator: parameter outside [-1/2, 1/2]");
    SymmetricSparseMatrix a = space.base_stiffness;
    for (std::size_t j = 0; j < y.size(); ++j)
        if (y[j] != 0.0) a.add_scaled(space.term_stiffness[j], y[j]);
    return a;
}

} // namespace evqmc
