// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "evqmc/assembly.hpp"
#include "evqmc/coefficient.hpp"
#include "evqmc/mesh.hpp"
#include "evqmc/sparse.hpp"

namespace evqmc {

// Discretization cache: mass matrix plus one stiffness matrix per expansion
// term, all sharing a single sparsity pattern so that assembling
// A(y) = A0 + sum_j y_j A_j is a flat axpy over the value arrays.
struct FemSpace {
    Mesh mesh;
    SymmetricSparseMatrix mass;
    SymmetricSparseMatrix base_stiffness;              // a0 term
    SymmetricSparseMatrix unit_stiffness;              // field = 1 (Laplacian)
    std::vector<SymmetricSparseMatrix> term_stiffness; // a_j terms
};

FemSpace make_fem_space(Mesh mesh, const CoefficientExpansion& exp);

// A(y) using the first y.size() terms; |y_j| <= 1/2 enforced
SymmetricSparseMatrix assemble_operator(const FemSpace& space, std::span<const double> y);

} // namespace evqmc
