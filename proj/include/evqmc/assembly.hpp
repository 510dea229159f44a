// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "evqmc/field.hpp"
#include "evqmc/mesh.hpp"
#include "evqmc/sparse.hpp"

namespace evqmc {

// Stiffness matrix  K_ij = sum_e field(x_e) int_e grad phi_i . grad phi_j,
// with x_e the element midpoint/barycenter (one-point rule, exact for fields
// constant per element; gradient products are exact for P1). Dirichlet rows
// and columns are eliminated. Every element contributes, including zero
// values, so matrices from the same mesh share one sparsity pattern.
SymmetricSparseMatrix assemble_stiffness(const Mesh& mesh, const ScalarField& field);

// Consistent P1 mass matrix (exact integration), Dirichlet-eliminated.
SymmetricSparseMatrix assemble_mass(const Mesh& mesh);

} // namespace evqmc
