// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

namespace evqmc {

enum class DomainKind { unit_interval, unit_square };

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Uniform P1 mesh with homogeneous Dirichlet boundary handled by elimination:
// only interior nodes receive a dof index. On the square every cell is split
// into two triangles along the (lower-left, upper-right) diagonal.
struct Mesh {
    DomainKind kind = DomainKind::unit_interval;
    double h = 0.0;
    int cells_per_side = 0; // n with h = 1/n

    std::vector<Point> nodes;                    // all nodes, boundary included
    std::vector<std::array<int, 3>> elements;    // 1D elements use slots 0,1; slot 2 = -1
    std::vector<int> interior_of_node;           // node -> dof index or -1
    std::vector<int> node_of_interior;           // dof index -> node

    int vertices_per_element() const { return kind == DomainKind::unit_interval ? 2 : 3; }
    int interior_count() const { return static_cast<int>(node_of_interior.size()); }
};

// h must equal 1/n for an integer n >= 2 (throws std::invalid_argument)
Mesh build_mesh(DomainKind kind, double h);

Point element_midpoint(const Mesh& mesh, int e);
double element_volume(const Mesh& mesh, int e);

// k-th smallest Dirichlet Laplacian eigenvalue of the unit domain, with
// multiplicity: (k pi)^2 on the interval, sorted pi^2 (m^2 + n^2) on the square
double laplace_eigen_reference(DomainKind kind, int k);

} // namespace evqmc
