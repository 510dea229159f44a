// SPDX-License-Identifier: Apache-2.0
#include "evqmc/assembly.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace evqmc {

namespace {

void scatter(SparseBuilder& b, const Mesh& mesh, const std::array<int, 3>& el,
             int nv, const double* local) {
    // local is a dense nv x nv element matrix in row-major order
    for (int a = 0; a < nv; ++a) {
        const int ia = mesh.interior_of_node[static_cast<std::size_t>(el[static_cast<std::size_t>(a)])];
        if (ia < 0) continue;
        for (int c = 0; c < nv; ++c) {
            const int ic = mesh.interior_of_node[static_cast<std::size_t>(el[static_cast<std::size_t>(c)])];
            if (ic < 0 || ic < ia) continue; // keep one triangle, diagonal included
            b.add(ia, ic, local[a * nv + c]);
        }
    }
}

} // namespace

SymmetricSparseMatrix assemble_stiffness(const Mesh& mesh, const ScalarField& field) {
    if (!field.eval) throw std::invalid_argument("assemble_stiffness: empty field");
    SparseBuilder builder(mesh.interior_count());
    const int ne = static_cast<int>(mesh.elements.size());
    if (mesh.kind == DomainKind::unit_interval) {
        for (int e = 0; e < ne; ++e) {
            const auto& el = mesh.elements[static_cast<std::size_t>(e)];
            const double len = element_volume(mesh, e);
            const double a = field(element_midpoint(mesh, e)) / len;
            const double local[4] = {a, -a, -a, a};
            scatter(builder, mesh, el, 2, local);
        }
        return builder.finish();
    }
    for (int e = 0; e < ne; ++e) {
        const auto& el = mesh.elements[static_cast<std::size_t>(e)];
        const Point& p0 = mesh.nodes[static_cast<std::size_t>(el[0])];
        const Point& p1 = mesh.nodes[static_cast<std::size_t>(el[1])];
        const Point& p2 = mesh.nodes[static_cast<std::size_t>(el[2])];
        // grad phi_a = (b_a, c_a) / (2 area), cyclic edge differences
        const double b0 = p1.y - p2.y, c0 = p2.x - p1.x;
        const double b1 = p2.y - p0.y, c1 = p0.x - p2.x;
        const double b2 = p0.y - p1.y, c2 = p1.x - p0.x;
        const double area = element_volume(mesh, e);
        const double w = field(element_midpoint(mesh, e)) / (4.0 * area);
        const double bb[3] = {b0, b1, b2};
        const double cc[3] = {c0, c1, c2};
        double local[9];
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 3; ++c)
                local[a * 3 + c] = w * (bb[a] * bb[c] + cc[a] * cc[c]);
        scatter(builder, mesh, el, 3, local);
    }
    return builder.finish();
}

SymmetricSparseMatrix assemble_mass(const Mesh& mesh) {
    SparseBuilder builder(mesh.interior_count());
    const int ne = static_cast<int>(mesh.elements.size());
    if (mesh.kind == DomainKind::unit_interval) {
        for (int e = 0; e < ne; ++e) {
            const auto& el = mesh.elements[static_cast<std::size_t>(e)];
            const double len = element_volume(mesh, e);
            const double d = len / 3.0, o = len / 6.0;
            const double local[4] = {d, o, o, d};
            scatter(builder, mesh, el, 2, local);
        }
        return builder.finish();
    }
    for (int e = 0; e < ne; ++e) {
        const auto& el = mesh.elements[static_cast<std::size_t>(e)];
        const double area = element_volume(mesh, e);
        const double d = area / 6.0, o = area / 12.0;
        const double local[9] = {d, o, o, o, d, o, o, o, d};
        scatter(builder, mesh, el, 3, local);
    }
    return builder.finish();
}

} // namespace evqmc
