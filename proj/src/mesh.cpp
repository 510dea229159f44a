// SPDX-License-Identifier: Apache-2.0
#include "evqmc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace evqmc {

Mesh build_mesh(DomainKind kind, double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw std::invalid_argument("build_mesh: h must be positive");
    const double n_real = 1.0 / h;
    const int n = static_cast<int>(std::llround(n_real));
    if (n < 2 || std::abs(n_real - static_cast<double>(n)) > 1e-9 * n_real)
        throw std::invalid_argument("build_mesh: h must be 1/n for an integer n >= 2");

    Mesh mesh;
    mesh.kind = kind;
    mesh.h = 1.0 / static_cast<double>(n);
    mesh.cells_per_side = n;

    if (kind == DomainKind::unit_interval) {
        mesh.nodes.resize(static_cast<std::size_t>(n) + 1);
        for (int i = 0; i <= n; ++i)
            mesh.nodes[static_cast<std::size_t>(i)] = {static_cast<double>(i) / n, 0.0};
        mesh.elements.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) mesh.elements.push_back({i, i + 1, -1});
        mesh.interior_of_node.assign(mesh.nodes.size(), -1);
        for (int i = 1; i < n; ++i) {
            mesh.interior_of_node[static_cast<std::size_t>(i)] = static_cast<int>(mesh.node_of_interior.size());
            mesh.node_of_interior.push_back(i);
        }
        return mesh;
    }

    const int stride = n + 1;
    mesh.nodes.resize(static_cast<std::size_t>(stride) * stride);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            mesh.nodes[static_cast<std::size_t>(j) * stride + i] =
                {static_cast<double>(i) / n, static_cast<double>(j) / n};
    auto vid = [stride](int i, int j) { return j * stride + i; };
    mesh.elements.reserve(2 * static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            mesh.elements.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            mesh.elements.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    mesh.interior_of_node.assign(mesh.nodes.size(), -1);
    for (int j = 1; j < n; ++j) {
        for (int i = 1; i < n; ++i) {
            mesh.interior_of_node[static_cast<std::size_t>(vid(i, j))] =
                static_cast<int>(mesh.node_of_interior.size());
            mesh.node_of_interior.push_back(vid(i, j));
        }
    }
    return mesh;
}

Point element_midpoint(const Mesh& mesh, int e) {
    const auto& el = mesh.elements.at(static_cast<std::size_t>(e));
    if (mesh.kind == DomainKind::unit_interval) {
        const Point& a = mesh.nodes[static_cast<std::size_t>(el[0])];
        const Point& b = mesh.nodes[static_cast<std::size_t>(el[1])];
        return {0.5 * (a.x + b.x), 0.0};
    }
    const Point& a = mesh.nodes[static_cast<std::size_t>(el[0])];
    const Point& b = mesh.nodes[static_cast<std::size_t>(el[1])];
    const Point& c = mesh.nodes[static_cast<std::size_t>(el[2])];
    return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

double element_volume(const Mesh& mesh, int e) {
    const auto& el = mesh.elements.at(static_cast<std::size_t>(e));
    if (mesh.kind == DomainKind::unit_interval) {
        const Point& a = mesh.nodes[static_cast<std::size_t>(el[0])];
        const Point& b = mesh.nodes[static_cast<std::size_t>(el[1])];
        return b.x - a.x;
    }
    const Point& a = mesh.nodes[static_cast<std::size_t>(el[0])];
    const Point& b = mesh.nodes[static_cast<std::size_t>(el[1])];
    const Point& c = mesh.nodes[static_cast<std::size_t>(el[2])];
    return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double laplace_eigen_reference(DomainKind kind, int k) {
    if (k < 1) throw std::invalid_argument("laplace_eigen_reference: k must be >= 1");
    const double pi2 = std::numbers::pi * std::numbers::pi;
    if (kind == DomainKind::unit_interval)
        return pi2 * static_cast<double>(k) * static_cast<double>(k);
    // collect m^2 + n^2 for m, n in [1, k+1]; the k-th smallest overall cannot
    // involve an index beyond k+1 because the (m, 1) line already gives k
    // values below (k+1)^2
    const int bound = k + 1;
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(bound) * bound);
    for (int m = 1; m <= bound; ++m)
        for (int n = 1; n <= bound; ++n)
            vals.push_back(static_cast<double>(m) * m + static_cast<double>(n) * n);
    std::sort(vals.begin(), vals.end());
    return pi2 * vals[static_cast<std::size_t>(k) - 1];
}

} // namespace evqmc
