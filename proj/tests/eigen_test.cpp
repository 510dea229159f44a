// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "evqmc/eigensolver.hpp"
#include "evqmc/fem_space.hpp"
#include "evqmc/mesh.hpp"

using namespace evqmc;

namespace {

// lumped-free consistent-mass P1 eigenvalue on the interval, closed form:
// lambda_k_h = (6/h^2) (1 - cos(k pi h)) / (2 + cos(k pi h))
double interval_discrete_eigen(double h, int k) {
    const double c = std::cos(k * std::numbers::pi * h);
    return 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
}

Eigen::MatrixXd to_dense(const SymmetricSparseMatrix& m) {
    const int n = m.size();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) D(i, j) = m.entry(i, j);
    return D;
}

struct DensePair {
    double l1, l2;
    Eigen::VectorXd v1, v2;
};

DensePair dense_oracle(const SymmetricSparseMatrix& A, const SymmetricSparseMatrix& M) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(to_dense(A), to_dense(M));
    DensePair out;
    out.l1 = es.eigenvalues()(0);
    out.l2 = es.eigenvalues()(1);
    out.v1 = es.eigenvectors().col(0);
    out.v2 = es.eigenvectors().col(1);
    return out;
}

} // namespace

TEST_CASE("unit coefficient pencil matches the closed form at h = 1/8") {
    const Mesh mesh = build_mesh(DomainKind::unit_interval, 0.125);
    CoefficientExpansion exp;
    exp.a0 = constant_field(1.0);
    const FemSpace space = make_fem_space(mesh, exp);
    const SpectralPair pair = two_smallest(space.unit_stiffness, space.mass);
    CHECK(pair.first.value ==
          doctest::Approx(interval_discrete_eigen(0.125, 1)).epsilon(1e-10));
    CHECK(pair.second.value ==
          doctest::Approx(interval_discrete_eigen(0.125, 2)).epsilon(1e-10));
    CHECK_FALSE(pair.near_degenerate);
    CHECK(pair.first.residual <= 1e-10);
    CHECK(pair.second.residual <= 1e-10);
    CHECK(pair.first.iterations >= 1);

    // M-normalized, positive sum
    const auto& M = space.mass;
    CHECK(M.inner(pair.first.vec, pair.first.vec) == doctest::Approx(1.0).epsilon(1e-10));
    double s1 = 0.0, s2 = 0.0;
    for (double v : pair.first.vec) s1 += v;
    for (double v : pair.second.vec) s2 += v;
    CHECK(s1 > 0.0);
    CHECK(s2 > 0.0);
    // second pair M-orthogonal to the first
    std::vector<double> mv(pair.first.vec.size());
    M.multiply(pair.first.vec, mv);
    double ortho = 0.0;
    for (std::size_t i = 0; i < mv.size(); ++i) ortho += mv[i] * pair.second.vec[i];
    CHECK(std::abs(ortho) < 1e-8);
}

TEST_CASE("parametric operator matches the dense oracle") {
    const Mesh mesh = build_mesh(DomainKind::unit_interval, 0.125);
    const CoefficientExpansion exp = make_expansion(Family::disjoint_indicator, 4, 2.0, 0.5);
    const FemSpace space = make_fem_space(mesh, exp);
    const std::vector<double> y = {0.3, -0.2, 0.5, -0.5};
    const SymmetricSparseMatrix A = assemble_operator(space, y);
    const SpectralPair pair = two_smallest(A, space.mass);
    const DensePair oracle = dense_oracle(A, space.mass);
    CHECK(pair.first.value == doctest::Approx(oracle.l1).epsilon(1e-9));
    CHECK(pair.second.value == doctest::Approx(oracle.l2).epsilon(1e-9));

    // direction agreement up to sign in the M inner product
    const Eigen::MatrixXd Md = to_dense(space.mass);
    Eigen::VectorXd w1(pair.first.vec.size());
    for (std::size_t i = 0; i < pair.first.vec.size(); ++i)
        w1(static_cast<Eigen::Index>(i)) = pair.first.vec[i];
    const double align =
        std::abs(w1.dot(Md * oracle.v1)) /
        std::sqrt(w1.dot(Md * w1) * oracle.v1.dot(Md * oracle.v1));
    CHECK(align == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("square pencil resolves the nearly degenerate second pair") {
    // the triangulation splits the continuum-degenerate pair only at O(h^2),
    // so the fine mesh is a stiff test of separating clustered eigenvalues
    for (const double h : {0.25, 0.125}) {
        CAPTURE(h);
        const Mesh mesh = build_mesh(DomainKind::unit_square, h);
        CoefficientExpansion exp;
        exp.a0 = constant_field(1.0);
        const FemSpace space = make_fem_space(mesh, exp);
        const SpectralPair pair = two_smallest(space.unit_stiffness, space.mass);
        const DensePair oracle = dense_oracle(space.unit_stiffness, space.mass);
        CHECK(pair.first.value == doctest::Approx(oracle.l1).epsilon(1e-9));
        CHECK(pair.second.value == doctest::Approx(oracle.l2).epsilon(1e-9));
        CHECK(pair.first.residual <= 1e-10);
        CHECK(pair.second.residual <= 1e-10);
        CHECK_FALSE(pair.near_degenerate);
        if (h == 0.125) {
            // discretization error toward 2 pi^2 and 5 pi^2 at this h
            const double pi2 = std::numbers::pi * std::numbers::pi;
            CHECK(pair.first.value == doctest::Approx(2.0 * pi2).epsilon(0.05));
            CHECK(pair.second.value == doctest::Approx(5.0 * pi2).epsilon(0.08));
        }
    }
}

TEST_CASE("first-pair shortcut agrees with the full solve") {
    const Mesh mesh = build_mesh(DomainKind::unit_interval, 1.0 / 16.0);
    const CoefficientExpansion exp = make_expansion(Family::disjoint_indicator, 4, 2.0, 0.5);
    const FemSpace space = make_fem_space(mesh, exp);
    const std::vector<double> y = {0.1, 0.2, -0.3, 0.4};
    const SymmetricSparseMatrix A = assemble_operator(space, y);
    const SpectralPair pair = two_smallest(A, space.mass);
    const EigenPair solo = smallest_only(A, space.mass);
    CHECK(solo.value == doctest::Approx(pair.first.value).epsilon(1e-9));
    // both M-normalized; alignment in the M inner product up to sign
    std::vector<double> mv(solo.vec.size());
    space.mass.multiply(pair.first.vec, mv);
    double align = 0.0;
    for (std::size_t i = 0; i < mv.size(); ++i) align += solo.vec[i] * mv[i];
    CHECK(std::abs(align) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("solver input validation and failure reporting") {
    const Mesh tiny = build_mesh(DomainKind::unit_interval, 0.5); // one interior dof
    CoefficientExpansion exp;
    exp.a0 = constant_field(1.0);
    const FemSpace tiny_space = make_fem_space(tiny, exp);
    CHECK_THROWS_AS(two_smallest(tiny_space.unit_stiffness, tiny_space.mass),
                    std::invalid_argument);

    const Mesh mesh = build_mesh(DomainKind::unit_interval, 0.125);
    const FemSpace space = make_fem_space(mesh, exp);
    CHECK_THROWS_AS(two_smallest(space.unit_stiffness, space.mass, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(two_smallest(space.unit_stiffness, space.mass, 1e-10, 0),
                    std::invalid_argument);
    try {
        two_smallest(space.unit_stiffness, space.mass, 1e-15, 1);
        FAIL("expected SolveError");
    } catch (const SolveError& e) {
        CHECK(e.iterations == 1);
        CHECK(e.residual > 0.0);
    }
}

TEST_CASE("functional against a nodal grid") {
    const Mesh mesh = build_mesh(DomainKind::unit_interval, 0.125);
    CoefficientExpansion exp;
    exp.a0 = constant_field(1.0);
    const FemSpace space = make_fem_space(mesh, exp);
    const SpectralPair pair = two_smallest(space.unit_stiffness, space.mass);
    std::vector<double> g(static_cast<std::size_t>(mesh.interior_count()), 1.0);
    const double got = eigenfunction_functional(space, pair.first, g);
    std::vector<double> mw(g.size());
    space.mass.multiply(pair.first.vec, mw);
    double expected = 0.0;
    for (double v : mw) expected += v;
    CHECK(got == doctest::Approx(expected).epsilon(1e-14));
    // the normalized ground mode integrates to 2 sqrt(2)/pi + O(h^2)
    CHECK(got == doctest::Approx(2.0 * std::sqrt(2.0) / std::numbers::pi).epsilon(0.05));
}

TEST_CASE("matrix-level enclosure test helper") {
    AdmissibilityReport adm;
    adm.alpha_min = 1.0;
    adm.alpha_max = 1.0;
    adm.Lambda0 = 0.25;
    adm.admissible = true;
    const double chi = 10.0;
    CHECK(eigenvalue_bounds_check(7.5, chi, adm));  // exactly at the lower edge
    CHECK(eigenvalue_bounds_check(12.5, chi, adm)); // exactly at the upper edge
    CHECK(eigenvalue_bounds_check(10.0, chi, adm));
    CHECK_FALSE(eigenvalue_bounds_check(7.499, chi, adm));
    CHECK_FALSE(eigenvalue_bounds_check(12.501, chi, adm));
}
