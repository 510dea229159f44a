// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "evqmc/harness.hpp"

using namespace evqmc;

namespace {

double interval_discrete_eigen(double h, int k) {
    const double c = std::cos(k * std::numbers::pi * h);
    return 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
}

// expansion with one constant term: a(y) = 1 + y, so lambda(y) = (1 + y) chi_h
CoefficientExpansion affine_constant_expansion() {
    CoefficientExpansion exp;
    exp.a0 = constant_field(1.0);
    exp.terms.push_back(constant_field(1.0));
    exp.rho = {1.0};
    exp.decay_p = 1.0;
    return exp;
}

ParametricSolver small_solver() {
    return ParametricSolver(make_expansion(Family::disjoint_indicator, 4, 2.0, 0.5),
                            build_mesh(DomainKind::unit_interval, 1.0 / 16.0));
}

} // namespace

TEST_CASE("log-log fit recovers an exact power law") {
    const std::vector<double> x = {1.0, 2.0, 4.0, 8.0};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -1.5));
    const FitResult fit = fit_rate(x, y);
    CHECK(fit.slope == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.slope_stderr <= 1e-7);

    CHECK_THROWS_AS(fit_rate(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_rate(std::vector<double>{1.0, 2.0, 3.0},
                             std::vector<double>{1.0, -2.0, 3.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_rate(std::vector<double>{2.0, 2.0, 2.0},
                             std::vector<double>{1.0, 2.0, 3.0}),
                    std::invalid_argument);
}

TEST_CASE("derived constants: hand-checked arithmetic") {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const DerivedConstants c = derive_constants(1.0, 1.0, 0.25, 1.0, pi2, 4.0 * pi2, 3.0);
    CHECK(c.eta == doctest::Approx(0.28125).epsilon(1e-15)); // 0.75 / (2 * 4/3)
    CHECK(c.kappa == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(c.gamma_max_bound == doctest::Approx(5.0 * pi2).epsilon(1e-14));
    CHECK(c.K_lambda == doctest::Approx(3.75 * pi2).epsilon(1e-14));
    // sqrt((5 pi^2 + 2.5 pi^2) / (2 * 0.625 * 0.75)) = sqrt(8 pi^2)
    CHECK(c.K_omega == doctest::Approx(2.0 * std::sqrt(2.0) * std::numbers::pi).epsilon(1e-14));
    const double upper_chi1 = 1.25 * pi2;
    CHECK(c.C1 == doctest::Approx(upper_chi1 * upper_chi1 / std::numbers::pi * 1.25 /
                                  (0.75 * 0.75))
                      .epsilon(1e-13));

    CHECK(std::isinf(derive_constants(1.0, 1.0, 0.25, 0.0, pi2, 4.0 * pi2, 3.0).eta));
    CHECK_THROWS_AS(derive_constants(1.0, 1.0, 1.0, 1.0, pi2, 4.0 * pi2, 3.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(derive_constants(1.0, 1.0, 0.25, 1.0, pi2, 4.0 * pi2, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(derive_constants(1.0, 0.5, 0.25, 1.0, pi2, 4.0 * pi2, 1.0),
                    std::invalid_argument);
}

TEST_CASE("constants report: discrete references and determinism") {
    const ParametricSolver solver = small_solver();
    const ConstantsReport rep = constants_report(solver, 32, 42);
    CHECK(rep.chi1 == doctest::Approx(std::numbers::pi * std::numbers::pi).epsilon(1e-14));
    CHECK(rep.chi1_h ==
          doctest::Approx(interval_discrete_eigen(1.0 / 16.0, 1)).epsilon(1e-9));
    CHECK(rep.chi2_h ==
          doctest::Approx(interval_discrete_eigen(1.0 / 16.0, 2)).epsilon(1e-9));
    CHECK(rep.adm.admissible);
    CHECK(rep.gamma_min_emp > 0.0);
    CHECK(rep.delta_min_emp > 0.0);
    CHECK(rep.delta_min_emp <= rep.delta_max_emp);
    CHECK(std::isfinite(rep.c.eta));
    CHECK(rep.c.eta > 0.0);

    const ConstantsReport again = constants_report(solver, 32, 42);
    CHECK(again.delta_min_emp == rep.delta_min_emp); // bitwise rerun
    CHECK(again.gamma_max_emp == rep.gamma_max_emp);
    const ConstantsReport other = constants_report(solver, 32, 43);
    CHECK(other.delta_min_emp != rep.delta_min_emp);

    CHECK_THROWS_AS(constants_report(solver, 0, 42), std::invalid_argument);
}

TEST_CASE("gap scan and enclosure tables") {
    const ParametricSolver solver = small_solver();
    const GapScanResult scan = gap_scan(solver, 24, 7);
    CHECK(scan.table.rows.size() == 24);
    CHECK(scan.table.all_checks_pass());
    CHECK(scan.gamma_min > 0.0);
    CHECK(scan.gamma_max <= scan.gamma_max_bound_h);
    for (const auto& row : scan.table.rows) {
        CHECK(row[3] == doctest::Approx(row[2] - row[1]).epsilon(1e-15));
        CHECK(row[5] == 0.0); // nothing near-degenerate here
    }

    const StudyTable enc = enclosure_study(solver, 24, 7);
    CHECK(enc.rows.size() == 24);
    CHECK(enc.all_checks_pass());
    for (const auto& row : enc.rows) {
        CHECK(row[1] >= row[3]); // lambda1 within [lower1, upper1]
        CHECK(row[1] <= row[4]);
        CHECK(row[2] >= row[5]);
        CHECK(row[2] <= row[6]);
    }
}

TEST_CASE("derivative check: affine constant coefficient has exact slope") {
    ParametricSolver solver(affine_constant_expansion(),
                            build_mesh(DomainKind::unit_interval, 1.0 / 16.0));
    const ConstantsReport rep = constants_report(solver, 16, 3);
    const double chi_h = rep.chi1_h;

    const std::vector<MultiIndex> indices = {MultiIndex::zero(), MultiIndex::unit(1),
                                             MultiIndex::second(1, 1)};
    const StudyTable table = derivative_check(solver, rep, indices, 1e-2);
    REQUIRE(table.rows.size() == 3);
    // lambda(y) = (1 + y) chi_h: zeroth value, exact first derivative, zero curvature
    CHECK(table.rows[0][5] == doctest::Approx(chi_h).epsilon(1e-10));
    CHECK(table.rows[1][5] == doctest::Approx(chi_h).epsilon(1e-5));
    CHECK(table.rows[2][5] < 1e-3);
    CHECK(table.all_checks_pass());
    // row layout: coordinates, order, then the two-step stencil values
    CHECK(table.rows[1][0] == 1.0);
    CHECK(table.rows[1][2] == 1.0);
    CHECK(table.rows[2][0] == 1.0);
    CHECK(table.rows[2][1] == 1.0);
    CHECK(table.rows[2][2] == 2.0);

    CHECK_THROWS_AS(derivative_check(solver, rep, indices, 1e-4), std::invalid_argument);
    const std::vector<MultiIndex> order3 = {{{{1, 3}}}};
    CHECK_THROWS_AS(derivative_check(solver, rep, order3, 1e-2), std::invalid_argument);
    const std::vector<MultiIndex> bad_coord = {MultiIndex::unit(2)};
    CHECK_THROWS_AS(derivative_check(solver, rep, bad_coord, 1e-2), std::invalid_argument);
}

TEST_CASE("derivative check passes for a shipped family") {
    ParametricSolver solver(make_expansion(Family::disjoint_indicator, 8, 2.0, 0.5),
                            build_mesh(DomainKind::unit_interval, 1.0 / 32.0));
    const ConstantsReport rep = constants_report(solver, 32, 5);
    std::vector<MultiIndex> indices;
    for (int j = 1; j <= 4; ++j) indices.push_back(MultiIndex::unit(j));
    indices.push_back(MultiIndex::second(1, 2));
    indices.push_back(MultiIndex::second(2, 2));
    const StudyTable table = derivative_check(solver, rep, indices, 1e-2);
    CHECK(table.all_checks_pass());
    for (const auto& row : table.rows) {
        CHECK(row[7] <= 1.0);  // local ratio
        CHECK(row[7] >= 0.0);
        CHECK(std::isfinite(row[6]));
    }
}

TEST_CASE("truncation study: a padded zero term gives an exactly zero error") {
    CoefficientExpansion exp;
    exp.a0 = constant_field(1.0);
    exp.terms.push_back(constant_field(0.5));
    exp.terms.push_back(constant_field(0.0)); // inert second coordinate
    exp.rho = {1.0, 2.0};
    exp.decay_p = 0.5;
    ParametricSolver solver(std::move(exp), build_mesh(DomainKind::unit_interval, 0.125));
    const ConstantsReport rep = constants_report(solver, 8, 1);
    const std::vector<int> s_list = {1};
    const StudyTable table = truncation_study(solver, rep, s_list, 13, 4, 9);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0][1] == 0.0); // observed difference, bitwise zero
    CHECK(table.rows[0][5] == 0.0); // and its spread
    CHECK(table.all_checks_pass());
}

TEST_CASE("truncation study: decaying families shrink within their bounds") {
    ParametricSolver solver(make_expansion(Family::disjoint_indicator, 16, 2.0, 0.5),
                            build_mesh(DomainKind::unit_interval, 1.0 / 32.0));
    const ConstantsReport rep = constants_report(solver, 32, 11);
    const std::vector<int> s_list = {2, 4, 8};
    const StudyTable table = truncation_study(solver, rep, s_list, 127, 4, 11);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.all_checks_pass());
    for (const auto& row : table.rows) {
        CHECK(row[1] >= 0.0);
        CHECK(row[1] <= row[2]);
        CHECK(row[3] > 0.0); // rho-tail variant present for the eigenvalue
    }
    CHECK(table.rows[2][1] <= table.rows[0][1] + 1e-12);

    const std::vector<int> too_deep = {16};
    CHECK_THROWS_AS(truncation_study(solver, rep, too_deep, 127, 4, 11),
                    std::invalid_argument);
    const std::vector<int> unsorted = {4, 2};
    CHECK_THROWS_AS(truncation_study(solver, rep, unsorted, 127, 4, 11),
                    std::invalid_argument);
    CHECK_THROWS_AS(truncation_study(solver, rep, s_list, 12, 4, 11),
                    std::invalid_argument); // composite N
}

TEST_CASE("convergence study: deterministic tables with theory-bounded wce") {
    ParametricSolver solver(make_expansion(Family::disjoint_indicator, 8, 2.0, 0.5),
                            build_mesh(DomainKind::unit_interval, 1.0 / 32.0));
    const ConstantsReport rep = constants_report(solver, 32, 13);
    ConvergenceOptions opts;
    opts.s = 4;
    opts.N_list = {31, 61, 127};
    opts.R = 4;
    opts.seed = 17;
    const StudyTable table = convergence_study(solver, rep, opts);
    REQUIRE(table.rows.size() == 3);
    for (const auto& row : table.rows) {
        CHECK(row[1] > 0.0);             // qmc rms against an independent reference
        CHECK(row[2] > 0.0);             // mc rms
        CHECK(row[3] <= row[4]);         // wce below its totient bound after scaling
        CHECK(row[5] <= row[4] + 1e-18); // plain-N variant is never larger
    }
    bool found = false;
    for (const auto& [name, ok] : table.checks)
        if (name == "wce_within_theory") {
            found = true;
            CHECK(ok);
        }
    CHECK(found);
    CHECK(table.fit("qmc") != nullptr);
    CHECK(table.fit("mc") != nullptr);

    const StudyTable again = convergence_study(solver, rep, opts);
    CHECK(again.rows == table.rows); // bitwise rerun stability

    ConvergenceOptions bad = opts;
    bad.s = 9;
    CHECK_THROWS_AS(convergence_study(solver, rep, bad), std::invalid_argument);
    bad = opts;
    bad.N_list = {31, 31};
    CHECK_THROWS_AS(convergence_study(solver, rep, bad), std::invalid_argument);
}

TEST_CASE("functional grids and the dual norm cap") {
    const ParametricSolver solver = small_solver();
    const std::vector<double> ones = functional_grid(solver.space(), FunctionalKind::mean);
    CHECK(ones.size() == static_cast<std::size_t>(solver.space().mesh.interior_count()));
    for (double v : ones) CHECK(v == 1.0);
    const std::vector<double> left =
        functional_grid(solver.space(), FunctionalKind::left_half_indicator);
    double sum = 0.0;
    for (double v : left) sum += v;
    CHECK(sum == 7.0); // nodes x = 1/16 .. 7/16

    const double chi1 = std::numbers::pi * std::numbers::pi;
    const double bound = functional_dual_norm_bound(solver.space(), ones, chi1);
    CHECK(bound > 0.0);
    CHECK(bound <= 1.0 / std::sqrt(chi1) + 1e-12); // ||interpolant|| <= ||1|| = 1
    CHECK_THROWS_AS(functional_grid(solver.space(), FunctionalKind::none),
                    std::invalid_argument);
}

TEST_CASE("functional convergence study scales bounds by the dual norm") {
    ParametricSolver solver(make_expansion(Family::disjoint_indicator, 8, 2.0, 0.5),
                            build_mesh(DomainKind::unit_interval, 1.0 / 32.0));
    const ConstantsReport rep = constants_report(solver, 16, 19);
    ConvergenceOptions opts;
    opts.s = 4;
    opts.N_list = {31, 61, 127};
    opts.R = 4;
    opts.seed = 23;
    const StudyTable table = convergence_study(solver, rep, opts, FunctionalKind::mean);
    REQUIRE(table.rows.size() == 3);
    for (const auto& row : table.rows) {
        CHECK(row[1] > 0.0);
        CHECK(std::isfinite(row[4]));
        CHECK(row[4] > 0.0);
    }
    bool found = false;
    for (const auto& [name, ok] : table.checks)
        if (name == "wce_within_theory") {
            found = true;
            CHECK(ok);
        }
    CHECK(found);
}
