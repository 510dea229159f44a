// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evqmc/coefficient.hpp"
#include "evqmc/eigensolver.hpp"
#include "evqmc/fem_space.hpp"
#include "evqmc/lattice.hpp"
#include "evqmc/mesh.hpp"

namespace evqmc {

// log-log least squares fit; needs >= 3 points, all coordinates positive
struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slope_stderr = 0.0;
};

FitResult fit_rate(std::span<const double> x, std::span<const double> y);

// Numeric result table: named columns, one row per control value, optional
// named fits (emitted as repeated slope columns) and named pass/fail checks.
struct StudyTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, FitResult>> fits;
    std::vector<std::pair<std::string, bool>> checks;

    bool all_checks_pass() const {
        for (const auto& [name, ok] : checks)
            if (!ok) return false;
        return true;
    }
    const FitResult* fit(const std::string& name) const {
        for (const auto& [n, f] : fits)
            if (n == name) return &f;
        return nullptr;
    }
};

// Constants derived from the admissibility numbers, the Dirichlet reference
// eigenvalues and the empirical minimal relative gap delta_min:
//   eta      = (alpha_min - Lambda0) / (2 Lambda1 (1 + 1/delta_min))  (+inf if Lambda1 = 0)
//   kappa    = 1 / (2 (1 + 1/delta_min))
//   gamma_max_bound = (alpha_max + Lambda0) chi2
//   K_lambda = gamma_max_bound/2 + (alpha_max + Lambda0) chi1
//   K_omega  = sqrt((gamma_max_bound + 2 (alpha_max + Lambda0) chi1)
//                   / (2 (1 - kappa) (alpha_min - Lambda0)))
//   C1       = ((alpha_max + Lambda0) chi1)^2 chi1^-1/2 (alpha_max + Lambda0)
//              / (alpha_min - Lambda0)^2
struct DerivedConstants {
    double eta = 0.0;
    double kappa = 0.0;
    double gamma_max_bound = 0.0;
    double K_lambda = 0.0;
    double K_omega = 0.0;
    double C1 = 0.0;
};

DerivedConstants derive_constants(double alpha_min, double alpha_max, double Lambda0,
                                  double Lambda1, double chi1, double chi2, double delta_min);

struct ConstantsReport {
    AdmissibilityReport adm;
    double chi1 = 0.0, chi2 = 0.0;     // analytic Dirichlet Laplacian
    double chi1_h = 0.0, chi2_h = 0.0; // discrete pencil (unit coefficient)
    double gamma_min_emp = 0.0, gamma_max_emp = 0.0;
    double delta_min_emp = 0.0, delta_max_emp = 0.0;
    DerivedConstants c;
    int gap_samples = 0;
    std::uint64_t seed = 0;
};

// Assembles A(y) from the cached term matrices and runs the eigensolver.
// const and internally allocation-local, so distinct y solve in parallel.
class ParametricSolver {
public:
    ParametricSolver(CoefficientExpansion exp, Mesh mesh, double tol = 1e-10,
                     int max_iter = 200);

    const CoefficientExpansion& expansion() const { return exp_; }
    const FemSpace& space() const { return space_; }
    double tol() const { return tol_; }

    SpectralPair solve_pair(std::span<const double> y) const;
    EigenPair solve_first(std::span<const double> y) const; // skips the deflated pair
    double lambda1(std::span<const double> y) const { return solve_first(y).value; }

private:
    CoefficientExpansion exp_;
    FemSpace space_;
    double tol_;
    int max_iter_;
};

// Inadmissible expansions abort with diagnostics (std::runtime_error). The
// empirical gap statistics come from gap_samples uniform draws of the full
// parameter vector, streams (seed, m). With no parametric terms eta = +inf.
ConstantsReport constants_report(const ParametricSolver& solver, int gap_samples,
                                 std::uint64_t seed);

struct GapScanResult {
    StudyTable table; // sample, lambda1, lambda2, gap, relative_gap
    double gamma_min = 0.0, gamma_max = 0.0;
    double delta_min = 0.0, delta_max = 0.0;
    double gamma_max_bound_h = 0.0; // (alpha_max + Lambda0) chi2_h
};

GapScanResult gap_scan(const ParametricSolver& solver, int M, std::uint64_t seed);

// Per-sample eigenvalue enclosure at the matrix level: with chi_k_h from the
// unit-coefficient pencil, every admissible y puts lambda_k(y) inside
// [(alpha_min - Lambda0) chi_k_h, (alpha_max + Lambda0) chi_k_h], k = 1, 2.
StudyTable enclosure_study(const ParametricSolver& solver, int M, std::uint64_t seed);

// Sparse multi-index over parameter coordinates (1-based), orders 0..2 used
struct MultiIndex {
    std::vector<std::pair<int, int>> entries; // (coordinate j, nu_j >= 1), j ascending

    int order() const {
        int o = 0;
        for (const auto& [j, n] : entries) o += n;
        return o;
    }
    double factorial() const { // prod_j nu_j!
        double f = 1.0;
        for (const auto& [j, n] : entries)
            for (int k = 2; k <= n; ++k) f *= k;
        return f;
    }
    static MultiIndex zero() { return {}; }
    static MultiIndex unit(int j) { return {{{j, 1}}}; }
    static MultiIndex second(int i, int j) {
        if (i == j) return {{{i, 2}}};
        if (i > j) std::swap(i, j);
        return {{{i, 1}, {j, 1}}};
    }
};

// Central finite differences of lambda_1 at y = 0 at steps min(fd_step, 1/2)
// and half of it, Richardson-extrapolated, against
//   local form:  K_lambda nu! / (eta rho)^nu
//   global form: K^g_lambda |nu|! (e beta / eta_g)^nu,  beta_j = ||a_j||_inf,
// the latter with its own Lambda0_g = sum_j beta_j / 2 (bound +inf if that
// already breaks admissibility). Orders above 2 are not supported.
StudyTable derivative_check(const ParametricSolver& solver, const ConstantsReport& report,
                            std::span<const MultiIndex> indices, double fd_step);

// ||a_j||_inf per term (exact for the shipped families, grid for custom)
std::vector<double> term_sup_norms(const CoefficientExpansion& exp);

enum class FunctionalKind { none, mean, left_half_indicator };

std::vector<double> functional_grid(const FemSpace& space, FunctionalKind kind);

// ||G||_{V*} <= ||g||_{L2} / sqrt(chi1) for G(v) = int g v
double functional_dual_norm_bound(const FemSpace& space, std::span<const double> g,
                                  double chi1);

// Anchored dimension truncation at s in s_list against s_ref = 2 max(s_list)
// (<= term count), one CBC rule of dimension s_ref at N_ref shared across all
// levels (common random numbers). kind = none studies lambda_1 itself.
StudyTable truncation_study(const ParametricSolver& solver, const ConstantsReport& report,
                            std::span<const int> s_list, std::uint64_t N_ref, int R,
                            std::uint64_t seed, FunctionalKind kind = FunctionalKind::none);

struct ConvergenceOptions {
    int s = 0;
    std::vector<std::uint64_t> N_list;
    int R = 16;
    std::uint64_t seed = 0;
};

// Shift-RMS error against a reference run (largest N, 2R shifts, offset seed)
// for the CBC lattice rules, plus an iid Monte Carlo baseline batched R x N.
StudyTable convergence_study(const ParametricSolver& solver, const ConstantsReport& report,
                             const ConvergenceOptions& opts,
                             FunctionalKind kind = FunctionalKind::none);

} // namespace evqmc
