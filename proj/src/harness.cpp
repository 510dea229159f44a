// SPDX-License-Identifier: Apache-2.0
#include "evqmc/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "evqmc/numformat.hpp"
#include "evqmc/parallel.hpp"
#include "evqmc/rng.hpp"
#include "evqmc/stats.hpp"

namespace evqmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// seed offsets that keep the reference run and the Monte Carlo baseline on
// streams disjoint from the main shift streams
constexpr std::uint64_t kReferenceSeedTag = 0x5245464c41545443ULL;
constexpr std::uint64_t kBaselineSeedTag = 0x4d434241534c4e45ULL;

void check_index(const MultiIndex& nu, int term_count) {
    int prev = 0;
    for (const auto& [j, n] : nu.entries) {
        if (j < 1 || j > term_count)
            throw std::invalid_argument("derivative_check: coordinate outside the expansion");
        if (j <= prev) throw std::invalid_argument("derivative_check: entries must ascend");
        if (n < 1) throw std::invalid_argument("derivative_check: zero entry in multi-index");
        prev = j;
    }
    if (nu.order() > 2)
        throw std::invalid_argument("derivative_check: only orders up to 2 are supported");
}

// central stencil at step h for |nu| <= 2; f0 = lambda at y = 0
double central_difference(const std::function<double(std::span<const double>)>& f,
                          const MultiIndex& nu, double h, double f0) {
    if (nu.entries.empty()) return f0;
    const std::size_t dim = static_cast<std::size_t>(nu.entries.back().first);
    std::vector<double> y(dim, 0.0);
    auto at = [&](double v1, double v2) {
        y.assign(dim, 0.0);
        y[static_cast<std::size_t>(nu.entries[0].first) - 1] = v1;
        if (nu.entries.size() == 2) y[static_cast<std::size_t>(nu.entries[1].first) - 1] = v2;
        return f(y);
    };
    if (nu.entries.size() == 1) {
        const auto [j, n] = nu.entries[0];
        if (n == 1) return (at(h, 0.0) - at(-h, 0.0)) / (2.0 * h);
        return (at(h, 0.0) - 2.0 * f0 + at(-h, 0.0)) / (h * h);
    }
    return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
}

struct SampledGaps {
    std::vector<double> l1, l2;
    std::vector<int> degenerate;
};

SampledGaps sample_gaps(const ParametricSolver& solver, int M, std::uint64_t seed) {
    const std::size_t terms = static_cast<std::size_t>(solver.expansion().term_count());
    SampledGaps out;
    out.l1.resize(static_cast<std::size_t>(M));
    out.l2.resize(static_cast<std::size_t>(M));
    out.degenerate.resize(static_cast<std::size_t>(M));
    parallel_for(static_cast<std::size_t>(M), [&](std::size_t m) {
        auto g = SplitMix64::stream(seed, m);
        std::vector<double> y(terms);
        for (double& v : y) v = g.next_symmetric();
        const SpectralPair p = solver.solve_pair(y);
        out.l1[m] = p.first.value;
        out.l2[m] = p.second.value;
        out.degenerate[m] = p.near_degenerate ? 1 : 0;
    });
    return out;
}

struct IntegrandSetup {
    std::function<double(std::span<const double>)> F;
    double base_norm = 0.0; // K_lambda, or ||G|| K_omega for a functional
};

IntegrandSetup make_integrand(const ParametricSolver& solver, const ConstantsReport& report,
                              FunctionalKind kind) {
    IntegrandSetup out;
    if (kind == FunctionalKind::none) {
        out.F = [&solver](std::span<const double> y) { return solver.lambda1(y); };
        out.base_norm = report.c.K_lambda;
        return out;
    }
    auto g = std::make_shared<std::vector<double>>(functional_grid(solver.space(), kind));
    out.F = [&solver, g](std::span<const double> y) {
        const EigenPair p = solver.solve_first(y);
        return eigenfunction_functional(solver.space(), p, *g);
    };
    out.base_norm =
        functional_dual_norm_bound(solver.space(), *g, report.chi1) * report.c.K_omega;
    return out;
}

ProductWeights study_weights(const CoefficientExpansion& exp, const ConstantsReport& report,
                             int s) {
    if (!(std::isfinite(report.c.eta) && report.c.eta > 0.0))
        throw std::invalid_argument("study: eta must be finite and positive (parametric terms required)");
    if (!(exp.decay_p > 0.0 && exp.decay_p <= 1.0))
        throw std::invalid_argument("study: expansion carries no summability exponent p");
    const std::span<const double> rho(exp.rho);
    return weights_from_rho(rho.first(static_cast<std::size_t>(s)), report.c.eta,
                            lambda_w_from_p(exp.decay_p));
}

// sqrt of Prod_j (1 + 1/(gamma_j (eta rho_j)^2)): ||F||_gamma <= base_norm * this
double weighted_norm_factor(const ProductWeights& weights, const CoefficientExpansion& exp,
                            double eta) {
    double prod = 1.0;
    for (std::size_t j = 0; j < weights.gamma.size(); ++j) {
        const double g = weights.gamma[j];
        if (!(g > 0.0))
            throw std::invalid_argument("weighted_norm_factor: zero weight");
        const double er = eta * exp.rho[j];
        prod *= 1.0 + 1.0 / (g * er * er);
    }
    return std::sqrt(prod);
}

void append_fit_if_possible(StudyTable& table, const std::string& name,
                            std::span<const double> x, std::span<const double> y) {
    std::vector<double> fx, fy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0) {
            fx.push_back(x[i]);
            fy.push_back(y[i]);
        }
    }
    if (fx.size() >= 3) table.fits.emplace_back(name, fit_rate(fx, fy));
}

} // namespace

FitResult fit_rate(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_rate: length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_rate: coordinates must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = lx[i] - mx, dy = ly[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_rate: abscissae must be distinct");
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    const double sse = std::max(syy - fit.slope * sxy, 0.0);
    fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    fit.slope_stderr = std::sqrt(sse / (static_cast<double>(n - 2) * sxx));
    return fit;
}

DerivedConstants derive_constants(double alpha_min, double alpha_max, double Lambda0,
                                  double Lambda1, double chi1, double chi2, double delta_min) {
    if (!(alpha_min - Lambda0 > 0.0))
        throw std::invalid_argument("derive_constants: need Lambda0 < alpha_min");
    if (!(alpha_max >= alpha_min))
        throw std::invalid_argument("derive_constants: alpha_max below alpha_min");
    if (!(chi1 > 0.0) || !(chi2 >= chi1))
        throw std::invalid_argument("derive_constants: reference eigenvalues out of order");
    if (!(delta_min > 0.0))
        throw std::invalid_argument("derive_constants: delta_min must be positive");
    if (Lambda1 < 0.0) throw std::invalid_argument("derive_constants: negative Lambda1");

    const double lower = alpha_min - Lambda0;
    const double upper = alpha_max + Lambda0;
    const double denom = 2.0 * (1.0 + 1.0 / delta_min);
    DerivedConstants c;
    c.kappa = 1.0 / denom;
    c.eta = Lambda1 > 0.0 ? lower / (denom * Lambda1) : kInf;
    c.gamma_max_bound = upper * chi2;
    c.K_lambda = 0.5 * c.gamma_max_bound + upper * chi1;
    c.K_omega = std::sqrt((c.gamma_max_bound + 2.0 * upper * chi1) /
                          (2.0 * (1.0 - c.kappa) * lower));
    c.C1 = (upper * chi1) * (upper * chi1) / std::sqrt(chi1) * upper / (lower * lower);
    return c;
}

ParametricSolver::ParametricSolver(CoefficientExpansion exp, Mesh mesh, double tol,
                                   int max_iter)
    : exp_(std::move(exp)),
      space_(make_fem_space(std::move(mesh), exp_)),
      tol_(tol),
      max_iter_(max_iter) {
    if (!(tol_ > 0.0)) throw std::invalid_argument("ParametricSolver: tol must be positive");
    if (max_iter_ < 1) throw std::invalid_argument("ParametricSolver: max_iter must be >= 1");
}

SpectralPair ParametricSolver::solve_pair(std::span<const double> y) const {
    const SymmetricSparseMatrix A = assemble_operator(space_, y);
    return two_smallest(A, space_.mass, tol_, max_iter_);
}

EigenPair ParametricSolver::solve_first(std::span<const double> y) const {
    const SymmetricSparseMatrix A = assemble_operator(space_, y);
    return smallest_only(A, space_.mass, tol_, max_iter_);
}

ConstantsReport constants_report(const ParametricSolver& solver, int gap_samples,
                                 std::uint64_t seed) {
    if (gap_samples < 1)
        throw std::invalid_argument("constants_report: gap_samples must be >= 1");
    ConstantsReport rep;
    rep.gap_samples = gap_samples;
    rep.seed = seed;
    rep.adm = validate_assumption(solver.expansion());
    if (!rep.adm.admissible)
        throw std::runtime_error(
            "constants_report: ellipticity margin violated: alpha_min = " +
            format_double(rep.adm.alpha_min) + ", Lambda0 = " + format_double(rep.adm.Lambda0));

    const DomainKind kind = solver.space().mesh.kind;
    rep.chi1 = laplace_eigen_reference(kind, 1);
    rep.chi2 = laplace_eigen_reference(kind, 2);
    const SpectralPair unit =
        two_smallest(solver.space().unit_stiffness, solver.space().mass, solver.tol());
    rep.chi1_h = unit.first.value;
    rep.chi2_h = unit.second.value;

    const SampledGaps gaps = sample_gaps(solver, gap_samples, seed);
    rep.gamma_min_emp = kInf;
    rep.delta_min_emp = kInf;
    rep.gamma_max_emp = -kInf;
    rep.delta_max_emp = -kInf;
    for (int m = 0; m < gap_samples; ++m) {
        const double gap = gaps.l2[static_cast<std::size_t>(m)] - gaps.l1[static_cast<std::size_t>(m)];
        const double rel = gap / gaps.l1[static_cast<std::size_t>(m)];
        rep.gamma_min_emp = std::min(rep.gamma_min_emp, gap);
        rep.gamma_max_emp = std::max(rep.gamma_max_emp, gap);
        rep.delta_min_emp = std::min(rep.delta_min_emp, rel);
        rep.delta_max_emp = std::max(rep.delta_max_emp, rel);
    }
    rep.c = derive_constants(rep.adm.alpha_min, rep.adm.alpha_max, rep.adm.Lambda0,
                             rep.adm.Lambda1, rep.chi1, rep.chi2, rep.delta_min_emp);
    return rep;
}

GapScanResult gap_scan(const ParametricSolver& solver, int M, std::uint64_t seed) {
    if (M < 1) throw std::invalid_argument("gap_scan: sample count must be >= 1");
    const AdmissibilityReport adm = validate_assumption(solver.expansion());
    if (!adm.admissible)
        throw std::runtime_error("gap_scan: ellipticity margin violated");
    const SpectralPair unit =
        two_smallest(solver.space().unit_stiffness, solver.space().mass, solver.tol());

    GapScanResult out;
    out.gamma_max_bound_h = (adm.alpha_max + adm.Lambda0) * unit.second.value;
    const SampledGaps gaps = sample_gaps(solver, M, seed);
    out.gamma_min = kInf;
    out.delta_min = kInf;
    out.gamma_max = -kInf;
    out.delta_max = -kInf;
    out.table.columns = {"sample", "lambda1", "lambda2", "gap", "relative_gap",
                         "near_degenerate"};
    out.table.rows.reserve(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m) {
        const double l1 = gaps.l1[static_cast<std::size_t>(m)];
        const double l2 = gaps.l2[static_cast<std::size_t>(m)];
        const double gap = l2 - l1;
        const double rel = gap / l1;
        out.gamma_min = std::min(out.gamma_min, gap);
        out.gamma_max = std::max(out.gamma_max, gap);
        out.delta_min = std::min(out.delta_min, rel);
        out.delta_max = std::max(out.delta_max, rel);
        out.table.rows.push_back({static_cast<double>(m), l1, l2, gap, rel,
                                  static_cast<double>(gaps.degenerate[static_cast<std::size_t>(m)])});
    }
    out.table.checks.emplace_back("gap_positive", out.gamma_min > 0.0);
    out.table.checks.emplace_back("relative_gap_positive", out.delta_min > 0.0);
    out.table.checks.emplace_back("gap_below_discrete_bound",
                                  out.gamma_max <= out.gamma_max_bound_h);
    return out;
}

StudyTable enclosure_study(const ParametricSolver& solver, int M, std::uint64_t seed) {
    if (M < 1) throw std::invalid_argument("enclosure_study: sample count must be >= 1");
    const AdmissibilityReport adm = validate_assumption(solver.expansion());
    if (!adm.admissible)
        throw std::runtime_error("enclosure_study: ellipticity margin violated");
    const SpectralPair unit =
        two_smallest(solver.space().unit_stiffness, solver.space().mass, solver.tol());
    const double lo1 = (adm.alpha_min - adm.Lambda0) * unit.first.value;
    const double up1 = (adm.alpha_max + adm.Lambda0) * unit.first.value;
    const double lo2 = (adm.alpha_min - adm.Lambda0) * unit.second.value;
    const double up2 = (adm.alpha_max + adm.Lambda0) * unit.second.value;

    const SampledGaps gaps = sample_gaps(solver, M, seed);
    StudyTable table;
    table.columns = {"sample", "lambda1", "lambda2", "lower1", "upper1", "lower2", "upper2"};
    table.rows.reserve(static_cast<std::size_t>(M));
    bool inside = true;
    for (int m = 0; m < M; ++m) {
        const double l1 = gaps.l1[static_cast<std::size_t>(m)];
        const double l2 = gaps.l2[static_cast<std::size_t>(m)];
        inside = inside && eigenvalue_bounds_check(l1, unit.first.value, adm) &&
                 eigenvalue_bounds_check(l2, unit.second.value, adm);
        table.rows.push_back({static_cast<double>(m), l1, l2, lo1, up1, lo2, up2});
    }
    table.checks.emplace_back("enclosure_holds", inside);
    return table;
}

std::vector<double> term_sup_norms(const CoefficientExpansion& exp) {
    const std::size_t count = exp.terms.size();
    std::vector<double> beta(count);
    switch (exp.family) {
    case Family::global_trig:
    case Family::disjoint_indicator:
        for (std::size_t j = 1; j <= count; ++j)
            beta[j - 1] = exp.scale * std::pow(static_cast<double>(j), -exp.theta);
        break;
    case Family::haar_overlap:
        for (std::size_t j = 1; j <= count; ++j) {
            const int level = std::bit_width(j); // floor(log2 j) + 1
            beta[j - 1] = exp.scale * std::pow(2.0, -exp.theta * level);
        }
        break;
    case Family::custom: {
        constexpr int kGridPoints = 10000;
        for (std::size_t j = 0; j < count; ++j) {
            double sup = 0.0;
            for (int i = 0; i <= kGridPoints; ++i) {
                const Point p{static_cast<double>(i) / kGridPoints, 0.5};
                sup = std::max(sup, std::abs(exp.terms[j](p)));
            }
            beta[j] = sup;
        }
        break;
    }
    }
    return beta;
}

StudyTable derivative_check(const ParametricSolver& solver, const ConstantsReport& report,
                            std::span<const MultiIndex> indices, double fd_step) {
    if (indices.empty()) throw std::invalid_argument("derivative_check: no multi-indices");
    if (!(fd_step > 0.0))
        throw std::invalid_argument("derivative_check: fd_step must be positive");
    const double step = std::min(fd_step, 0.5);
    if (step * step <= 100.0 * solver.tol())
        throw std::invalid_argument(
            "derivative_check: fd_step so small that eigenvalue tolerance dominates the stencil");
    const CoefficientExpansion& exp = solver.expansion();
    for (const MultiIndex& nu : indices) check_index(nu, exp.term_count());

    const double eta = report.c.eta;
    const std::vector<double> beta = term_sup_norms(exp);
    double beta_sum = 0.0;
    for (double b : beta) beta_sum += b;
    const double Lambda0_g = 0.5 * beta_sum;
    const bool global_ok = Lambda0_g < report.adm.alpha_min;
    double eta_g = 0.0, K_g = 0.0;
    if (global_ok) {
        eta_g = (report.adm.alpha_min - Lambda0_g) /
                (2.0 * (1.0 + 1.0 / report.delta_min_emp));
        K_g = (report.adm.alpha_max + Lambda0_g) * (0.5 * report.chi2 + report.chi1);
    }

    const double f0 = solver.lambda1(std::span<const double>{});
    auto f = [&solver](std::span<const double> y) { return solver.lambda1(y); };

    StudyTable table;
    table.columns = {"j1",       "j2",          "order",       "fd_coarse",
                     "fd_fine",  "observed",    "bound_local", "ratio_local",
                     "bound_global", "ratio_global"};
    table.rows.resize(indices.size());
    parallel_for(indices.size(), [&](std::size_t k) {
        const MultiIndex& nu = indices[k];
        const int order = nu.order();
        const double coarse = central_difference(f, nu, step, f0);
        const double fine = central_difference(f, nu, 0.5 * step, f0);
        const double observed = std::abs((4.0 * fine - coarse) / 3.0);

        double bound_local = report.c.K_lambda * nu.factorial();
        for (const auto& [j, n] : nu.entries)
            bound_local /= std::pow(eta * exp.rho[static_cast<std::size_t>(j) - 1],
                                    static_cast<double>(n));
        double bound_global = kInf;
        if (global_ok) {
            double total_fact = 1.0;
            for (int i = 2; i <= order; ++i) total_fact *= i;
            bound_global = K_g * total_fact;
            for (const auto& [j, n] : nu.entries)
                bound_global *=
                    std::pow(std::numbers::e * beta[static_cast<std::size_t>(j) - 1] / eta_g,
                             static_cast<double>(n));
        }
        auto ratio = [](double obs, double bnd) {
            if (std::isinf(bnd)) return 0.0;
            return bnd > 0.0 ? obs / bnd : kInf;
        };
        double j1 = 0.0, j2 = 0.0;
        if (nu.entries.size() == 1) {
            j1 = nu.entries[0].first;
            j2 = nu.entries[0].second == 2 ? j1 : 0.0;
        } else if (nu.entries.size() == 2) {
            j1 = nu.entries[0].first;
            j2 = nu.entries[1].first;
        }
        table.rows[k] = {j1,
                         j2,
                         static_cast<double>(order),
                         coarse,
                         fine,
                         observed,
                         bound_local,
                         ratio(observed, bound_local),
                         bound_global,
                         ratio(observed, bound_global)};
    });

    bool local_ok = true, global_all = true;
    for (const auto& row : table.rows) {
        local_ok = local_ok && row[7] <= 1.0;
        global_all = global_all && row[9] <= 1.0;
    }
    table.checks.emplace_back("within_local_bound", local_ok);
    table.checks.emplace_back("within_global_bound", global_all);
    return table;
}

std::vector<double> functional_grid(const FemSpace& space, FunctionalKind kind) {
    if (kind == FunctionalKind::none)
        throw std::invalid_argument("functional_grid: no functional selected");
    const Mesh& mesh = space.mesh;
    std::vector<double> g(static_cast<std::size_t>(mesh.interior_count()));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point& p = mesh.nodes[static_cast<std::size_t>(mesh.node_of_interior[i])];
        g[i] = kind == FunctionalKind::mean ? 1.0 : (p.x < 0.5 ? 1.0 : 0.0);
    }
    return g;
}

double functional_dual_norm_bound(const FemSpace& space, std::span<const double> g,
                                  double chi1) {
    if (!(chi1 > 0.0))
        throw std::invalid_argument("functional_dual_norm_bound: chi1 must be positive");
    if (g.size() != static_cast<std::size_t>(space.mesh.interior_count()))
        throw std::invalid_argument("functional_dual_norm_bound: grid size mismatch");
    const double q = space.mass.inner(g, g);
    return std::sqrt(std::max(q, 0.0) / chi1);
}

StudyTable truncation_study(const ParametricSolver& solver, const ConstantsReport& report,
                            std::span<const int> s_list, std::uint64_t N_ref, int R,
                            std::uint64_t seed, FunctionalKind kind) {
    if (s_list.empty()) throw std::invalid_argument("truncation_study: empty level list");
    for (std::size_t i = 0; i < s_list.size(); ++i) {
        if (s_list[i] < 1) throw std::invalid_argument("truncation_study: levels must be >= 1");
        if (i > 0 && s_list[i] <= s_list[i - 1])
            throw std::invalid_argument("truncation_study: levels must ascend");
    }
    if (R < 2) throw std::invalid_argument("truncation_study: need at least 2 shifts");
    const CoefficientExpansion& exp = solver.expansion();
    const int s_ref = 2 * s_list.back();
    if (s_ref > exp.term_count())
        throw std::invalid_argument(
            "truncation_study: reference level 2 max(s) exceeds the expansion size");

    const ProductWeights weights = study_weights(exp, report, s_ref);
    const LatticeRule rule = cbc_construct(s_ref, N_ref, weights);
    const IntegrandSetup integ = make_integrand(solver, report, kind);

    std::vector<std::vector<double>> shifts(static_cast<std::size_t>(R));
    for (int r = 0; r < R; ++r) {
        auto g = SplitMix64::stream(seed, static_cast<std::uint64_t>(r));
        shifts[static_cast<std::size_t>(r)].resize(static_cast<std::size_t>(s_ref));
        for (double& v : shifts[static_cast<std::size_t>(r)]) v = g.next_unit();
    }

    std::vector<int> levels(s_list.begin(), s_list.end());
    levels.push_back(s_ref);
    const std::size_t L = levels.size();
    const std::size_t N = rule.N;
    const std::size_t per_level = static_cast<std::size_t>(R) * N;
    std::vector<double> values(L * per_level);
    parallel_for(values.size(), [&](std::size_t idx) {
        const std::size_t l = idx / per_level;
        const std::size_t rem = idx % per_level;
        const std::size_t r = rem / N;
        const std::size_t i = rem % N;
        std::vector<double> pt(static_cast<std::size_t>(s_ref));
        lattice_point(rule, i + 1, shifts[r], pt);
        values[idx] =
            integ.F(std::span<const double>(pt).first(static_cast<std::size_t>(levels[l])));
    });

    const double* ref = values.data() + (L - 1) * per_level;
    const double p = exp.decay_p;

    StudyTable table;
    if (kind == FunctionalKind::none)
        table.columns = {"s", "observed", "bound", "bound_rho_tail", "bound_stechkin",
                         "std_error"};
    else
        table.columns = {"s", "observed", "bound", "std_error"};

    std::vector<double> xs, ys;
    bool within = true, monotone = true;
    double prev_obs = kInf, prev_se = 0.0;
    for (std::size_t l = 0; l + 1 < L; ++l) {
        const int s = levels[l];
        const double* lev = values.data() + l * per_level;
        std::vector<double> d(static_cast<std::size_t>(R));
        std::vector<double> diff(N);
        for (int r = 0; r < R; ++r) {
            for (std::size_t i = 0; i < N; ++i)
                diff[i] = lev[static_cast<std::size_t>(r) * N + i] -
                          ref[static_cast<std::size_t>(r) * N + i];
            d[static_cast<std::size_t>(r)] = anchored_mean(diff);
        }
        const double observed = std::abs(anchored_mean(d));
        const double se = mean_std_error(d);

        // squared Stechkin tail bound scaled by the derivative constant
        const TailBound tb = stechkin_tail(exp, p, s); // tb.bound = +inf at p = 1
        const double scale_const = kind == FunctionalKind::none
                                       ? report.c.K_lambda
                                       : integ.base_norm;
        const double bound_stechkin =
            scale_const * tb.bound * tb.bound / (4.0 * report.c.eta * report.c.eta);
        double bound = bound_stechkin;
        double bound_rho = kInf;
        if (kind == FunctionalKind::none) {
            bound_rho = 0.5 * report.c.C1 * report.adm.Lambda1 /
                        exp.rho[static_cast<std::size_t>(s)]; // rho_{s+1}
            bound = std::min(bound_rho, bound_stechkin);
        }

        if (kind == FunctionalKind::none)
            table.rows.push_back({static_cast<double>(s), observed, bound, bound_rho,
                                  bound_stechkin, se});
        else
            table.rows.push_back({static_cast<double>(s), observed, bound, se});

        within = within && (std::isinf(bound) || observed <= bound);
        if (l > 0) monotone = monotone && observed <= prev_obs + 2.0 * (se + prev_se);
        prev_obs = observed;
        prev_se = se;
        xs.push_back(static_cast<double>(s));
        ys.push_back(observed);
    }
    append_fit_if_possible(table, "truncation", xs, ys);
    table.checks.emplace_back("observed_within_bound", within);
    table.checks.emplace_back("decay_monotone_within_noise", monotone);
    return table;
}

StudyTable convergence_study(const ParametricSolver& solver, const ConstantsReport& report,
                             const ConvergenceOptions& opts, FunctionalKind kind) {
    if (opts.N_list.empty()) throw std::invalid_argument("convergence_study: empty N list");
    for (std::size_t i = 1; i < opts.N_list.size(); ++i)
        if (opts.N_list[i] <= opts.N_list[i - 1])
            throw std::invalid_argument("convergence_study: N list must ascend");
    if (opts.R < 2) throw std::invalid_argument("convergence_study: need at least 2 shifts");
    const CoefficientExpansion& exp = solver.expansion();
    if (opts.s < 1 || opts.s > exp.term_count())
        throw std::invalid_argument("convergence_study: dimension outside the expansion");

    const ProductWeights weights = study_weights(exp, report, opts.s);
    const IntegrandSetup integ = make_integrand(solver, report, kind);
    const double norm_bound =
        integ.base_norm * weighted_norm_factor(weights, exp, report.c.eta);

    std::vector<LatticeRule> rules;
    rules.reserve(opts.N_list.size());
    for (std::uint64_t N : opts.N_list) rules.push_back(cbc_construct(opts.s, N, weights));

    const double ref =
        qmc_estimate(integ.F, rules.back(), 2 * opts.R, opts.seed ^ kReferenceSeedTag).mean;

    // iid baseline, one independent stream per (N, batch)
    const std::size_t batches = opts.N_list.size() * static_cast<std::size_t>(opts.R);
    std::vector<double> mc_means(batches);
    parallel_for(batches, [&](std::size_t item) {
        const std::size_t i = item / static_cast<std::size_t>(opts.R);
        const std::uint64_t N = opts.N_list[i];
        auto g = SplitMix64::stream(opts.seed ^ kBaselineSeedTag, item);
        std::vector<double> y(static_cast<std::size_t>(opts.s));
        double acc = 0.0;
        for (std::uint64_t k = 0; k < N; ++k) {
            for (double& v : y) v = g.next_symmetric();
            acc += integ.F(y);
        }
        mc_means[item] = acc / static_cast<double>(N);
    });

    StudyTable table;
    table.columns = {"N", "qmc_rms", "mc_rms", "wce", "bound_totient", "bound_plain"};
    std::vector<double> xs, qmc_ys, mc_ys;
    bool wce_ok = true;
    for (std::size_t i = 0; i < opts.N_list.size(); ++i) {
        const std::uint64_t N = opts.N_list[i];
        const QmcResult est = qmc_estimate(integ.F, rules[i], opts.R, opts.seed);
        double qs = 0.0;
        for (double m : est.shift_means) {
            const double dref = m - ref;
            qs += dref * dref;
        }
        const double qmc_rms = std::sqrt(qs / static_cast<double>(opts.R));
        double ms = 0.0;
        for (int r = 0; r < opts.R; ++r) {
            const double dref =
                mc_means[i * static_cast<std::size_t>(opts.R) + static_cast<std::size_t>(r)] - ref;
            ms += dref * dref;
        }
        const double mc_rms = std::sqrt(ms / static_cast<double>(opts.R));
        const double wce = std::sqrt(std::max(rules[i].wce_sq, 0.0));
        const double bound_tot = theoretical_error_bound(weights, N, norm_bound, true);
        const double bound_plain = theoretical_error_bound(weights, N, norm_bound, false);
        wce_ok = wce_ok &&
                 wce <= theoretical_error_bound(weights, N, 1.0, true) * (1.0 + 1e-9);
        table.rows.push_back({static_cast<double>(N), qmc_rms, mc_rms, wce, bound_tot,
                              bound_plain});
        xs.push_back(static_cast<double>(N));
        qmc_ys.push_back(qmc_rms);
        mc_ys.push_back(mc_rms);
    }
    append_fit_if_possible(table, "qmc", xs, qmc_ys);
    append_fit_if_possible(table, "mc", xs, mc_ys);
    table.checks.emplace_back("wce_within_theory", wce_ok);
    table.checks.emplace_back("qmc_not_worse_at_largest_N",
                              qmc_ys.back() <= mc_ys.back());
    return table;
}

} // namespace evqmc
