// SPDX-License-Identifier: Apache-2.0
#include "evqmc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "evqmc/config.hpp"
#include "evqmc/csv.hpp"
#include "evqmc/harness.hpp"
#include "evqmc/numformat.hpp"

namespace evqmc {

namespace {

// sample counts are part of the reproducibility contract, not configuration
constexpr int kConstantsSamples = 256;
constexpr int kEnclosureSamples = 100;
constexpr int kGapSamples = 1000;

ParametricSolver make_solver(const RunConfig& cfg) {
    CoefficientExpansion exp =
        make_expansion(cfg.family, cfg.s_max, cfg.theta, cfg.scale, cfg.p);
    Mesh mesh = build_mesh(cfg.domain, cfg.h);
    return ParametricSolver(std::move(exp), std::move(mesh), cfg.tol, cfg.max_iter);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cli: cannot open " + path);
    os << content;
    os.flush();
    if (!os) throw std::runtime_error("cli: write failed for " + path);
}

using Scalars = std::vector<std::pair<std::string, std::string>>;

Scalars report_scalars(const ConstantsReport& rep) {
    auto f = [](double v) { return format_double(v); };
    return {{"alpha_min", f(rep.adm.alpha_min)},
            {"alpha_max", f(rep.adm.alpha_max)},
            {"Lambda0", f(rep.adm.Lambda0)},
            {"Lambda1", f(rep.adm.Lambda1)},
            {"margin", f(rep.adm.margin)},
            {"chi1", f(rep.chi1)},
            {"chi2", f(rep.chi2)},
            {"chi1_h", f(rep.chi1_h)},
            {"chi2_h", f(rep.chi2_h)},
            {"gamma_min_emp", f(rep.gamma_min_emp)},
            {"gamma_max_emp", f(rep.gamma_max_emp)},
            {"delta_min_emp", f(rep.delta_min_emp)},
            {"delta_max_emp", f(rep.delta_max_emp)},
            {"eta", f(rep.c.eta)},
            {"kappa", f(rep.c.kappa)},
            {"gamma_max_bound", f(rep.c.gamma_max_bound)},
            {"K_lambda", f(rep.c.K_lambda)},
            {"K_omega", f(rep.c.K_omega)},
            {"C1", f(rep.c.C1)}};
}

std::vector<MultiIndex> default_indices(int term_count) {
    std::vector<MultiIndex> idx;
    idx.push_back(MultiIndex::zero());
    const int j1 = std::min(8, term_count);
    for (int j = 1; j <= j1; ++j) idx.push_back(MultiIndex::unit(j));
    const int j2 = std::min(4, term_count);
    for (int i = 1; i <= j2; ++i)
        for (int j = i; j <= j2; ++j) idx.push_back(MultiIndex::second(i, j));
    return idx;
}

int max_of(const std::vector<int>& v) { return *std::max_element(v.begin(), v.end()); }
std::uint64_t max_of(const std::vector<std::uint64_t>& v) {
    return *std::max_element(v.begin(), v.end());
}

} // namespace

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names = {"constants",   "enclosure",
                                                   "gap-scan",    "derivative-check",
                                                   "truncation",  "convergence",
                                                   "functional",  "cbc"};
    return names;
}

int run_subcommand(const std::string& name, const std::string& config_path,
                   const std::string& out_dir) {
    const auto& known = subcommand_names();
    if (std::find(known.begin(), known.end(), name) == known.end())
        throw std::invalid_argument("cli: unknown subcommand '" + name + "'");

    const RunConfig cfg = load_config(config_path);
    const std::string cfg_text = serialize_config(cfg);
    const ParametricSolver solver = make_solver(cfg);

    StudyTable table;
    Scalars scalars;
    std::string extra_file, extra_content;

    if (name == "constants") {
        const ConstantsReport rep = constants_report(solver, kConstantsSamples, cfg.seed);
        scalars = report_scalars(rep);
        // one row per constant: value plus how it was obtained
        const std::vector<std::tuple<std::string, double, std::string>> entries = {
            {"alpha_min", rep.adm.alpha_min, "input"},
            {"alpha_max", rep.adm.alpha_max, "input"},
            {"Lambda0", rep.adm.Lambda0, "rigorous"},
            {"Lambda1", rep.adm.Lambda1, "rigorous"},
            {"margin", rep.adm.margin, "rigorous"},
            {"chi1", rep.chi1, "rigorous"},
            {"chi2", rep.chi2, "rigorous"},
            {"chi1_h", rep.chi1_h, "rigorous"},
            {"chi2_h", rep.chi2_h, "rigorous"},
            {"gamma_max_bound", rep.c.gamma_max_bound, "rigorous"},
            {"gamma_min", rep.gamma_min_emp, "empirical"},
            {"gamma_max", rep.gamma_max_emp, "empirical"},
            {"delta_min", rep.delta_min_emp, "empirical"},
            {"delta_max", rep.delta_max_emp, "empirical"},
            {"eta", rep.c.eta, "derived"},
            {"kappa", rep.c.kappa, "derived"},
            {"K_lambda", rep.c.K_lambda, "derived"},
            {"K_omega", rep.c.K_omega, "derived"},
            {"C1", rep.c.C1, "derived"}};
        std::ostringstream csv;
        csv << "name,value,kind\n";
        for (const auto& [n, v, kind] : entries)
            csv << csv_field(n) << ',' << format_double(v) << ',' << kind << '\n';
        extra_file = out_dir + "/constants.csv";
        extra_content = csv.str();
        table.checks.emplace_back("admissible", rep.adm.admissible);
        table.checks.emplace_back("gap_positive", rep.gamma_min_emp > 0.0);
    } else if (name == "enclosure") {
        table = enclosure_study(solver, kEnclosureSamples, cfg.seed);
    } else if (name == "gap-scan") {
        const GapScanResult scan = gap_scan(solver, kGapSamples, cfg.seed);
        table = std::move(scan.table);
        auto f = [](double v) { return format_double(v); };
        scalars = {{"gamma_min", f(scan.gamma_min)},
                   {"gamma_max", f(scan.gamma_max)},
                   {"delta_min", f(scan.delta_min)},
                   {"delta_max", f(scan.delta_max)},
                   {"gamma_max_bound_h", f(scan.gamma_max_bound_h)}};
    } else if (name == "derivative-check") {
        const ConstantsReport rep = constants_report(solver, kConstantsSamples, cfg.seed);
        scalars = report_scalars(rep);
        const std::vector<MultiIndex> idx = default_indices(solver.expansion().term_count());
        table = derivative_check(solver, rep, idx, cfg.fd_step);
    } else if (name == "truncation") {
        const ConstantsReport rep = constants_report(solver, kConstantsSamples, cfg.seed);
        scalars = report_scalars(rep);
        table = truncation_study(solver, rep, cfg.s_list, max_of(cfg.N_list), cfg.R,
                                 cfg.seed, FunctionalKind::none);
    } else if (name == "convergence") {
        const ConstantsReport rep = constants_report(solver, kConstantsSamples, cfg.seed);
        scalars = report_scalars(rep);
        ConvergenceOptions opts;
        opts.s = max_of(cfg.s_list);
        opts.N_list = cfg.N_list;
        opts.R = cfg.R;
        opts.seed = cfg.seed;
        table = convergence_study(solver, rep, opts, FunctionalKind::none);
    } else if (name == "functional") {
        const ConstantsReport rep = constants_report(solver, kConstantsSamples, cfg.seed);
        scalars = report_scalars(rep);
        const std::vector<double> g = functional_grid(solver.space(), cfg.functional);
        scalars.emplace_back("functional_norm_bound",
                             format_double(functional_dual_norm_bound(solver.space(), g,
                                                                      rep.chi1)));
        ConvergenceOptions opts;
        opts.s = max_of(cfg.s_list);
        opts.N_list = cfg.N_list;
        opts.R = cfg.R;
        opts.seed = cfg.seed;
        table = convergence_study(solver, rep, opts, cfg.functional);
    } else { // cbc
        const ConstantsReport rep = constants_report(solver, kConstantsSamples, cfg.seed);
        const int s = max_of(cfg.s_list);
        const std::uint64_t N = max_of(cfg.N_list);
        const ProductWeights weights = weights_from_rho(
            std::span<const double>(solver.expansion().rho).first(static_cast<std::size_t>(s)),
            rep.c.eta, lambda_w_from_p(solver.expansion().decay_p));
        const LatticeRule rule = cbc_construct(s, N, weights);
        std::ostringstream vec;
        save_rule(vec, rule);
        extra_file = out_dir + "/cbc.vec";
        extra_content = vec.str();
        auto f = [](double v) { return format_double(v); };
        const double wce = std::sqrt(std::max(rule.wce_sq, 0.0));
        const double theory = theoretical_error_bound(weights, N, 1.0, true);
        scalars = {{"s", std::to_string(s)},
                   {"N", std::to_string(N)},
                   {"wce", f(wce)},
                   {"wce_theory", f(theory)}};
        table.checks.emplace_back("wce_within_theory", wce <= theory * (1.0 + 1e-9));
    }

    if (!table.columns.empty()) {
        std::ostringstream csv;
        write_csv(csv, table);
        write_file(out_dir + "/" + name + ".csv", csv.str());
    }
    std::ostringstream man;
    write_manifest(man, name, cfg_text, scalars, table);
    write_file(out_dir + "/" + name + ".manifest", man.str());
    if (!extra_file.empty()) write_file(extra_file, extra_content);

    return table.all_checks_pass() ? 0 : 2;
}

} // namespace evqmc
