// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <exception>
#include <filesystem>
#include <memory>
#include <string>

#include "CLI11.hpp"

#include "evqmc/cli.hpp"

namespace {

const char* describe(const std::string& name) {
    if (name == "constants") return "admissibility numbers and derived constants";
    if (name == "enclosure") return "sampled eigenvalues against the two-sided enclosure";
    if (name == "gap-scan") return "spectral gap scan over random parameter draws";
    if (name == "derivative-check")
        return "finite differences against the derivative bounds";
    if (name == "truncation") return "anchored dimension truncation errors and bounds";
    if (name == "convergence") return "shift-RMS lattice errors against an iid baseline";
    if (name == "functional") return "lattice convergence for an eigenfunction functional";
    return "construct a lattice generating vector (writes cbc.vec)";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two smallest eigenpairs of an affine-parametric diffusion operator:\n"
                 "sampled bounds, derivative checks and lattice-rule error studies"};
    app.require_subcommand(1);

    int rc = 0;
    for (const std::string& name : evqmc::subcommand_names()) {
        auto* sub = app.add_subcommand(name, describe(name));
        auto config = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>(".");
        sub->add_option("-c,--config", *config, "run configuration file")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("-o,--out", *out, "directory for csv/manifest output");
        sub->callback([&rc, name, config, out] {
            std::filesystem::create_directories(*out);
            rc = evqmc::run_subcommand(name, *config, *out);
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return rc;
}
