// nilspec: batch frontend for the spectral invariants library.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nilspec/cli.hpp"

namespace {

void add_common(CLI::App* sub, nilspec::ExperimentConfig& cfg) {
    sub->add_option("--model", cfg.model, "torus:N, heisenberg:N or A*B")->capture_default_str();
    sub->add_option("--lattice", cfg.lattice, "generator scales, comma separated")->delimiter(',');
    sub->add_option("--c", cfg.c, "operator c R^ell: c")->capture_default_str();
    sub->add_option("--ell", cfg.ell, "operator c R^ell: ell")->capture_default_str();
    sub->add_option("--lambda-max", cfg.lambda_max, "spectral cutoff");
    sub->add_option("--tolerance", cfg.tolerance, "certificate tolerance");
    sub->add_option("-o,--output", cfg.output, "output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral invariants of compact nilmanifolds"};
    app.set_config("--config", "", "INI file; [section] names match subcommands, flags override file values");
    app.require_subcommand(1);
    nilspec::ExperimentConfig cfg;

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues with multiplicity as CSV");
    add_common(spectrum, cfg);

    auto* theta = app.add_subcommand("theta", "heat trace with certified tail as CSV");
    add_common(theta, cfg);
    theta->add_option("--t", cfg.t_values, "times, comma separated")->delimiter(',');

    auto* weyl = app.add_subcommand("weyl", "Weyl-law constant fit as JSON");
    add_common(weyl, cfg);
    weyl->add_option("--grid-points", cfg.grid_points, "dyadic grid points below lambda-max")->capture_default_str();
    weyl->add_option("--segment", cfg.segment, "a,b for counts over [a L, b L]")->delimiter(',');

    auto* zeta = app.add_subcommand("zeta", "spectral zeta values by the Mellin split as JSON");
    add_common(zeta, cfg);
    zeta->add_option("--s", cfg.s_values, "s values, e.g. 2,0,-1,0.5+1i")->delimiter(',');
    zeta->add_flag("--residue", cfg.residue, "also extrapolate the residue at Q/nu");

    auto* periodise = app.add_subcommand("periodise", "periodised kernel traces against epsilon as CSV");
    add_common(periodise, cfg);
    periodise->add_option("--epsilon", cfg.epsilons, "epsilon values, comma separated")->delimiter(',');
    periodise->add_option("--resolution", cfg.resolution, "fundamental domain grid resolution")->capture_default_str();
    periodise->add_option("--r-cut", cfg.r_cut, "lattice ball radius");
    periodise->add_option("--kernel-t", cfg.kernel_t, "Gaussian time for torus kernels")->capture_default_str();

    auto* constants = app.add_subcommand("constants", "cross-route constant report as JSON");
    add_common(constants, cfg);

    auto* crosscheck = app.add_subcommand("crosscheck", "product zeta identities with a circle factor as JSON");
    add_common(crosscheck, cfg);
    crosscheck->add_option("--s", cfg.s_values, "s values")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return nilspec::kExitValidation;
    }
    cfg.experiment = app.get_subcommands().front()->get_name();
    return nilspec::run(cfg, std::cout, std::cerr);
}
