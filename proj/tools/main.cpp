#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "crossarea/commands.hpp"

int main(int argc, char** argv) {
    using namespace crossarea;

    CLI::App app{"First-crossing time, area and minimum of jump-diffusions"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key = value file supplying any flag (a run manifest works)");
    app.allow_config_extras(true);

    CommandOptions o;
    std::string out_dir;
    double t_max = 0.0, z = 0.0, h = 0.0, x_min = 0.0;

    app.add_option("--preset", o.preset, "Process preset, e.g. bm:mu=1, ou:mu=1,sigma=1, poisson:theta=2");
    app.add_option("--quantity", o.quantity, "Quantity (closed-form) or problem (solve)");
    app.add_option("--figure", o.figure, "Figure number (1 or 2)");
    app.add_option("--S", o.level, "Barrier level S")->capture_default_str();
    app.add_option("--x", o.start, "Starting point x < S")->capture_default_str();
    app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
    auto* out_opt = app.add_option("--out-dir", out_dir, "Directory for CSV outputs and manifests");
    app.add_option("--dt", o.dt, "Time step")->capture_default_str();
    app.add_option("--paths", o.paths, "Number of simulated paths")->capture_default_str();
    auto* tmax_opt = app.add_option("--t-max", t_max, "Censoring horizon (default: 50 x closed-form mean)");
    app.add_option("--workers", o.workers, "Worker threads, 0 = hardware concurrency")->capture_default_str();
    app.add_option("--bridge", o.bridge, "Brownian-bridge crossing correction")->capture_default_str();
    app.add_option("--lambda", o.lambdas, "Laplace variable(s)")->delimiter(',');
    app.add_option("--n", o.n, "Moment order for fpt-moment / area-moment")->capture_default_str();
    auto* z_opt = app.add_option("--z", z, "Minimum level z");
    auto* h_opt = app.add_option("--h", h, "Grid spacing");
    auto* xmin_opt = app.add_option("--x-min", x_min, "Left end of the solver grid");

    std::string pos_quantity, pos_preset, pos_figure;

    auto* closed = app.add_subcommand("closed-form", "Evaluate a closed-form quantity");
    closed->add_option("quantity", pos_quantity,
                       "mean-fpt second-fpt var-fpt fpt-lt fpt-law mean-area second-area var-area area-lt "
                       "min-cdf min-pdf");
    closed->add_option("preset", pos_preset, "Process preset");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimation");
    simulate->add_option("preset", pos_preset, "Process preset");

    auto* solve = app.add_subcommand("solve", "Numerical solution of the boundary value problems");
    solve->add_option("problem", pos_quantity,
                      "fpt-lt area-lt mean-fpt second-fpt mean-area second-area fpt-moment area-moment min-cdf");
    solve->add_option("preset", pos_preset, "Process preset");

    auto* figures = app.add_subcommand("figures", "Curve bundles for the area density and transform figures");
    figures->add_option("figure", pos_figure, "1 or 2");

    auto* triangulate = app.add_subcommand("triangulate", "Compare closed-form, Monte Carlo and solver routes");
    triangulate->add_option("preset", pos_preset, "Process preset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    if (!pos_quantity.empty()) o.quantity = pos_quantity;
    if (!pos_preset.empty()) o.preset = pos_preset;
    if (!pos_figure.empty()) {
        try {
            o.figure = std::stoi(pos_figure);
        } catch (const std::exception&) {
            std::cerr << "error: figure must be 1 or 2\n";
            return exit_usage;
        }
    }
    if (*out_opt) o.out_dir = out_dir;
    if (*tmax_opt) o.t_max = t_max;
    if (*z_opt) o.z = z;
    if (*h_opt) o.h = h;
    if (*xmin_opt) o.x_min = x_min;

    const std::string command = app.get_subcommands().front()->get_name();
    if (command != "figures" && o.preset.empty()) {
        std::cerr << "error: a preset is required\n";
        return exit_usage;
    }
    if ((command == "closed-form" || command == "solve") && o.quantity.empty()) {
        std::cerr << "error: a quantity or problem is required\n";
        return exit_usage;
    }

    const CommandResult result = run_command(command, o);
    if (!result.table.rows().empty()) std::cout << result.table.str();
    const char* prefix = result.exit_code == exit_usage || result.exit_code == exit_solver ? "error: " : "warning: ";
    for (const auto& w : result.warnings) std::cerr << prefix << w << "\n";
    return result.exit_code;
}
