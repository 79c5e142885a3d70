#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crossarea/csv.hpp"
#include "crossarea/mc.hpp"

namespace crossarea {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_quality = 2, exit_solver = 3 };

struct CommandOptions {
    std::string quantity;  // closed-form quantity or solve problem
    std::string preset;
    int figure = 1;
    double level = 2.0;  // --S
    double start = 1.0;  // --x
    std::uint64_t seed = 1;
    std::optional<std::filesystem::path> out_dir;
    double dt = 1e-3;
    std::size_t paths = 10000;
    std::optional<double> t_max;
    unsigned workers = 0;
    bool bridge = true;
    std::vector<double> lambdas;
    int n = 1;
    std::optional<double> z;
    std::optional<double> h;
    std::optional<double> x_min;
};

struct CommandResult {
    int exit_code = exit_ok;
    csv::Table table{{"status"}};  // printed to stdout
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
};

CommandResult cmd_closed_form(const CommandOptions& opts);
CommandResult cmd_simulate(const CommandOptions& opts);
CommandResult cmd_solve(const CommandOptions& opts);
CommandResult cmd_figures(const CommandOptions& opts);
CommandResult cmd_triangulate(const CommandOptions& opts);

/// Dispatch by command name; library errors become exit codes 1 or 3 with the
/// message in `warnings`.
CommandResult run_command(const std::string& command, const CommandOptions& opts);

/// `key = value` lines readable back through --config.
std::string render_manifest(const std::string& command, const CommandOptions& opts,
                            double wall_seconds);

// Data behind the figure bundles.

struct Figure1Series {
    double mu;
    Histogram histogram;
    double peak() const;
};

/// Area histograms for BM with drift μ ∈ {1, 1.2, 1.5, 2, 3}, S = 2, x = 1.
std::vector<Figure1Series> figure1_data(const MCConfig& cfg, std::size_t bins = 60, double hi = 6.0,
                                        unsigned workers = 0);

struct Figure2Data {
    LaplaceCurve empirical;
    LaplaceCurve gamma;
    double area_mean;
    double area_variance;
};

/// Empirical area transform for μ = 1.5, S = 2, x = 1 against the Gamma law
/// with the same sample mean and variance.
Figure2Data figure2_data(const MCConfig& cfg, const std::vector<double>& lambdas, unsigned workers = 0);

/// 0, 0.25, ..., 10.
std::vector<double> figure2_lambda_grid();

}  // namespace crossarea
