#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crossarea/process.hpp"

namespace crossarea {

/// Uniform grid on [x_min, x_max]; the last node is x_max exactly.
struct Grid1D {
    double x_min;
    double x_max;
    std::size_t n_nodes;

    Grid1D(double x_min, double x_max, std::size_t n_nodes);
    /// Spacing h; x_min is moved down (never up) so that h divides the width.
    static Grid1D with_spacing(double x_min, double x_max, double h);

    double h() const { return (x_max - x_min) / static_cast<double>(n_nodes - 1); }
    double node(std::size_t i) const;
    std::vector<double> nodes() const;
    /// Index of the node nearest x.
    std::size_t nearest(double x) const;
};

/// x_min = S - max(30, 10/μ_eff), clipped to the state interval. μ_eff is |μ|
/// for BM, μ for OU, β+θ for Lévy, θ for Poisson and 1 otherwise.
double default_x_min(const ProcessSpec& spec, double level);
Grid1D default_grid(const ProcessSpec& spec, double level, double h);

enum class LeftBC { dirichlet_zero, polynomial_match, natural };
const char* to_string(LeftBC kind);

struct BVPSolution {
    Grid1D grid;
    std::vector<double> values;
    double residual_norm;
    LeftBC left_bc_kind;
    std::vector<std::string> flags;

    /// Cubic Lagrange interpolation on the four surrounding nodes.
    double value_at(double x) const;
    bool has_flag(const std::string& flag) const;
};

/// Weight U in the transform of ∫U(X)dt. Polynomial weights carry their
/// coefficients (ascending powers), which the polynomial-match condition needs.
struct Weight {
    std::function<double(double)> fn;
    std::optional<std::vector<double>> poly;

    static Weight one() { return polynomial({1.0}); }
    static Weight identity() { return polynomial({0.0, 1.0}); }
    static Weight polynomial(std::vector<double> coeffs);
    static Weight custom(std::function<double(double)> fn);

    double operator()(double x) const { return fn(x); }
};

/// ½σ²M'' + bM' = λUM on the grid, M(S) = 1, M(x_min) = 0.
BVPSolution solve_lt_bvp(const ProcessSpec& spec, const Weight& U, double lambda, const Grid1D& grid);

/// ½σ²T'' + bT' = -nU·T_{n-1}, T(S) = 0. The left condition defaults to
/// polynomial_match for BM presets and natural otherwise.
BVPSolution solve_moment_bvp(const ProcessSpec& spec, const Weight& U, int n, const Grid1D& grid,
                             const BVPSolution* prev = nullptr,
                             std::optional<LeftBC> left = std::nullopt);

/// Lw = 0 on [z, S], w(z) = 1, w(S) = 0: the CDF of the pre-crossing minimum at z.
BVPSolution solve_min_bvp(const ProcessSpec& spec, double z, double level, const Grid1D& grid);

enum class LevyProblem { fpt_lt, area_lt, mean_fpt, mean_area };
const char* to_string(LevyProblem problem);
LevyProblem parse_levy_problem(const std::string& text);

/// ½s f'' + βf' + θ[f(x+1) - f(x)] = λUf (Laplace problems, outer value 1) or
/// = -U (mean problems, outer value 0), with s the diffusion variance. The
/// grid spacing must be 1/m for an integer m.
BVPSolution solve_pdde_levy(double beta, double theta, double lambda, LevyProblem problem,
                            const Grid1D& grid, double diffusion_variance = 1.0);

struct TruncationCheck {
    double value;
    double value_extended;
    double delta;
    bool passed;
};

/// Re-solves on a grid with x_min moved down by `extension` and compares the
/// values at x.
TruncationCheck truncation_check(const std::function<BVPSolution(const Grid1D&)>& solve,
                                 const Grid1D& grid, double x, double extension = 30.0,
                                 double tolerance = 1e-7);

struct RefinementLevel {
    double h;
    double value;
    double error;                 // vs exact, or the difference to the next finer level
    std::optional<double> order;  // between this level and the next finer one
};

struct RefinementStudy {
    std::vector<RefinementLevel> levels;
    std::optional<double> observed_order;  // empty when flagged
    bool monotone;
};

/// `value_at_h(h)` solves at spacing h. With an exact value the errors are
/// absolute errors; without one, Richardson differences of successive levels.
RefinementStudy grid_refine_study(const std::function<double(double)>& value_at_h,
                                  const std::vector<double>& hs,
                                  std::optional<double> exact = std::nullopt);

}  // namespace crossarea
