#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crossarea/process.hpp"

namespace crossarea {

/// First two raw moments. `second`/`variance` are empty when the second moment
/// does not exist.
struct MomentPair {
    double first;
    std::optional<double> second;
    std::optional<double> variance;

    static MomentPair from_raw(double first, std::optional<double> second);
};

enum class CurveLabel { closed_form, empirical, gamma_fit };
const char* to_string(CurveLabel label);

struct LaplaceCurve {
    std::vector<double> lambdas;
    std::vector<double> values;
    CurveLabel label;
};

LaplaceCurve make_curve(std::span<const double> lambdas, const std::function<double(double)>& lt,
                        CurveLabel label = CurveLabel::closed_form);

// ---------------------------------------------------------------------------
// Brownian motion with drift μ (unit diffusion)
// ---------------------------------------------------------------------------

double bm_fpt_density(double t, const Barrier& barrier, double mu);
double bm_fpt_lt(double lambda, const Barrier& barrier, double mu);
/// Throws Error{domain} for μ <= 0 (moments infinite).
MomentPair bm_fpt_moments(const Barrier& barrier, double mu);

double bm_area_mean(const Barrier& barrier, double mu);

/// Coefficients of the quartic second-moment polynomial
/// E[A²] = a(x⁴-S⁴) + b(x³-S³) + c(x²-S²) + d(x-S).
struct AreaSecondCoefficients {
    double a, b, c, d;
};
AreaSecondCoefficients bm_area_second_coefficients(double level, double mu);

/// E[A_S(x)²]; std::nullopt when the polynomial value is negative or below
/// the squared mean (the second moment does not exist).
std::optional<double> bm_area_second(const Barrier& barrier, double mu);

/// 3^{2/3} Γ(2/3) Ai(2^{1/3} λ^{1/3} (S - x)): the bounded solution of
/// ½M'' = λ (S - x) M with M(S) = 1, i.e. the transform of ∫(S - X) dt for
/// driftless Brownian motion.
double bm_area_lt_driftless(double lambda, const Barrier& barrier);

/// P(min ≤ z) for the pre-crossing minimum, μ >= 0.
double bm_min_cdf(double z, const Barrier& barrier, double mu);
double bm_min_pdf(double z, const Barrier& barrier, double mu);

// ---------------------------------------------------------------------------
// Poisson process x + N_t with unit jumps
// ---------------------------------------------------------------------------

/// Number of jumps needed to reach S: S-x if integral (within 1e-9), else ⌊S-x⌋+1.
int poisson_jumps_needed(const Barrier& barrier);

struct PoissonFptLaw {
    int shape;    // Gamma shape k*
    double rate;  // θ
    MomentPair moments;
};
PoissonFptLaw poisson_fpt_law(const Barrier& barrier, double theta);

double poisson_area_lt(double lambda, const Barrier& barrier, double theta);
MomentPair poisson_area_moments(const Barrier& barrier, double theta);

// ---------------------------------------------------------------------------
// Ornstein-Uhlenbeck dX = -μX dt + σ dB
// ---------------------------------------------------------------------------

double ou_mean_fpt(const Barrier& barrier, double mu, double sigma);
double ou_min_cdf(double z, const Barrier& barrier, double mu, double sigma);
double ou_min_pdf(double z, const Barrier& barrier, double mu, double sigma);

struct TimeChange {
    double rho;
    double rho_prime;
};
/// ρ(t) = σ²(e^{2μt} - 1)/(2μ).
TimeChange ou_time_change(double t, double mu, double sigma);
/// Density of the first hitting of the moving boundary α e^{-μt} from x < α.
double ou_moving_boundary_fpt_density(double t, double x, double alpha, double mu, double sigma);

// ---------------------------------------------------------------------------
// Identities
// ---------------------------------------------------------------------------

/// Mean area via A_S(x) = S·τ̃(S-x) - Ã(S-x), with τ̃, Ã the first-passage time
/// and area below zero of y - μt + B_t.
double area_via_reflection(const Barrier& barrier, double mu);

struct RandomStartMoments {
    double tau_mean;
    double tau_second;
    double area_mean;
};

/// BM with drift μ started from a random point η with density g on
/// (lower, S). `lower` may be -∞.
RandomStartMoments random_start_moments(const std::function<double(double)>& density, double level,
                                        double mu, double lower);

}  // namespace crossarea
