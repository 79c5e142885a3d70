#pragma once

namespace crossarea {

/// Airy function Ai on [0, ∞). Maclaurin series (extended precision) up to
/// z = 6, asymptotic expansion beyond.
double airy_ai(double z);
double airy_ai_prime(double z);

// Individual branches, exposed so the seam at z = 6 can be tested.
double airy_ai_maclaurin(double z);
double airy_ai_asymptotic(double z);

inline constexpr double kAirySwitchover = 6.0;

struct SeriesEval {
    double value;
    int terms_used;
    double truncation_bound;  // magnitude of the first omitted term
};

/// φ₁(z) = ∫₀^z e^{t²} dt, by its power series. |z| <= 10.
SeriesEval phi1(double z);
/// ψ₁(z) = 2 ∫₀^z e^{u²} ∫₀^u e^{-v²} dv du, by its power series. |z| <= 10.
SeriesEval psi1(double z);

/// Standard normal distribution function.
double normal_cdf(double x);

/// Laplace transform at λ of the Gamma law with the given mean and variance.
double gamma_lt(double mean, double variance, double lambda);

}  // namespace crossarea
