#include "crossarea/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "crossarea/error.hpp"

namespace crossarea {

namespace {

// Ai(0) and -Ai'(0).
const long double kAi0 = 1.0L / (std::pow(3.0L, 2.0L / 3.0L) * std::tgamma(2.0L / 3.0L));
const long double kAiP0 = 1.0L / (std::pow(3.0L, 1.0L / 3.0L) * std::tgamma(1.0L / 3.0L));

constexpr int kSeriesCap = 500;

void require_nonnegative(double z) {
    if (!(z >= 0.0)) fail(ErrorCode::invalid_argument, "Airy function requested at a negative argument");
}

}  // namespace

double airy_ai_maclaurin(double z) {
    require_nonnegative(z);
    const long double x = z;
    const long double x3 = x * x * x;
    long double f = 1.0L, g = x;
    long double tf = 1.0L, tg = x;
    for (int k = 1; k < 200; ++k) {
        tf *= x3 / ((3.0L * k - 1.0L) * (3.0L * k));
        tg *= x3 / ((3.0L * k) * (3.0L * k + 1.0L));
        f += tf;
        g += tg;
        if (tf < 1e-22L * f && tg < 1e-22L * (g + 1e-300L)) break;
    }
    return static_cast<double>(kAi0 * f - kAiP0 * g);
}

double airy_ai_asymptotic(double z) {
    require_nonnegative(z);
    const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
    double sum = 1.0;
    double u = 1.0;
    double term = 1.0;
    for (int k = 1; k < 100; ++k) {
        u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k);
        const double next = u / std::pow(zeta, k);
        if (next >= std::abs(term) || next < 1e-17) break;  // optimal truncation
        term = (k % 2 ? -next : next);
        sum += term;
    }
    return std::exp(-zeta) / (2.0 * std::sqrt(std::numbers::pi) * std::pow(z, 0.25)) * sum;
}

double airy_ai(double z) {
    require_nonnegative(z);
    return z <= kAirySwitchover ? airy_ai_maclaurin(z) : airy_ai_asymptotic(z);
}

double airy_ai_prime(double z) {
    require_nonnegative(z);
    if (z <= kAirySwitchover) {
        const long double x = z;
        const long double x3 = x * x * x;
        // f'(z) = z²/2 + ..., g'(z) = 1 + ...
        long double tf = 0.5L * x * x, tg = 1.0L;
        long double fp = tf, gp = tg;
        for (int k = 1; k < 200; ++k) {
            tf *= x3 / ((3.0L * k) * (3.0L * k + 2.0L));
            tg *= x3 / ((3.0L * k - 2.0L) * (3.0L * k));
            fp += tf;
            gp += tg;
            if (tf <= 1e-22L * (fp + 1e-300L) && tg < 1e-22L * gp) break;
        }
        return static_cast<double>(kAi0 * fp - kAiP0 * gp);
    }
    const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
    double sum = 1.0;
    double u = 1.0;
    double term = 1.0;
    for (int k = 1; k < 100; ++k) {
        u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k);
        const double v = -(6.0 * k + 1.0) / (6.0 * k - 1.0) * u;
        const double next = std::abs(v) / std::pow(zeta, k);
        if (next >= std::abs(term) || next < 1e-17) break;
        term = (k % 2 ? -v : v) / std::pow(zeta, k);
        sum += term;
    }
    return -std::pow(z, 0.25) * std::exp(-zeta) / (2.0 * std::sqrt(std::numbers::pi)) * sum;
}

namespace {

template <typename NextTerm>
SeriesEval sum_series(double first, NextTerm next, const char* name) {
    double partial = 0.0;
    double term = first;
    for (int k = 0; k < kSeriesCap; ++k) {
        if (std::abs(term) < 1e-14 * std::max(1.0, std::abs(partial)) && k > 0) {
            return {partial, k, std::abs(term)};
        }
        partial += term;
        term = next(k + 1, term);
    }
    std::ostringstream os;
    os << name << ": series did not converge within " << kSeriesCap << " terms";
    fail(ErrorCode::not_converged, os.str());
}

void require_series_range(double z) {
    if (!(std::abs(z) <= 10.0)) {
        fail(ErrorCode::invalid_argument, "series argument outside |z| <= 10");
    }
}

}  // namespace

SeriesEval phi1(double z) {
    require_series_range(z);
    if (z == 0.0) return {0.0, 1, 0.0};
    // term_k = z^{2k+1} / ((2k+1) k!)
    const double z2 = z * z;
    return sum_series(
        z,
        [z2](int k, double prev) {
            return prev * z2 * (2.0 * k - 1.0) / (static_cast<double>(k) * (2.0 * k + 1.0));
        },
        "phi1");
}

SeriesEval psi1(double z) {
    require_series_range(z);
    if (z == 0.0) return {0.0, 1, 0.0};
    // term_k = 2^k z^{2k+2} / ((k+1) (2k+1)!!)
    const double z2 = z * z;
    return sum_series(
        z2,
        [z2](int k, double prev) {
            return prev * 2.0 * z2 * static_cast<double>(k) /
                   ((2.0 * k + 1.0) * static_cast<double>(k + 1));
        },
        "psi1");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double gamma_lt(double mean, double variance, double lambda) {
    if (!(mean > 0.0) || !(variance > 0.0)) {
        fail(ErrorCode::invalid_argument, "gamma_lt needs positive mean and variance");
    }
    if (!(lambda >= 0.0)) fail(ErrorCode::invalid_argument, "gamma_lt needs lambda >= 0");
    return std::pow(1.0 + lambda * variance / mean, -mean * mean / variance);
}

}  // namespace crossarea
