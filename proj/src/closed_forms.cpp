#include "crossarea/closed_forms.hpp"

#include <cmath>
#include <numbers>

#include "crossarea/error.hpp"
#include "crossarea/quadrature.hpp"
#include "crossarea/special_functions.hpp"

namespace crossarea {

MomentPair MomentPair::from_raw(double first, std::optional<double> second) {
    MomentPair m{first, second, std::nullopt};
    if (second) m.variance = *second - first * first;
    return m;
}

const char* to_string(CurveLabel label) {
    switch (label) {
        case CurveLabel::closed_form: return "closed-form";
        case CurveLabel::empirical: return "empirical";
        case CurveLabel::gamma_fit: return "gamma-fit";
    }
    return "unknown";
}

LaplaceCurve make_curve(std::span<const double> lambdas, const std::function<double(double)>& lt,
                        CurveLabel label) {
    LaplaceCurve curve{{lambdas.begin(), lambdas.end()}, {}, label};
    curve.values.reserve(lambdas.size());
    for (double lambda : lambdas) curve.values.push_back(lt(lambda));
    return curve;
}

namespace {

void require_positive_drift(double mu, const char* what) {
    if (mu == 0.0) fail(ErrorCode::domain, std::string(what) + ": mean is infinite for mu = 0");
    if (!(mu > 0.0)) {
        fail(ErrorCode::domain, std::string(what) + ": undefined for mu < 0 (crossing is not certain)");
    }
}

void require_lambda(double lambda) {
    if (!(lambda >= 0.0)) fail(ErrorCode::invalid_argument, "Laplace variable must be >= 0");
}

}  // namespace

double bm_fpt_density(double t, const Barrier& barrier, double mu) {
    if (!(t > 0.0)) fail(ErrorCode::invalid_argument, "first-passage density needs t > 0");
    const double gap = barrier.gap();
    const double dev = gap - mu * t;
    return gap / (std::sqrt(2.0 * std::numbers::pi) * t * std::sqrt(t)) * std::exp(-dev * dev / (2.0 * t));
}

double bm_fpt_lt(double lambda, const Barrier& barrier, double mu) {
    require_lambda(lambda);
    return std::exp((mu - std::sqrt(mu * mu + 2.0 * lambda)) * barrier.gap());
}

MomentPair bm_fpt_moments(const Barrier& barrier, double mu) {
    require_positive_drift(mu, "mean first-crossing time");
    const double gap = barrier.gap();
    return MomentPair::from_raw(gap / mu, gap / (mu * mu * mu) + gap * gap / (mu * mu));
}

double bm_area_mean(const Barrier& barrier, double mu) {
    require_positive_drift(mu, "mean first-crossing area");
    const double S = barrier.level, x = barrier.start;
    return (S - x) / (2.0 * mu) * (S + x - 1.0 / mu);
}

AreaSecondCoefficients bm_area_second_coefficients(double S, double mu) {
    require_positive_drift(mu, "second moment of the first-crossing area");
    const double mu2 = mu * mu, mu3 = mu2 * mu, mu4 = mu3 * mu;
    // Polynomial particular solution of ½T'' + μT' = -2x T₁(x).
    const double k = 5.0 + 2.0 * mu * S - 2.0 * mu2 * S * S;
    return {1.0 / (4.0 * mu2), -5.0 / (6.0 * mu3), k / (4.0 * mu4), -k / (4.0 * mu4 * mu)};
}

std::optional<double> bm_area_second(const Barrier& barrier, double mu) {
    const auto [a, b, c, d] = bm_area_second_coefficients(barrier.level, mu);
    const double S = barrier.level, x = barrier.start;
    const double value = a * (std::pow(x, 4) - std::pow(S, 4)) + b * (std::pow(x, 3) - std::pow(S, 3)) +
                         c * (x * x - S * S) + d * (x - S);
    const double mean = bm_area_mean(barrier, mu);
    if (value < 0.0 || value < mean * mean - 1e-12) return std::nullopt;
    return value;
}

double bm_area_lt_driftless(double lambda, const Barrier& barrier) {
    require_lambda(lambda);
    const double norm = std::pow(3.0, 2.0 / 3.0) * std::tgamma(2.0 / 3.0);
    return norm * airy_ai(std::cbrt(2.0 * lambda) * barrier.gap());
}

double bm_min_cdf(double z, const Barrier& barrier, double mu) {
    if (!(mu >= 0.0)) fail(ErrorCode::invalid_argument, "minimum law needs mu >= 0");
    const double S = barrier.level, x = barrier.start;
    if (z >= x) return 1.0;
    if (mu == 0.0) return (S - x) / (S - z);
    // (e^{-2μx} - e^{-2μS}) / (e^{-2μz} - e^{-2μS}), rescaled by e^{2μz}.
    return std::exp(-2.0 * mu * (x - z)) * std::expm1(-2.0 * mu * (S - x)) /
           std::expm1(-2.0 * mu * (S - z));
}

double bm_min_pdf(double z, const Barrier& barrier, double mu) {
    if (!(mu >= 0.0)) fail(ErrorCode::invalid_argument, "minimum law needs mu >= 0");
    const double S = barrier.level, x = barrier.start;
    if (z > x) return 0.0;
    if (mu == 0.0) return (S - x) / ((S - z) * (S - z));
    const double den = std::expm1(-2.0 * mu * (S - z));
    return -2.0 * mu * std::exp(-2.0 * mu * (x - z)) * std::expm1(-2.0 * mu * (S - x)) / (den * den);
}

int poisson_jumps_needed(const Barrier& barrier) {
    const double gap = barrier.gap();
    const double nearest = std::round(gap);
    if (std::abs(gap - nearest) < 1e-9 && nearest >= 1.0) return static_cast<int>(nearest);
    return static_cast<int>(std::floor(gap)) + 1;
}

namespace {

void require_rate(double theta) {
    if (!(theta > 0.0)) fail(ErrorCode::invalid_argument, "Poisson intensity must be positive");
}

}  // namespace

PoissonFptLaw poisson_fpt_law(const Barrier& barrier, double theta) {
    require_rate(theta);
    const int k = poisson_jumps_needed(barrier);
    const double kd = k;
    return {k, theta, MomentPair::from_raw(kd / theta, (kd * kd + kd) / (theta * theta))};
}

double poisson_area_lt(double lambda, const Barrier& barrier, double theta) {
    require_lambda(lambda);
    require_rate(theta);
    const int k = poisson_jumps_needed(barrier);
    double value = 1.0;
    for (int j = 0; j < k; ++j) value *= theta / (theta + lambda * (barrier.start + j));
    return value;
}

MomentPair poisson_area_moments(const Barrier& barrier, double theta) {
    require_rate(theta);
    const double x = barrier.start, S = barrier.level;
    const double gap = barrier.gap();
    const double t2 = theta * theta;
    if (std::abs(gap - std::round(gap)) < 1e-9 && std::round(gap) >= 1.0) {
        const double k = std::round(gap);
        const double mean = k / (2.0 * theta) * (x + S - 1.0);
        const double second = k / (12.0 * t2) *
                              (12.0 * x * x * (k + 1.0) + 12.0 * x * (k * k - 1.0) + 3.0 * k * k * k -
                               2.0 * k * k - 3.0 * k + 2.0);
        return MomentPair::from_raw(mean, second);
    }
    const double f = std::floor(gap);
    const double mean = (f + 1.0) / (2.0 * theta) * (2.0 * x + f);
    const double second = (f + 1.0) / (12.0 * t2) *
                          (12.0 * x * (f + 2.0) * (x + f) + f * (3.0 * f * f + 7.0 * f + 2.0));
    return MomentPair::from_raw(mean, second);
}

namespace {

void require_ou(double mu, double sigma) {
    if (!(mu > 0.0) || !(sigma > 0.0)) {
        fail(ErrorCode::invalid_argument, "OU parameters mu and sigma must be positive");
    }
}

}  // namespace

double ou_mean_fpt(const Barrier& barrier, double mu, double sigma) {
    require_ou(mu, sigma);
    const double scale = std::sqrt(mu) / sigma;
    const double s = barrier.level * scale, y = barrier.start * scale;
    return (std::sqrt(std::numbers::pi) * (phi1(s).value - phi1(y).value) + psi1(s).value -
            psi1(y).value) /
           mu;
}

namespace {

// ∫_a^S e^{k(t² - m²)} dt, i.e. the OU scale integral rescaled by e^{-k m²}.
double ou_scaled_integral(double a, double S, double k, double m2) {
    return quad::integral([&](double t) { return std::exp(k * (t * t - m2)); }, a, S);
}

}  // namespace

double ou_min_cdf(double z, const Barrier& barrier, double mu, double sigma) {
    require_ou(mu, sigma);
    const double x = barrier.start, S = barrier.level;
    if (z >= x) return 1.0;
    const double k = mu / (sigma * sigma);
    const double m2 = std::max(z * z, S * S);
    return ou_scaled_integral(x, S, k, m2) / ou_scaled_integral(z, S, k, m2);
}

double ou_min_pdf(double z, const Barrier& barrier, double mu, double sigma) {
    require_ou(mu, sigma);
    const double x = barrier.start, S = barrier.level;
    if (z > x) return 0.0;
    const double k = mu / (sigma * sigma);
    const double m2 = std::max(z * z, S * S);
    const double iz = ou_scaled_integral(z, S, k, m2);
    return std::exp(k * (z * z - m2)) * ou_scaled_integral(x, S, k, m2) / (iz * iz);
}

TimeChange ou_time_change(double t, double mu, double sigma) {
    require_ou(mu, sigma);
    if (!(t >= 0.0)) fail(ErrorCode::invalid_argument, "time change needs t >= 0");
    return {sigma * sigma * std::expm1(2.0 * mu * t) / (2.0 * mu), sigma * sigma * std::exp(2.0 * mu * t)};
}

double ou_moving_boundary_fpt_density(double t, double x, double alpha, double mu, double sigma) {
    if (!(alpha > x)) fail(ErrorCode::invalid_argument, "moving boundary needs alpha > x");
    const auto [rho, rho_prime] = ou_time_change(t, mu, sigma);
    if (rho <= 0.0) return 0.0;
    if (!std::isfinite(rho_prime)) return 0.0;  // density ~ e^{-μt} has underflowed
    return bm_fpt_density(rho, Barrier(alpha, x), 0.0) * rho_prime;
}

double area_via_reflection(const Barrier& barrier, double mu) {
    require_positive_drift(mu, "mean first-crossing area");
    const double y = barrier.gap();
    const double tau_below = y / mu;
    const double area_below = y * y / (2.0 * mu) + y / (2.0 * mu * mu);
    return barrier.level * tau_below - area_below;
}

RandomStartMoments random_start_moments(const std::function<double(double)>& density, double level,
                                        double mu, double lower) {
    require_positive_drift(mu, "random-start moments");
    if (!(lower < level)) fail(ErrorCode::invalid_argument, "density support must lie below S");
    const double mass = quad::integral(density, lower, level);
    if (std::abs(mass - 1.0) > 1e-6) {
        fail(ErrorCode::invalid_argument, "starting density does not integrate to 1 on (lower, S)");
    }
    auto expect = [&](auto&& h) {
        return quad::integral([&](double e) { return h(e) * density(e); }, lower, level);
    };
    const double m1 = expect([&](double e) { return level - e; });
    const double m2 = expect([&](double e) { return (level - e) * (level - e); });
    const double ma = expect([&](double e) { return (level - e) * (level + e - 1.0 / mu); });
    return {m1 / mu, m1 / (mu * mu * mu) + m2 / (mu * mu), ma / (2.0 * mu)};
}

}  // namespace crossarea
