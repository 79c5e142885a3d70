#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <catch_amalgamated.hpp>

#include "crossarea/error.hpp"
#include "crossarea/special_functions.hpp"

using namespace crossarea;
using boost::math::quadrature::gauss_kronrod;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

template <typename F>
double gk(F f, double a, double b) {
    return gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-15);
}

// Ai(z) = (1/π) ∫_0^∞ exp(-s³/3 - zs/2) cos(√3 zs/2 + π/6) ds: the steepest
// descent rotation of the oscillatory integral, absolutely convergent.
double airy_oracle(double z) {
    const double r3 = std::sqrt(3.0);
    auto f = [=](double s) { return std::exp(-s * s * s / 3.0 - 0.5 * z * s) * std::cos(0.5 * r3 * z * s + std::numbers::pi / 6.0); };
    return (gk(f, 0.0, 2.0) + gk(f, 2.0, 5.0) + gk(f, 5.0, 13.0)) / std::numbers::pi;
}

}  // namespace

TEST_CASE("Airy values at the origin", "[special]") {
    CHECK_THAT(airy_ai(0.0), WithinAbs(1.0 / (std::pow(3.0, 2.0 / 3.0) * std::tgamma(2.0 / 3.0)), 1e-15));
    CHECK_THAT(airy_ai_prime(0.0), WithinAbs(-1.0 / (std::cbrt(3.0) * std::tgamma(1.0 / 3.0)), 1e-15));
    CHECK_THROWS_AS(airy_ai(-0.5), Error);
}

TEST_CASE("Airy agrees with the integral representation", "[special]") {
    for (int i = 0; i <= 60; ++i) {
        const double z = 0.1 * i;
        CHECK_THAT(airy_ai(z), WithinAbs(airy_oracle(z), 1e-12));
    }
}

TEST_CASE("Airy agrees with Boost beyond the switchover", "[special]") {
    // Near the seam the asymptotic remainder is about exp(-4 z^1.5 / 3).
    for (double z : {6.0, 6.5, 8.0, 12.0, 20.0, 40.0}) {
        CHECK_THAT(airy_ai(z), WithinRel(boost::math::airy_ai(z), 1e-10));
        CHECK_THAT(airy_ai_prime(z), WithinRel(boost::math::airy_ai_prime(z), 1e-10));
    }
    for (double z : {0.5, 2.0, 4.0, 5.5}) {
        CHECK_THAT(airy_ai_prime(z), WithinAbs(boost::math::airy_ai_prime(z), 1e-12));
    }
}

TEST_CASE("Airy branches agree at the seam", "[special]") {
    CHECK_THAT(airy_ai_maclaurin(kAirySwitchover), WithinAbs(airy_ai_asymptotic(kAirySwitchover), 1e-12));
}

TEST_CASE("Airy is decreasing and log-concave", "[special][property]") {
    std::vector<double> logs;
    double prev = airy_ai(0.0);
    for (int i = 1; i <= 80; ++i) {
        const double v = airy_ai(0.1 * i);
        CHECK(v > 0.0);
        CHECK(v < prev);
        prev = v;
        logs.push_back(std::log(v));
    }
    for (std::size_t i = 1; i + 1 < logs.size(); ++i) CHECK(logs[i - 1] - 2.0 * logs[i] + logs[i + 1] < 0.0);
}

TEST_CASE("phi1 and psi1 series", "[special]") {
    CHECK(phi1(0.0).value == 0.0);
    CHECK(psi1(0.0).value == 0.0);
    CHECK_THAT(phi1(1.0).value, WithinAbs(gk([](double t) { return std::exp(t * t); }, 0.0, 1.0), 1e-10));
    const double nested = 2.0 * gk(
                                    [](double u) {
                                        return std::exp(u * u) * gk([](double v) { return std::exp(-v * v); }, 0.0, u);
                                    },
                                    0.0, 1.0);
    CHECK_THAT(psi1(1.0).value, WithinAbs(nested, 1e-10));

    for (double z : {0.3, 1.0, 2.5, 6.0, 10.0}) {
        const auto p = phi1(z), q = psi1(z);
        CHECK(p.value == -phi1(-z).value);
        CHECK(q.value == psi1(-z).value);
        CHECK(p.terms_used <= 500);
        CHECK(p.truncation_bound <= 1e-14 * std::max(1.0, std::abs(p.value)));
        CHECK(q.truncation_bound <= 1e-14 * std::max(1.0, std::abs(q.value)));
    }
    double prev_p = 0.0, prev_q = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double z = 0.1 * i;
        CHECK(phi1(z).value > prev_p);
        CHECK(psi1(z).value > prev_q);
        prev_p = phi1(z).value;
        prev_q = psi1(z).value;
    }
    CHECK_THROWS_AS(phi1(10.5), Error);
    CHECK_THROWS_AS(psi1(-11.0), Error);
}

TEST_CASE("normal distribution function", "[special]") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(40.0) == 1.0);
    CHECK(normal_cdf(-40.0) == 0.0);
    const double q = 0.5 + gk([](double t) { return std::exp(-0.5 * t * t); }, 0.0, 1.0) / std::sqrt(2.0 * std::numbers::pi);
    CHECK_THAT(normal_cdf(1.0), WithinAbs(q, 1e-12));
}

TEST_CASE("moment-matched Gamma transform", "[special]") {
    CHECK(gamma_lt(1.5, 0.75, 0.0) == 1.0);
    CHECK_THAT(gamma_lt(1.0, 1.0, 1.0), WithinAbs(0.5, 1e-15));
    CHECK_THAT(gamma_lt(1.5, 0.75, 2.0), WithinAbs(0.125, 1e-15));
    // Gamma(shape 3, rate 2) density by quadrature.
    const double lt = gk([](double t) { return std::exp(-2.0 * t) * 4.0 * t * t * std::exp(-2.0 * t); }, 0.0, 60.0);
    CHECK_THAT(gamma_lt(1.5, 0.75, 2.0), WithinAbs(lt, 1e-12));
    CHECK_THROWS_AS(gamma_lt(0.0, 1.0, 1.0), Error);
    CHECK_THROWS_AS(gamma_lt(1.0, -1.0, 1.0), Error);
}

TEST_CASE("Gamma transform is completely monotone on a grid", "[special][property]") {
    for (auto [m, v] : {std::pair{1.0, 0.5}, std::pair{0.3, 2.0}, std::pair{4.0, 4.0}}) {
        std::vector<double> vals;
        for (int i = 0; i <= 40; ++i) vals.push_back(gamma_lt(m, v, 0.25 * i));
        for (std::size_t i = 1; i < vals.size(); ++i) CHECK(vals[i] - vals[i - 1] < 0.0);
        for (std::size_t i = 1; i + 1 < vals.size(); ++i) CHECK(vals[i - 1] - 2.0 * vals[i] + vals[i + 1] > 0.0);
    }
}
