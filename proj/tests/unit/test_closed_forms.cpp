#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <catch_amalgamated.hpp>

#include "crossarea/closed_forms.hpp"
#include "crossarea/error.hpp"
#include "crossarea/mc.hpp"
#include "crossarea/special_functions.hpp"

using namespace crossarea;
using boost::math::quadrature::gauss_kronrod;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

template <typename F>
double gk(F f, double a, double b) {
    return gauss_kronrod<double, 61>::integrate(f, a, b, 25, 1e-14);
}

template <typename F>
double gk_half_line(F f, double a) {
    // ∫_a^∞ via t = a + s/(1-s)
    return gk([&](double s) { return s >= 1.0 ? 0.0 : f(a + s / (1.0 - s)) / ((1.0 - s) * (1.0 - s)); }, 0.0, 1.0);
}

const Barrier kUnit(2.0, 1.0);

}  // namespace

TEST_CASE("Brownian first-passage density", "[closed]") {
    CHECK_THAT(bm_fpt_density(1.0, kUnit, 1.0), WithinAbs(1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15));
    CHECK(bm_fpt_density(1e-6, kUnit, 1.0) < 1e-100);
    CHECK_THAT(gk_half_line([](double t) { return t > 0.0 ? bm_fpt_density(t, kUnit, 1.0) : 0.0; }, 0.0),
               WithinAbs(1.0, 1e-8));
    CHECK_THROWS_AS(bm_fpt_density(0.0, kUnit, 1.0), Error);
}

TEST_CASE("Brownian first-passage transform", "[closed][property]") {
    CHECK(bm_fpt_lt(0.0, kUnit, 1.0) == 1.0);
    CHECK(bm_fpt_lt(0.0, kUnit, 0.0) == 1.0);
    CHECK_THAT(bm_fpt_lt(1.5, kUnit, 1.0), WithinAbs(std::exp(-1.0), 1e-15));
    for (double lambda : {0.5, 1.0, 2.0}) {
        for (double mu : {0.5, 1.0, 2.0}) {
            const double q = gk_half_line(
                [&](double t) { return t > 0.0 ? std::exp(-lambda * t) * bm_fpt_density(t, kUnit, mu) : 0.0; }, 0.0);
            CHECK_THAT(bm_fpt_lt(lambda, kUnit, mu), WithinAbs(q, 1e-8));
        }
    }
}

TEST_CASE("Brownian first-passage moments", "[closed]") {
    const auto m = bm_fpt_moments(kUnit, 1.0);
    CHECK(m.first == 1.0);
    CHECK(*m.second == 2.0);
    CHECK(*m.variance == 1.0);
    const auto m3 = bm_fpt_moments(kUnit, 3.0);
    CHECK_THAT(m3.first, WithinAbs(1.0 / 3.0, 1e-15));
    CHECK_THAT(*m3.second, WithinAbs(4.0 / 27.0, 1e-15));
    CHECK(bm_fpt_moments(Barrier(2.0, 2.0 - 1e-12), 1.0).first < 1e-11);
    CHECK_THROWS_AS(bm_fpt_moments(kUnit, 0.0), Error);
    CHECK_THROWS_AS(bm_fpt_moments(kUnit, -1.0), Error);
}

TEST_CASE("Brownian mean area", "[closed]") {
    CHECK(bm_area_mean(kUnit, 1.0) == 1.0);
    CHECK_THAT(bm_area_mean(kUnit, 2.0), WithinAbs(0.625, 1e-15));
    CHECK_THROWS_WITH(bm_area_mean(kUnit, 0.0), ContainsSubstring("mean is infinite"));

    CHECK_THAT(area_via_reflection(kUnit, 1.0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(area_via_reflection(Barrier(1.0, 0.0), 1.0), WithinAbs(0.0, 1e-15));
    CHECK_THAT(area_via_reflection(Barrier(3.0, 1.0), 2.0), WithinAbs(bm_area_mean(Barrier(3.0, 1.0), 2.0), 1e-12));
}

TEST_CASE("Brownian area second moment solves its moment equation", "[closed]") {
    // T2 must satisfy ½T2'' + μT2' = -2x T1(x), T2(S) = 0, with T1 the mean area.
    for (double mu : {0.7, 1.0, 2.0}) {
        const double S = 2.0;
        const auto [a, b, c, d] = bm_area_second_coefficients(S, mu);
        auto t2 = [&](double x) {
            return a * (std::pow(x, 4) - std::pow(S, 4)) + b * (std::pow(x, 3) - std::pow(S, 3)) +
                   c * (x * x - S * S) + d * (x - S);
        };
        auto t1 = [&](double x) { return (S - x) / (2.0 * mu) * (S + x - 1.0 / mu); };
        CHECK(t2(S) == 0.0);
        const double h = 1e-3;
        for (double x : {-3.0, -1.0, 0.0, 0.5, 1.0, 1.9}) {
            const double d2 = (t2(x + h) - 2.0 * t2(x) + t2(x - h)) / (h * h);
            const double d1 = (t2(x + h) - t2(x - h)) / (2.0 * h);
            CHECK_THAT(0.5 * d2 + mu * d1, WithinAbs(-2.0 * x * t1(x), 1e-5));
        }
    }
    CHECK_THAT(*bm_area_second(kUnit, 1.0), WithinAbs(19.0 / 12.0, 1e-12));
    CHECK(*bm_area_second(Barrier(2.0, 2.0 - 1e-9), 1.0) < 1e-8);
}

TEST_CASE("Brownian area second moment against simulation at mu = 2", "[closed][mc]") {
    const auto spec = make_preset(PresetKind::bm_drift, {{"mu", 2.0}});
    MCConfig cfg;
    cfg.n_paths = 100000;
    cfg.seed = 11;
    const auto stats = estimate_crossing_stats(spec, kUnit, cfg);
    const double exact = *bm_area_second(kUnit, 2.0);
    CHECK(std::abs(stats.area.second.z_score(exact)) < 3.0);
}

TEST_CASE("Brownian area second moment is a valid moment where declared", "[closed][property]") {
    int declared = 0, rejected = 0;
    for (double mu : {0.1, 0.3, 0.5, 1.0, 2.0, 5.0}) {
        for (double S : {-2.0, 0.0, 1.0, 3.0}) {
            for (double gap : {0.1, 1.0, 4.0}) {
                const Barrier b(S, S - gap);
                const auto second = bm_area_second(b, mu);
                if (!second) {
                    ++rejected;
                    continue;
                }
                ++declared;
                const double mean = bm_area_mean(b, mu);
                CHECK(*second - mean * mean >= -1e-12);
            }
        }
    }
    // Every area moment exists for mu > 0.
    CHECK(declared > 0);
    CHECK(rejected == 0);
}

TEST_CASE("driftless Airy transform", "[closed]") {
    CHECK_THAT(bm_area_lt_driftless(0.0, kUnit), WithinAbs(1.0, 1e-14));
    CHECK_THAT(bm_area_lt_driftless(1.0, kUnit),
               WithinAbs(std::pow(3.0, 2.0 / 3.0) * std::tgamma(2.0 / 3.0) * airy_ai(std::cbrt(2.0)), 1e-15));
    // Infinite mean: the difference quotient at 0 diverges.
    double prev = 0.0;
    for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
        const double slope = (bm_area_lt_driftless(eps, kUnit) - 1.0) / eps;
        CHECK(slope < prev);
        prev = slope;
    }
    CHECK(prev < -100.0);
    // ½M'' = λ(S - x)M in x.
    const double lambda = 1.3, S = 2.0, h = 1e-3;
    auto m = [&](double x) { return bm_area_lt_driftless(lambda, Barrier(S, x)); };
    for (double x : {-1.0, 0.0, 1.0, 1.5}) {
        const double d2 = (m(x + h) - 2.0 * m(x) + m(x - h)) / (h * h);
        CHECK_THAT(0.5 * d2, WithinAbs(lambda * (S - x) * m(x), 1e-6));
    }
}

TEST_CASE("Brownian minimum law", "[closed][property]") {
    CHECK(bm_min_cdf(1.0, kUnit, 1.0) == 1.0);
    CHECK(bm_min_cdf(-200.0, kUnit, 1.0) < 1e-100);
    CHECK(bm_min_cdf(-1e12, kUnit, 0.0) < 1e-11);
    CHECK_THAT(bm_min_pdf(0.0, kUnit, 0.0), WithinAbs(0.25, 1e-15));
    CHECK_THAT(bm_min_cdf(0.0, kUnit, 1.0),
               WithinAbs((std::exp(-2.0) - std::exp(-4.0)) / (1.0 - std::exp(-4.0)), 1e-15));
    // w(z) = 1 at x = z and w -> 0 as x -> S.
    CHECK(bm_min_cdf(0.3, Barrier(2.0, 0.3), 1.0) == 1.0);
    CHECK(bm_min_cdf(0.3, Barrier(2.0, 2.0 - 1e-12), 1.0) < 1e-10);

    for (double mu : {0.0, 0.5, 1.0, 3.0}) {
        double prev = 0.0;
        for (int i = -400; i <= 100; ++i) {
            const double z = 0.01 * i;
            const double v = bm_min_cdf(z, kUnit, mu);
            CHECK(v >= prev);
            prev = v;
        }
        const double lower = mu == 0.0 ? -1e9 : -60.0;
        auto pdf = [&](double z) { return bm_min_pdf(z, kUnit, mu); };
        const double mass =
            mu == 0.0 ? gk_half_line([&](double t) { return pdf(1.0 - t); }, 0.0) : gk(pdf, lower, 1.0);
        CHECK_THAT(mass, WithinAbs(1.0, 1e-8));
        const double h = 1e-5;
        for (double z : {-1.0, 0.0, 0.5}) {
            const double fd = (bm_min_cdf(z + h, kUnit, mu) - bm_min_cdf(z - h, kUnit, mu)) / (2.0 * h);
            CHECK_THAT(pdf(z), WithinRel(fd, 1e-7));
        }
    }
}

TEST_CASE("Poisson first-passage law", "[closed]") {
    const auto law = poisson_fpt_law(Barrier(4.0, 1.0), 2.0);
    CHECK(law.shape == 3);
    CHECK(law.rate == 2.0);
    CHECK(law.moments.first == 1.5);
    CHECK(*law.moments.variance == 0.75);
    const auto frac = poisson_fpt_law(Barrier(2.5, 1.0), 1.0);
    CHECK(frac.shape == 2);
    CHECK(frac.moments.first == 2.0);
    CHECK(poisson_fpt_law(Barrier(2.0, 1.7), 1.0).shape == 1);
    CHECK(poisson_jumps_needed(Barrier(4.0, 1.0 + 1e-11)) == 3);
    CHECK(poisson_jumps_needed(Barrier(4.0, 1.0 + 1e-7)) == 3);
    CHECK(poisson_jumps_needed(Barrier(4.0, 1.0 - 1e-7)) == 4);
    CHECK_THROWS_AS(poisson_fpt_law(Barrier(4.0, 1.0), 0.0), Error);
}

TEST_CASE("Poisson area law matches independent exponentials", "[closed][property]") {
    const auto m = poisson_area_moments(Barrier(4.0, 1.0), 2.0);
    CHECK_THAT(m.first, WithinAbs(3.0, 1e-12));
    CHECK_THAT(*m.second, WithinAbs(12.5, 1e-12));
    CHECK_THAT(*m.variance, WithinAbs(3.5, 1e-12));
    // A = Σ_j (x + j) E_j with E_j independent Exp(θ), j < k*.
    for (auto [S, x, theta] : {std::tuple{4.0, 1.0, 2.0}, std::tuple{3.7, 0.4, 1.3}, std::tuple{2.0, -0.5, 2.0},
                               std::tuple{6.0, 2.0, 3.0}}) {
        const Barrier b(S, x);
        const int k = poisson_jumps_needed(b);
        double mean = 0.0, var = 0.0, lt = 1.0;
        const double lambda = 0.37;
        for (int j = 0; j < k; ++j) {
            mean += (x + j) / theta;
            var += (x + j) * (x + j) / (theta * theta);
            lt *= theta / (theta + lambda * (x + j));
        }
        const auto mm = poisson_area_moments(b, theta);
        CHECK_THAT(mm.first, WithinAbs(mean, 1e-12));
        CHECK_THAT(*mm.variance, WithinAbs(var, 1e-11));
        CHECK_THAT(poisson_area_lt(lambda, b, theta), WithinAbs(lt, 1e-14));
        // One-sided second-order difference at λ = 0.
        const double e = 1e-5;
        const double slope = (-3.0 * poisson_area_lt(0.0, b, theta) + 4.0 * poisson_area_lt(e, b, theta) -
                              poisson_area_lt(2.0 * e, b, theta)) /
                             (2.0 * e);
        CHECK_THAT(slope, WithinAbs(-mean, 1e-6));
    }
}

TEST_CASE("OU mean first-passage time", "[closed]") {
    CHECK_THAT(ou_mean_fpt(Barrier(1.0, 1.0 - 1e-12), 1.0, 1.0), WithinAbs(0.0, 1e-10));
    CHECK_THAT(ou_mean_fpt(Barrier(1.0, 0.0), 1.0, 1.0),
               WithinAbs(std::sqrt(std::numbers::pi) * phi1(1.0).value + psi1(1.0).value, 1e-13));
    // Green's function oracle: T(x) = (2/σ²) ∫_x^S e^{ky²} ∫_{-∞}^y e^{-ku²} du dy, k = μ/σ².
    for (auto [mu, sigma, x, S] : {std::tuple{1.0, 1.0, 0.0, 1.0}, std::tuple{1.0, 1.0, -1.0, 1.0},
                                   std::tuple{2.0, 0.5, -0.3, 0.4}, std::tuple{0.5, 1.5, -2.0, 0.5}}) {
        const double k = mu / (sigma * sigma);
        auto inner = [&](double y) {
            return 0.5 * std::sqrt(std::numbers::pi / k) * std::erfc(-y * std::sqrt(k));
        };
        const double oracle = 2.0 / (sigma * sigma) * gk([&](double y) { return std::exp(k * y * y) * inner(y); }, x, S);
        CHECK_THAT(ou_mean_fpt(Barrier(S, x), mu, sigma), WithinRel(oracle, 1e-10));
    }
    double prev = 0.0;
    for (double S : {0.2, 0.5, 1.0, 1.5, 2.0}) {
        const double v = ou_mean_fpt(Barrier(S, 0.0), 1.0, 1.0);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("OU minimum law", "[closed]") {
    const Barrier b(1.0, 0.0);
    CHECK(ou_min_cdf(0.0, b, 1.0, 1.0) == 1.0);
    CHECK(ou_min_cdf(-8.0, b, 1.0, 1.0) < 1e-20);
    double prev = 0.0;
    for (int i = -30; i <= 0; ++i) {
        const double v = ou_min_cdf(0.1 * i, b, 1.0, 1.0);
        CHECK(v >= prev);
        prev = v;
    }
    const double h = 1e-5;
    for (double z : {-1.5, -0.5}) {
        const double fd = (ou_min_cdf(z + h, b, 1.0, 1.0) - ou_min_cdf(z - h, b, 1.0, 1.0)) / (2.0 * h);
        CHECK_THAT(ou_min_pdf(z, b, 1.0, 1.0), WithinRel(fd, 1e-6));
    }
}

TEST_CASE("OU time change and moving boundary", "[closed]") {
    CHECK(ou_time_change(0.0, 1.0, 2.0).rho == 0.0);
    CHECK(ou_time_change(0.0, 1.0, 2.0).rho_prime == 4.0);
    const double mass = gk_half_line(
        [](double t) { return t > 0.0 ? ou_moving_boundary_fpt_density(t, 0.0, 1.0, 1.0, 1.0) : 0.0; }, 0.0);
    CHECK_THAT(mass, WithinAbs(1.0, 1e-6));
    CHECK_THROWS_AS(ou_moving_boundary_fpt_density(1.0, 1.0, 1.0, 1.0, 1.0), Error);
}

TEST_CASE("random starting point", "[closed]") {
    const auto uniform = random_start_moments([](double e) { return e > 0.0 && e < 2.0 ? 0.5 : 0.0; }, 2.0, 1.0, 0.0);
    CHECK_THAT(uniform.tau_mean, WithinAbs(1.0, 1e-10));
    CHECK_THAT(uniform.tau_second, WithinAbs(7.0 / 3.0, 1e-10));

    // Start ~ N(1, sd²): the moments pick up exact sd² corrections.
    const double sd = 1e-2;
    const auto narrow = random_start_moments(
        [&](double e) { return std::exp(-0.5 * (e - 1.0) * (e - 1.0) / (sd * sd)) / (sd * std::sqrt(2.0 * std::numbers::pi)); },
        2.0, 1.0, 1.0 - 12.0 * sd);
    CHECK_THAT(narrow.tau_mean, WithinAbs(1.0, 1e-9));
    CHECK_THAT(narrow.tau_second, WithinAbs(2.0 + sd * sd, 1e-9));
    CHECK_THAT(narrow.area_mean, WithinAbs(1.0 - 0.5 * sd * sd, 1e-9));
    CHECK_THROWS_AS(random_start_moments([](double) { return 1.0; }, 2.0, 1.0, 0.0), Error);
}

TEST_CASE("closed-form transform curves", "[closed][property]") {
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(0.25 * i);
    const std::vector<LaplaceCurve> curves = {
        make_curve(grid, [](double l) { return bm_fpt_lt(l, kUnit, 1.0); }),
        make_curve(grid, [](double l) { return bm_area_lt_driftless(l, kUnit); }),
        make_curve(grid, [](double l) { return poisson_area_lt(l, Barrier(4.0, 1.0), 2.0); }),
    };
    for (const auto& c : curves) {
        CHECK(c.label == CurveLabel::closed_form);
        CHECK_THAT(c.values.front(), WithinAbs(1.0, 1e-12));
        for (std::size_t i = 1; i < c.values.size(); ++i) CHECK(c.values[i] <= c.values[i - 1]);
    }
}

TEST_CASE("large drift limits", "[closed]") {
    const Barrier b(1.0, 0.0);
    CHECK(bm_fpt_moments(b, 1e3).first < 1e-2);
    CHECK(std::abs(bm_area_mean(b, 1e3)) < 1e-2);
}
