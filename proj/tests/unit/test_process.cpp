#include <cmath>
#include <numbers>
#include <random>

#include <catch_amalgamated.hpp>

#include "crossarea/error.hpp"
#include "crossarea/process.hpp"

using namespace crossarea;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

TestFunction identity_fn() {
    return {[](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
}

ProcessSpec bm(double mu) { return make_preset(PresetKind::bm_drift, {{"mu", mu}}); }

}  // namespace

TEST_CASE("presets carry the expected coefficients", "[process]") {
    const auto b = bm(1.0);
    CHECK(b.drift(-3.0) == 1.0);
    CHECK(b.diffusion(7.0) == 1.0);
    CHECK(b.jumps.empty());

    const auto p = make_preset(PresetKind::poisson, {{"theta", 2.0}});
    CHECK(p.drift(1.0) == 0.0);
    CHECK(p.diffusion(1.0) == 0.0);
    REQUIRE(p.jumps.size() == 1);
    CHECK(p.jumps[0].rate == 2.0);
    CHECK(p.jumps[0].amplitude == 1.0);

    const auto ou = make_preset(PresetKind::ou, {{"mu", 1.0}, {"sigma", 1.0}});
    CHECK(ou.drift(0.7) == -0.7);
    CHECK(ou.diffusion(-5.0) == 1.0);

    const auto wf = make_preset(PresetKind::wf_conj);
    CHECK(wf.interval.lower == 0.0);
    CHECK(wf.interval.upper == 1.0);
    CHECK_THAT(wf.drift(0.5), WithinAbs(0.0, 1e-15));
    CHECK_THAT(wf.diffusion(0.5), WithinAbs(0.5, 1e-15));

    const auto cir = make_preset(PresetKind::cir_quarter);
    CHECK(cir.interval.lower == 0.0);
    CHECK(cir.drift(3.0) == 0.25);
    CHECK(cir.diffusion(-1.0) == 0.0);

    const auto levy = parse_preset("levy:beta=0.5,theta=1");
    CHECK(levy.drift(0.0) == 0.5);
    CHECK(levy.diffusion(0.0) == 1.0);
    CHECK(levy.total_jump_intensity() == 1.0);
}

TEST_CASE("preset validation", "[process]") {
    CHECK_THROWS_AS(parse_preset("nope:mu=1"), Error);
    CHECK_THROWS_AS(parse_preset("poisson:theta=0"), Error);
    CHECK_THROWS_AS(parse_preset("ou:mu=1,sigma=-1"), Error);
    CHECK_THROWS_AS(parse_preset("bm:mu=1,nu=2"), Error);
    CHECK_THROWS_AS(parse_preset("bm:mu=abc"), Error);
    CHECK_THROWS_AS(parse_preset("bm"), Error);
    CHECK_THROWS_AS(Barrier(1.0, 1.0), Error);
    CHECK_THROWS_AS(Barrier(1.0, 2.0), Error);
    CHECK_THROWS_AS(validate_barrier(make_preset(PresetKind::wf_conj), Barrier(1.5, 0.5)), Error);
}

TEST_CASE("preset labels round-trip through the parser", "[process]") {
    for (const char* text : {"bm:mu=1.25", "ou:mu=1,sigma=0.5", "poisson:theta=2", "levy:beta=-0.5,theta=2",
                             "cir4", "wf"}) {
        const auto spec = parse_preset(text);
        const auto again = parse_preset(spec.label());
        CHECK(again.label() == spec.label());
        CHECK(again.preset->params == spec.preset->params);
    }
}

TEST_CASE("generator on simple functions", "[process]") {
    CHECK_THAT(apply_generator(bm(1.0), identity_fn(), 0.0), WithinAbs(1.0, 1e-15));
    const auto p = make_preset(PresetKind::poisson, {{"theta", 2.0}});
    CHECK_THAT(apply_generator(p, identity_fn(), 0.0), WithinAbs(2.0, 1e-15));

    const TestFunction constant{[](double) { return 3.5; }, {}, {}};
    for (const char* text : {"bm:mu=1", "ou:mu=2,sigma=1", "poisson:theta=3", "levy:beta=0.5,theta=1"}) {
        CHECK_THAT(apply_generator(parse_preset(text), constant, 0.3), WithinAbs(0.0, 1e-9));
    }
    // Finite differences against the analytic value for f = x^2 under OU.
    const auto ou = make_preset(PresetKind::ou, {{"mu", 1.0}, {"sigma", 2.0}});
    const TestFunction sq{[](double x) { return x * x; }, {}, {}};
    CHECK_THAT(apply_generator(ou, sq, 0.7), WithinAbs(0.5 * 4.0 * 2.0 - 0.7 * 1.4, 1e-7));

    CHECK_THROWS_AS(apply_generator(make_preset(PresetKind::wf_conj), sq, 1.5), Error);
}

TEST_CASE("generator is linear on random test triples", "[process][property]") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    const std::vector<ProcessSpec> specs = {bm(0.7), parse_preset("ou:mu=1.5,sigma=0.8"),
                                            parse_preset("poisson:theta=2"), parse_preset("levy:beta=-0.5,theta=2")};
    for (int trial = 0; trial < 200; ++trial) {
        const double a = unif(rng), b = unif(rng), k1 = unif(rng), k2 = unif(rng), x = unif(rng);
        const TestFunction f{[=](double t) { return std::sin(k1 * t); }, [=](double t) { return k1 * std::cos(k1 * t); },
                             [=](double t) { return -k1 * k1 * std::sin(k1 * t); }};
        const TestFunction g{[=](double t) { return std::exp(k2 * t); }, [=](double t) { return k2 * std::exp(k2 * t); },
                             [=](double t) { return k2 * k2 * std::exp(k2 * t); }};
        const TestFunction comb{[=](double t) { return a * f.f(t) + b * g.f(t); },
                                [=](double t) { return a * f.df(t) + b * g.df(t); },
                                [=](double t) { return a * f.d2f(t) + b * g.d2f(t); }};
        const auto& spec = specs[trial % specs.size()];
        const double lhs = apply_generator(spec, comb, x);
        const double rhs = a * apply_generator(spec, f, x) + b * apply_generator(spec, g, x);
        CHECK_THAT(lhs, WithinAbs(rhs, 1e-9));
    }
}

TEST_CASE("conjugation maps", "[process]") {
    const auto cir = conjugation_map(make_preset(PresetKind::cir_quarter));
    CHECK_THAT(cir.forward(1.0), WithinAbs(2.0, 1e-15));
    CHECK_THAT(cir.inverse(2.0), WithinAbs(1.0, 1e-15));
    const auto wf = conjugation_map(make_preset(PresetKind::wf_conj));
    CHECK_THAT(wf.forward(0.5), WithinAbs(std::numbers::pi / 2.0, 1e-15));
    const auto id = conjugation_map(bm(0.0));
    CHECK(id.forward(0.3) == 0.3);
    CHECK_THROWS_AS(conjugation_map(bm(1.0)), Error);
    CHECK_THROWS_AS(conjugation_map(parse_preset("ou:mu=1,sigma=1")), Error);

    for (const auto* m : {&cir, &wf}) {
        CHECK(m->forward(0.0) == 0.0);
        double prev = -1.0;
        for (int i = 0; i <= 100; ++i) {
            const double x = 0.01 * i;
            CHECK_THAT(m->inverse(m->forward(x)), WithinAbs(x, 1e-12));
            CHECK(m->forward(x) > prev);
            prev = m->forward(x);
        }
    }
}

TEST_CASE("generator of f(u(x)) is half the second derivative for conjugated presets", "[process][property]") {
    for (auto kind : {PresetKind::cir_quarter, PresetKind::wf_conj}) {
        const auto spec = make_preset(kind);
        const auto u = conjugation_map(spec);
        const TestFunction fu{[&](double x) { return std::sin(u.forward(x)); }, {}, {}};
        for (double x : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            CHECK_THAT(apply_generator(spec, fu, x, 1e-4), WithinAbs(-0.5 * std::sin(u.forward(x)), 1e-6));
        }
    }
}

TEST_CASE("scale functions", "[process]") {
    const double mu = 0.8;
    for (double x : {-1.0, 0.0, 0.5, 2.0}) {
        CHECK_THAT(eval_scale_functions(bm(mu), 0.0, x).phi, WithinRel(std::exp(-2.0 * mu * x), 1e-12));
    }
    const auto ou = parse_preset("ou:mu=1.5,sigma=0.7");
    for (double x : {-1.0, 0.3, 1.2}) {
        CHECK_THAT(eval_scale_functions(ou, 0.0, x).phi, WithinRel(std::exp(1.5 * x * x / 0.49), 1e-10));
    }
    CHECK_THROWS_AS(eval_scale_functions(parse_preset("poisson:theta=1"), 0.0, 1.0), Error);

    // phi is the derivative of a scale function: ½σ²φ' + bφ = 0.
    for (const auto& spec : {bm(1.3), ou}) {
        auto phi = [&](double x) { return eval_scale_functions(spec, 0.0, x).phi; };
        for (int i = -10; i <= 10; ++i) {
            const double x = 0.1 * i, h = 1e-3;
            const double dphi = (phi(x - 2 * h) - 8 * phi(x - h) + 8 * phi(x + h) - phi(x + 2 * h)) / (12 * h);
            const double sigma = spec.diffusion(x);
            CHECK_THAT(0.5 * sigma * sigma * dphi + spec.drift(x) * phi(x), WithinAbs(0.0, 1e-6 * phi(x)));
        }
    }
}

TEST_CASE("attainability", "[process]") {
    const auto report = check_attainability(parse_preset("ou:mu=1,sigma=1"), 1.0, 0.0);
    CHECK(report.attainable);
    REQUIRE(report.tail_integrals.size() == 3);
    CHECK(report.tail_integrals[2] < report.tail_integrals[1]);
    CHECK(check_attainability(bm(1.0), 2.0, 1.0).attainable);
}

TEST_CASE("finite crossing certificate", "[process][property]") {
    CHECK(finite_crossing_check(bm(1.0), Barrier(5.0, 1.0)) == CrossingCertificate::holds);
    CHECK(finite_crossing_check(parse_preset("levy:beta=-0.5,theta=2"), Barrier(2.0, 1.0)) ==
          CrossingCertificate::holds);
    CHECK(finite_crossing_check(bm(0.0), Barrier(2.0, 1.0)) == CrossingCertificate::unknown);
    CHECK(finite_crossing_check(parse_preset("ou:mu=1,sigma=1"), Barrier(1.0, 0.0)) ==
          CrossingCertificate::unknown);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int i = 0; i < 500; ++i) {
        const double beta = unif(rng), theta = std::abs(unif(rng)) + 1e-3;
        const auto spec = make_preset(PresetKind::levy, {{"beta", beta}, {"theta", theta}});
        const auto cert = finite_crossing_check(spec, Barrier(2.0, 1.0));
        if (beta + theta <= 0.0) CHECK(cert == CrossingCertificate::unknown);
        if (beta + theta > 0.0) CHECK(cert == CrossingCertificate::holds);
    }
}
