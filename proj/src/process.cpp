#include "crossarea/process.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "crossarea/error.hpp"
#include "crossarea/quadrature.hpp"

namespace crossarea {

StateFunction StateFunction::affine(double a, double b) {
    StateFunction f;
    f.kind_ = Kind::affine;
    f.a_ = a;
    f.b_ = b;
    return f;
}

StateFunction StateFunction::sqrt_positive(double scale) {
    StateFunction f;
    f.kind_ = Kind::sqrt_positive;
    f.a_ = scale;
    return f;
}

StateFunction StateFunction::sqrt_logistic() {
    StateFunction f;
    f.kind_ = Kind::sqrt_logistic;
    return f;
}

StateFunction StateFunction::custom(std::function<double(double)> fn) {
    require(static_cast<bool>(fn), ErrorCode::invalid_argument, "custom state function is empty");
    StateFunction f;
    f.kind_ = Kind::custom;
    f.fn_ = std::move(fn);
    return f;
}

namespace {

const char* kind_name(PresetKind kind) {
    switch (kind) {
        case PresetKind::bm_drift: return "bm";
        case PresetKind::ou: return "ou";
        case PresetKind::cir_quarter: return "cir4";
        case PresetKind::wf_conj: return "wf";
        case PresetKind::poisson: return "poisson";
        case PresetKind::levy: return "levy";
        case PresetKind::custom: return "custom";
    }
    return "custom";
}

std::string format_param(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double get_param(const std::map<std::string, double>& params, const std::string& name,
                 const char* preset) {
    auto it = params.find(name);
    if (it == params.end()) {
        fail(ErrorCode::invalid_argument,
             std::string("preset '") + preset + "' requires parameter '" + name + "'");
    }
    if (!std::isfinite(it->second)) {
        fail(ErrorCode::invalid_argument, "parameter '" + name + "' must be finite");
    }
    return it->second;
}

void require_positive(double v, const std::string& name) {
    if (!(v > 0.0)) fail(ErrorCode::invalid_argument, "parameter '" + name + "' must be positive");
}

void check_known(const std::map<std::string, double>& params,
                 std::initializer_list<const char*> known, const char* preset) {
    for (const auto& [key, _] : params) {
        bool ok = std::any_of(known.begin(), known.end(), [&](const char* k) { return key == k; });
        if (!ok) {
            fail(ErrorCode::invalid_argument,
                 std::string("unknown parameter '") + key + "' for preset '" + preset + "'");
        }
    }
}

}  // namespace

double PresetTag::param(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end()) fail(ErrorCode::invalid_argument, "preset has no parameter " + name);
    return it->second;
}

std::string PresetTag::to_string() const {
    std::string out = kind_name(kind);
    bool first = true;
    for (const auto& [key, value] : params) {
        out += first ? ":" : ",";
        first = false;
        out += key + "=" + format_param(value);
    }
    return out;
}

double ProcessSpec::total_jump_intensity() const {
    double total = 0.0;
    for (const auto& j : jumps) total += j.rate;
    return total;
}

Barrier::Barrier(double level_, double start_) : level(level_), start(start_) {
    if (!std::isfinite(level) || !std::isfinite(start)) {
        fail(ErrorCode::invalid_argument, "barrier level and start must be finite");
    }
    if (!(start < level)) {
        fail(ErrorCode::invalid_argument, "start x must lie strictly below the barrier S");
    }
}

void validate_barrier(const ProcessSpec& spec, const Barrier& barrier) {
    if (!spec.interval.contains(barrier.start)) {
        fail(ErrorCode::invalid_argument, "start x lies outside the state interval");
    }
    if (spec.interval.bounded_above() && barrier.level > spec.interval.upper) {
        fail(ErrorCode::invalid_argument, "barrier S lies outside the state interval");
    }
}

ProcessSpec make_preset(PresetKind kind, const std::map<std::string, double>& params) {
    ProcessSpec spec;
    PresetTag tag{kind, {}};
    switch (kind) {
        case PresetKind::bm_drift: {
            check_known(params, {"mu"}, "bm");
            const double mu = get_param(params, "mu", "bm");
            spec.drift = StateFunction::constant(mu);
            spec.diffusion = StateFunction::constant(1.0);
            tag.params = {{"mu", mu}};
            break;
        }
        case PresetKind::ou: {
            check_known(params, {"mu", "sigma"}, "ou");
            const double mu = get_param(params, "mu", "ou");
            const double sigma = get_param(params, "sigma", "ou");
            require_positive(mu, "mu");
            require_positive(sigma, "sigma");
            spec.drift = StateFunction::affine(0.0, -mu);
            spec.diffusion = StateFunction::constant(sigma);
            tag.params = {{"mu", mu}, {"sigma", sigma}};
            break;
        }
        case PresetKind::cir_quarter:
            check_known(params, {}, "cir4");
            spec.drift = StateFunction::constant(0.25);
            spec.diffusion = StateFunction::sqrt_positive();
            spec.interval = {0.0, std::numeric_limits<double>::infinity()};
            break;
        case PresetKind::wf_conj:
            check_known(params, {}, "wf");
            spec.drift = StateFunction::affine(0.25, -0.5);
            spec.diffusion = StateFunction::sqrt_logistic();
            spec.interval = {0.0, 1.0};
            break;
        case PresetKind::poisson: {
            check_known(params, {"theta"}, "poisson");
            const double theta = get_param(params, "theta", "poisson");
            require_positive(theta, "theta");
            spec.jumps = {{theta, 1.0}};
            tag.params = {{"theta", theta}};
            break;
        }
        case PresetKind::levy: {
            check_known(params, {"beta", "theta"}, "levy");
            const double beta = get_param(params, "beta", "levy");
            const double theta = get_param(params, "theta", "levy");
            require_positive(theta, "theta");
            spec.drift = StateFunction::constant(beta);
            spec.diffusion = StateFunction::constant(1.0);
            spec.jumps = {{theta, 1.0}};
            tag.params = {{"beta", beta}, {"theta", theta}};
            break;
        }
        case PresetKind::custom:
            fail(ErrorCode::invalid_argument, "custom processes are built directly, not via make_preset");
    }
    spec.preset = tag;
    return spec;
}

ProcessSpec parse_preset(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    std::map<std::string, double> params;
    if (colon != std::string::npos) {
        std::stringstream rest(text.substr(colon + 1));
        std::string item;
        while (std::getline(rest, item, ',')) {
            if (item.empty()) continue;
            const auto eq = item.find('=');
            if (eq == std::string::npos) {
                fail(ErrorCode::invalid_argument, "malformed preset parameter '" + item + "'");
            }
            const std::string key = item.substr(0, eq);
            const std::string value = item.substr(eq + 1);
            try {
                std::size_t used = 0;
                params[key] = std::stod(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                fail(ErrorCode::invalid_argument, "malformed number '" + value + "' in preset");
            }
        }
    }
    static const std::map<std::string, PresetKind> names = {
        {"bm", PresetKind::bm_drift},     {"ou", PresetKind::ou},
        {"cir4", PresetKind::cir_quarter}, {"wf", PresetKind::wf_conj},
        {"poisson", PresetKind::poisson},  {"levy", PresetKind::levy},
    };
    auto it = names.find(name);
    if (it == names.end()) fail(ErrorCode::invalid_argument, "unknown preset '" + name + "'");
    return make_preset(it->second, params);
}

double apply_generator(const ProcessSpec& spec, const TestFunction& fn, double x,
                       std::optional<double> h) {
    require(static_cast<bool>(fn.f), ErrorCode::invalid_argument, "test function is empty");
    if (!spec.interval.contains(x)) {
        fail(ErrorCode::invalid_argument, "generator evaluated outside the state interval");
    }
    const double step = h.value_or(std::max(1e-3, 1e-3 * std::abs(x)));
    const auto& f = fn.f;

    double d1 = 0.0;
    double d2 = 0.0;
    const bool need_d1 = !spec.drift.is_zero();
    const bool need_d2 = spec.has_diffusion();
    if (need_d1 || need_d2) {
        const double fp2 = f(x + 2 * step), fp1 = f(x + step);
        const double fm1 = f(x - step), fm2 = f(x - 2 * step);
        if (need_d1) {
            d1 = fn.df ? fn.df(x) : (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * step);
        }
        if (need_d2) {
            d2 = fn.d2f ? fn.d2f(x)
                        : (-fp2 + 16.0 * fp1 - 30.0 * f(x) + 16.0 * fm1 - fm2) / (12.0 * step * step);
        }
    }

    const double sigma = spec.diffusion(x);
    double value = 0.5 * sigma * sigma * d2 + spec.drift(x) * d1;
    if (spec.has_jumps()) {
        const double fx = f(x);
        for (const auto& j : spec.jumps) value += j.rate * (f(x + j.amplitude) - fx);
    }
    return value;
}

ConjugationMap conjugation_map(const ProcessSpec& spec) {
    if (spec.is(PresetKind::cir_quarter)) {
        return {[](double x) { return 2.0 * std::sqrt(std::max(x, 0.0)); },
                [](double y) { return 0.25 * y * y; }};
    }
    if (spec.is(PresetKind::wf_conj)) {
        return {[](double x) { return 2.0 * std::asin(std::sqrt(std::clamp(x, 0.0, 1.0))); },
                [](double y) {
                    const double s = std::sin(0.5 * y);
                    return s * s;
                }};
    }
    if (spec.is(PresetKind::bm_drift) && spec.preset->param("mu") == 0.0) {
        return {[](double x) { return x; }, [](double y) { return y; }};
    }
    fail(ErrorCode::unsupported, "no known conjugation to Brownian motion for " + spec.label());
}

namespace {

double checked_variance(const ProcessSpec& spec, double s) {
    const double sig = spec.diffusion(s);
    const double var = sig * sig;
    if (!(var > 0.0)) fail(ErrorCode::domain, "diffusion coefficient vanishes on the integration path");
    return var;
}

double phi_at(const ProcessSpec& spec, double c, double x) {
    const double exponent = quad::integral(
        [&](double s) { return 2.0 * spec.drift(s) / checked_variance(spec, s); }, c, x);
    return std::exp(-exponent);
}

}  // namespace

ScaleFunctions eval_scale_functions(const ProcessSpec& spec, double c, double x) {
    if (spec.has_jumps()) fail(ErrorCode::invalid_argument, "scale functions need a jump-free process");
    const double phi = phi_at(spec, c, x);
    const double inner = quad::integral(
        [&](double s) { return 2.0 / (checked_variance(spec, s) * phi_at(spec, c, s)); }, c, x);
    return {phi, phi * inner};
}

AttainabilityReport check_attainability(const ProcessSpec& spec, double level, double c) {
    AttainabilityReport report{true, {1e-2, 1e-3, 1e-4}, {}};
    for (double delta : report.deltas) {
        try {
            const double tail = quad::integral(
                [&](double s) { return eval_scale_functions(spec, c, s).xi; }, level - delta, level,
                {1e-6, 1e-14});
            report.tail_integrals.push_back(tail);
        } catch (const Error&) {
            report.attainable = false;
            report.tail_integrals.push_back(std::numeric_limits<double>::infinity());
        }
    }
    if (report.attainable) {
        for (std::size_t i = 1; i < report.tail_integrals.size(); ++i) {
            if (!(std::abs(report.tail_integrals[i]) < std::abs(report.tail_integrals[i - 1]))) {
                report.attainable = false;
            }
        }
    }
    return report;
}

std::optional<double> affine_mean_slope(const ProcessSpec& spec) {
    const bool affine_preset = spec.is(PresetKind::bm_drift) || spec.is(PresetKind::poisson) ||
                               spec.is(PresetKind::levy);
    const bool affine_custom = !spec.preset && spec.drift.is_constant() &&
                               (spec.diffusion.is_constant());
    if (!affine_preset && !affine_custom) return std::nullopt;
    double slope = spec.drift.intercept();
    for (const auto& j : spec.jumps) slope += j.rate * j.amplitude;
    return slope;
}

CrossingCertificate finite_crossing_check(const ProcessSpec& spec, const Barrier& barrier) {
    (void)barrier;  // x < S is guaranteed by Barrier; a positive slope beats any finite gap
    const auto slope = affine_mean_slope(spec);
    if (slope && *slope > 0.0) return CrossingCertificate::holds;
    return CrossingCertificate::unknown;
}

}  // namespace crossarea
