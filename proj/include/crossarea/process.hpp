#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace crossarea {

/// Real function of the state with fast paths for the coefficient shapes the
/// presets need. Evaluation is a switch, not a virtual call, because the Monte
/// Carlo inner loop evaluates drift and diffusion once per step.
class StateFunction {
  public:
    enum class Kind { affine, sqrt_positive, sqrt_logistic, custom };

    StateFunction() = default;  // identically zero

    static StateFunction constant(double c) { return affine(c, 0.0); }
    /// a + b x
    static StateFunction affine(double a, double b);
    /// scale * sqrt(max(x, 0))
    static StateFunction sqrt_positive(double scale = 1.0);
    /// sqrt(max(x (1 - x), 0))
    static StateFunction sqrt_logistic();
    static StateFunction custom(std::function<double(double)> fn);

    double operator()(double x) const {
        switch (kind_) {
            case Kind::affine: return a_ + b_ * x;
            case Kind::sqrt_positive: return x > 0.0 ? a_ * std::sqrt(x) : 0.0;
            case Kind::sqrt_logistic: {
                const double v = x * (1.0 - x);
                return v > 0.0 ? std::sqrt(v) : 0.0;
            }
            case Kind::custom: return fn_(x);
        }
        return 0.0;
    }

    Kind kind() const { return kind_; }
    bool is_affine() const { return kind_ == Kind::affine; }
    bool is_constant() const { return kind_ == Kind::affine && b_ == 0.0; }
    bool is_zero() const { return is_constant() && a_ == 0.0; }
    /// Only meaningful for affine functions.
    double intercept() const { return a_; }
    double slope() const { return b_; }

  private:
    Kind kind_ = Kind::affine;
    double a_ = 0.0;
    double b_ = 0.0;
    std::function<double(double)> fn_;
};

/// One stream of fixed-amplitude jumps arriving at Poisson rate `rate`.
struct Jump {
    double rate;       // θ_i >= 0
    double amplitude;  // ε_i
};

struct StateInterval {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return x >= lower && x <= upper; }
    bool bounded_below() const { return std::isfinite(lower); }
    bool bounded_above() const { return std::isfinite(upper); }
};

enum class PresetKind { custom, bm_drift, ou, cir_quarter, wf_conj, poisson, levy };

struct PresetTag {
    PresetKind kind = PresetKind::custom;
    std::map<std::string, double> params;

    double param(const std::string& name) const;
    /// CLI form, e.g. "ou:mu=1,sigma=1"; round-trips through parse_preset.
    std::string to_string() const;
};

struct ProcessSpec {
    StateFunction drift;
    StateFunction diffusion;
    std::vector<Jump> jumps;
    StateInterval interval;
    std::optional<PresetTag> preset;

    double total_jump_intensity() const;
    bool has_jumps() const { return total_jump_intensity() > 0.0; }
    bool has_diffusion() const { return !diffusion.is_zero(); }
    bool is(PresetKind kind) const { return preset && preset->kind == kind; }
    std::string label() const { return preset ? preset->to_string() : "custom"; }
};

/// Start x strictly below barrier level S.
struct Barrier {
    double level;
    double start;

    Barrier(double level, double start);
    double gap() const { return level - start; }
};

void validate_barrier(const ProcessSpec& spec, const Barrier& barrier);

ProcessSpec make_preset(PresetKind kind, const std::map<std::string, double>& params = {});

/// Parses "bm:mu=1.0", "ou:mu=1,sigma=1", "poisson:theta=2", "levy:beta=0.5,theta=1",
/// "cir4", "wf".
ProcessSpec parse_preset(const std::string& text);

struct TestFunction {
    std::function<double(double)> f;
    std::function<double(double)> df;   // optional
    std::function<double(double)> d2f;  // optional
};

/// (L f)(x) = ½σ²f'' + b f' + Σ θ_i [f(x+ε_i) - f(x)]. Missing derivatives are
/// taken by fourth-order central differences with step `h`
/// (default max(1e-3, 1e-3 |x|)).
double apply_generator(const ProcessSpec& spec, const TestFunction& fn, double x,
                       std::optional<double> h = std::nullopt);

struct ConjugationMap {
    std::function<double(double)> forward;
    std::function<double(double)> inverse;
};

/// u with X(t) = u⁻¹(B_t + u(x₀)) for CIR_QUARTER, WF_CONJ and driftless BM.
ConjugationMap conjugation_map(const ProcessSpec& spec);

struct ScaleFunctions {
    double phi;
    double xi;
};

/// φ(x) = exp(-∫_c^x 2b/σ²), ξ(x) = φ(x) ∫_c^x 2/(σ²φ). Diffusions only.
ScaleFunctions eval_scale_functions(const ProcessSpec& spec, double c, double x);

struct AttainabilityReport {
    bool attainable;
    std::vector<double> deltas;
    std::vector<double> tail_integrals;  // ∫_{S-δ}^{S} ξ
};

/// Integrates ξ over [S-δ, S] for δ in {1e-2, 1e-3, 1e-4}.
AttainabilityReport check_attainability(const ProcessSpec& spec, double level, double c);

enum class CrossingCertificate { holds, unknown };

/// Sufficient condition for P(τ_S < ∞) = 1 via the affine mean path. Conservative:
/// anything it cannot decide is `unknown`.
CrossingCertificate finite_crossing_check(const ProcessSpec& spec, const Barrier& barrier);

/// Slope of the mean path for presets with affine mean, if any.
std::optional<double> affine_mean_slope(const ProcessSpec& spec);

}  // namespace crossarea
