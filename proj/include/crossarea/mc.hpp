#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "crossarea/closed_forms.hpp"
#include "crossarea/process.hpp"

namespace crossarea {

struct MCConfig {
    double dt = 1e-3;
    std::size_t n_paths = 10000;
    double t_max = 50.0;
    std::uint64_t seed = 1;
    bool bridge_correction = true;
    /// Stop a path as soon as it reaches this level. Only the minimum law is
    /// informative for such paths (for z above the floor).
    std::optional<double> min_floor;

    void validate() const;
};

/// 50 × the closed-form mean crossing time when one exists, else 50 × 50.
double default_t_max(const ProcessSpec& spec, const Barrier& barrier);

struct CrossingSample {
    double tau;      // crossing time, or t_max when censored
    double area;     // ∫ X dt up to tau
    double minimum;  // running minimum at grid nodes and jump landings
    bool censored;   // horizon reached before crossing
    bool floored = false;

    bool observed() const { return !censored && !floored; }
};

/// One Euler-Maruyama path with exact exponential jump clocks. Path i draws
/// from counter streams (seed, i, lane): lane 0 for the diffusion, lane 1+k
/// for jump stream k.
CrossingSample simulate_path(const ProcessSpec& spec, const Barrier& barrier, const MCConfig& cfg,
                             std::uint64_t path_index);

/// All n_paths samples, indexed by path. `workers == 0` uses the hardware
/// concurrency. Output does not depend on the worker count.
std::vector<CrossingSample> simulate_paths(const ProcessSpec& spec, const Barrier& barrier,
                                           const MCConfig& cfg, unsigned workers = 0);

struct MomentEstimate {
    double value;
    double std_error;
    std::size_t n_effective;
    double censored_fraction;

    double z_score(double reference) const;
};

struct FunctionalStats {
    MomentEstimate mean;
    MomentEstimate second;    // raw second moment
    MomentEstimate variance;  // unbiased sample variance
};

struct CrossingStats {
    FunctionalStats tau;
    FunctionalStats area;
    std::vector<double> minima;  // every path, censored ones included
    std::size_t n_paths;
    std::size_t n_observed;
    double censored_fraction;
    bool unreliable;  // censored_fraction > 0.5
};

inline constexpr std::size_t kReductionChunk = 4096;

/// Chunked fixed-order reduction over observed samples.
CrossingStats summarize(std::span<const CrossingSample> samples);

CrossingStats estimate_crossing_stats(const ProcessSpec& spec, const Barrier& barrier,
                                      const MCConfig& cfg, unsigned workers = 0);

enum class Field { tau, area, minimum };
double field_value(const CrossingSample& s, Field field);
const char* to_string(Field field);

/// Mean of exp(-λ·field) over the samples. All samples must be observed.
LaplaceCurve empirical_lt(std::span<const CrossingSample> samples, Field field,
                          std::span<const double> lambdas);

std::vector<CrossingSample> observed_only(std::span<const CrossingSample> samples);

struct Histogram {
    std::vector<double> bin_left;
    std::vector<double> bin_right;
    std::vector<double> density;  // normalized by the total sample count
};

Histogram histogram(std::span<const CrossingSample> samples, Field field, std::size_t bins,
                    double lo, double hi);

/// sup_z |F_n(z) - F(z)| over z >= lower.
double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf,
                    double lower = -std::numeric_limits<double>::infinity());

/// KS distance between the empirical minimum law and the closed form for the
/// preset (BM with drift, OU). With a floor, only z >= floor is compared.
double min_law_check(std::span<const CrossingSample> samples, const ProcessSpec& spec,
                     const Barrier& barrier, std::optional<double> floor = std::nullopt);

}  // namespace crossarea
