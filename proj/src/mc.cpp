#include "crossarea/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "crossarea/error.hpp"
#include "crossarea/rng.hpp"

namespace crossarea {

void MCConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorCode::invalid_argument, "dt must be positive");
    if (n_paths < 1) fail(ErrorCode::invalid_argument, "n_paths must be at least 1");
    if (!(t_max >= 100.0 * dt)) fail(ErrorCode::invalid_argument, "t_max must be at least 100 dt");
}

double default_t_max(const ProcessSpec& spec, const Barrier& barrier) {
    try {
        if (spec.is(PresetKind::bm_drift) && spec.preset->param("mu") > 0.0) {
            return 50.0 * bm_fpt_moments(barrier, spec.preset->param("mu")).first;
        }
        if (spec.is(PresetKind::poisson)) {
            return 50.0 * poisson_fpt_law(barrier, spec.preset->param("theta")).moments.first;
        }
        if (spec.is(PresetKind::ou)) {
            return 50.0 * ou_mean_fpt(barrier, spec.preset->param("mu"), spec.preset->param("sigma"));
        }
    } catch (const Error&) {
        // fall through to the generic horizon
    }
    return 50.0 * 50.0;
}

namespace {

struct JumpClock {
    double next;
    double rate;
    double amplitude;
    CounterRng rng;
};

class PathSimulator {
  public:
    PathSimulator(const ProcessSpec& spec, const Barrier& barrier, const MCConfig& cfg,
                  std::uint64_t index)
        : spec_(spec),
          level_(barrier.level),
          cfg_(cfg),
          rng_(cfg.seed, index, 0),
          x_(barrier.start),
          minimum_(barrier.start) {
        for (std::size_t k = 0; k < spec.jumps.size(); ++k) {
            const auto& j = spec.jumps[k];
            if (j.rate <= 0.0) continue;
            JumpClock clock{0.0, j.rate, j.amplitude, CounterRng(cfg.seed, index, 1 + k)};
            clock.next = draw_wait(clock);
            clocks_.push_back(clock);
        }
    }

    CrossingSample run() {
        if (!spec_.has_diffusion() && spec_.drift.is_zero()) {
            run_pure_jump();
        } else {
            run_grid();
        }
        return {tau_, area_, minimum_, censored_, floored_};
    }

  private:
    double draw_wait(JumpClock& clock) {
        return boost::random::exponential_distribution<double>(clock.rate)(clock.rng);
    }

    double clamp(double v) const {
        if (!std::isfinite(v)) fail(ErrorCode::domain, "simulated state became non-finite");
        return std::clamp(v, spec_.interval.lower, spec_.interval.upper);
    }

    JumpClock* earliest() {
        JumpClock* best = nullptr;
        for (auto& c : clocks_) {
            if (!best || c.next < best->next) best = &c;
        }
        return best;
    }

    void cross(double t) {
        tau_ = t;
        censored_ = false;
    }

    bool hit_floor(double v, double t) {
        if (cfg_.min_floor && v <= *cfg_.min_floor) {
            tau_ = t;
            censored_ = false;
            floored_ = true;
            return true;
        }
        return false;
    }

    // Straight piece of path from (ta, a) to (tb, b), both times inside one
    // grid step; a < S on entry. Returns true once the path has ended.
    bool segment(double ta, double a, double tb, double b, double sigma) {
        const double span = tb - ta;
        if (b >= level_) {
            const double frac = b > a ? (level_ - a) / (b - a) : 0.0;
            area_ += 0.5 * (a + level_) * frac * span;
            cross(ta + frac * span);
            return true;
        }
        if (cfg_.bridge_correction && sigma > 0.0 && span > 0.0) {
            const double expo = 2.0 * (level_ - a) * (level_ - b) / (sigma * sigma * span);
            if (expo < 40.0 && uniform_(rng_) < std::exp(-expo)) {
                area_ += 0.5 * (a + level_) * 0.5 * span;
                cross(ta + 0.5 * span);
                return true;
            }
        }
        area_ += 0.5 * (a + b) * span;
        minimum_ = std::min(minimum_, b);
        return hit_floor(b, tb);
    }

    void run_grid() {
        const double t_max = cfg_.t_max;
        const double sqrt_dt = std::sqrt(cfg_.dt);
        double t = 0.0;
        while (t < t_max) {
            const double h = std::min(cfg_.dt, t_max - t);
            if (h <= 0.0) break;
            const double drift = spec_.drift(x_);
            const double sigma = spec_.diffusion(x_);
            double inc = drift * h;
            if (sigma != 0.0) inc += sigma * (h == cfg_.dt ? sqrt_dt : std::sqrt(h)) * normal_(rng_);
            const double t_end = t + h;

            double ta = t, a = x_, shift = 0.0;
            while (!clocks_.empty()) {
                JumpClock* c = earliest();
                if (c->next > t_end) break;
                const double te = c->next;
                const double before = clamp(x_ + shift + inc * (te - t) / h);
                if (segment(ta, a, te, before, sigma)) return;
                shift += c->amplitude;
                a = clamp(before + c->amplitude);
                ta = te;
                c->next += draw_wait(*c);
                if (a >= level_) {
                    cross(te);
                    return;
                }
                minimum_ = std::min(minimum_, a);
                if (hit_floor(a, te)) return;
            }
            const double end = clamp(x_ + shift + inc);
            if (segment(ta, a, t_end, end, sigma)) return;
            x_ = end;
            t = t_end;
        }
        tau_ = t_max;
        censored_ = true;
    }

    void run_pure_jump() {
        const double t_max = cfg_.t_max;
        double t = 0.0;
        while (true) {
            JumpClock* c = earliest();
            if (!c || c->next >= t_max) {
                area_ += x_ * (t_max - t);
                tau_ = t_max;
                censored_ = true;
                return;
            }
            const double te = c->next;
            area_ += x_ * (te - t);
            t = te;
            x_ = clamp(x_ + c->amplitude);
            c->next += draw_wait(*c);
            if (x_ >= level_) {
                cross(te);
                return;
            }
            minimum_ = std::min(minimum_, x_);
            if (hit_floor(x_, te)) return;
        }
    }

    const ProcessSpec& spec_;
    double level_;
    const MCConfig& cfg_;
    CounterRng rng_;
    boost::random::normal_distribution<double> normal_;
    boost::random::uniform_01<double> uniform_;
    std::vector<JumpClock> clocks_;

    double x_;
    double tau_ = 0.0;
    double area_ = 0.0;
    double minimum_;
    bool censored_ = true;
    bool floored_ = false;
};

}  // namespace

CrossingSample simulate_path(const ProcessSpec& spec, const Barrier& barrier, const MCConfig& cfg,
                             std::uint64_t path_index) {
    return PathSimulator(spec, barrier, cfg, path_index).run();
}

std::vector<CrossingSample> simulate_paths(const ProcessSpec& spec, const Barrier& barrier,
                                           const MCConfig& cfg, unsigned workers) {
    cfg.validate();
    validate_barrier(spec, barrier);
    std::vector<CrossingSample> samples(cfg.n_paths);
    const std::size_t n_chunks = (cfg.n_paths + kReductionChunk - 1) / kReductionChunk;
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_chunks));

    std::atomic<std::size_t> next_chunk{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto work = [&] {
        try {
            for (std::size_t chunk = next_chunk++; chunk < n_chunks && !failed; chunk = next_chunk++) {
                const std::size_t begin = chunk * kReductionChunk;
                const std::size_t end = std::min(cfg.n_paths, begin + kReductionChunk);
                for (std::size_t i = begin; i < end; ++i) samples[i] = simulate_path(spec, barrier, cfg, i);
            }
        } catch (...) {
            if (!failed.exchange(true)) error = std::current_exception();
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    return samples;
}

double MomentEstimate::z_score(double reference) const {
    if (std_error == 0.0) return value == reference ? 0.0 : std::numeric_limits<double>::infinity();
    return (value - reference) / std_error;
}

double field_value(const CrossingSample& s, Field field) {
    switch (field) {
        case Field::tau: return s.tau;
        case Field::area: return s.area;
        case Field::minimum: return s.minimum;
    }
    return 0.0;
}

const char* to_string(Field field) {
    switch (field) {
        case Field::tau: return "tau";
        case Field::area: return "area";
        case Field::minimum: return "min";
    }
    return "unknown";
}

namespace {

// Sum of g(v_i) over chunks of kReductionChunk values, chunks combined in order.
template <typename G>
double chunked_sum(std::span<const double> v, G g) {
    double total = 0.0;
    for (std::size_t begin = 0; begin < v.size(); begin += kReductionChunk) {
        const std::size_t end = std::min(v.size(), begin + kReductionChunk);
        double partial = 0.0;
        for (std::size_t i = begin; i < end; ++i) partial += g(v[i]);
        total += partial;
    }
    return total;
}

FunctionalStats describe(std::span<const double> v, double censored_fraction) {
    const std::size_t n = v.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (n == 0) {
        MomentEstimate empty{nan, nan, 0, censored_fraction};
        return {empty, empty, empty};
    }
    const double nd = static_cast<double>(n);
    const double mean = chunked_sum(v, [](double x) { return x; }) / nd;
    const double m2 = chunked_sum(v, [mean](double x) { return (x - mean) * (x - mean); }) / nd;
    const double m4 = chunked_sum(v, [mean](double x) {
                          const double d = (x - mean) * (x - mean);
                          return d * d;
                      }) / nd;
    const double second = chunked_sum(v, [](double x) { return x * x; }) / nd;
    const double second_dev =
        chunked_sum(v, [second](double x) { return (x * x - second) * (x * x - second); }) / nd;

    const double unbiased = n > 1 ? m2 * nd / (nd - 1.0) : 0.0;
    const double se_mean = n > 1 ? std::sqrt(unbiased / nd) : 0.0;
    const double se_second = n > 1 ? std::sqrt(second_dev / (nd - 1.0)) : 0.0;
    const double se_var = n > 1 ? std::sqrt(std::max(0.0, m4 - m2 * m2) / nd) : 0.0;
    return {{mean, se_mean, n, censored_fraction},
            {second, se_second, n, censored_fraction},
            {unbiased, se_var, n, censored_fraction}};
}

}  // namespace

CrossingStats summarize(std::span<const CrossingSample> samples) {
    std::vector<double> taus, areas, minima;
    taus.reserve(samples.size());
    areas.reserve(samples.size());
    minima.reserve(samples.size());
    for (const auto& s : samples) {
        minima.push_back(s.minimum);
        if (!s.observed()) continue;
        taus.push_back(s.tau);
        areas.push_back(s.area);
    }
    const double censored = samples.empty()
                                ? 0.0
                                : 1.0 - static_cast<double>(taus.size()) / static_cast<double>(samples.size());
    CrossingStats stats{describe(taus, censored), describe(areas, censored), std::move(minima),
                        samples.size(), taus.size(), censored, censored > 0.5};
    return stats;
}

CrossingStats estimate_crossing_stats(const ProcessSpec& spec, const Barrier& barrier,
                                      const MCConfig& cfg, unsigned workers) {
    const auto samples = simulate_paths(spec, barrier, cfg, workers);
    return summarize(samples);
}

std::vector<CrossingSample> observed_only(std::span<const CrossingSample> samples) {
    std::vector<CrossingSample> out;
    std::copy_if(samples.begin(), samples.end(), std::back_inserter(out),
                 [](const CrossingSample& s) { return s.observed(); });
    return out;
}

LaplaceCurve empirical_lt(std::span<const CrossingSample> samples, Field field,
                          std::span<const double> lambdas) {
    if (samples.empty()) fail(ErrorCode::invalid_argument, "empirical transform of an empty sample");
    for (const auto& s : samples) {
        if (!s.observed()) {
            fail(ErrorCode::invalid_argument, "empirical transform given censored samples; filter first");
        }
    }
    std::vector<double> v;
    v.reserve(samples.size());
    for (const auto& s : samples) v.push_back(field_value(s, field));
    const double nd = static_cast<double>(v.size());
    return make_curve(
        lambdas,
        [&](double lambda) {
            if (lambda == 0.0) return 1.0;
            return chunked_sum(v, [lambda](double a) { return std::exp(-lambda * a); }) / nd;
        },
        CurveLabel::empirical);
}

Histogram histogram(std::span<const CrossingSample> samples, Field field, std::size_t bins, double lo,
                    double hi) {
    if (samples.size() < 2) fail(ErrorCode::invalid_argument, "histogram needs at least two samples");
    if (bins < 1 || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
        fail(ErrorCode::invalid_argument, "histogram range is degenerate");
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<std::size_t> counts(bins, 0);
    for (const auto& s : samples) {
        if (!s.observed()) continue;
        const double v = field_value(s, field);
        if (v < lo || v > hi) continue;
        auto k = static_cast<std::size_t>((v - lo) / width);
        counts[std::min(k, bins - 1)]++;
    }
    Histogram h;
    const double norm = 1.0 / (static_cast<double>(samples.size()) * width);
    for (std::size_t k = 0; k < bins; ++k) {
        h.bin_left.push_back(lo + width * static_cast<double>(k));
        h.bin_right.push_back(k + 1 == bins ? hi : lo + width * static_cast<double>(k + 1));
        h.density.push_back(static_cast<double>(counts[k]) * norm);
    }
    return h;
}

double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf, double lower) {
    if (values.empty()) fail(ErrorCode::invalid_argument, "KS statistic of an empty sample");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    std::size_t below = 0;
    if (std::isfinite(lower)) {
        below = static_cast<std::size_t>(std::upper_bound(values.begin(), values.end(), lower) - values.begin());
        d = std::abs(static_cast<double>(below) / n - cdf(lower));
    }
    for (std::size_t i = below; i < values.size(); ++i) {
        const double f = cdf(values[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double min_law_check(std::span<const CrossingSample> samples, const ProcessSpec& spec,
                     const Barrier& barrier, std::optional<double> floor) {
    std::function<double(double)> cdf;
    if (spec.is(PresetKind::bm_drift)) {
        const double mu = spec.preset->param("mu");
        cdf = [=](double z) { return bm_min_cdf(z, barrier, mu); };
    } else if (spec.is(PresetKind::ou)) {
        const double mu = spec.preset->param("mu"), sigma = spec.preset->param("sigma");
        cdf = [=](double z) { return ou_min_cdf(z, barrier, mu, sigma); };
    } else {
        fail(ErrorCode::unsupported, "no closed-form minimum law for " + spec.label());
    }
    std::vector<double> minima;
    minima.reserve(samples.size());
    for (const auto& s : samples) minima.push_back(s.minimum);
    return ks_statistic(std::move(minima), cdf,
                        floor.value_or(-std::numeric_limits<double>::infinity()));
}

}  // namespace crossarea
