#include "crossarea/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crossarea/error.hpp"

namespace crossarea {

Grid1D::Grid1D(double lo, double hi, std::size_t n) : x_min(lo), x_max(hi), n_nodes(n) {
    require(n >= 3, ErrorCode::invalid_argument, "grid needs at least 3 nodes");
    require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, ErrorCode::invalid_argument,
            "grid bounds must be finite with x_min < x_max");
}

Grid1D Grid1D::with_spacing(double lo, double hi, double h) {
    require(h > 0.0 && std::isfinite(h), ErrorCode::invalid_argument, "grid spacing must be positive");
    require(lo < hi, ErrorCode::invalid_argument, "grid bounds must satisfy x_min < x_max");
    const double cells = (hi - lo) / h;
    auto n = static_cast<std::size_t>(std::llround(cells));
    if (std::abs(cells - static_cast<double>(n)) > 1e-9 * std::max(1.0, cells)) {
        n = static_cast<std::size_t>(std::ceil(cells));
    }
    n = std::max<std::size_t>(n, 2);
    return Grid1D(hi - static_cast<double>(n) * h, hi, n + 1);
}

double Grid1D::node(std::size_t i) const {
    if (i + 1 == n_nodes) return x_max;
    return x_min + static_cast<double>(i) * h();
}

std::vector<double> Grid1D::nodes() const {
    std::vector<double> out(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) out[i] = node(i);
    return out;
}

std::size_t Grid1D::nearest(double x) const {
    const double pos = std::round((x - x_min) / h());
    return static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(n_nodes - 1)));
}

double default_x_min(const ProcessSpec& spec, double level) {
    double mu_eff = 1.0;
    if (spec.preset) {
        switch (spec.preset->kind) {
            case PresetKind::bm_drift: mu_eff = std::abs(spec.preset->param("mu")); break;
            case PresetKind::ou: mu_eff = spec.preset->param("mu"); break;
            case PresetKind::levy:
                mu_eff = std::abs(spec.preset->param("beta") + spec.preset->param("theta"));
                break;
            case PresetKind::poisson: mu_eff = spec.preset->param("theta"); break;
            default: break;
        }
    }
    const double width = mu_eff > 0.0 ? std::max(30.0, 10.0 / mu_eff) : 30.0;
    return std::max(level - width, spec.interval.lower);
}

Grid1D default_grid(const ProcessSpec& spec, double level, double h) {
    return Grid1D::with_spacing(default_x_min(spec, level), level, h);
}

const char* to_string(LeftBC kind) {
    switch (kind) {
        case LeftBC::dirichlet_zero: return "dirichlet-zero";
        case LeftBC::polynomial_match: return "polynomial-match";
        case LeftBC::natural: return "natural";
    }
    return "unknown";
}

double BVPSolution::value_at(double x) const {
    require(x >= grid.x_min - 1e-12 && x <= grid.x_max + 1e-12, ErrorCode::domain,
            "query point outside the grid");
    const double h = grid.h();
    const std::size_t near = grid.nearest(x);
    if (std::abs(x - grid.node(near)) <= 1e-12 * std::max(1.0, std::abs(x))) return values[near];
    const auto n = grid.n_nodes;
    auto left = static_cast<std::size_t>(std::clamp(std::floor((x - grid.x_min) / h), 0.0,
                                                    static_cast<double>(n - 2)));
    std::size_t first = left == 0 ? 0 : left - 1;
    if (first + 4 > n) first = n >= 4 ? n - 4 : 0;
    const std::size_t count = std::min<std::size_t>(4, n);
    double sum = 0.0;
    for (std::size_t i = first; i < first + count; ++i) {
        double li = 1.0;
        for (std::size_t j = first; j < first + count; ++j) {
            if (j != i) li *= (x - grid.node(j)) / (grid.node(i) - grid.node(j));
        }
        sum += li * values[i];
    }
    return sum;
}

bool BVPSolution::has_flag(const std::string& flag) const {
    return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

Weight Weight::polynomial(std::vector<double> coeffs) {
    require(!coeffs.empty(), ErrorCode::invalid_argument, "polynomial weight needs coefficients");
    Weight w;
    w.fn = [coeffs](double x) {
        double v = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
        return v;
    };
    w.poly = std::move(coeffs);
    return w;
}

Weight Weight::custom(std::function<double(double)> fn) {
    require(static_cast<bool>(fn), ErrorCode::invalid_argument, "weight function is empty");
    Weight w;
    w.fn = std::move(fn);
    return w;
}

namespace {

// Matrix with one subdiagonal and `upper` superdiagonals, solved by Gaussian
// elimination without pivoting. The fill-in stays inside the band.
class BandedSystem {
  public:
    BandedSystem(std::size_t n, std::size_t upper)
        : n_(n), upper_(upper), width_(upper + 2), a_(n * (upper + 2), 0.0), rhs_(n, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return a_[i * width_ + (j + 1 - i)]; }
    double at(std::size_t i, std::size_t j) const { return a_[i * width_ + (j + 1 - i)]; }
    double& rhs(std::size_t i) { return rhs_[i]; }
    std::size_t size() const { return n_; }
    std::size_t upper() const { return upper_; }

    std::size_t col_end(std::size_t i) const { return std::min(n_, i + upper_ + 1); }

    std::vector<double> solve() const {
        BandedSystem w = *this;
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            const double piv = w.at(i, i);
            check_pivot(w, i, piv);
            const double sub = w.at(i + 1, i);
            if (sub == 0.0) continue;
            const double f = sub / piv;
            w.at(i + 1, i) = 0.0;
            for (std::size_t j = i + 1; j < w.col_end(i); ++j) w.at(i + 1, j) -= f * w.at(i, j);
            w.rhs_[i + 1] -= f * w.rhs_[i];
        }
        check_pivot(w, n_ - 1, w.at(n_ - 1, n_ - 1));
        std::vector<double> x(n_);
        for (std::size_t k = n_; k-- > 0;) {
            double s = w.rhs_[k];
            for (std::size_t j = k + 1; j < w.col_end(k); ++j) s -= w.at(k, j) * x[j];
            x[k] = s / w.at(k, k);
        }
        return x;
    }

    /// max |Ax - b| / max (Σ|A||x| + |b|) over the given rows.
    double residual(const std::vector<double>& x, std::size_t first, std::size_t last) const {
        double worst = 0.0, scale = 0.0;
        for (std::size_t i = first; i < last; ++i) {
            double r = -rhs_[i], mag = std::abs(rhs_[i]);
            const std::size_t lo = i == 0 ? 0 : i - 1;
            for (std::size_t j = lo; j < col_end(i); ++j) {
                r += at(i, j) * x[j];
                mag += std::abs(at(i, j) * x[j]);
            }
            worst = std::max(worst, std::abs(r));
            scale = std::max(scale, mag);
        }
        return scale > 0.0 ? worst / scale : worst;
    }

  private:
    static void check_pivot(const BandedSystem& w, std::size_t i, double piv) {
        double row = 0.0;
        for (std::size_t j = i; j < w.col_end(i); ++j) row = std::max(row, std::abs(w.at(i, j)));
        if (!(std::abs(piv) > 1e-13 * row) || !std::isfinite(piv)) {
            std::ostringstream os;
            os << "singular system: pivot " << piv << " at row " << i;
            fail(ErrorCode::singular, os.str());
        }
    }

    std::size_t n_;
    std::size_t upper_;
    std::size_t width_;
    std::vector<double> a_;
    std::vector<double> rhs_;
};

struct LeftCondition {
    LeftBC kind;
    double value = 0.0;  // for dirichlet_zero and polynomial_match
};

// Second-order operator a2 u'' + a1 u' + c0 u (+ θ u(x + 1) when shift > 0)
// assembled on the grid with Dirichlet data at S and the given left condition.
struct Assembly {
    const Grid1D& grid;
    std::function<double(double)> a2, a1, c0, rhs;
    LeftCondition left;
    double right_value;
    std::size_t shift = 0;  // nodes per unit jump, 0 for none
    double theta = 0.0;
    double outer = 0.0;
};

BVPSolution solve_assembly(const Assembly& as) {
    const std::size_t n = as.grid.n_nodes;
    const double h = as.grid.h();
    const std::size_t upper = std::max<std::size_t>(2, as.shift);
    BandedSystem sys(n, upper);
    bool upwinded = false;

    if (as.left.kind == LeftBC::natural) {
        sys.at(0, 0) = 1.0;
        sys.at(0, 1) = -2.0;
        sys.at(0, 2) = 1.0;
    } else {
        sys.at(0, 0) = 1.0;
        sys.rhs(0) = as.left.value;
    }
    sys.at(n - 1, n - 1) = 1.0;
    sys.rhs(n - 1) = as.right_value;

    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double x = as.grid.node(i);
        const double a2 = as.a2(x), a1 = as.a1(x);
        require(a2 >= 0.0 && std::isfinite(a2), ErrorCode::domain, "negative or non-finite diffusion");
        require(a2 > 0.0 || as.shift > 0, ErrorCode::domain,
                "diffusion coefficient vanishes inside the grid");
        double lower = a2 / (h * h), diag = -2.0 * a2 / (h * h) + as.c0(x), up = a2 / (h * h);
        if (std::abs(a1) * h > 2.0 * a2) {
            upwinded = true;
            if (a1 > 0.0) {
                up += a1 / h;
                diag -= a1 / h;
            } else {
                lower -= a1 / h;
                diag += a1 / h;
            }
        } else {
            lower -= a1 / (2.0 * h);
            up += a1 / (2.0 * h);
        }
        double r = as.rhs(x);
        if (as.shift > 0) {
            diag -= as.theta;
            if (i + as.shift < n - 1) {
                sys.at(i, i + as.shift) += as.theta;
            } else {
                r -= as.theta * as.outer;
            }
        }
        sys.at(i, i - 1) = lower;
        sys.at(i, i) += diag;
        sys.at(i, i + 1) += up;
        sys.rhs(i) = r;
    }

    std::vector<double> v = sys.solve();
    BVPSolution sol{as.grid, v, sys.residual(v, 1, n - 1), as.left.kind, {}};
    if (upwinded) sol.flags.emplace_back("upwind");
    if (sol.residual_norm > 1e-8) sol.flags.emplace_back("residual");
    return sol;
}

// Polynomials as ascending coefficient vectors.
using Poly = std::vector<double>;

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

double poly_eval(const Poly& p, double x) {
    double v = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
    return v;
}

// Polynomial P with ½s P'' + μ P' = R and P(S) = 0 (μ != 0).
Poly particular_solution(const Poly& r, double s, double mu, double level) {
    const std::size_t d = r.size();
    Poly q(d, 0.0);
    for (std::size_t k = d; k-- > 0;) {
        const double next = k + 1 < d ? 0.5 * s * static_cast<double>(k + 1) * q[k + 1] : 0.0;
        q[k] = (r[k] - next) / mu;
    }
    Poly p(d + 1, 0.0);
    for (std::size_t k = 0; k < d; ++k) p[k + 1] = q[k] / static_cast<double>(k + 1);
    p[0] = -poly_eval(p, level);
    return p;
}

// Polynomial moment T_n of the BM preset selected by the μ → ∞ rule.
Poly bm_polynomial_moment(double mu, double s, const Poly& u, int n, double level) {
    Poly t{1.0};
    for (int k = 1; k <= n; ++k) {
        Poly r = poly_mul(u, t);
        for (auto& c : r) c *= -static_cast<double>(k);
        t = particular_solution(r, s, mu, level);
    }
    return t;
}

void reject_jumps(const ProcessSpec& spec) {
    require(!spec.has_jumps(), ErrorCode::unsupported,
            "diffusion solver called with jumps; use the differential-difference solver");
}

void check_grid_end(const Grid1D& grid, double level) {
    require(std::abs(grid.x_max - level) <= 1e-12 * std::max(1.0, std::abs(level)),
            ErrorCode::invalid_argument, "grid must end at the barrier");
}

std::function<double(double)> half_variance(const ProcessSpec& spec) {
    return [d = spec.diffusion](double x) {
        const double s = d(x);
        return 0.5 * s * s;
    };
}

}  // namespace

BVPSolution solve_lt_bvp(const ProcessSpec& spec, const Weight& U, double lambda, const Grid1D& grid) {
    reject_jumps(spec);
    require(lambda > 0.0 && std::isfinite(lambda), ErrorCode::invalid_argument, "lambda must be positive");
    Assembly as{grid,
                half_variance(spec),
                [b = spec.drift](double x) { return b(x); },
                [&U, lambda](double x) { return -lambda * U(x); },
                [](double) { return 0.0; },
                {LeftBC::dirichlet_zero, 0.0},
                1.0};
    BVPSolution sol = solve_assembly(as);
    const auto [lo, hi] = std::minmax_element(sol.values.begin(), sol.values.end());
    if (*lo < -1e-10 || *hi > 1.0 + 1e-10) {
        std::ostringstream os;
        os << "transform solution leaves [0, 1]: range [" << *lo << ", " << *hi << "]";
        fail(ErrorCode::domain, os.str());
    }
    return sol;
}

BVPSolution solve_moment_bvp(const ProcessSpec& spec, const Weight& U, int n, const Grid1D& grid,
                             const BVPSolution* prev, std::optional<LeftBC> left) {
    reject_jumps(spec);
    require(n == 1 || n == 2, ErrorCode::invalid_argument, "moment order must be 1 or 2");
    require(n == 1 || prev != nullptr, ErrorCode::invalid_argument, "second moment needs T_1");
    if (prev) {
        require(prev->grid.n_nodes == grid.n_nodes && prev->grid.x_min == grid.x_min &&
                    prev->grid.x_max == grid.x_max,
                ErrorCode::invalid_argument, "previous moment lives on a different grid");
    }
    const double level = grid.x_max;

    const bool bm = spec.is(PresetKind::bm_drift) && spec.drift.is_constant() &&
                    spec.diffusion.is_constant();
    const bool poly_ok = bm && U.poly && spec.drift.intercept() != 0.0;
    const LeftBC kind = left.value_or(poly_ok ? LeftBC::polynomial_match : LeftBC::natural);
    LeftCondition lc{kind, 0.0};
    if (kind == LeftBC::polynomial_match) {
        require(poly_ok, ErrorCode::unsupported,
                "polynomial-match needs BM with nonzero drift and a polynomial weight");
        const double s = spec.diffusion.intercept() * spec.diffusion.intercept();
        const Poly p = bm_polynomial_moment(spec.drift.intercept(), s, *U.poly, n, level);
        lc.value = poly_eval(p, grid.x_min);
    }

    std::vector<double> source(grid.n_nodes);
    for (std::size_t i = 0; i < grid.n_nodes; ++i) {
        const double x = grid.node(i);
        source[i] = -static_cast<double>(n) * U(x) * (prev ? prev->values[i] : 1.0);
    }
    const double h = grid.h(), x0 = grid.x_min;
    Assembly as{grid,
                half_variance(spec),
                [b = spec.drift](double x) { return b(x); },
                [](double) { return 0.0; },
                [&source, h, x0](double x) {
                    return source[static_cast<std::size_t>(std::llround((x - x0) / h))];
                },
                lc,
                0.0};
    BVPSolution sol = solve_assembly(as);

    bool nonnegative_weight = true;
    for (std::size_t i = 0; i < grid.n_nodes; ++i) nonnegative_weight &= U(grid.node(i)) >= 0.0;
    if (n % 2 == 0 || nonnegative_weight) {
        const auto negative = std::count_if(sol.values.begin() + 1, sol.values.end() - 1,
                                            [](double v) { return v < 0.0; });
        if (static_cast<double>(negative) > 0.01 * static_cast<double>(grid.n_nodes - 2)) {
            sol.flags.emplace_back("moment may not exist");
        }
    }
    return sol;
}

BVPSolution solve_min_bvp(const ProcessSpec& spec, double z, double level, const Grid1D& grid) {
    reject_jumps(spec);
    require(z < level, ErrorCode::invalid_argument, "minimum level must lie below the barrier");
    check_grid_end(grid, level);
    require(std::abs(grid.x_min - z) <= 1e-12 * std::max(1.0, std::abs(z)), ErrorCode::invalid_argument,
            "minimum grid must start at z");
    Assembly as{grid,
                half_variance(spec),
                [b = spec.drift](double x) { return b(x); },
                [](double) { return 0.0; },
                [](double) { return 0.0; },
                {LeftBC::dirichlet_zero, 1.0},
                0.0};
    BVPSolution sol = solve_assembly(as);
    sol.values.front() = 1.0;
    sol.values.back() = 0.0;
    for (std::size_t i = 0; i < sol.values.size(); ++i) {
        if (sol.values[i] < -1e-10 || sol.values[i] > 1.0 + 1e-10) {
            sol.flags.emplace_back("maximum principle");
            break;
        }
    }
    for (std::size_t i = 1; i < sol.values.size(); ++i) {
        if (sol.values[i] > sol.values[i - 1] + 1e-10) {
            sol.flags.emplace_back("non-monotone");
            break;
        }
    }
    return sol;
}

const char* to_string(LevyProblem problem) {
    switch (problem) {
        case LevyProblem::fpt_lt: return "fpt-lt";
        case LevyProblem::area_lt: return "area-lt";
        case LevyProblem::mean_fpt: return "mean-fpt";
        case LevyProblem::mean_area: return "mean-area";
    }
    return "unknown";
}

LevyProblem parse_levy_problem(const std::string& text) {
    for (auto p : {LevyProblem::fpt_lt, LevyProblem::area_lt, LevyProblem::mean_fpt, LevyProblem::mean_area}) {
        if (text == to_string(p)) return p;
    }
    fail(ErrorCode::invalid_argument, "unknown problem '" + text + "'");
}

BVPSolution solve_pdde_levy(double beta, double theta, double lambda, LevyProblem problem,
                            const Grid1D& grid, double diffusion_variance) {
    require(theta > 0.0, ErrorCode::invalid_argument, "theta must be positive");
    require(diffusion_variance >= 0.0, ErrorCode::invalid_argument, "diffusion variance must be >= 0");
    const double h = grid.h();
    const double m_real = 1.0 / h;
    const auto m = static_cast<std::size_t>(std::llround(m_real));
    require(m >= 1 && std::abs(static_cast<double>(m) * h - 1.0) <= 1e-9, ErrorCode::invalid_argument,
            "grid spacing must be 1/m for an integer m");
    require(grid.x_max - grid.x_min >= 2.0 - 1e-12, ErrorCode::invalid_argument,
            "grid must extend at least one jump plus one unit of buffer below the barrier");

    const bool laplace = problem == LevyProblem::fpt_lt || problem == LevyProblem::area_lt;
    const bool area = problem == LevyProblem::area_lt || problem == LevyProblem::mean_area;
    if (laplace) require(lambda >= 0.0, ErrorCode::invalid_argument, "lambda must be >= 0");
    auto u = [area](double x) { return area ? x : 1.0; };

    Assembly as{grid,
                [s = 0.5 * diffusion_variance](double) { return s; },
                [beta](double) { return beta; },
                [laplace, lambda, u](double x) { return laplace ? -lambda * u(x) : 0.0; },
                [laplace, u](double x) { return laplace ? 0.0 : -u(x); },
                {laplace ? LeftBC::dirichlet_zero : LeftBC::natural, 0.0},
                laplace ? 1.0 : 0.0,
                m,
                theta,
                laplace ? 1.0 : 0.0};
    BVPSolution sol = solve_assembly(as);
    if (laplace) {
        const auto [lo, hi] = std::minmax_element(sol.values.begin(), sol.values.end());
        if (*lo < -1e-10 || *hi > 1.0 + 1e-10) sol.flags.emplace_back("maximum principle");
    }
    return sol;
}

TruncationCheck truncation_check(const std::function<BVPSolution(const Grid1D&)>& solve,
                                 const Grid1D& grid, double x, double extension, double tolerance) {
    require(extension > 0.0, ErrorCode::invalid_argument, "extension must be positive");
    const double h = grid.h();
    const double cells = std::round(extension / h);
    const Grid1D wider(grid.x_min - cells * h, grid.x_max, grid.n_nodes + static_cast<std::size_t>(cells));
    const double a = solve(grid).value_at(x);
    const double b = solve(wider).value_at(x);
    return {a, b, std::abs(a - b), std::abs(a - b) < tolerance};
}

RefinementStudy grid_refine_study(const std::function<double(double)>& value_at_h,
                                  const std::vector<double>& hs, std::optional<double> exact) {
    require(hs.size() >= 3, ErrorCode::invalid_argument, "refinement study needs at least 3 levels");
    for (std::size_t i = 1; i < hs.size(); ++i) {
        require(hs[i] < hs[i - 1] && hs[i] > 0.0, ErrorCode::invalid_argument,
                "spacings must be positive and strictly decreasing");
    }
    RefinementStudy study;
    for (double h : hs) study.levels.push_back({h, value_at_h(h), 0.0, std::nullopt});

    auto& lv = study.levels;
    const std::size_t k = lv.size();
    std::vector<double> errs;
    if (exact) {
        for (auto& l : lv) errs.push_back(l.error = std::abs(l.value - *exact));
    } else {
        for (std::size_t i = 0; i + 1 < k; ++i) errs.push_back(lv[i].error = lv[i].value - lv[i + 1].value);
        lv[k - 1].error = std::numeric_limits<double>::quiet_NaN();
    }

    study.monotone = true;
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
        const bool same_sign = exact.has_value() || (errs[i] > 0.0) == (errs[i + 1] > 0.0);
        if (!same_sign || !(std::abs(errs[i + 1]) < std::abs(errs[i])) || errs[i + 1] == 0.0) {
            study.monotone = false;
        }
    }
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
        if (errs[i] != 0.0 && errs[i + 1] != 0.0) {
            lv[i].order = std::log(std::abs(errs[i] / errs[i + 1])) / std::log(hs[i] / hs[i + 1]);
        }
    }
    if (study.monotone && lv[errs.size() - 2].order) study.observed_order = lv[errs.size() - 2].order;
    return study;
}

}  // namespace crossarea
