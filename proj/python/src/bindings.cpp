#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "crossarea/bvp.hpp"
#include "crossarea/closed_forms.hpp"
#include "crossarea/commands.hpp"
#include "crossarea/error.hpp"
#include "crossarea/mc.hpp"
#include "crossarea/special_functions.hpp"

namespace py = pybind11;
using namespace crossarea;

namespace {

py::dict moments_dict(const MomentPair& p) {
    py::dict d;
    d["mean"] = p.first;
    d["second"] = p.second;
    d["variance"] = p.variance;
    return d;
}

py::dict solution_dict(const BVPSolution& s) {
    py::dict d;
    d["x"] = py::array_t<double>(py::cast(s.grid.nodes()));
    d["values"] = py::array_t<double>(py::cast(s.values));
    d["residual_norm"] = s.residual_norm;
    d["left_bc"] = to_string(s.left_bc_kind);
    d["flags"] = s.flags;
    return d;
}

py::dict estimate_dict(const MomentEstimate& e) {
    py::dict d;
    d["value"] = e.value;
    d["stderr"] = e.std_error;
    d["n_effective"] = e.n_effective;
    return d;
}

Weight weight_from(const std::vector<double>& coeffs) { return Weight::polynomial(coeffs); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "First-crossing time, area and minimum of jump-diffusions";
    m.attr("__version__") = kToolVersion;

    static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            error((std::string(to_string(e.code())) + ": " + e.what()).c_str());
        }
    });

    py::class_<ProcessSpec>(m, "Process")
        .def_property_readonly("label", &ProcessSpec::label)
        .def_property_readonly("has_jumps", &ProcessSpec::has_jumps)
        .def("drift", [](const ProcessSpec& s, double x) { return s.drift(x); })
        .def("diffusion", [](const ProcessSpec& s, double x) { return s.diffusion(x); })
        .def("__repr__", [](const ProcessSpec& s) { return "<Process " + s.label() + ">"; });
    m.def("parse_preset", &parse_preset, py::arg("text"));

    // Closed forms. Barriers are passed as (S, x).
    m.def("bm_fpt_lt", [](double lambda, double S, double x, double mu) { return bm_fpt_lt(lambda, {S, x}, mu); },
          py::arg("lam"), py::arg("S"), py::arg("x"), py::arg("mu"));
    m.def("bm_fpt_density", [](double t, double S, double x, double mu) { return bm_fpt_density(t, {S, x}, mu); },
          py::arg("t"), py::arg("S"), py::arg("x"), py::arg("mu"));
    m.def("bm_fpt_moments", [](double S, double x, double mu) { return moments_dict(bm_fpt_moments({S, x}, mu)); },
          py::arg("S"), py::arg("x"), py::arg("mu"));
    m.def("bm_area_mean", [](double S, double x, double mu) { return bm_area_mean({S, x}, mu); }, py::arg("S"),
          py::arg("x"), py::arg("mu"));
    m.def("bm_area_second", [](double S, double x, double mu) { return bm_area_second({S, x}, mu); }, py::arg("S"),
          py::arg("x"), py::arg("mu"));
    m.def("bm_area_lt_driftless", [](double lambda, double S, double x) { return bm_area_lt_driftless(lambda, {S, x}); },
          py::arg("lam"), py::arg("S"), py::arg("x"));
    m.def("bm_min_cdf", [](double z, double S, double x, double mu) { return bm_min_cdf(z, {S, x}, mu); },
          py::arg("z"), py::arg("S"), py::arg("x"), py::arg("mu"));
    m.def(
        "poisson_fpt_law",
        [](double S, double x, double theta) {
            const auto law = poisson_fpt_law({S, x}, theta);
            py::dict d = moments_dict(law.moments);
            d["shape"] = law.shape;
            d["rate"] = law.rate;
            return d;
        },
        py::arg("S"), py::arg("x"), py::arg("theta"));
    m.def("poisson_area_moments",
          [](double S, double x, double theta) { return moments_dict(poisson_area_moments({S, x}, theta)); },
          py::arg("S"), py::arg("x"), py::arg("theta"));
    m.def("poisson_area_lt", [](double lambda, double S, double x, double theta) {
        return poisson_area_lt(lambda, {S, x}, theta);
    }, py::arg("lam"), py::arg("S"), py::arg("x"), py::arg("theta"));
    m.def("ou_mean_fpt", [](double S, double x, double mu, double sigma) { return ou_mean_fpt({S, x}, mu, sigma); },
          py::arg("S"), py::arg("x"), py::arg("mu"), py::arg("sigma"));
    m.def("ou_min_cdf", [](double z, double S, double x, double mu, double sigma) {
        return ou_min_cdf(z, {S, x}, mu, sigma);
    }, py::arg("z"), py::arg("S"), py::arg("x"), py::arg("mu"), py::arg("sigma"));

    m.def("airy_ai", &airy_ai, py::arg("z"));
    m.def("airy_ai_prime", &airy_ai_prime, py::arg("z"));
    m.def("normal_cdf", &normal_cdf, py::arg("x"));
    m.def("gamma_lt", &gamma_lt, py::arg("mean"), py::arg("variance"), py::arg("lam"));

    // Monte Carlo.
    m.def(
        "simulate",
        [](const ProcessSpec& spec, double S, double x, double dt, std::size_t paths, std::uint64_t seed,
           std::optional<double> t_max, bool bridge, unsigned workers) {
            const Barrier barrier(S, x);
            MCConfig cfg;
            cfg.dt = dt;
            cfg.n_paths = paths;
            cfg.seed = seed;
            cfg.bridge_correction = bridge;
            cfg.t_max = t_max.value_or(default_t_max(spec, barrier));
            std::vector<CrossingSample> samples;
            {
                py::gil_scoped_release release;
                samples = simulate_paths(spec, barrier, cfg, workers);
            }
            py::array_t<double> tau(samples.size()), area(samples.size()), minimum(samples.size());
            py::array_t<bool> censored(samples.size());
            auto t = tau.mutable_unchecked<1>();
            auto a = area.mutable_unchecked<1>();
            auto mn = minimum.mutable_unchecked<1>();
            auto c = censored.mutable_unchecked<1>();
            for (std::size_t i = 0; i < samples.size(); ++i) {
                t(i) = samples[i].tau;
                a(i) = samples[i].area;
                mn(i) = samples[i].minimum;
                c(i) = !samples[i].observed();
            }
            const auto stats = summarize(samples);
            py::dict d;
            d["tau"] = tau;
            d["area"] = area;
            d["min"] = minimum;
            d["censored"] = censored;
            d["tau_mean"] = estimate_dict(stats.tau.mean);
            d["tau_second"] = estimate_dict(stats.tau.second);
            d["area_mean"] = estimate_dict(stats.area.mean);
            d["area_second"] = estimate_dict(stats.area.second);
            d["area_variance"] = estimate_dict(stats.area.variance);
            d["censored_fraction"] = stats.censored_fraction;
            d["unreliable"] = stats.unreliable;
            return d;
        },
        py::arg("process"), py::arg("S"), py::arg("x"), py::arg("dt") = 1e-3, py::arg("paths") = 10000,
        py::arg("seed") = 1, py::arg("t_max") = py::none(), py::arg("bridge") = true, py::arg("workers") = 0);

    // Boundary value problems. Weights are polynomial coefficients in ascending powers.
    m.def(
        "solve_lt",
        [](const ProcessSpec& spec, double S, double lambda, std::vector<double> weight, double h,
           std::optional<double> x_min) {
            const Grid1D g = Grid1D::with_spacing(x_min.value_or(default_x_min(spec, S)), S, h);
            return solution_dict(solve_lt_bvp(spec, weight_from(weight), lambda, g));
        },
        py::arg("process"), py::arg("S"), py::arg("lam"), py::arg("weight") = std::vector<double>{1.0},
        py::arg("h") = 1e-3, py::arg("x_min") = py::none());
    m.def(
        "solve_moment",
        [](const ProcessSpec& spec, double S, int n, std::vector<double> weight, double h,
           std::optional<double> x_min) {
            const Grid1D g = Grid1D::with_spacing(x_min.value_or(default_x_min(spec, S)), S, h);
            const Weight U = weight_from(weight);
            const BVPSolution first = solve_moment_bvp(spec, U, 1, g);
            return solution_dict(n == 1 ? first : solve_moment_bvp(spec, U, n, g, &first));
        },
        py::arg("process"), py::arg("S"), py::arg("n") = 1, py::arg("weight") = std::vector<double>{1.0},
        py::arg("h") = 1e-3, py::arg("x_min") = py::none());
    m.def(
        "solve_min",
        [](const ProcessSpec& spec, double z, double S, double h) {
            return solution_dict(solve_min_bvp(spec, z, S, Grid1D::with_spacing(z, S, h)));
        },
        py::arg("process"), py::arg("z"), py::arg("S"), py::arg("h") = 1e-4);
    m.def(
        "solve_levy",
        [](double beta, double theta, double S, const std::string& problem, double lambda, double h,
           double x_min) {
            return solution_dict(
                solve_pdde_levy(beta, theta, lambda, parse_levy_problem(problem), Grid1D::with_spacing(x_min, S, h)));
        },
        py::arg("beta"), py::arg("theta"), py::arg("S"), py::arg("problem"), py::arg("lam") = 0.0,
        py::arg("h") = 1e-2, py::arg("x_min") = -30.0);

    // Command layer, as used by the CLI.
    m.def(
        "run_command",
        [](const std::string& command, const std::string& preset, const std::string& quantity, double S, double x,
           std::uint64_t seed, double dt, std::size_t paths, std::vector<double> lambdas,
           std::optional<double> z, std::optional<std::string> out_dir, unsigned workers) {
            CommandOptions o;
            o.preset = preset;
            o.quantity = quantity;
            o.level = S;
            o.start = x;
            o.seed = seed;
            o.dt = dt;
            o.paths = paths;
            o.lambdas = std::move(lambdas);
            o.z = z;
            o.workers = workers;
            if (out_dir) o.out_dir = *out_dir;
            CommandResult r;
            {
                py::gil_scoped_release release;
                r = run_command(command, o);
            }
            py::dict d;
            d["exit_code"] = r.exit_code;
            d["csv"] = r.table.str();
            d["warnings"] = r.warnings;
            std::vector<std::string> files;
            for (const auto& f : r.files) files.push_back(f.string());
            d["files"] = files;
            return d;
        },
        py::arg("command"), py::arg("preset") = "", py::arg("quantity") = "", py::arg("S") = 2.0,
        py::arg("x") = 1.0, py::arg("seed") = 1, py::arg("dt") = 1e-3, py::arg("paths") = 10000,
        py::arg("lambdas") = std::vector<double>{}, py::arg("z") = py::none(), py::arg("out_dir") = py::none(),
        py::arg("workers") = 0);
}
