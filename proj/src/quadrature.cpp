#include "crossarea/quadrature.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "crossarea/error.hpp"

namespace crossarea::quad {

Result integrate(const std::function<double(double)>& f, double a, double b, Tolerance tol) {
    if (a == b) return {0.0, 0.0};
    if (std::isnan(a) || std::isnan(b)) fail(ErrorCode::invalid_argument, "quadrature: NaN limit");

    double error = 0.0;
    double l1 = 0.0;
    const unsigned max_depth = 20;
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double value;
    if (std::isfinite(a) && std::isfinite(b)) {
        // Boost 1.74 leaves the local error estimate unscaled by the half-width,
        // so finite intervals are mapped onto [-1, 1] here.
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        value = GK::integrate([&](double t) { return f(mid + half * t) * half; }, -1.0, 1.0, max_depth,
                              tol.relative, &error, &l1);
    } else {
        value = GK::integrate(f, a, b, max_depth, tol.relative, &error, &l1);
    }

    if (!std::isfinite(value)) fail(ErrorCode::not_converged, "quadrature: non-finite result");
    // Boost measures relative error against the L1 norm of f; accept that or
    // the absolute floor.
    const double budget = std::max(tol.absolute, tol.relative * std::max(std::abs(value), l1));
    if (error > 10.0 * budget) {
        std::ostringstream os;
        os << "quadrature on [" << a << ", " << b << "] did not converge (error estimate "
           << error << ", budget " << budget << ")";
        fail(ErrorCode::not_converged, os.str());
    }
    return {value, error};
}

double integral(const std::function<double(double)>& f, double a, double b, Tolerance tol) {
    return integrate(f, a, b, tol).value;
}

}  // namespace crossarea::quad
