#pragma once

#include <functional>

namespace crossarea::quad {

struct Tolerance {
    double relative = 1e-10;
    double absolute = 1e-14;
};

struct Result {
    double value;
    double error;  // estimated absolute error
};

/// Adaptive Gauss-Kronrod (15/31) integration of f over [a, b].
/// Either limit may be infinite. Throws Error{not_converged} if the error
/// estimate does not meet max(tol.absolute, tol.relative * |value|).
Result integrate(const std::function<double(double)>& f, double a, double b,
                 Tolerance tol = {});

/// Convenience: value only.
double integral(const std::function<double(double)>& f, double a, double b,
                Tolerance tol = {});

}  // namespace crossarea::quad
