#pragma once

#include <functional>

namespace aniso::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
};

using Integrand = std::function<double(double)>;

// Finite interval, tolerant of integrable endpoint singularities (tanh-sinh).
Result finite(const Integrand& f, double a, double b, double rel_tol = 1e-12);

// Smooth integrand on a finite interval (adaptive Gauss-Kronrod 31).
Result smooth(const Integrand& f, double a, double b, double rel_tol = 1e-12);

// Non-adaptive 30-point Gauss-Legendre; error is the difference to the 20-point rule.
// For smooth integrands whose values carry roundoff noise that defeats adaptivity.
Result gauss_fixed(const Integrand& f, double a, double b);

// \int_a^\infty f(r) dr for a > 0 through the substitution r = a e^u.
Result log_tail(const Integrand& f, double a, double rel_tol = 1e-12);

// \int_0^\infty f(s) cos(omega s) ds and the sine analogue, for slowly decaying f.
// Relative tolerance is fixed at 1e-10.
Result fourier_cos(const Integrand& f, double omega);
Result fourier_sin(const Integrand& f, double omega);

}  // namespace aniso::quad
