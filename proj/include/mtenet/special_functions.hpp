#ifndef MTENET_SPECIAL_FUNCTIONS_HPP
#define MTENET_SPECIAL_FUNCTIONS_HPP

namespace mtenet {

// log Gamma(x) for x > 0. Lanczos approximation, relative accuracy ~1e-14.
double log_gamma(double x);

// Psi(x) = d/dx log Gamma(x) for x > 0. Recurrence into the asymptotic
// range followed by the Bernoulli series; relative accuracy ~1e-14.
double digamma(double x);

// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1],
// evaluated by the modified-Lentz continued fraction.
double reg_incomplete_beta(double a, double b, double x);

}  // namespace mtenet

#endif  // MTENET_SPECIAL_FUNCTIONS_HPP
