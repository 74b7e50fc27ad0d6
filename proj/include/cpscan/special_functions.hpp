#pragma once

namespace cpscan {

// Standard normal distribution function.
double normal_cdf(double z);

// Upper tail 1 - Phi(z), computed without cancellation.
double normal_sf(double z);

// Inverse of the standard normal distribution function for p in (0, 1).
// Wichura's AS241 (PPND16), relative accuracy about 1e-16.
double normal_quantile(double p);

// Regularized incomplete beta function I_x(a, b), a, b > 0, x in [0, 1].
// Continued fraction evaluated by the modified Lentz method.
double incomplete_beta(double a, double b, double x);

// Two-sided tail probability P(|T| >= |t|) of Student's t with df degrees
// of freedom.
double student_t_two_sided(double t, double df);

// Student's t distribution function P(T <= t).
double student_t_cdf(double t, double df);

}  // namespace cpscan
