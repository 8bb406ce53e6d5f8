#pragma once

#include <vector>

#include "relkac/types.hpp"

namespace relkac {

// Modified Bessel function of the second kind K_nu(x), nu >= 0, x > 0.
double bessel_k(double nu, double x);
// e^x K_nu(x); avoids underflow for large x.
double bessel_k_scaled(double nu, double x);

// Surface area of the unit sphere S^{d-1}.
double sphere_area(int d);

// Levy density n(y) of the relativistic symbol, as a function of r = |y| > 0.
double levy_density(double r, const MassDim& md);
double levy_density(const Point& y, const MassDim& md);

// Transition density k0(y, t) of the free relativistic process.
double free_kernel(double r, double t, const MassDim& md);
double free_kernel(const Point& y, double t, const MassDim& md);

struct LevyLimitRow {
  double t;
  double ratio;      // k0(y,t)/t
  double rel_error;  // |ratio - n(y)| / n(y)
};

struct LevyLimitReport {
  double target;  // n(y)
  std::vector<LevyLimitRow> rows;
  double tolerance;
  bool converged;  // last row within tolerance and errors nonincreasing
};

LevyLimitReport kernel_to_levy_limit(const Point& y, const MassDim& md,
                                     const std::vector<double>& t_seq,
                                     double tolerance = 1e-3);

// sqrt(|xi|^2 + m^2) - m, evaluated without cancellation.
double relativistic_symbol(double xi_norm, double m);
double relativistic_symbol(const Point& xi, double m);

// E[exp(-sigma T(t))] for the subordinator with exponent sqrt(2 sigma + m^2) - m.
double subordinator_laplace(double sigma, double t, double m);

// Density of T(t): first-passage time of unit Brownian motion with drift m
// to level t. At m = 0 this is the one-sided stable-1/2 law.
double subordinator_density(double s, double t, double m);

// One-sided stable-1/2 density with Laplace transform exp(-t sqrt(sigma)).
// Related to subordinator_density(., t, 0) by the time scaling T = 2 kappa.
double fractional_power_density(double kappa, double t);

// Characteristic exponent V(rho) with E[exp(i rho T(t))] = exp(-t V(rho)).
Complex char_exponent(double rho, double m);

}  // namespace relkac
