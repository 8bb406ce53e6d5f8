#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/bessel.hpp>

#include "relkac/specfun.hpp"
#include "relkac/verify.hpp"

using namespace relkac;

namespace {

constexpr double kPi = 3.14159265358979323846;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Point axis(int d, double r) {
  Point p = Point::Zero(d);
  p[0] = r;
  return p;
}

}  // namespace

TEST_CASE("bessel_k against Boost and frozen high-precision values") {
  // Reference values computed to 30 digits and frozen.
  struct Row {
    double nu, x, value;
  };
  const Row rows[] = {{0.5, 1.0, 0.46106850444789456},     {1.0, 1.0, 0.60190723019723457},
                      {0.0, 0.1, 2.4270690247020166},      {1.5, 2.5, 0.091092320415613985},
                      {2.0, 0.01, 19999.50006838941},      {2.5, 40.0, 9.0660051518106025e-19},
                      {1.0, 1e-3, 999.99623815608555},     {3.5, 7.0, 0.00095334765937837541}};
  for (const Row& r : rows) {
    CHECK(rel(bessel_k(r.nu, r.x), r.value) <= 1e-12);
    CHECK(rel(bessel_k(r.nu, r.x), boost::math::cyl_bessel_k(r.nu, r.x)) <= 1e-12);
  }
  // Half-integer closed form.
  CHECK(rel(bessel_k(0.5, 1.0), std::sqrt(kPi / 2.0) * std::exp(-1.0)) <= 1e-14);
  // Scaled form and the large-argument branch.
  for (double x : {3.0, 50.0, 2e6, 1e9})
    CHECK(rel(bessel_k_scaled(1.5, x), std::sqrt(kPi / (2.0 * x)) * (1.0 + 1.0 / x)) <= 1e-12);
  // Small-argument growth Gamma(nu)/2 (2/tau)^nu.
  CHECK(rel(bessel_k(1.0, 1e-6), 1e6) <= 1e-6);
}

TEST_CASE("quadrature oracle for K agrees with Boost") {
  for (double nu : {0.0, 1.0, 2.5})
    for (double x : {0.01, 0.7, 9.0}) CHECK(rel(bessel_k_by_quadrature(nu, x), boost::math::cyl_bessel_k(nu, x)) <= 1e-11);
}

TEST_CASE("levy_density closed forms") {
  CHECK(rel(levy_density(1.0, {0.0, 1}), 1.0 / kPi) <= 1e-14);
  CHECK(rel(levy_density(2.0, {0.0, 1}), 1.0 / (4.0 * kPi)) <= 1e-14);
  // 2 (1/2pi) K_1(1)
  CHECK(rel(levy_density(1.0, {1.0, 1}), boost::math::cyl_bessel_k(1.0, 1.0) / kPi) <= 1e-12);
  CHECK(rel(levy_density(1.0, {1.0, 1}), 0.19159302193728243) <= 1e-12);
  CHECK(rel(levy_density(0.5, {1.0, 2}), 1.1583882315606469) <= 1e-12);
  CHECK(rel(levy_density(2.0, {1.0, 3}), 0.0032139048366777384) <= 1e-12);
  CHECK(rel(levy_density(0.3, {2.0, 2}), 5.1760642791534672) <= 1e-12);
  CHECK_THROWS_AS(levy_density(0.0, {1.0, 1}), DomainError);
}

TEST_CASE("free_kernel closed forms") {
  CHECK(rel(free_kernel(0.0, 1.0, {0.0, 1}), 1.0 / kPi) <= 1e-14);
  CHECK(rel(free_kernel(0.0, 1.0, {1.0, 1}), std::exp(1.0) * boost::math::cyl_bessel_k(1.0, 1.0) / kPi) <= 1e-12);
  CHECK(rel(free_kernel(0.0, 1.0, {1.0, 1}), 0.52080382999167005) <= 1e-12);
  CHECK(rel(free_kernel(axis(2, 0.7), 0.2, {1.0, 2}), 0.084075713962320915) <= 1e-12);
  CHECK(rel(free_kernel(axis(3, 1.5), 2.0, {1.0, 3}), 0.014549337404136489) <= 1e-12);
  CHECK(rel(free_kernel(axis(2, 0.5), 0.5, {0.0, 2}), 0.22507907903927652) <= 1e-12);
  CHECK_THROWS_AS(free_kernel(1.0, 0.0, {1.0, 1}), DomainError);
}

TEST_CASE("kernel over t approaches the Levy density") {
  const LevyLimitReport a = kernel_to_levy_limit(axis(1, 1.0), {0.0, 1}, {1e-2, 1e-3, 1e-4});
  CHECK(a.converged);
  CHECK(rel(a.rows.back().ratio, 1.0 / kPi) <= 1e-3);
  const LevyLimitReport b = kernel_to_levy_limit(axis(1, 1.0), {1.0, 1}, {1e-2, 1e-3, 1e-4});
  CHECK(b.converged);
  CHECK(rel(b.rows.back().ratio, 0.19159302193728243) <= 1e-3);
  // Gamma(3/2) / pi^{3/2} / 0.5^3
  const LevyLimitReport c = kernel_to_levy_limit(axis(2, 0.5), {0.0, 2}, {1e-2, 1e-3, 1e-4});
  CHECK(rel(c.target, std::tgamma(1.5) / std::pow(kPi, 1.5) / 0.125) <= 1e-14);
  CHECK(c.converged);
}

TEST_CASE("relativistic symbol is cancellation free") {
  CHECK(relativistic_symbol(0.0, 1.0) == 0.0);
  CHECK(rel(relativistic_symbol(1e-6, 1.0), 0.5e-12) <= 1e-9);
  CHECK(rel(relativistic_symbol(3.0, 4.0), 1.0) <= 1e-15);
}

TEST_CASE("subordinator Laplace transform and density") {
  CHECK(rel(subordinator_laplace(1.5, 1.0, 1.0), std::exp(-1.0)) <= 1e-14);
  CHECK(rel(subordinator_laplace(0.5, 1.0, 0.0), std::exp(-1.0)) <= 1e-14);
  // Drift term vanishes at s = t / m.
  CHECK(rel(subordinator_density(1.0, 1.0, 1.0), 1.0 / std::sqrt(2.0 * kPi)) <= 1e-14);
  CHECK(rel(subordinator_density(1.0, 1.0, 0.0), 0.24197072451914335) <= 1e-14);
  CHECK(rel(subordinator_density(0.3, 0.5, 2.0), 1.1938779926721318) <= 1e-13);
  CHECK(subordinator_density(1e-300, 1.0, 1.0) == 0.0);
  CHECK(subordinator_density(1e300, 1.0, 0.0) == 0.0);
  // Stable-1/2 density with transform exp(-t sqrt(sigma)).
  CHECK(rel(fractional_power_density(1.0, 1.0), std::exp(-0.25) / (2.0 * std::sqrt(kPi))) <= 1e-14);
  CHECK(rel(fractional_power_density(1.0, 1.0), 0.219695644733861) <= 1e-12);
}

TEST_CASE("characteristic exponent on the principal branch") {
  CHECK(char_exponent(0.0, 1.0) == Complex(0.0, 0.0));
  CHECK(std::abs(char_exponent(1.0, 0.0) - Complex(1.0, -1.0)) <= 1e-14);
  const Complex v11(0.272019649514068964, -0.786151377757423286);
  CHECK(std::abs(char_exponent(1.0, 1.0) - v11) <= 1e-14);
  for (double rho : {-3.0, -0.2, 0.4, 5.0})
    for (double m : {0.0, 0.3, 2.0}) {
      const Complex v = char_exponent(rho, m);
      CHECK(v.real() >= 0.0);
      CHECK(std::abs(v - (std::sqrt(Complex(m * m, -2.0 * rho)) - m)) <= 1e-13);
    }
  // m = 0: sqrt|rho| (1 - i sgn rho)
  CHECK(std::abs(char_exponent(-4.0, 0.0) - Complex(2.0, 2.0)) <= 1e-14);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(bessel_k(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(bessel_k(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(subordinator_density(-1.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(levy_density(1.0, {-1.0, 1}), DomainError);
}
