#include "relkac/specfun.hpp"

#include <cmath>
#include <numbers>

namespace relkac {

namespace {

constexpr double kPi = std::numbers::pi;

// Coefficients of 1/Gamma(1+z) = sum c_k z^k.
constexpr double kC2 = -0.6558780715202538;
constexpr double kC3 = -0.0420026350340952;
constexpr double kC4 = 0.1665386113822915;
constexpr double kC5 = -0.0421977345555443;
constexpr double kC6 = -0.0096219715278770;

// gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu), gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2.
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
  gampl = 1.0 / std::tgamma(1.0 + mu);
  gammi = 1.0 / std::tgamma(1.0 - mu);
  if (std::abs(mu) < 1e-3) {
    const double mu2 = mu * mu;
    gam1 = -(std::numbers::egamma + kC3 * mu2 + kC5 * mu2 * mu2);
    gam2 = 1.0 + kC2 * mu2 + kC4 * mu2 * mu2 + kC6 * mu2 * mu2 * mu2;
  } else {
    gam1 = (gammi - gampl) / (2.0 * mu);
    gam2 = (gammi + gampl) / 2.0;
  }
}

// Returns e^x K_nu(x). Temme's series for x < 2, Steed's continued
// fraction otherwise, then upward recurrence from |mu| <= 1/2.
double bessel_k_scaled_impl(double nu, double x) {
  constexpr int kMaxIter = 100000;
  constexpr double kEps = 1e-16;
  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;
  const double mu2 = mu * mu;
  const double xi2 = 2.0 / x;
  double kmu = 0.0;
  double k1 = 0.0;
  if (x < 2.0) {
    const double x2 = 0.5 * x;
    const double pimu = kPi * mu;
    const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    temme_gammas(mu, gam1, gam2, gampl, gammi);
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    int i = 1;
    for (; i <= kMaxIter; ++i) {
      ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu2);
      c *= d / i;
      p /= i - mu;
      q /= i + mu;
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - i * ff);
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i > kMaxIter) throw QuadratureFailure("bessel_k: series did not converge");
    const double ex = std::exp(x);
    kmu = sum * ex;
    k1 = sum1 * xi2 * ex;
  } else if (x > 1e6) {
    // Hankel asymptotic series; three terms reach double precision here.
    auto hankel = [x](double order) {
      const double m4 = 4.0 * order * order;
      double term = 1.0, sum = 1.0;
      for (int k = 1; k <= 3; ++k) {
        term *= (m4 - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * x);
        sum += term;
      }
      return std::sqrt(kPi / (2.0 * x)) * sum;
    };
    kmu = hankel(mu);
    k1 = hankel(mu + 1.0);
  } else {
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    int i = 1;
    for (; i < kMaxIter; ++i) {
      a -= 2 * i;
      c = -a * c / (i + 1.0);
      const double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0;
      d = 1.0 / (b + a * d);
      delh = (b * d - 1.0) * delh;
      h += delh;
      const double dels = q * delh;
      s += dels;
      if (std::abs(dels / s) < kEps) break;
    }
    if (i >= kMaxIter) throw QuadratureFailure("bessel_k: continued fraction did not converge");
    h = a1 * h;
    kmu = std::sqrt(kPi / (2.0 * x)) / s;
    k1 = kmu * (mu + x + 0.5 - h) / x;
  }
  for (int i = 1; i <= nl; ++i) {
    const double next = (mu + i) * xi2 * k1 + kmu;
    kmu = k1;
    k1 = next;
  }
  return kmu;
}

void check_md(const MassDim& md) { md.validate(); }

}  // namespace

double bessel_k_scaled(double nu, double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k: argument must be > 0");
  if (!(nu >= 0.0)) throw DomainError("bessel_k: order must be >= 0");
  if (std::isinf(x)) return 0.0;
  return bessel_k_scaled_impl(nu, x);
}

double bessel_k(double nu, double x) { return bessel_k_scaled(nu, x) * std::exp(-x); }

double sphere_area(int d) {
  const double h = 0.5 * d;
  return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

double levy_density(double r, const MassDim& md) {
  check_md(md);
  if (!(r > 0.0)) throw DomainError("levy_density: |y| must be > 0");
  const double nu = 0.5 * (md.d + 1);
  if (md.m == 0.0) return std::tgamma(nu) / std::pow(kPi, nu) / std::pow(r, md.d + 1);
  const double mr = md.m * r;
  return 2.0 * std::pow(md.m / (2.0 * kPi), nu) * bessel_k_scaled(nu, mr) * std::exp(-mr) /
         std::pow(r, nu);
}

double levy_density(const Point& y, const MassDim& md) { return levy_density(y.norm(), md); }

double free_kernel(double r, double t, const MassDim& md) {
  check_md(md);
  if (!(t > 0.0)) throw DomainError("free_kernel: t must be > 0");
  r = std::abs(r);
  const double nu = 0.5 * (md.d + 1);
  const double s = std::hypot(r, t);
  if (md.m == 0.0) return std::tgamma(nu) / std::pow(kPi, nu) * t / std::pow(s, md.d + 1);
  // e^{mt} K_nu(ms) = e^{m(t-s)} [e^{ms} K_nu(ms)]
  return 2.0 * std::pow(md.m / (2.0 * kPi), nu) * t * std::exp(md.m * (t - s)) *
         bessel_k_scaled(nu, md.m * s) / std::pow(s, nu);
}

double free_kernel(const Point& y, double t, const MassDim& md) {
  return free_kernel(y.norm(), t, md);
}

LevyLimitReport kernel_to_levy_limit(const Point& y, const MassDim& md,
                                     const std::vector<double>& t_seq, double tolerance) {
  LevyLimitReport rep;
  rep.target = levy_density(y, md);
  rep.tolerance = tolerance;
  bool monotone = true;
  for (double t : t_seq) {
    const double ratio = free_kernel(y, t, md) / t;
    const double err = std::abs(ratio - rep.target) / rep.target;
    if (!rep.rows.empty() && err > rep.rows.back().rel_error * (1.0 + 1e-9) + 1e-14) monotone = false;
    rep.rows.push_back({t, ratio, err});
  }
  rep.converged = !rep.rows.empty() && monotone && rep.rows.back().rel_error <= tolerance;
  return rep;
}

double relativistic_symbol(double xi_norm, double m) {
  const double x2 = xi_norm * xi_norm;
  if (x2 == 0.0) return 0.0;
  return x2 / (std::sqrt(x2 + m * m) + m);
}

double relativistic_symbol(const Point& xi, double m) { return relativistic_symbol(xi.norm(), m); }

double subordinator_laplace(double sigma, double t, double m) {
  if (!(sigma >= 0.0) || !(t >= 0.0)) throw DomainError("subordinator_laplace: sigma, t must be >= 0");
  if (sigma == 0.0) return 1.0;
  const double expo = 2.0 * sigma / (std::sqrt(2.0 * sigma + m * m) + m);
  return std::exp(-t * expo);
}

double subordinator_density(double s, double t, double m) {
  if (!(s > 0.0) || !(t > 0.0)) throw DomainError("subordinator_density: s, t must be > 0");
  const double z = t - m * s;
  // Log form avoids inf * 0 at extreme s.
  return std::exp(std::log(t) - 0.5 * std::log(2.0 * kPi) - 1.5 * std::log(s) - z * z / (2.0 * s));
}

double fractional_power_density(double kappa, double t) {
  if (!(kappa > 0.0) || !(t > 0.0)) throw DomainError("fractional_power_density: kappa, t must be > 0");
  return t / (2.0 * std::sqrt(kPi)) * std::pow(kappa, -1.5) * std::exp(-t * t / (4.0 * kappa));
}

Complex char_exponent(double rho, double m) {
  if (rho == 0.0) return {0.0, 0.0};
  const double m2 = m * m;
  const double r = std::sqrt(m2 * m2 + 4.0 * rho * rho);
  const double q = std::sqrt(m2 + r);
  const double re = 2.0 * std::numbers::sqrt2 * rho * rho / ((q + std::numbers::sqrt2 * m) * (m2 + r));
  const double im = -std::numbers::sqrt2 * rho / q;
  return {re, im};
}

}  // namespace relkac
