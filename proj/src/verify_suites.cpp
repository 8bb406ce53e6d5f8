// Module invariant suites.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relkac/actions.hpp"
#include "relkac/estimator.hpp"
#include "relkac/lattice.hpp"
#include "relkac/paths.hpp"
#include "relkac/specfun.hpp"
#include "verify_common.hpp"

namespace relkac {

using detail::cjson;
using detail::ComplexMoments;
using detail::finish;
using detail::nanmax;
using detail::RealMoments;
using detail::start_check;
using detail::Stopwatch;
using detail::stream_of;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// ---- specfun -------------------------------------------------------------

CheckResult specfun_spot_values() {
  Stopwatch sw;
  CheckResult r = start_check("specfun.spot_values", "closed-form and quadrature spot values");
  constexpr double kTol = 1e-10;
  const double e = std::numbers::e;
  const double k1 = bessel_k_by_quadrature(1.0, 1.0);
  struct Row {
    const char* name;
    double value, expect;
  };
  const std::vector<Row> rows{
      {"K_0.5(1)", bessel_k(0.5, 1.0), std::sqrt(kPi / 2.0) / e},
      {"K_1(1)", bessel_k(1.0, 1.0), k1},
      {"n(1; m=0, d=1)", levy_density(1.0, {0.0, 1}), 1.0 / kPi},
      {"n(2; m=0, d=1)", levy_density(2.0, {0.0, 1}), 1.0 / (4.0 * kPi)},
      {"n(1; m=1, d=1)", levy_density(1.0, {1.0, 1}), k1 / kPi},
      {"k0(0, 1; m=0, d=1)", free_kernel(0.0, 1.0, {0.0, 1}), 1.0 / kPi},
      {"k0(0, 1; m=1, d=1)", free_kernel(0.0, 1.0, {1.0, 1}), e * k1 / kPi},
      {"symbol(sqrt 3, 1)", relativistic_symbol(std::sqrt(3.0), 1.0), 1.0},
      {"symbol(1, 0)", relativistic_symbol(1.0, 0.0), 1.0},
      {"laplace(1.5, 1, 1)", subordinator_laplace(1.5, 1.0, 1.0), 1.0 / e},
      {"laplace(0.5, 1, 0)", subordinator_laplace(0.5, 1.0, 0.0), 1.0 / e},
      {"laplace(0, 1, 1)", subordinator_laplace(0.0, 1.0, 1.0), 1.0},
      {"density(1, 1, 1)", subordinator_density(1.0, 1.0, 1.0), 1.0 / std::sqrt(2.0 * kPi)},
      {"fractional(1, 1)", fractional_power_density(1.0, 1.0), std::exp(-0.25) / (2.0 * std::sqrt(kPi))},
  };
  bool ok = true;
  json out = json::array();
  for (const Row& row : rows) {
    const double err = rel(row.value, row.expect);
    ok = ok && err <= kTol;
    out.push_back({{"name", row.name}, {"value", row.value}, {"expected", row.expect}, {"rel_error", err}});
  }
  const Complex v10 = char_exponent(1.0, 0.0), v11 = char_exponent(1.0, 1.0), v01 = char_exponent(0.0, 1.0);
  const Complex v11_ref = std::sqrt(Complex(1.0, -2.0)) - 1.0;
  const double cerr = std::max({std::abs(v10 - Complex(1.0, -1.0)), std::abs(v11 - v11_ref), std::abs(v01)});
  ok = ok && cerr <= kTol;
  r.detail["values"] = out;
  r.detail["char_exponent_max_error"] = cerr;
  return finish(r, sw, ok);
}

CheckResult specfun_bessel_grid() {
  Stopwatch sw;
  CheckResult r = start_check("specfun.bessel_accuracy", "K_nu against its integral representation");
  constexpr double kTol = 1e-10;
  double worst = 0.0;
  int n = 0;
  for (double nu : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.5})
    for (int i = 0; i <= 24; ++i) {
      const double tau = 1e-3 * std::pow(10.0, 4.7 * i / 24.0);
      worst = nanmax(worst, rel(bessel_k(nu, tau), bessel_k_by_quadrature(nu, tau)));
      ++n;
    }
  r.detail["points"] = n;
  r.detail["max_rel_error"] = worst;
  r.detail["tolerance"] = kTol;
  return finish(r, sw, worst <= kTol);
}

CheckResult specfun_chapman_kolmogorov() {
  Stopwatch sw;
  CheckResult r = start_check("specfun.chapman_kolmogorov", "kernel convolution property, d = 1");
  constexpr double kTol = 1e-5;
  boost::math::quadrature::sinh_sinh<double> ss;
  double worst = 0.0;
  for (double m : {0.0, 1.0})
    for (double gap : {0.0, 0.7, 2.0}) {
      const MassDim md{m, 1};
      const double s = 0.3, t = 0.5;
      auto f = [&](double z) { return free_kernel(z, s, md) * free_kernel(gap - z, t, md); };
      const double lhs = ss.integrate(f, 1e-12);
      worst = nanmax(worst, std::abs(lhs - free_kernel(gap, s + t, md)));
    }
  r.detail["max_error"] = worst;
  r.detail["tolerance"] = kTol;
  return finish(r, sw, worst <= kTol);
}

CheckResult specfun_levy_integrability() {
  Stopwatch sw;
  CheckResult r = start_check("specfun.levy_integrability", "int |y|^2 / (1 + |y|^2) n(y) dy is finite");
  boost::math::quadrature::exp_sinh<double> tail;
  bool ok = true;
  json rows = json::array();
  for (int d : {1, 2, 3})
    for (double m : {0.0, 1.0}) {
      const MassDim md{m, d};
      auto f = [&](double rad) {
        if (!(rad > 0.0)) return 0.0;
        const double n = levy_density(rad, md);
        return n == 0.0 ? 0.0 : std::pow(rad, d - 1) * n / (1.0 + 1.0 / (rad * rad));
      };
      double err_head = 0.0;
      const double head = GK::integrate(f, 0.0, 1.0, 25, 1e-12, &err_head);
      double err_tail = 0.0;
      const double rest = tail.integrate(f, 1.0, std::numeric_limits<double>::infinity(), 1e-12, &err_tail);
      const double shell = d == 1 ? 2.0 : sphere_area(d);
      const double total = shell * (head + rest);
      const bool pass = std::isfinite(total) && total > 0.0 && err_head < 1e-8 && err_tail < 1e-8;
      ok = ok && pass;
      rows.push_back({{"d", d}, {"m", m}, {"integral", total}, {"pass", pass}});
    }
  r.detail["rows"] = rows;
  return finish(r, sw, ok);
}

CheckResult specfun_branch_continuity() {
  Stopwatch sw;
  CheckResult r = start_check("specfun.branch_continuity", "levy_density continuous as m -> 0");
  constexpr double kTol = 1e-4;
  double worst = 0.0;
  for (int d : {1, 2, 3})
    for (int i = 0; i <= 20; ++i) {
      const double rad = 0.5 * std::pow(10.0, i / 20.0);
      worst = nanmax(worst, std::abs(levy_density(rad, {1e-6, d}) - levy_density(rad, {0.0, d})));
    }
  r.detail["max_abs_gap"] = worst;
  r.detail["tolerance"] = kTol;
  return finish(r, sw, worst <= kTol);
}

CheckResult specfun_char_exponent() {
  Stopwatch sw;
  CheckResult r = start_check("specfun.char_exponent", "exponent against Fourier quadrature and the complex root");
  constexpr double kFourierTol = 1e-5;
  constexpr double kBranchTol = 1e-12;
  boost::math::quadrature::ooura_fourier_cos<double> fcos;
  boost::math::quadrature::ooura_fourier_sin<double> fsin;
  double worst_f = 0.0;
  for (double m : {0.0, 1.0})
    for (double t : {0.5, 1.0})
      for (double rho : {0.5, 1.0, 3.0}) {
        auto f = [&](double s) { return s > 0.0 && std::isfinite(s) ? subordinator_density(s, t, m) : 0.0; };
        const Complex quad(fcos.integrate(f, rho).first, fsin.integrate(f, rho).first);
        worst_f = nanmax(worst_f, std::abs(quad - std::exp(-t * char_exponent(rho, m))));
      }
  double worst_b = 0.0;
  bool re_nonneg = true;
  for (double m : {0.0, 0.5, 1.0, 2.0})
    for (int i = -20; i <= 20; ++i) {
      const double rho = 0.25 * i;
      const Complex v = char_exponent(rho, m);
      const Complex ref = std::sqrt(Complex(m * m, -2.0 * rho)) - m;
      worst_b = nanmax(worst_b, std::abs(v - ref) / (1.0 + std::abs(ref)));
      re_nonneg = re_nonneg && v.real() >= 0.0;
    }
  r.detail["fourier_max_error"] = worst_f;
  r.detail["fourier_tolerance"] = kFourierTol;
  r.detail["branch_max_error"] = worst_b;
  r.detail["real_part_nonnegative"] = re_nonneg;
  return finish(r, sw, worst_f <= kFourierTol && worst_b <= kBranchTol && re_nonneg);
}

CheckResult specfun_domain_errors() {
  Stopwatch sw;
  CheckResult r = start_check("specfun.domain_errors", "invalid arguments are rejected");
  auto throws = [](auto&& f) {
    try {
      f();
    } catch (const DomainError&) {
      return true;
    }
    return false;
  };
  const bool ok = throws([] { bessel_k(1.0, 0.0); }) && throws([] { levy_density(0.0, {1.0, 1}); }) &&
                  throws([] { free_kernel(1.0, 0.0, {1.0, 1}); }) &&
                  throws([] { subordinator_density(0.0, 1.0, 1.0); }) && throws([] { levy_density(1.0, {-1.0, 1}); });
  return finish(r, sw, ok);
}

// ---- fields --------------------------------------------------------------

std::vector<Point> random_points(int d, int n, double scale, std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<Point> out;
  for (int i = 0; i < n; ++i) {
    Point p(d);
    for (int a = 0; a < d; ++a) p[a] = scale * (2.0 * rng.uniform() - 1.0);
    out.push_back(p);
  }
  return out;
}

CheckResult fields_linear_coincidence(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("fields.linear_coincidence", "midpoint and chord average agree for linear A");
  constexpr double kTol = 1e-13;
  Eigen::MatrixXd M(2, 2);
  M << 0.3, -0.7, 1.1, 0.2;
  const FieldSpec fs = FieldSpec::zero(2).with_linear(M).with_constant(pt({0.5, -0.25}));
  const auto pts = random_points(2, 200, 5.0, opt.seed);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    const Point a = midpoint_eval(fs, pts[i], pts[i + 1]);
    const Point b = line_average(fs, pts[i], pts[i + 1]);
    worst = nanmax(worst, (a - b).norm() / (1.0 + a.norm()));
  }
  r.detail["max_gap"] = worst;
  return finish(r, sw, worst <= kTol);
}

CheckResult fields_quadratic_gap(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("fields.quadratic_gap", "A = x^2 chord average exceeds the midpoint by (b - a)^2 / 12");
  constexpr double kTol = 1e-12;
  const FieldSpec fs = FieldSpec::zero(1).with_quadratic_axis(0, 0, 1.0);
  const auto pts = random_points(1, 200, 4.0, opt.seed + 1);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    const double a = pts[i][0], b = pts[i + 1][0];
    const double gap = line_average(fs, pts[i], pts[i + 1])[0] - midpoint_eval(fs, pts[i], pts[i + 1])[0];
    worst = nanmax(worst, std::abs(gap - (b - a) * (b - a) / 12.0) / (1.0 + (b - a) * (b - a)));
  }
  r.detail["max_error"] = worst;
  return finish(r, sw, worst <= kTol);
}

CheckResult fields_line_integrals(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("fields.line_integrals", "closed-form line integrals against chord quadrature");
  constexpr double kTol = 1e-10;
  const GaugeFunction phi = GaugeFunction::periodic_cubic(2, 0.7, 6.0);
  const GaugeFunction mono = GaugeFunction::monomial(2, 1, 0.2, 3);
  std::vector<FieldSpec> cases{
      FieldSpec::zero(2).with_tanh(1.3),
      FieldSpec::zero(2).with_constant_field(0.4),
      FieldSpec::zero(2).with_quadratic_axis(1, 0, 0.8),
      gauge_shift(gauge_shift(FieldSpec::zero(2).with_tanh(0.5), phi), mono),
  };
  const auto pts = random_points(2, 100, 4.0, opt.seed + 2);
  double worst = 0.0;
  for (const FieldSpec& fs : cases)
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
      const double exact = fs.line_integral(pts[i], pts[i + 1]);
      const double quad = line_average(fs, pts[i], pts[i + 1]).dot(pts[i + 1] - pts[i]);
      worst = nanmax(worst, std::abs(exact - quad) / (1.0 + std::abs(exact)));
    }
  r.detail["max_rel_gap"] = worst;
  return finish(r, sw, worst <= kTol);
}

CheckResult fields_gauge_additivity(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("fields.gauge_additivity", "a gradient adds phi(y) - phi(x) to the chord phase");
  constexpr double kTol = 1e-10;
  const FieldSpec base = FieldSpec::zero(2).with_tanh(1.0);
  double worst = 0.0;
  const auto pts = random_points(2, 100, 4.0, opt.seed + 3);
  for (const GaugeFunction& phi :
       {GaugeFunction::periodic_cubic(2, 1.0, 5.0), GaugeFunction::monomial(2, 0, 0.3, 3),
        GaugeFunction::linear(pt({0.4, -1.2}))}) {
    const FieldSpec shifted = gauge_shift(base, phi);
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
      const Point dx = pts[i + 1] - pts[i];
      const double lhs = line_average(shifted, pts[i], pts[i + 1]).dot(dx);
      const double rhs = line_average(base, pts[i], pts[i + 1]).dot(dx) + phi.value(pts[i + 1]) - phi.value(pts[i]);
      worst = nanmax(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
    }
  }
  r.detail["max_rel_gap"] = worst;
  return finish(r, sw, worst <= kTol);
}

CheckResult fields_divergence(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("fields.divergence", "div A against central differences");
  constexpr double kTol = 1e-6;
  const auto probes = random_points(2, 50, 3.0, opt.seed + 4);
  double worst = 0.0;
  for (const FieldSpec& fs :
       {FieldSpec::zero(2).with_tanh(1.0), FieldSpec::zero(2).with_quadratic_axis(0, 0, 1.0),
        FieldSpec::zero(2).with_constant_field(0.7),
        gauge_shift(FieldSpec::zero(2).with_tanh(0.5), GaugeFunction::periodic_cubic(2, 1.0, 5.0))})
    worst = nanmax(worst, fs.divergence_check(probes));
  r.detail["max_gap"] = worst;
  return finish(r, sw, worst <= kTol);
}

// ---- lattice -------------------------------------------------------------

CheckResult lattice_semigroup_property() {
  Stopwatch sw;
  CheckResult r = start_check("lattice.semigroup_property", "e^{-sH} e^{-tH} = e^{-(s+t)H}");
  constexpr double kTol = 1e-10;
  const Lattice lat(1, 64, 16.0);
  const FieldSpec fs = FieldSpec::zero(1).with_tanh(1.0).with_harmonic_capped(1.0, 10.0);
  const MassDim md{1.0, 1};
  double worst = 0.0;
  for (Variant v : {Variant::H1, Variant::H2, Variant::H3}) {
    const LatticeOperator op = add_potential(build_variant(v, lat, fs, md), lat, fs);
    const CMatrix lhs = semigroup(op, 0.2) * semigroup(op, 0.3);
    worst = nanmax(worst, (lhs - semigroup(op, 0.5)).cwiseAbs().maxCoeff());
  }
  r.detail["max_entry_gap"] = worst;
  return finish(r, sw, worst <= kTol);
}

CheckResult lattice_hermiticity() {
  Stopwatch sw;
  CheckResult r = start_check("lattice.hermiticity", "all builders return Hermitian matrices");
  constexpr double kTol = 1e-12;
  double worst = 0.0;
  const MassDim md1{1.0, 1}, md2{0.5, 2};
  const Lattice lat1(1, 64, 16.0), lat2(2, 16, 8.0);
  const FieldSpec f1 = FieldSpec::zero(1).with_quadratic_axis(0, 0, 0.5);
  const FieldSpec f2 = FieldSpec::zero(2).with_constant_field(0.3).with_tanh(0.5);
  for (Variant v : {Variant::H0, Variant::H1, Variant::H2, Variant::H3, Variant::NR}) {
    worst = nanmax(worst, hermiticity_defect(build_variant(v, lat1, f1, md1).matrix()));
    worst = nanmax(worst, hermiticity_defect(build_variant(v, lat2, f2, md2).matrix()));
  }
  r.detail["max_defect"] = worst;
  return finish(r, sw, worst <= kTol);
}

CheckResult lattice_levy_weights() {
  Stopwatch sw;
  CheckResult r = start_check("lattice.levy_weights", "off-diagonal weights approach the Levy density");
  // Relative deviation of the locally averaged weights at fixed distances
  // falls at second order in the spacing.
  constexpr double kMinOrder = 1.5;
  const MassDim md{1.0, 1};
  const std::vector<double> radii{0.5, 1.0, 2.0};
  std::vector<double> dev;
  for (int n : {128, 256, 512}) dev.push_back(levy_weight_deviation(Lattice(1, n, 16.0), md, radii));
  const std::vector<double> order{std::log2(dev[0] / dev[1]), std::log2(dev[1] / dev[2])};
  const bool ok = order[0] >= kMinOrder && order[1] >= kMinOrder;
  r.detail["lattice_sizes"] = {128, 256, 512};
  r.detail["radii"] = radii;
  r.detail["max_rel_deviation"] = dev;
  r.detail["observed_order"] = order;
  r.detail["min_order"] = kMinOrder;
  return finish(r, sw, ok);
}

// ---- paths ---------------------------------------------------------------

CheckResult paths_reproducibility(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("paths.reproducibility", "identical streams give identical paths");
  const JumpLaw law({1.0, 2}, 0.1);
  RngStream a(opt.seed, 5), b(opt.seed, 5), c(opt.seed, 6);
  const CadlagPath pa = sample_levy_jumps(Point::Zero(2), 1.0, law, 0.05, a);
  const CadlagPath pb = sample_levy_jumps(Point::Zero(2), 1.0, law, 0.05, b);
  const CadlagPath pc = sample_levy_jumps(Point::Zero(2), 1.0, law, 0.05, c);
  const bool same = pa.end() == pb.end() && pa.jumps.size() == pb.jumps.size();
  const bool differ = pa.end() != pc.end();
  RngStream s1(opt.seed, 9), s2(opt.seed, 9);
  const auto g = uniform_grid(1.0, 16);
  const bool same_sub = sample_subordinated(Point::Zero(1), g, 0.0, s1).brownian.values.back() ==
                        sample_subordinated(Point::Zero(1), g, 0.0, s2).brownian.values.back();
  return finish(r, sw, same && differ && same_sub);
}

CheckResult paths_subordinator_monotone(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("paths.subordinator_monotone", "T(0) = 0 and T is nondecreasing");
  RngStream rng(opt.seed, 11);
  bool ok = true;
  for (double m : {0.0, 1.0})
    for (int p = 0; p < 500; ++p) {
      const SubordinatorPath s = sample_subordinator(uniform_grid(1.0, 32), m, rng);
      ok = ok && s.values.front() == 0.0;
      for (std::size_t k = 1; k < s.values.size(); ++k) ok = ok && s.values[k] >= s.values[k - 1];
    }
  return finish(r, sw, ok);
}

CheckResult paths_brownian(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("paths.brownian", "Brownian variance and characteristic function");
  constexpr double kZMax = 3.0;
  RngStream rng(opt.seed, 12);
  RealMoments var;
  ComplexMoments cf;
  const double xi = 1.3;
  for (int p = 0; p < 20000; ++p) {
    const BrownianPath b = sample_brownian(Point::Zero(1), 0.02, 50, rng);
    const double x = b.values.back()[0];
    var.add(x * x);
    cf.add(std::polar(1.0, xi * x));
  }
  const double zv = std::abs(var.mean() - 1.0) / var.se();
  const double zc = std::abs(cf.mean() - std::exp(-0.5 * xi * xi)) / cf.se();
  r.detail["variance"] = var.mean();
  r.detail["z_variance"] = zv;
  r.detail["charfn"] = cjson(cf.mean());
  r.detail["z_charfn"] = zc;
  return finish(r, sw, zv <= kZMax && zc <= kZMax);
}

CheckResult paths_jump_statistics(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("paths.jump_statistics", "counting measure means and jump symmetry");
  constexpr double kZMax = 3.0;
  constexpr int kPaths = 20000;
  bool ok = true;
  json rows = json::array();
  struct Case {
    MassDim md;
    Annulus U;
  };
  std::uint64_t stream = 13;
  for (const Case& c : {Case{{0.0, 1}, {1.0, 2.0}}, Case{{1.0, 2}, {0.2, 0.5}}}) {
    const JumpLaw law(c.md, 0.1);
    RngStream rng(opt.seed, stream++);
    RealMoments count_u, count_all, mean_jump;
    bool additive = true;
    const Annulus lo{c.U.r_lo, 0.5 * (c.U.r_lo + c.U.r_hi)}, hi{lo.r_hi, c.U.r_hi};
    for (int p = 0; p < kPaths; ++p) {
      const CadlagPath path = sample_levy_jumps(Point::Zero(c.md.d), 1.0, law, 1.0, rng);
      const int n = counting_measure(path, 0.0, 1.0, c.U);
      count_u.add(n);
      count_all.add(static_cast<double>(path.jumps.size()));
      for (const JumpRecord& j : path.jumps) mean_jump.add(j.jump[0]);
      additive = additive && n == counting_measure(path, 0.0, 0.4, c.U) + counting_measure(path, 0.4, 1.0, c.U);
      // radius lo.r_hi itself has probability zero
      additive = additive && n == counting_measure(path, 0.0, 1.0, lo) + counting_measure(path, 0.0, 1.0, hi);
    }
    const double expect_u = law.radial_mass(c.U.r_lo, c.U.r_hi);
    const double z_u = std::abs(count_u.mean() - expect_u) / count_u.se();
    const double z_all = std::abs(count_all.mean() - law.intensity()) / count_all.se();
    const double z_jump = std::abs(mean_jump.mean()) / mean_jump.se();
    const bool pass = z_u <= kZMax && z_all <= kZMax && z_jump <= kZMax && additive;
    ok = ok && pass;
    rows.push_back({{"m", c.md.m},       {"d", c.md.d},         {"annulus", {c.U.r_lo, c.U.r_hi}},
                    {"mean_count", count_u.mean()}, {"expected", expect_u}, {"z_count", z_u},
                    {"mean_jumps", count_all.mean()}, {"intensity", law.intensity()}, {"z_jumps", z_all},
                    {"z_mean_jump", z_jump}, {"additive", additive}, {"pass", pass}});
  }
  // m = 0, d = 1: the unit-to-two annulus carries mass 1 / pi exactly.
  const double mass = JumpLaw({0.0, 1}, 0.1).radial_mass(1.0, 2.0);
  const double mass_err = std::abs(mass - 1.0 / kPi);
  ok = ok && mass_err <= 1e-10;
  r.detail["cases"] = rows;
  r.detail["annulus_mass_error"] = mass_err;
  return finish(r, sw, ok);
}

CheckResult paths_translation(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("paths.translation", "shifting a sampled path moves every record");
  RngStream a(opt.seed, 14), b(opt.seed, 14);
  const Point x = pt({0.7, -1.1});
  const auto g = uniform_grid(1.0, 8);
  SubordinatedSample s = sample_subordinated(Point::Zero(2), g, 1.0, a, {true, 64});
  const SubordinatedSample ref = sample_subordinated(Point::Zero(2), g, 1.0, b, {true, 64});
  translate(s, x);
  double worst = (s.path.end() - ref.path.end() - x).norm();
  for (std::size_t k = 0; k < s.brownian.values.size(); ++k)
    worst = nanmax(worst, (s.brownian.values[k] - ref.brownian.values[k] - x).norm());
  return finish(r, sw, worst <= 1e-14);
}

// ---- actions -------------------------------------------------------------

CheckResult actions_gauge_shift(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("actions.gauge_shift", "S2 shifts by phi(X(t)) - phi(x0); S1 does not");
  constexpr double kExact = 1e-10;
  constexpr double kViolation = 1e-6;
  const FieldSpec base = FieldSpec::zero(1).with_tanh(1.0);
  const GaugeFunction phi = GaugeFunction::periodic_cubic(1, 1.0, 6.0);
  const FieldSpec shifted = gauge_shift(base, phi);
  RngStream rng(opt.seed, 15);
  double worst2 = 0.0;
  RealMoments dev1;
  const auto g = uniform_grid(1.0, 32);
  for (int p = 0; p < 500; ++p) {
    SubordinatedSample s = sample_subordinated(Point::Zero(1), g, 1.0, rng, {false, 1});
    translate(s, pt({0.4}));
    const double dphi = phi.value(s.path.end()) - phi.value(s.path.x0);
    const double d2 = action_S2_sliced(s.path, shifted).imag_part - action_S2_sliced(s.path, base).imag_part;
    const double d1 = action_S1_sliced(s.path, shifted).imag_part - action_S1_sliced(s.path, base).imag_part;
    worst2 = nanmax(worst2, std::abs(d2 - dphi));
    dev1.add(std::abs(d1 - dphi));
  }
  r.detail["s2_max_error"] = worst2;
  r.detail["s1_mean_deviation"] = dev1.mean();
  return finish(r, sw, worst2 <= kExact && dev1.mean() >= kViolation);
}

CheckResult actions_chain_rule(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("actions.chain_rule", "Stratonovich phase of a pure gradient is phi(B(T)) - phi(B(0))");
  // For phi = c x^3 the midpoint rule misses exactly (c/4) sum dB^3, so the
  // phase minus that remainder must match the endpoint difference to roundoff,
  // and the raw error must shrink as the Brownian grid is refined.
  constexpr double kTol = 1e-10;
  constexpr double kRatioMax = 0.5;
  constexpr double c = 0.2;
  const GaugeFunction phi = GaugeFunction::monomial(1, 0, c, 3);
  const FieldSpec fs = gauge_shift(FieldSpec::zero(1), phi);
  double worst = 0.0;
  std::vector<double> rms;
  for (int steps : {512, 4096}) {
    RngStream rng(opt.seed, 16);
    double sq = 0.0;
    constexpr int kPaths = 200;
    for (int p = 0; p < kPaths; ++p) {
      const SubordinatedSample s = sample_subordinated(Point::Zero(1), uniform_grid(1.0, 8), 1.0, rng, {true, steps});
      const ActionValue a = action_S3(s.brownian, s.subordinator, fs);
      const double exact = phi.value(s.brownian.values.back()) - phi.value(s.brownian.values.front());
      double cubes = 0.0;
      for (std::size_t k = 0; k + 1 < s.brownian.values.size(); ++k) cubes += std::pow(s.brownian.values[k + 1][0] - s.brownian.values[k][0], 3);
      worst = nanmax(worst, std::abs(a.imag_part + 0.25 * c * cubes - exact) / (1.0 + std::abs(exact)));
      sq += std::pow(a.imag_part - exact, 2);
    }
    rms.push_back(std::sqrt(sq / kPaths));
  }
  const double ratio = rms[1] / rms[0];
  r.detail["max_rel_residual"] = worst;
  r.detail["tolerance"] = kTol;
  r.detail["rms_error"] = {{"512", rms[0]}, {"4096", rms[1]}};
  r.detail["rms_ratio"] = ratio;
  r.detail["ratio_max"] = kRatioMax;
  return finish(r, sw, worst <= kTol && ratio <= kRatioMax);
}

CheckResult actions_nonnegative_potential(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("actions.contraction", "V >= 0 gives |e^{-S}| <= 1 on every path");
  const FieldSpec fs = FieldSpec::zero(1).with_tanh(1.0).with_harmonic_capped(1.0, 10.0);
  const MassDim md{1.0, 1};
  const JumpActionRule rule(md, 0.2);
  const JumpLaw law(md, 0.2);
  RngStream rng(opt.seed, 17);
  double worst = 0.0;
  for (int p = 0; p < 200; ++p) {
    const SubordinatedSample s = sample_subordinated(Point::Zero(1), uniform_grid(0.5, 16), 1.0, rng, {true, 256});
    const CadlagPath q = sample_levy_jumps(Point::Zero(1), 0.5, law, 0.5 / 16, rng);
    for (const ActionValue& a : {action_S1_sliced(s.path, fs), action_S2_sliced(s.path, fs),
                                 action_S3(s.brownian, s.subordinator, fs), action_S1_jump(q, fs, rule)})
      worst = nanmax(worst, std::abs(a.weight()));
  }
  r.detail["max_weight"] = worst;
  return finish(r, sw, worst <= 1.0);
}

CheckResult actions_refinement(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("actions.refinement", "sliced weights converge at rate about 1/n");
  constexpr double kRateLo = 0.5, kRateHi = 1.5;
  const FieldSpec fs = FieldSpec::zero(1).with_tanh(1.0).with_harmonic_capped(1.0, 10.0);
  const std::vector<int> ns{8, 16, 32, 64};
  const int fine = 128;
  std::vector<ComplexMoments> diff(ns.size());
  RngStream rng(opt.seed, 18);
  for (int p = 0; p < 4000; ++p) {
    const SubordinatedSample s = sample_subordinated(Point::Zero(1), uniform_grid(0.5, fine), 1.0, rng, {false, 1});
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const int stride = fine / ns[i];
      diff[i].add(action_S1_sliced(s.path, fs, stride).weight() - action_S1_sliced(s.path, fs, stride / 2).weight());
    }
  }
  std::vector<double> mags;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    mags.push_back(std::abs(diff[i].mean()));
    const double lx = std::log(ns[i]), ly = std::log(mags.back());
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(ns.size());
  const double rate = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  r.detail["n"] = ns;
  r.detail["mean_paired_difference"] = mags;
  r.detail["rate"] = rate;
  return finish(r, sw, rate >= kRateLo && rate <= kRateHi);
}

CheckResult actions_jump_vs_sliced(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("actions.jump_vs_sliced", "jump-form and sliced estimates of variant 1 agree");
  const FieldSpec fs = FieldSpec::zero(1).with_tanh(1.0).with_harmonic_capped(1.0, 10.0);
  const MassDim md{1.0, 1};
  const ProbeFunction g = ProbeFunction::gaussian(Point::Zero(1), 1.0);
  McParams sliced;
  sliced.n_paths = 50000;
  sliced.control = false;
  McParams jump = sliced;
  jump.form = ActionForm::Jump;
  jump.n_paths = 4000;
  const EstimateReport a = estimate(1, fs, g, Point::Zero(1), 0.5, md, sliced, opt.seed + 19);
  const EstimateReport b = estimate(1, fs, g, Point::Zero(1), 0.5, md, jump, opt.seed + 20);
  const double se = std::hypot(a.stderr_abs(), b.stderr_abs());
  const double dev = std::abs(a.mean - b.mean);
  r.detail["sliced"] = cjson(a.mean);
  r.detail["jump"] = cjson(b.mean);
  r.detail["combined_stderr"] = se;
  return finish(r, sw, dev <= 3.0 * se);
}

// ---- estimator -----------------------------------------------------------

CheckResult estimator_free_case(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("estimator.free_case", "A = 0, V = 0 against the kernel integral");
  McParams mc;
  mc.n_paths = 20000;
  mc.control = false;
  bool ok = true;
  json rows = json::array();
  struct Case {
    MassDim md;
    int variant;
  };
  for (const Case& c : {Case{{1.0, 1}, 1}, Case{{1.0, 1}, 2}, Case{{1.0, 1}, 3}, Case{{0.0, 2}, 1}, Case{{0.5, 2}, 3}}) {
    const Point x = Point::Constant(c.md.d, 0.3);
    const ProbeFunction g = ProbeFunction::gaussian(Point::Zero(c.md.d), 1.0);
    const EstimateReport rep = estimate(c.variant, FieldSpec::zero(c.md.d), g, x, 0.5, c.md, mc, opt.seed + 21);
    const Complex exact = free_semigroup_value(g, x, 0.5, c.md);
    const double z = std::abs(rep.mean - exact) / rep.stderr_abs();
    const bool pass = z <= 3.0 && std::abs(rep.mean) <= 1.0 + 3.0 * rep.stderr_abs();
    ok = ok && pass;
    rows.push_back({{"m", c.md.m}, {"d", c.md.d}, {"variant", c.variant}, {"mean", cjson(rep.mean)},
                    {"exact", cjson(exact)}, {"z", z}, {"pass", pass}});
  }
  r.detail["rows"] = rows;
  return finish(r, sw, ok);
}

CheckResult estimator_linear_coincidence(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("estimator.linear_coincidence", "variants 1 and 2 coincide for linear A");
  constexpr double kTol = 1e-12;
  McParams mc;
  mc.n_paths = 8192;
  const FieldSpec fs = FieldSpec::zero(2).with_constant_field(0.5).with_harmonic_capped(1.0, 10.0);
  const ProbeFunction g = ProbeFunction::gaussian(Point::Zero(2), 1.0);
  const Point x = pt({0.2, -0.1});
  const EstimateReport a = estimate(1, fs, g, x, 0.5, {1.0, 2}, mc, opt.seed + 22);
  const EstimateReport b = estimate(2, fs, g, x, 0.5, {1.0, 2}, mc, opt.seed + 22);
  const double gap = std::abs(a.mean - b.mean);
  r.detail["gap"] = gap;
  return finish(r, sw, gap <= kTol);
}

CheckResult estimator_gauge_covariance(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("estimator.gauge_covariance", "gauge covariance of variants 2 and 3");
  McParams mc;
  mc.n_paths = 8192;
  mc.control = false;
  const FieldSpec fs = FieldSpec::zero(1).with_tanh(1.0).with_harmonic_capped(1.0, 10.0);
  const GaugeFunction phi = GaugeFunction::periodic_cubic(1, 1.0, 6.0);
  const FieldSpec shifted = gauge_shift(fs, phi);
  const ProbeFunction g = ProbeFunction::gaussian(Point::Zero(1), 1.0);
  const Point x = pt({0.4});
  const MassDim md{1.0, 1};
  bool ok = true;
  json rows = json::array();
  for (int variant : {2, 3}) {
    const EstimateReport a = estimate(variant, fs, g, x, 0.5, md, mc, opt.seed + 23);
    const EstimateReport b = estimate(variant, shifted, g.gauged(phi, 1.0), x, 0.5, md, mc, opt.seed + 23);
    const Complex expect = std::polar(1.0, phi.value(x)) * a.mean;
    const double dev = std::abs(b.mean - expect);
    const bool pass = dev <= 3.0 * b.stderr_abs();
    ok = ok && pass;
    rows.push_back({{"variant", variant}, {"deviation", dev}, {"stderr", b.stderr_abs()}, {"pass", pass}});
  }
  r.detail["rows"] = rows;
  return finish(r, sw, ok);
}

CheckResult estimator_determinism(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("estimator.determinism", "same seed, same bits");
  McParams mc;
  mc.n_paths = 10000;
  const FieldSpec fs = FieldSpec::zero(1).with_tanh(1.0).with_harmonic_capped(1.0, 10.0);
  const ProbeFunction g = ProbeFunction::gaussian(Point::Zero(1), 1.0);
  const EstimateReport a = estimate(1, fs, g, Point::Zero(1), 0.5, {1.0, 1}, mc, opt.seed + 24);
  const EstimateReport b = estimate(1, fs, g, Point::Zero(1), 0.5, {1.0, 1}, mc, opt.seed + 24);
  const EstimateReport c = estimate(1, fs, g, Point::Zero(1), 0.5, {1.0, 1}, mc, opt.seed + 25);
  const bool ok = a.mean == b.mean && a.stderr_re == b.stderr_re && a.control_mean == b.control_mean &&
                  a.mean != c.mean;
  return finish(r, sw, ok);
}

CheckResult estimator_plane_wave(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("estimator.plane_wave", "variant 3 on a windowed plane wave");
  McParams mc;
  mc.n_paths = 20000;
  mc.control = false;
  mc.brownian_steps = 64;
  const MassDim md{1.0, 1};
  const ProbeFunction g = ProbeFunction::plane_wave_windowed(Point::Zero(1), pt({1.5}), 4.0);
  const EstimateReport rep = estimate(3, FieldSpec::zero(1), g, Point::Zero(1), 0.5, md, mc, opt.seed + 26);
  const Complex exact = free_semigroup_value(g, Point::Zero(1), 0.5, md);
  const double z = std::abs(rep.mean - exact) / rep.stderr_abs();
  r.detail["mean"] = cjson(rep.mean);
  r.detail["exact"] = cjson(exact);
  r.detail["z"] = z;
  return finish(r, sw, z <= 3.0);
}

CheckResult estimator_oracle_free(const VerifyOptions& opt) {
  Stopwatch sw;
  CheckResult r = start_check("estimator.oracle_free", "free case passes the lattice comparison");
  McParams mc;
  mc.n_paths = 20000;
  mc.control = false;
  const MassDim md{1.0, 1};
  const ProbeFunction g = ProbeFunction::gaussian(Point::Zero(1), 1.0);
  const Lattice lat(1, 256, 32.0);
  const FieldSpec fs = FieldSpec::zero(1);
  bool ok = true;
  json rows = json::array();
  for (int variant : {1, 3}) {
    const EstimateReport rep = estimate(variant, fs, g, Point::Zero(1), 0.5, md, mc, opt.seed + 27);
    const Complex lat_value = lattice_oracle_value(variant, fs, [&g](const Point& y) { return g(y); },
                                                   Point::Zero(1), 0.5, md, lat);
    const double tol = free_case_lat_tol(variant, g, Point::Zero(1), 0.5, md, lat).lat_tol;
    const OracleVerdict v = compare_with_oracle(rep, lat_value, tol);
    ok = ok && v.pass;
    rows.push_back({{"variant", variant}, {"deviation", v.deviation}, {"bound", v.bound}, {"pass", v.pass}});
  }
  r.detail["rows"] = rows;
  return finish(r, sw, ok);
}

}  // namespace

std::vector<std::string> suite_names() { return {"specfun", "fields", "lattice", "paths", "actions", "estimator"}; }

std::vector<CheckResult> run_suite(const std::string& name, const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  if (name == "specfun") {
    out = {acceptance_criterion(1, opt), specfun_spot_values(), specfun_bessel_grid(), specfun_chapman_kolmogorov(),
           specfun_levy_integrability(), specfun_branch_continuity(), specfun_char_exponent(), specfun_domain_errors()};
  } else if (name == "fields") {
    out = {fields_linear_coincidence(opt), fields_quadratic_gap(opt), fields_line_integrals(opt),
           fields_gauge_additivity(opt), fields_divergence(opt)};
  } else if (name == "lattice") {
    out = {acceptance_criterion(4, opt), acceptance_criterion(5, opt), lattice_semigroup_property(),
           lattice_hermiticity(), lattice_levy_weights()};
  } else if (name == "paths") {
    out = {acceptance_criterion(2, opt),         acceptance_criterion(3, opt),   paths_reproducibility(opt),
           paths_subordinator_monotone(opt),     paths_brownian(opt),            paths_jump_statistics(opt),
           paths_translation(opt)};
  } else if (name == "actions") {
    out = {acceptance_criterion(7, opt),      actions_gauge_shift(opt), actions_chain_rule(opt),
           actions_nonnegative_potential(opt), actions_refinement(opt), actions_jump_vs_sliced(opt)};
  } else if (name == "estimator") {
    out = {acceptance_criterion(6, opt),        estimator_free_case(opt),    estimator_linear_coincidence(opt),
           estimator_gauge_covariance(opt),     estimator_determinism(opt),  estimator_plane_wave(opt),
           estimator_oracle_free(opt)};
  } else {
    throw ConfigError("unknown suite '" + name + "'");
  }
  return out;
}

}  // namespace relkac
