#include <doctest.h>

#include <cmath>

#include "relkac/lattice.hpp"
#include "relkac/specfun.hpp"

using namespace relkac;

TEST_CASE("lattice geometry") {
  const Lattice lat(2, 8, 4.0);
  CHECK(lat.size() == 64);
  CHECK(lat.spacing() == 0.5);
  CHECK(lat.site(0)[0] == -2.0);
  for (int i = 0; i < lat.size(); ++i) CHECK(lat.find_site(lat.site(i)) == i);
  CHECK((lat.displacement(3, 10) + lat.displacement(10, 3)).norm() == 0.0);
  CHECK_THROWS(Lattice(2, 128, 10.0));
}

TEST_CASE("free operator spectrum lies in [m, sqrt(xi_max^2 + m^2)]") {
  const Lattice lat(1, 64, 20.0);
  const MassDim md{1.0, 1};
  const LatticeOperator h0 = build_H0(lat, md);
  const RVector ev = h0.eigenvalues();
  const double xi_max = M_PI * 64 / 20.0;
  CHECK(ev.minCoeff() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ev.maxCoeff() == doctest::Approx(std::sqrt(xi_max * xi_max + 1.0)).epsilon(1e-12));
  CHECK(hermiticity_defect(h0.matrix()) <= 1e-14);
}

TEST_CASE("all builders collapse at A = 0") {
  const Lattice lat(1, 64, 16.0);
  const MassDim md{1.0, 1};
  const FieldSpec zero = FieldSpec::zero(1);
  const CMatrix h0 = build_H0(lat, md).matrix();
  CHECK((build_H1(lat, zero, md).matrix() - h0).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((build_H2(lat, zero, md).matrix() - h0).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((build_H3(lat, zero, md).matrix() - build_H3_free_spectral(lat, md).matrix()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("constant A is a phase conjugation of H0") {
  const Lattice lat(1, 64, 16.0);
  const MassDim md{1.0, 1};
  Point a(1);
  a[0] = 0.7;
  const FieldSpec c = FieldSpec::zero(1).with_constant(a);
  const CMatrix h0 = build_H0(lat, md).matrix();
  const CMatrix h1 = build_H1(lat, c, md).matrix();
  const CMatrix h2 = build_H2(lat, c, md).matrix();
  // H1[x,y] = H0[x,y] e^{i a (x - y)} with the minimal-image displacement
  double worst = 0.0;
  for (int x = 0; x < lat.size(); ++x)
    for (int y = 0; y < lat.size(); ++y) {
      const double d = lat.displacement(x, y)[0];
      worst = std::max(worst, std::abs(h1(x, y) - h0(x, y) * std::exp(Complex(0.0, 0.7 * d))));
    }
  CHECK(worst <= 1e-12);
  CHECK((h1 - h2).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("gauge covariance of H2 and H3, not H1") {
  const Lattice lat(1, 64, 20.0);
  const MassDim md{1.0, 1};
  const FieldSpec fs = FieldSpec::zero(1).with_tanh(1.0);
  const GaugeFunction phi = GaugeFunction::periodic_cubic(1, 1.0, 20.0);
  CHECK(gauge_residual(Variant::H2, fs, phi, lat, md) <= 1e-8);
  CHECK(gauge_residual(Variant::H3, fs, phi, lat, md) <= 1e-8);
  CHECK(gauge_residual(Variant::H1, fs, phi, lat, md) >= 1e-3);
}

TEST_CASE("H3 floor and semigroup contraction") {
  const Lattice lat(1, 64, 20.0);
  const MassDim md{1.0, 1};
  const FieldSpec fs = FieldSpec::zero(1).with_tanh(1.0);
  const LatticeOperator h3 = build_H3(lat, fs, md);
  CHECK(spectral_floor(h3) >= 1.0 - 1e-9);
  CVector g = CVector::Zero(lat.size());
  for (int i = 0; i < lat.size(); ++i) g[i] = Complex(std::sin(0.3 * i), std::cos(1.7 * i));
  for (Variant v : {Variant::H1, Variant::H2, Variant::H3})
    CHECK(apply_semigroup(build_variant(v, lat, fs, md), 1.0, g).norm() <= g.norm() * (1.0 + 1e-12));
}

TEST_CASE("semigroup of H0 reproduces the periodized free kernel") {
  const Lattice lat(1, 256, 32.0);
  const MassDim md{1.0, 1};
  const double t = 0.5;
  const CMatrix S = semigroup(build_H0(lat, md), t);
  const int o = lat.find_site(Point::Zero(1));
  double worst = 0.0;
  for (int x = 0; x < lat.size(); ++x) {
    const double r = lat.displacement(x, o)[0];
    double k = 0.0;
    for (int w = -3; w <= 3; ++w) k += free_kernel(r + w * 32.0, t, md);
    worst = std::max(worst, std::abs(S(x, o).real() / lat.spacing() - k));
  }
  // Spectral truncation of the band; shrinks like the kernel tail at the Nyquist scale.
  CHECK(worst <= 2e-3);
}

TEST_CASE("quadratic form matches the expectation") {
  const Lattice lat(1, 64, 16.0);
  const MassDim md{1.0, 1};
  const FieldSpec fs = FieldSpec::zero(1).with_tanh(1.0).with_harmonic_capped(1.0, 10.0);
  CVector u(lat.size());
  for (int i = 0; i < lat.size(); ++i) {
    const double x = lat.site(i)[0];
    u[i] = std::exp(-x * x / 4.0) * Complex(1.0, 0.3 * x);
  }
  for (Variant v : {Variant::H1, Variant::H2}) CHECK(quadratic_form(v, u, fs, lat, md).rel_gap() <= 1e-10);
  // Real positive u: form is at least m |u|^2.
  const QuadraticFormValue q = quadratic_form(Variant::H1, u.cwiseAbs().cast<Complex>(), fs, lat, md);
  CHECK(q.form >= md.m * q.norm2);
}

TEST_CASE("sliced product converges to the H1 semigroup") {
  const Lattice lat(1, 128, 24.0);
  const MassDim md{1.0, 1};
  const FieldSpec fs = FieldSpec::zero(1).with_tanh(1.0).with_harmonic_capped(1.0, 10.0);
  CVector g(lat.size());
  for (int i = 0; i < lat.size(); ++i) g[i] = std::exp(-0.5 * std::pow(lat.site(i)[0], 2));
  const CVector exact = apply_semigroup(add_potential(build_H1(lat, fs, md), lat, fs), 0.5, g);
  double prev = 1e300;
  for (int n : {2, 4, 8, 16}) {
    const double err = (sliced_product(fs, lat, md, 0.5, n) * g - exact).norm();
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("diamagnetic inequality") {
  const Lattice lat(2, 16, 8.0);
  const MassDim md{1.0, 2};
  const FieldSpec fs = FieldSpec::zero(2).with_constant_field(0.5);
  CVector f(lat.size());
  for (int i = 0; i < lat.size(); ++i) f[i] = Complex(std::cos(0.9 * i), std::sin(0.4 * i * i));
  for (double t : {0.1, 0.5, 1.0}) {
    const DiamagneticValues dv = diamagnetic_check(fs, lat, md, t, f);
    CHECK(dv.magnetic <= dv.free + 1e-9);
  }
}

TEST_CASE("variant parsing") {
  CHECK(parse_variant("h2") == Variant::H2);
  CHECK(parse_variant("3") == Variant::H3);
  CHECK(to_string(Variant::H1) == "h1");
  CHECK_THROWS_AS(parse_variant("h7"), ConfigError);
}
