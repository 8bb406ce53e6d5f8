#include <doctest.h>

#include <cmath>

#include "relkac/estimator.hpp"

using namespace relkac;

namespace {

constexpr std::uint64_t kSeed = 20240611;

Point origin(int d) { return Point::Zero(d); }

}  // namespace

TEST_CASE("probe registry values") {
  Point c(1), k(1), x(1);
  c[0] = 0.5;
  k[0] = 2.0;
  x[0] = 1.5;
  CHECK(ProbeFunction::gaussian(c, 1.0)(x).real() == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(ProbeFunction::bump(c, 2.0)(c).real() == doctest::Approx(1.0).epsilon(1e-15));
  x[0] = 2.6;
  CHECK(ProbeFunction::bump(c, 2.0)(x) == Complex(0.0, 0.0));
  x[0] = 0.5;
  const Complex pw = ProbeFunction::plane_wave_windowed(c, k, 4.0)(x);
  CHECK(std::abs(pw - std::exp(Complex(0.0, 1.0))) <= 1e-15);
  CHECK(parse_probe_kind("bump") == ProbeFunction::Kind::Bump);
  CHECK_THROWS_AS(parse_probe_kind("tent"), ConfigError);
}

TEST_CASE("estimates are bit-identical for a fixed seed") {
  const FieldSpec fs = FieldSpec::zero(1).with_tanh(1.0).with_harmonic_capped(1.0, 10.0);
  const ProbeFunction g = ProbeFunction::gaussian(origin(1));
  McParams mc;
  mc.n_paths = 5000;
  mc.n_slices = 16;
  const EstimateReport a = estimate(1, fs, g, origin(1), 0.5, {1.0, 1}, mc, kSeed);
  const EstimateReport b = estimate(1, fs, g, origin(1), 0.5, {1.0, 1}, mc, kSeed);
  CHECK(a.mean == b.mean);
  CHECK(a.stderr_re == b.stderr_re);
  CHECK(a.control_mean == b.control_mean);
  const EstimateReport c = estimate(1, fs, g, origin(1), 0.5, {1.0, 1}, mc, kSeed + 1);
  CHECK(a.mean != c.mean);
  CHECK(a.max_weight <= 1.0);
}

TEST_CASE("free case matches the kernel convolution") {
  const ProbeFunction g = ProbeFunction::gaussian(origin(1));
  const Complex exact = free_semigroup_value(g, origin(1), 1.0, {1.0, 1});
  McParams mc;
  mc.n_paths = 40000;
  mc.n_slices = 4;
  mc.control = false;
  for (int v : {1, 2, 3}) {
    if (v == 3) mc.brownian_steps = 32;
    const EstimateReport r = estimate(v, FieldSpec::zero(1), g, origin(1), 1.0, {1.0, 1}, mc, kSeed);
    CHECK(std::abs(r.mean - exact) <= 3.0 * r.stderr_abs());
  }
}

TEST_CASE("oracle verdict uses 3 stderr plus the lattice tolerance") {
  EstimateReport r;
  r.mean = Complex(1.0, 0.0);
  r.stderr_re = 0.03;
  r.stderr_im = 0.04;
  const OracleVerdict inside = compare_with_oracle(r, Complex(1.1, 0.0), 0.0);
  CHECK(inside.bound == doctest::Approx(0.15));
  CHECK(inside.pass);
  const OracleVerdict outside = compare_with_oracle(r, Complex(1.2, 0.0), 0.01);
  CHECK(outside.bound == doctest::Approx(0.16));
  CHECK_FALSE(outside.pass);
}

TEST_CASE("parameter validation") {
  McParams mc;
  mc.n_paths = 0;
  CHECK_THROWS_AS(mc.validate(), ConfigError);
  CHECK(parse_action_form("jump") == ActionForm::Jump);
  CHECK(parse_sampler("subordinated") == Sampler::Subordinated);
}
