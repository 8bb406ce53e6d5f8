#include <doctest.h>

#include <cmath>

#include "relkac/actions.hpp"
#include "relkac/paths.hpp"

using namespace relkac;

namespace {

constexpr std::uint64_t kSeed = 20240611;

}  // namespace

TEST_CASE("linear A: S1 and S2 agree on every path") {
  Eigen::MatrixXd M(2, 2);
  M << 0.3, -0.8, 0.5, 0.1;
  const FieldSpec fs = FieldSpec::zero(2).with_linear(M).with_harmonic_capped(1.0, 10.0);
  RngStream rng(kSeed, 1);
  for (int p = 0; p < 50; ++p) {
    const CadlagPath path = sample_subordinated(Point::Zero(2), uniform_grid(1.0, 16), 1.0, rng, {false, 1}).path;
    const ActionValue s1 = action_S1_sliced(path, fs), s2 = action_S2_sliced(path, fs);
    CHECK(std::abs(s1.imag_part - s2.imag_part) <= 1e-12);
    CHECK(s1.real_part == s2.real_part);
  }
}

TEST_CASE("A = x^2 separates S1 from S2 by the chord gap") {
  const FieldSpec fs = FieldSpec::zero(1).with_quadratic_axis(0, 0);
  RngStream rng(kSeed, 2);
  const CadlagPath path = sample_subordinated(Point::Zero(1), uniform_grid(1.0, 8), 1.0, rng, {false, 1}).path;
  double gap = 0.0;
  for (int j = 1; j <= path.slices(); ++j) gap += std::pow(path.skeleton[j][0] - path.skeleton[j - 1][0], 3) / 12.0;
  const double diff = action_S2_sliced(path, fs).imag_part - action_S1_sliced(path, fs).imag_part;
  CHECK(diff == doctest::Approx(gap).epsilon(1e-12));
  CHECK(std::abs(diff) > 0.0);
}

TEST_CASE("constant A telescopes to a . (X(t) - x0)") {
  Point a(2);
  a << 0.8, -0.35;
  const FieldSpec fs = FieldSpec::zero(2).with_constant(a);
  RngStream rng(kSeed, 3);
  const CadlagPath path = sample_subordinated(Point::Zero(2), uniform_grid(1.0, 16), 1.0, rng, {false, 1}).path;
  const double expected = a.dot(path.end() - path.x0);
  CHECK(action_S1_sliced(path, fs).imag_part == doctest::Approx(expected).epsilon(1e-12));
  CHECK(action_S2_sliced(path, fs).imag_part == doctest::Approx(expected).epsilon(1e-12));
  const JumpActionRule rule({1.0, 2}, 0.1);
  const CadlagPath jp = sample_levy_jumps(Point::Zero(2), 1.0, JumpLaw({1.0, 2}, 0.1), 1.0 / 16, rng);
  CHECK(action_S1_jump(jp, fs, rule).imag_part == doctest::Approx(a.dot(jp.end() - jp.x0)).epsilon(1e-10));
}

TEST_CASE("S2 is gauge exact on each path, S1 is not") {
  const FieldSpec base = FieldSpec::zero(1).with_tanh(1.0);
  const GaugeFunction phi = GaugeFunction::monomial(1, 0, 0.5, 3);
  const FieldSpec shifted = gauge_shift(base, phi);
  RngStream rng(kSeed, 4);
  double s1_dev = 0.0;
  for (int p = 0; p < 20; ++p) {
    const CadlagPath path = sample_subordinated(Point::Zero(1), uniform_grid(1.0, 16), 1.0, rng, {false, 1}).path;
    const double jump = phi.value(path.end()) - phi.value(path.x0);
    CHECK(action_S2_sliced(path, shifted).imag_part - action_S2_sliced(path, base).imag_part ==
          doctest::Approx(jump).epsilon(1e-10));
    s1_dev += std::abs(action_S1_sliced(path, shifted).imag_part - action_S1_sliced(path, base).imag_part - jump);
  }
  CHECK(s1_dev > 1e-6);
}

TEST_CASE("Stratonovich sum of a cubic gradient misses exactly (c/4) sum dB^3") {
  constexpr double c = 0.2;
  const GaugeFunction phi = GaugeFunction::monomial(1, 0, c, 3);
  const FieldSpec fs = gauge_shift(FieldSpec::zero(1), phi);
  RngStream rng(kSeed, 5);
  const SubordinatedSample s = sample_subordinated(Point::Zero(1), uniform_grid(1.0, 8), 1.0, rng, {true, 1024});
  double cubes = 0.0;
  for (std::size_t k = 0; k + 1 < s.brownian.values.size(); ++k)
    cubes += std::pow(s.brownian.values[k + 1][0] - s.brownian.values[k][0], 3);
  const double exact = phi.value(s.brownian.values.back()) - phi.value(s.brownian.values.front());
  CHECK(action_S3(s.brownian, s.subordinator, fs).imag_part + 0.25 * c * cubes == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("V >= 0 keeps every weight in the unit disk") {
  const FieldSpec fs = FieldSpec::zero(1).with_tanh(1.0).with_harmonic_capped(1.0, 10.0);
  RngStream rng(kSeed, 6);
  for (int p = 0; p < 50; ++p) {
    const SubordinatedSample s = sample_subordinated(Point::Zero(1), uniform_grid(0.5, 16), 1.0, rng, {true, 128});
    CHECK(std::abs(action_S1_sliced(s.path, fs).weight()) <= 1.0);
    CHECK(std::abs(action_S3(s.brownian, s.subordinator, fs).weight()) <= 1.0);
  }
}

TEST_CASE("p.v. compensator vanishes for constant A") {
  Point a(1);
  a[0] = 0.4;
  const FieldSpec fs = FieldSpec::zero(1).with_constant(a);
  const JumpActionRule rule({1.0, 1}, 0.1);
  const PvSplit pv = pv_compensator(fs, Point::Zero(1), rule, ChordRule::Midpoint);
  CHECK(std::abs(pv.inner) <= 1e-12);
  CHECK(std::abs(pv.outer) <= 1e-12);
}
