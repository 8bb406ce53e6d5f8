#include <doctest.h>

#include <cmath>

#include "relkac/estimator.hpp"
#include "relkac/paths.hpp"
#include "relkac/specfun.hpp"

using namespace relkac;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Mean {
  double n = 0, s = 0, s2 = 0;
  void add(double v) {
    n += 1;
    s += v;
    s2 += v * v;
  }
  double mean() const { return s / n; }
  double se() const { return std::sqrt((s2 / n - mean() * mean()) / (n - 1)); }
};

}  // namespace

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(kSeed, 3), b(kSeed, 3), c(kSeed, 4);
  for (int i = 0; i < 10; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  CHECK(a.normal() != c.normal());
}

TEST_CASE("Brownian characteristic function at xi = 1, t = 1") {
  RngStream rng(kSeed, 1);
  Mean m;
  for (int i = 0; i < 100000; ++i) m.add(std::cos(sample_brownian(Point::Zero(1), 1.0, 1, rng).values.back()[0]));
  CHECK(std::abs(m.mean() - std::exp(-0.5)) <= 3.0 * m.se());
}

TEST_CASE("subordinator Laplace transform and mean") {
  RngStream rng(kSeed, 2);
  Mean lap, mean;
  for (int i = 0; i < 100000; ++i) {
    const double T = sample_subordinator_increment(1.0, 1.0, rng);
    lap.add(std::exp(-1.5 * T));
    mean.add(T);
  }
  CHECK(std::abs(lap.mean() - std::exp(-1.0)) <= 3.0 * lap.se());
  CHECK(std::abs(mean.mean() - 1.0) <= 3.0 * mean.se());
}

TEST_CASE("subordinator paths are monotone from zero") {
  RngStream rng(kSeed, 5);
  for (double m : {0.0, 1.0}) {
    const SubordinatorPath s = sample_subordinator(uniform_grid(1.0, 16), m, rng);
    CHECK(s.values.front() == 0.0);
    for (std::size_t k = 1; k < s.values.size(); ++k) CHECK(s.values[k] >= s.values[k - 1]);
  }
}

TEST_CASE("process characteristic function for both samplers") {
  const std::vector<double> xi{0.0, 1.0};
  for (double m : {0.0, 1.0}) {
    const double exact = std::exp(-relativistic_symbol(1.0, m));
    for (Sampler s : {Sampler::Subordinated, Sampler::Jump}) {
      const auto rows = charfn_suite(s, {m, 1}, 1.0, xi, 100000, kSeed, 0.05);
      const double allowance = s == Sampler::Jump ? 5e-3 : 0.0;
      CHECK(rows[0].empirical == Complex(1.0, 0.0));
      CHECK(rows[1].exact == doctest::Approx(exact).epsilon(1e-14));
      CHECK(std::abs(rows[1].empirical - exact) <= 3.0 * rows[1].stderr + allowance);
    }
  }
  CHECK(std::exp(-relativistic_symbol(1.0, 1.0)) == doctest::Approx(std::exp(1.0 - std::sqrt(2.0))).epsilon(1e-15));
}

TEST_CASE("jump counts in an annulus match the Levy measure") {
  // m = 0, d = 1, U = {1 < |y| < 2}: expected count 2 int_1^2 y^-2 / pi = 1/pi
  const JumpLaw law({0.0, 1}, 0.1);
  CHECK(law.radial_mass(1.0, 2.0) == doctest::Approx(1.0 / M_PI).epsilon(1e-10));
  RngStream rng(kSeed, 7);
  Mean count;
  for (int i = 0; i < 20000; ++i) {
    const CadlagPath p = sample_levy_jumps(Point::Zero(1), 1.0, law, 0.25, rng);
    count.add(counting_measure(p, 0.0, 1.0, {1.0, 2.0}));
  }
  CHECK(std::abs(count.mean() - 1.0 / M_PI) <= 3.0 * count.se());
}

TEST_CASE("small-jump surrogate variance") {
  // int_{|y|<eps} y^2 n(y) dy; for m = 0, d = 1 this is 2 eps / pi.
  CHECK(JumpLaw({0.0, 1}, 0.1).small_jump_variance() == doctest::Approx(0.2 / M_PI).epsilon(1e-10));
  CHECK(JumpLaw({1.0, 1}, 0.1).small_jump_variance() < JumpLaw({1.0, 1}, 0.5).small_jump_variance());
}

TEST_CASE("translation shifts every spatial record") {
  RngStream a(kSeed, 9), b(kSeed, 9);
  Point x(2);
  x << 1.5, -0.25;
  const JumpLaw law({1.0, 2}, 0.1);
  CadlagPath p0 = sample_levy_jumps(Point::Zero(2), 1.0, law, 0.1, a);
  const CadlagPath p1 = sample_levy_jumps(x, 1.0, law, 0.1, b);
  translate(p0, x);
  CHECK((p0.end() - p1.end()).norm() <= 1e-14);
  REQUIRE(p0.jumps.size() == p1.jumps.size());
  for (std::size_t k = 0; k < p0.jumps.size(); ++k) CHECK((p0.jumps[k].before - p1.jumps[k].before).norm() <= 1e-14);
}
