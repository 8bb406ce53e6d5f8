#include <doctest.h>

#include <cmath>

#include "relkac/fields.hpp"

using namespace relkac;

namespace {

Point P(std::initializer_list<double> v) {
  Point p(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

}  // namespace

TEST_CASE("midpoint and chord average for A = (0, 0, x3^2)") {
  const FieldSpec fs = FieldSpec::zero(3).with_quadratic_axis(2, 2);
  const Point x = P({0.0, 0.0, 0.0}), y = P({0.0, 0.0, 1.0});
  CHECK(midpoint_eval(fs, x, y)[2] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(line_average(fs, x, y)[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(line_average(fs, x, y)[2] - midpoint_eval(fs, x, y)[2] == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(exact_line_integral(fs, x, y) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  // General chord: (x3^2 + x3 y3 + y3^2) / 3
  const Point a = P({0.2, -1.0, 0.4}), b = P({1.0, 0.5, -1.3});
  CHECK(line_average(fs, a, b)[2] == doctest::Approx((0.16 - 0.52 + 1.69) / 3.0).epsilon(1e-14));
}

TEST_CASE("constant and linear fields") {
  const Point a = P({0.3, -0.7});
  const FieldSpec c = FieldSpec::zero(2).with_constant(a);
  const Point x = P({1.0, 2.0}), y = P({-0.5, 0.25});
  CHECK((midpoint_eval(c, x, y) - a).norm() == 0.0);
  CHECK((line_average(c, x, y) - a).norm() <= 1e-15);
  CHECK(exact_line_integral(c, P({0.0, 0.0}), P({1.0, 0.0})) == doctest::Approx(0.3).epsilon(1e-15));

  Eigen::MatrixXd M(2, 2);
  M << 0.4, -1.1, 0.7, 0.2;
  const FieldSpec lin = FieldSpec::zero(2).with_linear(M);
  const Point mid = M * (0.5 * (x + y));
  CHECK((midpoint_eval(lin, x, y) - mid).norm() <= 1e-15);
  CHECK((line_average(lin, x, y) - midpoint_eval(lin, x, y)).norm() <= 1e-15);
  CHECK(lin.is_linear());

  const FieldSpec cf = FieldSpec::zero(2).with_constant_field(0.5);
  const Point q = P({1.0, 2.0});
  CHECK((cf.A(q) - P({-0.5, 0.25})).norm() <= 1e-15);
  CHECK(*cf.div_A(q) == doctest::Approx(0.0));
}

TEST_CASE("gauge_shift adds the gradient") {
  const FieldSpec base = FieldSpec::zero(2);
  const FieldSpec lin = gauge_shift(base, GaugeFunction::linear(P({0.5, -2.0})));
  CHECK((lin.A(P({3.0, 1.0})) - P({0.5, -2.0})).norm() <= 1e-15);

  const FieldSpec cubic = gauge_shift(base, GaugeFunction::monomial(2, 0, 1.0, 3));
  const Point x = P({0.7, -0.4});
  CHECK(cubic.A(x)[0] == doctest::Approx(3.0 * 0.49).epsilon(1e-15));
  CHECK(cubic.A(x)[1] == 0.0);

  // Gradient field of phi = x1^2: integral from 0 to e1 is 1.
  const FieldSpec sq = gauge_shift(base, GaugeFunction::monomial(2, 0, 1.0, 2));
  CHECK(exact_line_integral(sq, P({0.0, 0.0}), P({1.0, 0.0})) == doctest::Approx(1.0).epsilon(1e-15));

  // Additivity and the chord identity for a periodic gauge on a tanh base.
  const FieldSpec t = FieldSpec::zero(2).with_tanh(0.8);
  const GaugeFunction g1 = GaugeFunction::periodic_cubic(2, 0.6, 7.0);
  const GaugeFunction g2 = GaugeFunction::monomial(2, 1, 0.3, 2);
  const FieldSpec twice = gauge_shift(gauge_shift(t, g1), g2);
  const Point u = P({-1.2, 0.9}), v = P({0.8, 2.1});
  const double expected = exact_line_integral(t, u, v) + g1.value(v) - g1.value(u) + g2.value(v) - g2.value(u);
  CHECK(exact_line_integral(twice, u, v) == doctest::Approx(expected).epsilon(1e-13));
  CHECK((v - u).dot(line_average(twice, u, v)) == doctest::Approx(expected).epsilon(1e-10));

  const GaugeFunction no_grad = GaugeFunction::custom(2, [](const Point& p) { return p.sum(); });
  CHECK_THROWS_AS(gauge_shift(base, no_grad), DomainError);
}

TEST_CASE("tanh line average is adaptive and accurate") {
  const FieldSpec fs = FieldSpec::zero(1).with_tanh(1.0);
  const Point x = P({-2.0}), y = P({3.0});
  // int tanh = log cosh
  const double exact = (std::log(std::cosh(3.0)) - std::log(std::cosh(-2.0))) / 5.0;
  const LineAverage la = line_average_detailed(fs, x, y);
  CHECK(la.value[0] == doctest::Approx(exact).epsilon(1e-12));
  CHECK(la.nodes >= 16);
}

TEST_CASE("potentials") {
  const FieldSpec h = FieldSpec::zero(1).with_harmonic_capped(1.0, 10.0);
  CHECK(h.V(P({2.0})) == doctest::Approx(4.0));
  CHECK(h.V(P({5.0})) == doctest::Approx(10.0));
  CHECK(h.v_lower_bound() == 0.0);
  const FieldSpec g = FieldSpec::zero(1).with_gaussian_well(2.0, 1.0);
  CHECK(g.V(P({0.0})) == doctest::Approx(-2.0));
  CHECK(g.v_lower_bound() == doctest::Approx(-2.0));
}
