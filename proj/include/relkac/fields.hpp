#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "relkac/types.hpp"

namespace relkac {

enum class VectorFamily { Zero, Constant, Linear, ConstantField, QuadraticAxis, Tanh };
enum class ScalarFamily { Zero, HarmonicCapped, GaussianWell };

std::string to_string(VectorFamily f);
std::string to_string(ScalarFamily f);

// Gauge function phi with analytic gradient where available.
class GaugeFunction {
 public:
  enum class Kind { Linear, Monomial, PeriodicCubic, Custom };

  // phi(x) = a . x
  static GaugeFunction linear(const Point& a);
  // phi(x) = coef * x_axis^power
  static GaugeFunction monomial(int dim, int axis, double coef, int power);
  // phi(x) = amp * sum_i sin^3(2 pi x_i / period); periodic on a box of side period.
  static GaugeFunction periodic_cubic(int dim, double amp, double period);
  // User supplied; gradient and laplacian may be empty.
  static GaugeFunction custom(int dim, std::function<double(const Point&)> value,
                              std::function<Point(const Point&)> gradient = {},
                              std::function<double(const Point&)> laplacian = {});

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double value(const Point& x) const;
  bool has_gradient() const;
  Point gradient(const Point& x) const;
  std::optional<double> laplacian(const Point& x) const;
  // Polynomial degree of the gradient, or -1 if not polynomial.
  int gradient_degree() const;

 private:
  Kind kind_ = Kind::Linear;
  int dim_ = 1;
  Point a_;
  int axis_ = 0;
  double coef_ = 0.0;
  int power_ = 1;
  double amp_ = 0.0;
  double k_ = 0.0;
  std::function<double(const Point&)> value_fn_;
  std::function<Point(const Point&)> grad_fn_;
  std::function<double(const Point&)> lap_fn_;
};

struct LineAverage {
  Point value;
  double error_estimate = 0.0;
  int nodes = 0;
};

// Vector potential A, scalar potential V and any accumulated gauge terms.
// Immutable after construction; all evaluators are const and reentrant.
class FieldSpec {
 public:
  FieldSpec() : FieldSpec(1) {}
  explicit FieldSpec(int dim);

  // A families
  static FieldSpec zero(int dim);
  FieldSpec with_constant(const Point& a) const;
  // A(x) = M x (any real dim x dim matrix)
  FieldSpec with_linear(const Eigen::MatrixXd& M) const;
  // A = (-b x2 / 2, b x1 / 2, 0); d >= 2
  FieldSpec with_constant_field(double b) const;
  // A_component(x) = coef * x_source^2, other components 0
  FieldSpec with_quadratic_axis(int component, int source, double coef = 1.0) const;
  // A_i(x) = amp * tanh(x_i)
  FieldSpec with_tanh(double amp = 1.0) const;

  // V families
  FieldSpec with_harmonic_capped(double omega = 1.0, double cap = 10.0) const;
  FieldSpec with_gaussian_well(double depth, double width) const;

  int dim() const { return dim_; }
  VectorFamily vector_family() const { return a_family_; }
  ScalarFamily scalar_family() const { return v_family_; }
  const std::vector<GaugeFunction>& gauges() const { return gauges_; }

  Point A(const Point& x) const;
  // int_[x,y] A . dl in closed form: family formula plus phi(y) - phi(x) per gauge term.
  double line_integral(const Point& x, const Point& y) const;
  double V(const Point& x) const;
  std::optional<double> div_A(const Point& x) const;
  double v_lower_bound() const;

  bool a_is_zero() const;
  bool v_is_zero() const { return v_family_ == ScalarFamily::Zero; }
  // A is affine in x (Thm on coincidence of H1 and H3 applies).
  bool is_linear() const;
  // Polynomial degree of A, or -1.
  int poly_degree() const;

  // Largest discrepancy between div_A and a central difference of A over
  // the probe points; 0 if div_A is unavailable.
  double divergence_check(const std::vector<Point>& probes) const;
  // Throws ConfigError on inconsistent parameters.
  void validate() const;

  // Family parameters (read-only views used by the config echo).
  const Point& constant_part() const { return a_const_; }
  const Eigen::MatrixXd& linear_part() const { return a_lin_; }
  double field_strength() const { return b_; }
  double tanh_amp() const { return tanh_amp_; }
  int quad_component() const { return q_comp_; }
  int quad_source() const { return q_src_; }
  double quad_coef() const { return q_coef_; }
  double v_omega() const { return v_omega_; }
  double v_cap() const { return v_cap_; }
  double v_depth() const { return v_depth_; }
  double v_width() const { return v_width_; }

 private:
  friend FieldSpec gauge_shift(const FieldSpec& fs, const GaugeFunction& phi);

  Point base_A(const Point& x) const;

  int dim_;
  VectorFamily a_family_ = VectorFamily::Zero;
  Point a_const_;
  Eigen::MatrixXd a_lin_;
  double b_ = 0.0;
  int q_comp_ = 0;
  int q_src_ = 0;
  double q_coef_ = 1.0;
  double tanh_amp_ = 1.0;
  std::vector<GaugeFunction> gauges_;

  ScalarFamily v_family_ = ScalarFamily::Zero;
  double v_omega_ = 1.0;
  double v_cap_ = 10.0;
  double v_depth_ = 0.0;
  double v_width_ = 1.0;
};

// A((x+y)/2)
Point midpoint_eval(const FieldSpec& fs, const Point& x, const Point& y);

// int_0^1 A((1-theta) x + theta y) dtheta. Exact for polynomial A, otherwise
// Gauss-Legendre from 16 nodes, doubled until successive values agree to 1e-10.
LineAverage line_average_detailed(const FieldSpec& fs, const Point& x, const Point& y);
Point line_average(const FieldSpec& fs, const Point& x, const Point& y);

// Fixed-order chord average (no adaptivity), for inner loops over short chords.
Point line_average_fixed(const FieldSpec& fs, const Point& x, const Point& y, int nodes);

// Field with A replaced by A + grad(phi); throws DomainError if the gradient
// is unavailable.
FieldSpec gauge_shift(const FieldSpec& fs, const GaugeFunction& phi);

// Integral of A . dl over the segment from x to y (closed form).
double exact_line_integral(const FieldSpec& fs, const Point& x, const Point& y);

}  // namespace relkac
