#include "relkac/fields.hpp"

#include <cmath>
#include <numbers>

#include "relkac/quadrature.hpp"

namespace relkac {

std::string to_string(VectorFamily f) {
  switch (f) {
    case VectorFamily::Zero: return "zero";
    case VectorFamily::Constant: return "constant";
    case VectorFamily::Linear: return "linear";
    case VectorFamily::ConstantField: return "constant_field";
    case VectorFamily::QuadraticAxis: return "quadratic_axis";
    case VectorFamily::Tanh: return "tanh";
  }
  return "?";
}

std::string to_string(ScalarFamily f) {
  switch (f) {
    case ScalarFamily::Zero: return "zero";
    case ScalarFamily::HarmonicCapped: return "harmonic_capped";
    case ScalarFamily::GaussianWell: return "gaussian_well";
  }
  return "?";
}

// ---- GaugeFunction -------------------------------------------------------

GaugeFunction GaugeFunction::linear(const Point& a) {
  GaugeFunction g;
  g.kind_ = Kind::Linear;
  g.dim_ = static_cast<int>(a.size());
  g.a_ = a;
  return g;
}

GaugeFunction GaugeFunction::monomial(int dim, int axis, double coef, int power) {
  if (axis < 0 || axis >= dim) throw DomainError("monomial gauge: axis out of range");
  if (power < 1) throw DomainError("monomial gauge: power must be >= 1");
  GaugeFunction g;
  g.kind_ = Kind::Monomial;
  g.dim_ = dim;
  g.axis_ = axis;
  g.coef_ = coef;
  g.power_ = power;
  return g;
}

GaugeFunction GaugeFunction::periodic_cubic(int dim, double amp, double period) {
  if (!(period > 0.0)) throw DomainError("periodic gauge: period must be > 0");
  GaugeFunction g;
  g.kind_ = Kind::PeriodicCubic;
  g.dim_ = dim;
  g.amp_ = amp;
  g.k_ = 2.0 * std::numbers::pi / period;
  return g;
}

GaugeFunction GaugeFunction::custom(int dim, std::function<double(const Point&)> value,
                                    std::function<Point(const Point&)> gradient,
                                    std::function<double(const Point&)> laplacian) {
  GaugeFunction g;
  g.kind_ = Kind::Custom;
  g.dim_ = dim;
  g.value_fn_ = std::move(value);
  g.grad_fn_ = std::move(gradient);
  g.lap_fn_ = std::move(laplacian);
  return g;
}

double GaugeFunction::value(const Point& x) const {
  switch (kind_) {
    case Kind::Linear: return a_.dot(x);
    case Kind::Monomial: return coef_ * std::pow(x[axis_], power_);
    case Kind::PeriodicCubic: {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) s += std::pow(std::sin(k_ * x[i]), 3);
      return amp_ * s;
    }
    case Kind::Custom: return value_fn_(x);
  }
  return 0.0;
}

bool GaugeFunction::has_gradient() const { return kind_ != Kind::Custom || static_cast<bool>(grad_fn_); }

Point GaugeFunction::gradient(const Point& x) const {
  Point g = Point::Zero(dim_);
  switch (kind_) {
    case Kind::Linear: return a_;
    case Kind::Monomial: g[axis_] = coef_ * power_ * std::pow(x[axis_], power_ - 1); return g;
    case Kind::PeriodicCubic:
      for (int i = 0; i < dim_; ++i) {
        const double s = std::sin(k_ * x[i]);
        g[i] = 3.0 * amp_ * k_ * s * s * std::cos(k_ * x[i]);
      }
      return g;
    case Kind::Custom:
      if (!grad_fn_) throw DomainError("gauge function has no gradient");
      return grad_fn_(x);
  }
  return g;
}

std::optional<double> GaugeFunction::laplacian(const Point& x) const {
  switch (kind_) {
    case Kind::Linear: return 0.0;
    case Kind::Monomial:
      if (power_ < 2) return 0.0;
      return coef_ * power_ * (power_ - 1) * std::pow(x[axis_], power_ - 2);
    case Kind::PeriodicCubic: {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) {
        const double sn = std::sin(k_ * x[i]);
        const double cs = std::cos(k_ * x[i]);
        s += 3.0 * amp_ * k_ * k_ * (2.0 * sn * cs * cs - sn * sn * sn);
      }
      return s;
    }
    case Kind::Custom:
      if (lap_fn_) return lap_fn_(x);
      return std::nullopt;
  }
  return std::nullopt;
}

int GaugeFunction::gradient_degree() const {
  switch (kind_) {
    case Kind::Linear: return 0;
    case Kind::Monomial: return power_ - 1;
    default: return -1;
  }
}

// ---- FieldSpec -----------------------------------------------------------

FieldSpec::FieldSpec(int dim) : dim_(dim) {
  if (dim < 1 || dim > 3) throw DomainError("FieldSpec: dimension must be 1, 2 or 3");
  a_const_ = Point::Zero(dim);
  a_lin_ = Eigen::MatrixXd::Zero(dim, dim);
}

FieldSpec FieldSpec::zero(int dim) { return FieldSpec(dim); }

FieldSpec FieldSpec::with_constant(const Point& a) const {
  if (a.size() != dim_) throw DomainError("constant A: dimension mismatch");
  FieldSpec f = *this;
  f.a_family_ = VectorFamily::Constant;
  f.a_const_ = a;
  return f;
}

FieldSpec FieldSpec::with_linear(const Eigen::MatrixXd& M) const {
  if (M.rows() != dim_ || M.cols() != dim_) throw DomainError("linear A: matrix must be d x d");
  FieldSpec f = *this;
  f.a_family_ = VectorFamily::Linear;
  f.a_lin_ = M;
  return f;
}

FieldSpec FieldSpec::with_constant_field(double b) const {
  if (dim_ < 2) throw DomainError("constant field A needs d >= 2");
  FieldSpec f = *this;
  f.a_family_ = VectorFamily::ConstantField;
  f.b_ = b;
  f.a_lin_ = Eigen::MatrixXd::Zero(dim_, dim_);
  f.a_lin_(0, 1) = -0.5 * b;
  f.a_lin_(1, 0) = 0.5 * b;
  return f;
}

FieldSpec FieldSpec::with_quadratic_axis(int component, int source, double coef) const {
  if (component < 0 || component >= dim_ || source < 0 || source >= dim_)
    throw DomainError("quadratic A: axis out of range");
  FieldSpec f = *this;
  f.a_family_ = VectorFamily::QuadraticAxis;
  f.q_comp_ = component;
  f.q_src_ = source;
  f.q_coef_ = coef;
  return f;
}

FieldSpec FieldSpec::with_tanh(double amp) const {
  FieldSpec f = *this;
  f.a_family_ = VectorFamily::Tanh;
  f.tanh_amp_ = amp;
  return f;
}

FieldSpec FieldSpec::with_harmonic_capped(double omega, double cap) const {
  if (!(omega >= 0.0) || !(cap >= 0.0)) throw DomainError("harmonic_capped: omega, cap must be >= 0");
  FieldSpec f = *this;
  f.v_family_ = ScalarFamily::HarmonicCapped;
  f.v_omega_ = omega;
  f.v_cap_ = cap;
  return f;
}

FieldSpec FieldSpec::with_gaussian_well(double depth, double width) const {
  if (!(width > 0.0)) throw DomainError("gaussian_well: width must be > 0");
  FieldSpec f = *this;
  f.v_family_ = ScalarFamily::GaussianWell;
  f.v_depth_ = depth;
  f.v_width_ = width;
  return f;
}

Point FieldSpec::base_A(const Point& x) const {
  switch (a_family_) {
    case VectorFamily::Zero: return Point::Zero(dim_);
    case VectorFamily::Constant: return a_const_;
    case VectorFamily::Linear:
    case VectorFamily::ConstantField: return a_lin_ * x;
    case VectorFamily::QuadraticAxis: {
      Point a = Point::Zero(dim_);
      a[q_comp_] = q_coef_ * x[q_src_] * x[q_src_];
      return a;
    }
    case VectorFamily::Tanh: {
      Point a(dim_);
      for (int i = 0; i < dim_; ++i) a[i] = tanh_amp_ * std::tanh(x[i]);
      return a;
    }
  }
  return Point::Zero(dim_);
}

Point FieldSpec::A(const Point& x) const {
  Point a = base_A(x);
  for (const auto& g : gauges_) a += g.gradient(x);
  return a;
}

namespace {
// log cosh without overflow
double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}
}  // namespace

double FieldSpec::line_integral(const Point& x, const Point& y) const {
  const Point dx = y - x;
  double s = 0.0;
  switch (a_family_) {
    case VectorFamily::Zero: break;
    case VectorFamily::Constant: s = a_const_.dot(dx); break;
    case VectorFamily::Linear:
    case VectorFamily::ConstantField: s = dx.dot(a_lin_ * (0.5 * (x + y))); break;
    case VectorFamily::QuadraticAxis: {
      const double a = x[q_src_], b = y[q_src_];
      s = dx[q_comp_] * q_coef_ * (a * a + a * b + b * b) / 3.0;
      break;
    }
    case VectorFamily::Tanh:
      for (int i = 0; i < dim_; ++i) s += tanh_amp_ * (log_cosh(y[i]) - log_cosh(x[i]));
      break;
  }
  for (const auto& g : gauges_) s += g.value(y) - g.value(x);
  return s;
}

double FieldSpec::V(const Point& x) const {
  switch (v_family_) {
    case ScalarFamily::Zero: return 0.0;
    case ScalarFamily::HarmonicCapped: return std::min(v_omega_ * x.squaredNorm(), v_cap_);
    case ScalarFamily::GaussianWell:
      return -v_depth_ * std::exp(-x.squaredNorm() / (2.0 * v_width_ * v_width_));
  }
  return 0.0;
}

std::optional<double> FieldSpec::div_A(const Point& x) const {
  double div = 0.0;
  switch (a_family_) {
    case VectorFamily::Zero:
    case VectorFamily::Constant:
    case VectorFamily::ConstantField: break;
    case VectorFamily::Linear: div = a_lin_.trace(); break;
    case VectorFamily::QuadraticAxis:
      if (q_comp_ == q_src_) div = 2.0 * q_coef_ * x[q_src_];
      break;
    case VectorFamily::Tanh:
      for (int i = 0; i < dim_; ++i) {
        const double c = std::cosh(x[i]);
        div += tanh_amp_ / (c * c);
      }
      break;
  }
  for (const auto& g : gauges_) {
    auto l = g.laplacian(x);
    if (!l) return std::nullopt;
    div += *l;
  }
  return div;
}

double FieldSpec::v_lower_bound() const {
  switch (v_family_) {
    case ScalarFamily::Zero:
    case ScalarFamily::HarmonicCapped: return 0.0;
    case ScalarFamily::GaussianWell: return std::min(0.0, -v_depth_);
  }
  return 0.0;
}

bool FieldSpec::a_is_zero() const { return a_family_ == VectorFamily::Zero && gauges_.empty(); }

int FieldSpec::poly_degree() const {
  int deg = 0;
  switch (a_family_) {
    case VectorFamily::Zero:
    case VectorFamily::Constant: deg = 0; break;
    case VectorFamily::Linear:
    case VectorFamily::ConstantField: deg = 1; break;
    case VectorFamily::QuadraticAxis: deg = 2; break;
    case VectorFamily::Tanh: return -1;
  }
  for (const auto& g : gauges_) {
    const int gd = g.gradient_degree();
    if (gd < 0) return -1;
    deg = std::max(deg, gd);
  }
  return deg;
}

bool FieldSpec::is_linear() const {
  const int deg = poly_degree();
  return deg >= 0 && deg <= 1;
}

double FieldSpec::divergence_check(const std::vector<Point>& probes) const {
  constexpr double h = 1e-4;
  double worst = 0.0;
  for (const auto& x : probes) {
    auto div = div_A(x);
    if (!div) return 0.0;
    double fd = 0.0;
    for (int i = 0; i < dim_; ++i) {
      Point xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      fd += (A(xp)[i] - A(xm)[i]) / (2.0 * h);
    }
    worst = std::max(worst, std::abs(fd - *div));
  }
  return worst;
}

void FieldSpec::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!a_const_.allFinite() || !a_lin_.allFinite() || !finite(b_) || !finite(tanh_amp_) ||
      !finite(q_coef_) || !finite(v_omega_) || !finite(v_cap_) || !finite(v_depth_) ||
      !finite(v_width_))
    throw ConfigError("field parameters must be finite");
  for (const auto& g : gauges_)
    if (g.dim() != dim_) throw ConfigError("gauge dimension mismatch");
  std::vector<Point> probes;
  for (double s : {-1.3, -0.4, 0.2, 0.9, 1.7}) {
    Point p(dim_);
    for (int i = 0; i < dim_; ++i) p[i] = s * (1.0 + 0.37 * i) - 0.11 * i;
    probes.push_back(p);
  }
  if (divergence_check(probes) > 1e-6) throw ConfigError("div A inconsistent with A");
}

// ---- evaluation rules ----------------------------------------------------

Point midpoint_eval(const FieldSpec& fs, const Point& x, const Point& y) {
  return fs.A(0.5 * (x + y));
}

Point line_average_fixed(const FieldSpec& fs, const Point& x, const Point& y, int nodes) {
  const GaussRule& g = gauss_legendre(nodes);
  const Point d = y - x;
  Point acc = Point::Zero(fs.dim());
  for (int i = 0; i < nodes; ++i) {
    const double theta = 0.5 * (1.0 + g.nodes[i]);
    acc += g.weights[i] * fs.A(x + theta * d);
  }
  return 0.5 * acc;
}

LineAverage line_average_detailed(const FieldSpec& fs, const Point& x, const Point& y) {
  const int deg = fs.poly_degree();
  if (deg >= 0 && deg <= 4) {
    // 3-point Gauss-Legendre integrates degree <= 5 exactly.
    return {line_average_fixed(fs, x, y, 3), 0.0, 3};
  }
  constexpr double kTol = 1e-10;
  constexpr int kMaxNodes = 4096;
  int n = 16;
  Point prev = line_average_fixed(fs, x, y, n);
  while (n < kMaxNodes) {
    n *= 2;
    Point cur = line_average_fixed(fs, x, y, n);
    const double diff = (cur - prev).cwiseAbs().maxCoeff();
    if (diff < kTol) return {cur, diff, n};
    prev = cur;
  }
  throw QuadratureFailure("line_average: no convergence");
}

Point line_average(const FieldSpec& fs, const Point& x, const Point& y) {
  return line_average_detailed(fs, x, y).value;
}

FieldSpec gauge_shift(const FieldSpec& fs, const GaugeFunction& phi) {
  if (phi.dim() != fs.dim()) throw DomainError("gauge_shift: dimension mismatch");
  if (!phi.has_gradient()) throw DomainError("gauge_shift: gauge function has no gradient");
  FieldSpec out = fs;
  out.gauges_.push_back(phi);
  return out;
}

double exact_line_integral(const FieldSpec& fs, const Point& x, const Point& y) { return fs.line_integral(x, y); }

}  // namespace relkac
