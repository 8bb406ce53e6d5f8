#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relkac/fields.hpp"
#include "relkac/lattice.hpp"
#include "relkac/types.hpp"

namespace relkac {

// Initial datum g from a fixed registry. Bounded, with stored sup norm.
class ProbeFunction {
 public:
  enum class Kind { Gaussian, Bump, PlaneWaveWindowed };

  // exp(-|x - c|^2 / (2 w^2))
  static ProbeFunction gaussian(const Point& center, double width = 1.0);
  // exp(1 - 1 / (1 - |x - c|^2 / R^2)) inside the ball, 0 outside; sup 1
  static ProbeFunction bump(const Point& center, double radius = 2.0);
  // exp(i k . x) exp(-|x - c|^2 / (2 w^2))
  static ProbeFunction plane_wave_windowed(const Point& center, const Point& k, double width = 4.0);

  Kind kind() const { return kind_; }
  std::string name() const;
  int dim() const { return static_cast<int>(center_.size()); }
  const Point& center() const { return center_; }
  double width() const { return width_; }
  const Point& wavevector() const { return k_; }
  double sup_norm() const { return 1.0; }
  // Radius beyond which |g| < 1e-17 (or the support radius).
  double reach() const;

  Complex operator()(const Point& x) const;
  // e^{i sign phi(x)} g(x)
  std::function<Complex(const Point&)> gauged(const GaugeFunction& phi, double sign) const;

 private:
  Kind kind_ = Kind::Gaussian;
  Point center_;
  Point k_;
  double width_ = 1.0;
};

ProbeFunction::Kind parse_probe_kind(const std::string& s);

enum class ActionForm { Sliced, Jump };
std::string to_string(ActionForm f);
ActionForm parse_action_form(const std::string& s);

struct McParams {
  std::int64_t n_paths = 200000;
  int n_slices = 64;          // sliced forms; the control column uses 2 n_slices
  double eps_cut = 0.1;       // jump form; the control column uses eps_cut / 2
  int brownian_steps = 512;   // variant 3: dt_B = T(t) / brownian_steps
  ActionForm form = ActionForm::Sliced;
  bool control = true;

  void validate() const;
};

inline constexpr std::int64_t kChunkSize = 4096;

struct EstimateReport {
  int variant = 1;
  ActionForm form = ActionForm::Sliced;
  Point x;
  double t = 0.0;
  MassDim md;
  McParams mc;
  std::uint64_t seed = 0;
  Complex mean;
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  std::int64_t n_paths = 0;
  // Control column: 2 n_slices (paired, same paths) or eps_cut / 2 (fresh paths).
  bool has_control = false;
  Complex control_mean;
  double control_stderr_re = 0.0;
  double control_stderr_im = 0.0;
  Complex control_shift;           // control - mean
  double control_shift_stderr = 0.0;
  double max_weight = 0.0;         // largest |e^{-S} g| seen
  std::map<std::string, double> diagnostics;  // path means of action terms
  std::optional<Complex> oracle;
  std::optional<double> z_score;

  double stderr_abs() const;  // sqrt(se_re^2 + se_im^2)
};

// Monte Carlo value of (e^{-t[H_j - m]} g)(x) for j in {1, 2, 3}.
EstimateReport estimate(int variant, const FieldSpec& fs, const std::function<Complex(const Point&)>& g,
                        const Point& x, double t, const MassDim& md, const McParams& mc, std::uint64_t seed);
EstimateReport estimate(int variant, const FieldSpec& fs, const ProbeFunction& g, const Point& x, double t,
                        const MassDim& md, const McParams& mc, std::uint64_t seed);

struct OracleVerdict {
  bool pass = false;
  double deviation = 0.0;  // |mean - lat_value|
  double stderr = 0.0;
  double lat_tol = 0.0;
  double bound = 0.0;      // 3 stderr + lat_tol
  Complex lat_value;
  Complex mean;
};

OracleVerdict compare_with_oracle(const EstimateReport& report, Complex lat_value, double lat_tol);

enum class Sampler { Subordinated, Jump };
std::string to_string(Sampler s);
Sampler parse_sampler(const std::string& s);

struct CharfnRow {
  double xi = 0.0;
  Complex empirical;
  double exact = 0.0;
  double stderr = 0.0;
  double z = 0.0;  // |empirical - exact| / stderr (0 when stderr vanishes and they agree)
};

// Empirical E[exp(i xi X_1(t))] from X(0) = 0, against exp(-t (sqrt(xi^2 + m^2) - m)).
std::vector<CharfnRow> charfn_suite(Sampler sampler, const MassDim& md, double t, const std::vector<double>& xi_grid,
                                    std::int64_t n_paths, std::uint64_t seed, double eps_cut = 0.05);

// (e^{-t[H_j + V - m]} g)(x) on a lattice, j in {1, 2, 3}.
Complex lattice_oracle_value(int variant, const FieldSpec& fs, const std::function<Complex(const Point&)>& g,
                             const Point& x, double t, const MassDim& md, const Lattice& lat);

// int k0(x - y, t) g(y) dy by adaptive quadrature (d <= 2).
Complex free_semigroup_value(const ProbeFunction& g, const Point& x, double t, const MassDim& md);

struct LatticeTolerance {
  double lat_tol = 0.0;
  Complex lattice_free;
  Complex exact_free;
};
// Free-case periodization error of the variant's lattice operator at (x, t).
LatticeTolerance free_case_lat_tol(int variant, const ProbeFunction& g, const Point& x, double t, const MassDim& md,
                                   const Lattice& lat);

}  // namespace relkac
