#pragma once

#include <map>
#include <string>
#include <vector>

#include "relkac/fields.hpp"
#include "relkac/paths.hpp"
#include "relkac/types.hpp"

namespace relkac {

// S = i * imag_part + real_part; the path weight is exp(-S).
struct ActionValue {
  double real_part = 0.0;
  double imag_part = 0.0;
  std::map<std::string, double> diagnostics;

  Complex weight() const;
};

// Time-sliced actions on the path skeleton, using every stride-th grid point:
//   imag = sum_j P(X_{j-1}, X_j) . (X_j - X_{j-1}),  real = sum_j V((X_{j-1} + X_j)/2) dt_j
// with P the midpoint value of A (S1) or the chord average of A (S2).
ActionValue action_S1_sliced(const CadlagPath& path, const FieldSpec& fs, int stride = 1);
ActionValue action_S2_sliced(const CadlagPath& path, const FieldSpec& fs, int stride = 1);

// Radial and angular rules for the jump-form compensators. Build once per
// (m, d, eps_cut) and share between paths.
class JumpActionRule {
 public:
  JumpActionRule(const MassDim& md, double eps_cut);

  struct Node {
    double r;
    double w;  // GL weight * r^{d-1} n(r)
  };
  struct Direction {
    Point omega;
    double w;  // hemisphere only; weights sum to |S^{d-1}|
  };

  const MassDim& mass_dim() const { return md_; }
  double cutoff() const { return eps_; }
  // Shells covering (eps, 1) and (0, eps), outermost first.
  const std::vector<std::vector<Node>>& outer_shells() const { return outer_; }
  const std::vector<std::vector<Node>>& inner_shells() const { return inner_; }
  const std::vector<Direction>& directions() const { return dirs_; }

  static constexpr double kCauchyTol = 1e-8;

 private:
  MassDim md_;
  double eps_;
  std::vector<std::vector<Node>> outer_, inner_;
  std::vector<Direction> dirs_;
};

// Chord rule used by the jump forms.
enum class ChordRule { Midpoint, LineAverage };

// p.v. int_{0<|y|<1} P(x, y) . y n(dy) split at eps:
//   inner = int_{|y|<eps}, outer = int_{eps<|y|<1} (the compensator of the recorded small jumps).
// P(x, y) = A(x + y/2) or the average of A along [x, x + y].
struct PvSplit {
  double inner = 0.0;
  double outer = 0.0;
  int shells = 0;
};
PvSplit pv_compensator(const FieldSpec& fs, const Point& x, const JumpActionRule& rule, ChordRule chord);

// Jump-measure forms. Recorded jumps enter raw (|y| >= 1) or compensated
// (eps < |y| < 1); the Gaussian small-jump surrogate enters as an Ito sum.
ActionValue action_S1_jump(const CadlagPath& path, const FieldSpec& fs, const JumpActionRule& rule);
ActionValue action_S2_jump(const CadlagPath& path, const FieldSpec& fs, const JumpActionRule& rule);

// Subordinated Brownian action: Stratonovich midpoint sum over the Brownian
// grid up to T(t), plus the trapezoid V integral on the outer grid (every
// stride-th point). Diagnostics carry the Ito form and its div A correction.
ActionValue action_S3(const BrownianPath& bpath, const SubordinatorPath& spath, const FieldSpec& fs,
                      int stride = 1);

}  // namespace relkac
