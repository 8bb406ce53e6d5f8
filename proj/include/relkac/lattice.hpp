#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "relkac/fields.hpp"
#include "relkac/types.hpp"

namespace relkac {

// Periodic grid with N points per axis on [-L/2, L/2)^d.
class Lattice {
 public:
  static constexpr int kMaxSites = 4096;

  Lattice(int d, int n, double length);

  int dim() const { return d_; }
  int n() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return length_ / n_; }
  int size() const { return size_; }

  std::array<int, 3> multi_index(int idx) const;
  int flat_index(const std::array<int, 3>& mi) const;  // wraps each component
  Point site(int idx) const;
  // Momentum 2 pi k / L with k in {-N/2, ..., N/2 - 1}.
  Point dual(int idx) const;
  // Minimal-image displacement site(x) - site(y). At exactly half the box the
  // raw difference is kept, so displacement(y, x) = -displacement(x, y).
  Point displacement(int x, int y) const;
  // Chord used for the pair (x, y): b - a = displacement(x, y). The lower
  // index sits at its true site, so (y, x) yields the same segment reversed.
  void chord(int x, int y, Point& a, Point& b) const;
  // Index of the difference of multi-indices, wrapped (used for kernels).
  int difference_index(int x, int y) const;
  // Site index if p lies on the grid (within 1e-9 h), else -1.
  int find_site(const Point& p) const;

  std::vector<Point> sites() const;

 private:
  int d_, n_, size_;
  double length_;
};

enum class Variant { H0, H1, H2, H3, NR };
std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

// Hermitian eigendecomposition through LAPACK zheevd.
void hermitian_eigen(const CMatrix& H, RVector& values, CMatrix& vectors);
RVector hermitian_eigenvalues(const CMatrix& H);
// Spectral norm of a Hermitian matrix.
double hermitian_norm2(const CMatrix& H);
double hermiticity_defect(const CMatrix& H);

// Dense Hermitian lattice operator with a lazily computed eigendecomposition.
// Copies share state; safe for concurrent const use.
class LatticeOperator {
 public:
  LatticeOperator(Variant v, double mass, CMatrix H);
  LatticeOperator(Variant v, double mass, CMatrix H, RVector values, CMatrix vectors);
  // Eigenpairs supplied on first use by a callback.
  LatticeOperator(Variant v, double mass, CMatrix H, std::function<void(RVector&, CMatrix&)> provider);

  Variant variant() const { return variant_; }
  double mass() const { return mass_; }
  const CMatrix& matrix() const;
  const RVector& eigenvalues() const;
  const CMatrix& eigenvectors() const;

 private:
  struct State;
  void ensure_eigen() const;

  Variant variant_;
  double mass_;
  std::shared_ptr<State> state_;
};

// Kernel table of a circulant operator: entry j is (1/N^d) sum_k s(xi_k) e^{i xi_k . x_j},
// where x_j runs over multi-index differences. symbol(xi) must be even.
RVector circulant_kernel(const Lattice& lat, const std::function<double(const Point&)>& symbol);

LatticeOperator build_H0(const Lattice& lat, const MassDim& md);
LatticeOperator build_H1(const Lattice& lat, const FieldSpec& fs, const MassDim& md);
LatticeOperator build_H2(const Lattice& lat, const FieldSpec& fs, const MassDim& md);
// Covariant finite-difference operator D = (-i grad - A)^2 + m^2 with link phases.
CMatrix build_covariant_laplacian(const Lattice& lat, const FieldSpec& fs, double mass);
// Matrix-free application of D.
CVector apply_covariant_laplacian(const Lattice& lat, const FieldSpec& fs, double mass,
                                  const CVector& f);
LatticeOperator build_H3(const Lattice& lat, const FieldSpec& fs, const MassDim& md);
// Magnetic nonrelativistic operator (1/2)(-i grad - A)^2.
LatticeOperator build_HNR(const Lattice& lat, const FieldSpec& fs);
LatticeOperator build_variant(Variant v, const Lattice& lat, const FieldSpec& fs, const MassDim& md);

// Fourier-multiplier form of the free finite-difference square root,
// sqrt(sum_a (4/h^2) sin^2(xi_a h / 2) + m^2). Equals build_H3 at A = 0.
LatticeOperator build_H3_free_spectral(const Lattice& lat, const MassDim& md);

// op + diag(V(sites)).
LatticeOperator add_potential(const LatticeOperator& op, const Lattice& lat, const FieldSpec& fs);

CMatrix semigroup(const LatticeOperator& op, double t);
CVector apply_semigroup(const LatticeOperator& op, double t, const CVector& g);
double spectral_floor(const LatticeOperator& op);

CVector sample_on_lattice(const Lattice& lat, const std::function<Complex(const Point&)>& g);

struct GaugeResidual {
  double absolute = 0.0;  // ||H_{A+grad phi} - U H_A U^dagger||_2
  double norm = 0.0;      // ||H_A||_2
  double relative() const { return absolute / norm; }
};
GaugeResidual gauge_residual_detail(Variant v, const FieldSpec& fs, const GaugeFunction& phi,
                                    const Lattice& lat, const MassDim& md);
// ||H_{A+grad phi} - U H_A U^dagger||_2 / ||H_A||_2 with U = diag(e^{i phi}).
double gauge_residual(Variant v, const FieldSpec& fs, const GaugeFunction& phi, const Lattice& lat,
                      const MassDim& md);

// sqrt(D) f by Lanczos with full reorthogonalization.
CVector apply_sqrt_covariant(const Lattice& lat, const FieldSpec& fs, double mass, const CVector& f,
                             double tol = 1e-12, int max_iter = 600);

// Smooth probes concentrated in the central half of the box.
std::vector<CVector> interior_probes(const Lattice& lat);

struct CoincidenceResidual {
  double h1_minus_h3 = 0.0;  // max_f ||(H1 - H3) f|| / ||f||
  double h1sq_minus_d = 0.0; // max_f ||(H1^2 - D) f|| / ||f||
};
CoincidenceResidual coincidence_residual(const FieldSpec& fs, const Lattice& lat, const MassDim& md);

struct DiamagneticValues {
  double magnetic = 0.0;  // Re (f, e^{-t(H3_A - m)} f)
  double free = 0.0;      // (|f|, e^{-t(H3_0 - m)} |f|)
};
DiamagneticValues diamagnetic_check(const LatticeOperator& h3_magnetic, const LatticeOperator& h3_free,
                                    double t, const CVector& f);
DiamagneticValues diamagnetic_check(const FieldSpec& fs, const Lattice& lat, const MassDim& md, double t,
                                    const CVector& f);

struct QuadraticFormValue {
  double form = 0.0;         // jump-form expression
  double expectation = 0.0;  // Re (u, (H + V) u)
  double norm2 = 0.0;        // ||u||^2
  double rel_gap() const;    // |form - expectation| / ||u||^2
};
// Jump weights are the lattice Levy weights w(x, y) = -H0[x, y].
QuadraticFormValue quadratic_form(Variant v, const CVector& u, const FieldSpec& fs, const Lattice& lat,
                                  const MassDim& md);
// max over axis displacements r in radii (multiples of the spacing) of
// |wbar(r)/h^d - n(r)| / n(r), wbar the [1,2,1]/4 average of the weights along
// the axis. Band-limited weights alternate in parity, so only the local
// average converges pointwise.
double levy_weight_deviation(const Lattice& lat, const MassDim& md, const std::vector<double>& radii);

// (e^{-(t/n)(H3_A - m)} e^{-(t/n) V})^n
CMatrix trotter_product(const FieldSpec& fs, const Lattice& lat, const MassDim& md, double t, int n);

// Lattice free semigroup kernel e^{-tau (H0 - m)} as a circulant table.
RVector free_semigroup_kernel(const Lattice& lat, const MassDim& md, double tau);
CMatrix sliced_operator_T(const FieldSpec& fs, const Lattice& lat, const MassDim& md, double tau);
CMatrix sliced_product(const FieldSpec& fs, const Lattice& lat, const MassDim& md, double t, int n);

// Value of a lattice function at x: exact at sites, trigonometric interpolation otherwise.
Complex interpolate(const Lattice& lat, const CVector& values, const Point& x);

}  // namespace relkac
