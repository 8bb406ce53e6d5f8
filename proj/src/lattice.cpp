#include "relkac/lattice.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <mutex>
#include <numbers>

#define lapack_complex_double std::complex<double>
#define lapack_complex_float std::complex<float>
#include <lapacke.h>

#include "relkac/parallel.hpp"
#include "relkac/specfun.hpp"

namespace relkac {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

// ---- Lattice -------------------------------------------------------------

Lattice::Lattice(int d, int n, double length) : d_(d), n_(n), size_(1), length_(length) {
  if (d < 1 || d > 3) throw DomainError("Lattice: d must be 1, 2 or 3");
  if (n < 2 || n % 2 != 0) throw DomainError("Lattice: N must be even and >= 2");
  if (!(length > 0.0)) throw DomainError("Lattice: L must be > 0");
  for (int a = 0; a < d; ++a) {
    size_ *= n;
    if (size_ > kMaxSites) throw DomainError("Lattice: N^d exceeds the dense budget of 4096 sites");
  }
}

std::array<int, 3> Lattice::multi_index(int idx) const {
  std::array<int, 3> mi{0, 0, 0};
  for (int a = 0; a < d_; ++a) {
    mi[a] = idx % n_;
    idx /= n_;
  }
  return mi;
}

int Lattice::flat_index(const std::array<int, 3>& mi) const {
  int idx = 0;
  for (int a = d_ - 1; a >= 0; --a) idx = idx * n_ + ((mi[a] % n_) + n_) % n_;
  return idx;
}

Point Lattice::site(int idx) const {
  const auto mi = multi_index(idx);
  Point p(d_);
  for (int a = 0; a < d_; ++a) p[a] = -0.5 * length_ + mi[a] * spacing();
  return p;
}

Point Lattice::dual(int idx) const {
  const auto mi = multi_index(idx);
  Point p(d_);
  for (int a = 0; a < d_; ++a) p[a] = kTwoPi * (mi[a] - n_ / 2) / length_;
  return p;
}

Point Lattice::displacement(int x, int y) const {
  const auto mx = multi_index(x);
  const auto my = multi_index(y);
  Point p(d_);
  for (int a = 0; a < d_; ++a) {
    int di = mx[a] - my[a];
    if (di > n_ / 2) di -= n_;
    if (di < -n_ / 2) di += n_;
    p[a] = di * spacing();
  }
  return p;
}

void Lattice::chord(int x, int y, Point& a, Point& b) const {
  const Point delta = displacement(x, y);
  if (x <= y) {
    b = site(x);
    a = b - delta;
  } else {
    a = site(y);
    b = a + delta;
  }
}

int Lattice::difference_index(int x, int y) const {
  const auto mx = multi_index(x);
  const auto my = multi_index(y);
  std::array<int, 3> md{0, 0, 0};
  for (int a = 0; a < d_; ++a) md[a] = mx[a] - my[a];
  return flat_index(md);
}

int Lattice::find_site(const Point& p) const {
  if (p.size() != d_) return -1;
  std::array<int, 3> mi{0, 0, 0};
  const double h = spacing();
  for (int a = 0; a < d_; ++a) {
    const double u = (p[a] + 0.5 * length_) / h;
    const double r = std::round(u);
    if (std::abs(u - r) > 1e-9) return -1;
    mi[a] = static_cast<int>(r);
  }
  return flat_index(mi);
}

std::vector<Point> Lattice::sites() const {
  std::vector<Point> out;
  out.reserve(size_);
  for (int i = 0; i < size_; ++i) out.push_back(site(i));
  return out;
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::H0: return "h0";
    case Variant::H1: return "h1";
    case Variant::H2: return "h2";
    case Variant::H3: return "h3";
    case Variant::NR: return "nr";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "h0" || s == "H0" || s == "0") return Variant::H0;
  if (s == "h1" || s == "H1" || s == "1") return Variant::H1;
  if (s == "h2" || s == "H2" || s == "2") return Variant::H2;
  if (s == "h3" || s == "H3" || s == "3") return Variant::H3;
  if (s == "nr" || s == "NR") return Variant::NR;
  throw ConfigError("unknown variant '" + s + "'");
}

// ---- dense linear algebra ------------------------------------------------

void hermitian_eigen(const CMatrix& H, RVector& values, CMatrix& vectors) {
  const int n = static_cast<int>(H.rows());
  vectors = H;
  values.resize(n);
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, vectors.data(), n, values.data());
  if (info != 0) throw NumericalFailure("zheevd failed with info " + std::to_string(info));
}

RVector hermitian_eigenvalues(const CMatrix& H) {
  const int n = static_cast<int>(H.rows());
  CMatrix work = H;
  RVector values(n);
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'U', n, work.data(), n, values.data());
  if (info != 0) throw NumericalFailure("zheevd failed with info " + std::to_string(info));
  return values;
}

double hermitian_norm2(const CMatrix& H) { return hermitian_eigenvalues(H).cwiseAbs().maxCoeff(); }

double hermiticity_defect(const CMatrix& H) { return (H - H.adjoint()).cwiseAbs().maxCoeff(); }

// ---- LatticeOperator -----------------------------------------------------

struct LatticeOperator::State {
  CMatrix H;
  std::function<void(RVector&, CMatrix&)> provider;
  std::once_flag once;
  RVector values;
  CMatrix vectors;
};

LatticeOperator::LatticeOperator(Variant v, double mass, CMatrix H)
    : variant_(v), mass_(mass), state_(std::make_shared<State>()) {
  state_->H = std::move(H);
}

LatticeOperator::LatticeOperator(Variant v, double mass, CMatrix H,
                                 std::function<void(RVector&, CMatrix&)> provider)
    : LatticeOperator(v, mass, std::move(H)) {
  state_->provider = std::move(provider);
}

LatticeOperator::LatticeOperator(Variant v, double mass, CMatrix H, RVector values, CMatrix vectors)
    : LatticeOperator(v, mass, std::move(H)) {
  auto vals = std::make_shared<RVector>(std::move(values));
  auto vecs = std::make_shared<CMatrix>(std::move(vectors));
  state_->provider = [vals, vecs](RVector& w, CMatrix& V) {
    w = std::move(*vals);
    V = std::move(*vecs);
  };
}

void LatticeOperator::ensure_eigen() const {
  std::call_once(state_->once, [this] {
    if (state_->provider) {
      state_->provider(state_->values, state_->vectors);
      state_->provider = nullptr;
    } else {
      hermitian_eigen(state_->H, state_->values, state_->vectors);
    }
  });
}

const CMatrix& LatticeOperator::matrix() const { return state_->H; }

const RVector& LatticeOperator::eigenvalues() const {
  ensure_eigen();
  return state_->values;
}

const CMatrix& LatticeOperator::eigenvectors() const {
  ensure_eigen();
  return state_->vectors;
}

// ---- builders ------------------------------------------------------------

RVector circulant_kernel(const Lattice& lat, const std::function<double(const Point&)>& symbol) {
  const int n = lat.n();
  const int d = lat.dim();
  const int size = lat.size();
  // twiddle[j][k] = e^{2 pi i j (k - N/2) / N}
  std::vector<Complex> tw(static_cast<size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const long long p = (static_cast<long long>(j) * (k - n / 2)) % n;
      const double ang = kTwoPi * static_cast<double>(p) / n;
      tw[static_cast<size_t>(j) * n + k] = {std::cos(ang), std::sin(ang)};
    }
  std::vector<Complex> cur(size), next(size);
  for (int i = 0; i < size; ++i) cur[i] = symbol(lat.dual(i));
  int stride = 1;
  for (int a = 0; a < d; ++a) {
    for (int i = 0; i < size; ++i) {
      const int ja = (i / stride) % n;
      const int base = i - ja * stride;
      Complex s = 0.0;
      for (int k = 0; k < n; ++k) s += tw[static_cast<size_t>(ja) * n + k] * cur[base + k * stride];
      next[i] = s;
    }
    std::swap(cur, next);
    stride *= n;
  }
  RVector out(size);
  for (int i = 0; i < size; ++i) out[i] = cur[i].real() / size;
  return out;
}

namespace {

double free_symbol(const Point& xi, double m) { return std::sqrt(xi.squaredNorm() + m * m); }

// Plane-wave eigenpairs of a translation-invariant operator with the given symbol.
std::function<void(RVector&, CMatrix&)> plane_wave_provider(const Lattice& lat,
                                                            std::function<double(const Point&)> sym) {
  return [lat, sym](RVector& w, CMatrix& V) {
    const int size = lat.size();
    w.resize(size);
    V.resize(size, size);
    const double norm = 1.0 / std::sqrt(static_cast<double>(size));
    for (int k = 0; k < size; ++k) {
      const Point xi = lat.dual(k);
      w[k] = sym(xi);
      for (int x = 0; x < size; ++x) {
        const double ph = xi.dot(lat.site(x));
        V(x, k) = Complex(std::cos(ph), std::sin(ph)) * norm;
      }
    }
  };
}

LatticeOperator circulant_operator(Variant v, const Lattice& lat, double mass,
                                   std::function<double(const Point&)> sym) {
  const RVector K = circulant_kernel(lat, sym);
  const int size = lat.size();
  CMatrix H(size, size);
  parallel_for(size, [&](int x) {
    for (int y = 0; y < size; ++y) H(x, y) = K[lat.difference_index(x, y)];
  });
  // Eigenvectors are plane waves; no dense solve needed.
  return LatticeOperator(v, mass, std::move(H), plane_wave_provider(lat, std::move(sym)));
}

// Kernel K0 times a pair phase theta(a, b) evaluated on the canonical chord
// a -> b of each pair; the lower triangle is the conjugate of the upper.
template <class PhaseFn>
CMatrix phased_kernel(const Lattice& lat, const RVector& K, PhaseFn&& phase) {
  const int size = lat.size();
  CMatrix H(size, size);
  parallel_for(size, [&](int x) {
    H(x, x) = K[0];
    Point a, b;
    for (int y = x + 1; y < size; ++y) {
      const double k = K[lat.difference_index(x, y)];
      lat.chord(x, y, a, b);
      const double th = phase(a, b);
      H(x, y) = Complex(k * std::cos(th), k * std::sin(th));
      H(y, x) = std::conj(H(x, y));
    }
  });
  return H;
}

// theta(x -> x + h e_a) for every site and axis.
std::vector<double> link_phases(const Lattice& lat, const FieldSpec& fs) {
  const int size = lat.size();
  const int d = lat.dim();
  const double h = lat.spacing();
  std::vector<double> links(static_cast<size_t>(size) * d);
  parallel_for(size, [&](int x) {
    const Point sx = lat.site(x);
    for (int a = 0; a < d; ++a) {
      Point e = Point::Zero(d);
      e[a] = h;
      links[static_cast<size_t>(x) * d + a] = fs.a_is_zero() ? 0.0 : exact_line_integral(fs, sx, sx + e);
    }
  });
  return links;
}

int neighbor(const Lattice& lat, int x, int axis, int step) {
  auto mi = lat.multi_index(x);
  mi[axis] += step;
  return lat.flat_index(mi);
}

}  // namespace

LatticeOperator build_H0(const Lattice& lat, const MassDim& md) {
  md.validate();
  const double m = md.m;
  return circulant_operator(Variant::H0, lat, m, [m](const Point& xi) { return free_symbol(xi, m); });
}

LatticeOperator build_H1(const Lattice& lat, const FieldSpec& fs, const MassDim& md) {
  md.validate();
  if (fs.dim() != lat.dim()) throw DomainError("build_H1: dimension mismatch");
  const double m = md.m;
  const RVector K = circulant_kernel(lat, [m](const Point& xi) { return free_symbol(xi, m); });
  CMatrix H = phased_kernel(lat, K, [&](const Point& a, const Point& b) {
    return (b - a).dot(midpoint_eval(fs, a, b));
  });
  return LatticeOperator(Variant::H1, m, std::move(H));
}

LatticeOperator build_H2(const Lattice& lat, const FieldSpec& fs, const MassDim& md) {
  md.validate();
  if (fs.dim() != lat.dim()) throw DomainError("build_H2: dimension mismatch");
  const double m = md.m;
  const RVector K = circulant_kernel(lat, [m](const Point& xi) { return free_symbol(xi, m); });
  CMatrix H = phased_kernel(lat, K, [&](const Point& a, const Point& b) {
    return (b - a).dot(line_average(fs, a, b));
  });
  return LatticeOperator(Variant::H2, m, std::move(H));
}

CMatrix build_covariant_laplacian(const Lattice& lat, const FieldSpec& fs, double mass) {
  if (fs.dim() != lat.dim()) throw DomainError("covariant laplacian: dimension mismatch");
  const int size = lat.size();
  const int d = lat.dim();
  const double h2 = lat.spacing() * lat.spacing();
  const auto links = link_phases(lat, fs);
  CMatrix D = CMatrix::Zero(size, size);
  for (int x = 0; x < size; ++x) {
    D(x, x) += 2.0 * d / h2 + mass * mass;
    for (int a = 0; a < d; ++a) {
      const int y = neighbor(lat, x, a, +1);
      const double th = links[static_cast<size_t>(x) * d + a];
      // D[x, y] = -e^{-i theta(x->y)} / h^2 and its adjoint partner.
      const Complex c = -Complex(std::cos(th), -std::sin(th)) / h2;
      D(x, y) += c;
      D(y, x) += std::conj(c);
    }
  }
  return D;
}

namespace {

CVector apply_with_links(const Lattice& lat, const std::vector<double>& links, double mass, const CVector& f) {
  const int size = lat.size();
  const int d = lat.dim();
  const double h2 = lat.spacing() * lat.spacing();
  CVector out(size);
  for (int x = 0; x < size; ++x) {
    Complex acc = (2.0 * d / h2 + mass * mass) * f[x];
    for (int a = 0; a < d; ++a) {
      const int yp = neighbor(lat, x, a, +1);
      const int ym = neighbor(lat, x, a, -1);
      const double tp = links[static_cast<size_t>(x) * d + a];
      const double tm = links[static_cast<size_t>(ym) * d + a];
      acc -= Complex(std::cos(tp), -std::sin(tp)) * f[yp] / h2;
      acc -= Complex(std::cos(tm), std::sin(tm)) * f[ym] / h2;
    }
    out[x] = acc;
  }
  return out;
}

}  // namespace

CVector apply_covariant_laplacian(const Lattice& lat, const FieldSpec& fs, double mass, const CVector& f) {
  return apply_with_links(lat, link_phases(lat, fs), mass, f);
}

LatticeOperator build_H3(const Lattice& lat, const FieldSpec& fs, const MassDim& md) {
  md.validate();
  const CMatrix D = build_covariant_laplacian(lat, fs, md.m);
  RVector lam;
  CMatrix V;
  hermitian_eigen(D, lam, V);
  if (lam.minCoeff() < -1e-9) throw NumericalFailure("build_H3: covariant operator has a negative eigenvalue");
  RVector root = lam.cwiseMax(0.0).cwiseSqrt();
  CMatrix H = V * root.asDiagonal() * V.adjoint();
  H = 0.5 * (H + H.adjoint()).eval();
  return LatticeOperator(Variant::H3, md.m, std::move(H), std::move(root), std::move(V));
}

LatticeOperator build_HNR(const Lattice& lat, const FieldSpec& fs) {
  CMatrix D = 0.5 * build_covariant_laplacian(lat, fs, 0.0);
  return LatticeOperator(Variant::NR, 0.0, std::move(D));
}

LatticeOperator build_variant(Variant v, const Lattice& lat, const FieldSpec& fs, const MassDim& md) {
  switch (v) {
    case Variant::H0: return build_H0(lat, md);
    case Variant::H1: return build_H1(lat, fs, md);
    case Variant::H2: return build_H2(lat, fs, md);
    case Variant::H3: return build_H3(lat, fs, md);
    case Variant::NR: return build_HNR(lat, fs);
  }
  throw DomainError("unknown variant");
}

LatticeOperator build_H3_free_spectral(const Lattice& lat, const MassDim& md) {
  md.validate();
  const double m = md.m;
  const double h = lat.spacing();
  return circulant_operator(Variant::H3, lat, m, [m, h](const Point& xi) {
    double s = m * m;
    for (int a = 0; a < xi.size(); ++a) {
      const double q = std::sin(0.5 * xi[a] * h);
      s += 4.0 * q * q / (h * h);
    }
    return std::sqrt(s);
  });
}

LatticeOperator add_potential(const LatticeOperator& op, const Lattice& lat, const FieldSpec& fs) {
  CMatrix H = op.matrix();
  for (int x = 0; x < lat.size(); ++x) H(x, x) += fs.V(lat.site(x));
  return LatticeOperator(op.variant(), op.mass(), std::move(H));
}

CMatrix semigroup(const LatticeOperator& op, double t) {
  if (!(t >= 0.0)) throw DomainError("semigroup: t must be >= 0");
  const RVector& w = op.eigenvalues();
  const CMatrix& V = op.eigenvectors();
  const RVector e = (-(w.array() - op.mass()) * t).exp().matrix();
  return V * e.asDiagonal() * V.adjoint();
}

CVector apply_semigroup(const LatticeOperator& op, double t, const CVector& g) {
  if (!(t >= 0.0)) throw DomainError("semigroup: t must be >= 0");
  const RVector& w = op.eigenvalues();
  const CMatrix& V = op.eigenvectors();
  CVector c = V.adjoint() * g;
  for (int k = 0; k < c.size(); ++k) c[k] *= std::exp(-(w[k] - op.mass()) * t);
  return V * c;
}

double spectral_floor(const LatticeOperator& op) { return op.eigenvalues().minCoeff(); }

CVector sample_on_lattice(const Lattice& lat, const std::function<Complex(const Point&)>& g) {
  CVector v(lat.size());
  for (int x = 0; x < lat.size(); ++x) v[x] = g(lat.site(x));
  return v;
}

GaugeResidual gauge_residual_detail(Variant v, const FieldSpec& fs, const GaugeFunction& phi,
                                    const Lattice& lat, const MassDim& md) {
  if (v != Variant::H1 && v != Variant::H2 && v != Variant::H3)
    throw DomainError("gauge_residual: variant must be H1, H2 or H3");
  const LatticeOperator base = build_variant(v, lat, fs, md);
  const LatticeOperator shifted = build_variant(v, lat, gauge_shift(fs, phi), md);
  const int size = lat.size();
  std::vector<double> ph(size);
  for (int x = 0; x < size; ++x) ph[x] = phi.value(lat.site(x));
  CMatrix R(size, size);
  const CMatrix& H = base.matrix();
  const CMatrix& Hs = shifted.matrix();
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double th = ph[x] - ph[y];
      R(x, y) = Hs(x, y) - Complex(std::cos(th), std::sin(th)) * H(x, y);
    }
  R = 0.5 * (R + R.adjoint()).eval();
  GaugeResidual out;
  out.norm = v == Variant::H3 ? base.eigenvalues().cwiseAbs().maxCoeff() : hermitian_norm2(H);
  out.absolute = hermitian_norm2(R);
  return out;
}

double gauge_residual(Variant v, const FieldSpec& fs, const GaugeFunction& phi, const Lattice& lat,
                      const MassDim& md) {
  return gauge_residual_detail(v, fs, phi, lat, md).relative();
}

CVector apply_sqrt_covariant(const Lattice& lat, const FieldSpec& fs, double mass, const CVector& f,
                             double tol, int max_iter) {
  const int size = lat.size();
  const double fnorm = f.norm();
  if (fnorm == 0.0) return CVector::Zero(size);
  max_iter = std::min(max_iter, size);
  CMatrix Q(size, max_iter + 1);
  std::vector<double> alpha, beta;
  Q.col(0) = f / fnorm;
  CVector prev;
  const auto links = link_phases(lat, fs);
  auto krylov_value = [&](int k) {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::VectorXd coef = es.eigenvectors() * (root.asDiagonal() * es.eigenvectors().row(0).transpose());
    return CVector(fnorm * (Q.leftCols(k) * coef.cast<Complex>()));
  };
  for (int j = 0; j < max_iter; ++j) {
    CVector w = apply_with_links(lat, links, mass, Q.col(j));
    alpha.push_back(Q.col(j).dot(w).real());
    // Two passes of full reorthogonalization.
    for (int pass = 0; pass < 2; ++pass) w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).adjoint() * w);
    const double b = w.norm();
    const bool exhausted = b < 1e-13 * std::max(1.0, std::abs(alpha.back()));
    if (exhausted || (j + 1) % 5 == 0 || j + 1 == max_iter) {
      CVector cur = krylov_value(j + 1);
      if (exhausted) return cur;
      if (prev.size() == size && (cur - prev).norm() <= tol * cur.norm()) return cur;
      prev = std::move(cur);
    }
    beta.push_back(b);
    Q.col(j + 1) = w / b;
  }
  throw QuadratureFailure("apply_sqrt_covariant: Lanczos did not converge");
}

std::vector<CVector> interior_probes(const Lattice& lat) {
  // Gaussians of width L/20: at the edge of the central half they are below
  // 4e-6 of their peak, and their spectra stay well inside the dual grid.
  const int d = lat.dim();
  const double L = lat.length();
  const double sig = L / 20.0;
  struct Spec {
    double shift;
    double p0, p1;
  };
  const Spec specs[3] = {{0.0, 0.0, 0.0}, {0.0, 0.8, 0.0}, {L / 16.0, -0.5, 0.6}};
  std::vector<CVector> out;
  for (const Spec& sp : specs) {
    out.push_back(sample_on_lattice(lat, [&](const Point& x) {
      Point c = Point::Zero(d);
      c[0] = sp.shift;
      double ph = sp.p0 * x[0];
      if (d > 1) ph += sp.p1 * x[1];
      return std::exp(-(x - c).squaredNorm() / (2.0 * sig * sig)) * Complex(std::cos(ph), std::sin(ph));
    }));
  }
  return out;
}

CoincidenceResidual coincidence_residual(const FieldSpec& fs, const Lattice& lat, const MassDim& md) {
  if (!fs.is_linear()) throw DomainError("coincidence_residual: field must be linear");
  const LatticeOperator h1 = build_H1(lat, fs, md);
  CoincidenceResidual r;
  for (const CVector& f : interior_probes(lat)) {
    const CVector a = h1.matrix() * f;
    const CVector s = apply_sqrt_covariant(lat, fs, md.m, f);
    const CVector aa = h1.matrix() * a;
    const CVector df = apply_covariant_laplacian(lat, fs, md.m, f);
    r.h1_minus_h3 = std::max(r.h1_minus_h3, (a - s).norm() / f.norm());
    r.h1sq_minus_d = std::max(r.h1sq_minus_d, (aa - df).norm() / f.norm());
  }
  return r;
}

DiamagneticValues diamagnetic_check(const LatticeOperator& h3_magnetic, const LatticeOperator& h3_free,
                                    double t, const CVector& f) {
  if (!(t > 0.0)) throw DomainError("diamagnetic_check: t must be > 0");
  DiamagneticValues v;
  v.magnetic = f.dot(apply_semigroup(h3_magnetic, t, f)).real();
  const CVector af = f.cwiseAbs().cast<Complex>();
  v.free = af.dot(apply_semigroup(h3_free, t, af)).real();
  return v;
}

DiamagneticValues diamagnetic_check(const FieldSpec& fs, const Lattice& lat, const MassDim& md, double t,
                                    const CVector& f) {
  return diamagnetic_check(build_H3(lat, fs, md), build_H3(lat, FieldSpec::zero(lat.dim()), md), t, f);
}

double QuadraticFormValue::rel_gap() const {
  return norm2 > 0.0 ? std::abs(form - expectation) / norm2 : std::abs(form - expectation);
}

QuadraticFormValue quadratic_form(Variant v, const CVector& u, const FieldSpec& fs, const Lattice& lat,
                                  const MassDim& md) {
  if (v != Variant::H1 && v != Variant::H2) throw DomainError("quadratic_form: variant must be H1 or H2");
  if (fs.v_lower_bound() < 0.0) throw DomainError("quadratic_form: V must be >= 0");
  const double m = md.m;
  const RVector K = circulant_kernel(lat, [m](const Point& xi) { return free_symbol(xi, m); });
  const int size = lat.size();
  std::vector<double> rows(size, 0.0);
  parallel_for(size, [&](int x) {
    double acc = 0.0;
    Point a, b;
    for (int y = 0; y < size; ++y) {
      if (y == x) continue;
      const double w = -K[lat.difference_index(x, y)];
      lat.chord(x, y, a, b);
      const double th = v == Variant::H1 ? (b - a).dot(midpoint_eval(fs, a, b)) : (b - a).dot(line_average(fs, a, b));
      const Complex diff = Complex(std::cos(th), -std::sin(th)) * u[x] - u[y];
      acc += 0.5 * std::norm(diff) * w;
    }
    rows[x] = acc;
  });
  QuadraticFormValue q;
  q.norm2 = u.squaredNorm();
  double jump = 0.0, pot = 0.0;
  for (int x = 0; x < size; ++x) {
    jump += rows[x];
    pot += fs.V(lat.site(x)) * std::norm(u[x]);
  }
  q.form = m * q.norm2 + jump + pot;
  const LatticeOperator op = add_potential(build_variant(v, lat, fs, md), lat, fs);
  q.expectation = u.dot(op.matrix() * u).real();
  return q;
}

double levy_weight_deviation(const Lattice& lat, const MassDim& md, const std::vector<double>& radii) {
  const double m = md.m;
  const RVector K = circulant_kernel(lat, [m](const Point& xi) { return free_symbol(xi, m); });
  const double vol = std::pow(lat.spacing(), lat.dim());
  double worst = 0.0;
  for (double r : radii) {
    const int j = static_cast<int>(std::lround(r / lat.spacing()));
    if (j < 2 || j + 1 >= lat.n() / 2 || std::abs(j * lat.spacing() - r) > 1e-9 * r)
      throw DomainError("levy_weight_deviation: radius must be a positive multiple of the spacing inside the box");
    auto wt = [&](int i) { return -K[lat.flat_index({i, 0, 0})] / vol; };
    const double w = 0.25 * (wt(j - 1) + 2.0 * wt(j) + wt(j + 1));
    const double n = levy_density(r, md);
    worst = std::max(worst, std::abs(w - n) / n);
  }
  return worst;
}

CMatrix trotter_product(const FieldSpec& fs, const Lattice& lat, const MassDim& md, double t, int n) {
  if (n < 1) throw DomainError("trotter_product: n must be >= 1");
  const LatticeOperator h3 = build_H3(lat, fs, md);
  const double tau = t / n;
  CMatrix P = semigroup(h3, tau);
  for (int x = 0; x < lat.size(); ++x) P.col(x) *= std::exp(-tau * fs.V(lat.site(x)));
  CMatrix R = P;
  for (int k = 1; k < n; ++k) R = (R * P).eval();
  return R;
}

RVector free_semigroup_kernel(const Lattice& lat, const MassDim& md, double tau) {
  const double m = md.m;
  return circulant_kernel(lat, [m, tau](const Point& xi) { return std::exp(-tau * (free_symbol(xi, m) - m)); });
}

CMatrix sliced_operator_T(const FieldSpec& fs, const Lattice& lat, const MassDim& md, double tau) {
  if (!(tau > 0.0)) throw DomainError("sliced_operator_T: tau must be > 0");
  const RVector K = free_semigroup_kernel(lat, md, tau);
  const int size = lat.size();
  CMatrix T(size, size);
  parallel_for(size, [&](int x) {
    Point a, b;
    for (int y = 0; y < size; ++y) {
      lat.chord(x, y, a, b);
      const Point mid = 0.5 * (a + b);
      const double th = (b - a).dot(fs.A(mid));
      const double k = K[lat.difference_index(x, y)] * std::exp(-tau * fs.V(mid));
      T(x, y) = Complex(k * std::cos(th), k * std::sin(th));
    }
  });
  return T;
}

CMatrix sliced_product(const FieldSpec& fs, const Lattice& lat, const MassDim& md, double t, int n) {
  if (n < 1) throw DomainError("sliced_product: n must be >= 1");
  const CMatrix T = sliced_operator_T(fs, lat, md, t / n);
  CMatrix R = T;
  for (int k = 1; k < n; ++k) R = (R * T).eval();
  return R;
}

Complex interpolate(const Lattice& lat, const CVector& values, const Point& x) {
  const int s = lat.find_site(x);
  if (s >= 0) return values[s];
  const int size = lat.size();
  const int d = lat.dim();
  const double x0 = -0.5 * lat.length();
  // Forward coefficients c_k = (1/N^d) sum_x v_x e^{-i xi_k . x}.
  CVector c = CVector::Zero(size);
  for (int k = 0; k < size; ++k) {
    const Point xi = lat.dual(k);
    Complex acc = 0.0;
    for (int j = 0; j < size; ++j) {
      const double ph = -xi.dot(lat.site(j));
      acc += values[j] * Complex(std::cos(ph), std::sin(ph));
    }
    c[k] = acc / static_cast<double>(size);
  }
  Complex out = 0.0;
  for (int k = 0; k < size; ++k) {
    const auto mi = lat.multi_index(k);
    const Point xi = lat.dual(k);
    Complex basis = 1.0;
    for (int a = 0; a < d; ++a) {
      if (mi[a] == 0) {  // Nyquist mode: symmetric real interpolant
        basis *= std::cos(xi[a] * (x[a] - x0)) * Complex(std::cos(xi[a] * x0), std::sin(xi[a] * x0));
      } else {
        basis *= Complex(std::cos(xi[a] * x[a]), std::sin(xi[a] * x[a]));
      }
    }
    out += c[k] * basis;
  }
  return out;
}

}  // namespace relkac
