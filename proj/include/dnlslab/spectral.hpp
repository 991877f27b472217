#pragma once
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "fft.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace dnls {

//! Periodic grid on [-L/2, L/2). Spectral storage uses FFT slot order:
//! slot j holds index j for j < K/2 and j - K otherwise.
class Grid {
public:
  Grid(double L, int K) : L_(L), K_(K) {
    if (!(L > 0.0))
      throw DomainError("Grid: L must be positive");
    if (K < 4 || (K & (K - 1)) != 0)
      throw DomainError("Grid: K must be a power of two >= 4");
  }

  double L() const { return L_; }
  int K() const { return K_; }
  double dx() const { return L_ / K_; }
  double dxi() const { return 2.0 * kPi / L_; }
  double x(int j) const { return -0.5 * L_ + j * dx(); }
  int index(int slot) const { return slot < K_ / 2 ? slot : slot - K_; }
  int slot(int k) const { return k >= 0 ? k : k + K_; }
  double xi(int k) const { return dxi() * k; }
  double xi_slot(int slot) const { return xi(index(slot)); }
  //! Largest index retained by the 2/3 rule.
  int dealias_band() const { return K_ / 3; }

  bool operator==(const Grid &o) const { return L_ == o.L_ && K_ == o.K_; }
  bool operator!=(const Grid &o) const { return !(*this == o); }

private:
  double L_;
  int K_;
};

enum class Rep { physical, spectral };

inline const char *rep_name(Rep r) { return r == Rep::physical ? "physical" : "spectral"; }

//! Samples (physical) or Fourier coefficients (spectral) of a periodic field.
//! Spectral coefficients are those of the orthonormal basis e^{i xi x}/sqrt(L),
//! so they do not depend on K.
class Field {
public:
  Field(const Grid &g, Rep r) : grid_(g), rep_(r), v_(g.K()) {}
  Field(const Grid &g, std::vector<cplx> values, Rep r)
      : grid_(g), rep_(r), v_(std::move(values)) {
    if (static_cast<int>(v_.size()) != g.K())
      throw ContractViolation("Field: value count does not match grid");
  }

  const Grid &grid() const { return grid_; }
  Rep rep() const { return rep_; }
  int size() const { return grid_.K(); }
  const std::vector<cplx> &values() const { return v_; }
  std::vector<cplx> &values() { return v_; }
  cplx operator[](int j) const { return v_[j]; }
  cplx &operator[](int j) { return v_[j]; }

  //! Coefficient at signed index k; zero outside the grid.
  cplx coef(int k) const {
    require(Rep::spectral, "coef");
    int K = grid_.K();
    if (k < -K / 2 || k >= K / 2)
      return 0.0;
    return v_[grid_.slot(k)];
  }
  void set_coef(int k, cplx c) {
    require(Rep::spectral, "set_coef");
    v_[grid_.slot(k)] = c;
  }

  void require(Rep r, const char *op) const {
    if (rep_ != r)
      throw ContractViolation(std::string(op) + ": expected " + rep_name(r) +
                              " representation, got " + rep_name(rep_));
  }

private:
  Grid grid_;
  Rep rep_;
  std::vector<cplx> v_;
};

enum class Direction { to_spectral, to_physical };

//! f_hat_k = (sqrt(L)/K) sum_j f_j e^{-i xi_k x_j},  f_j = L^{-1/2} sum_k f_hat_k e^{i xi_k x_j}.
inline Field transform(const Field &f, Direction dir) {
  const Grid &g = f.grid();
  const int K = g.K();
  if (dir == Direction::to_spectral) {
    f.require(Rep::physical, "transform(to_spectral)");
    auto out = dft(f.values(), FFTW_FORWARD);
    const double w = std::sqrt(g.L()) / K;
    for (int j = 0; j < K; ++j)
      out[j] *= (g.index(j) & 1) ? -w : w;
    return Field(g, std::move(out), Rep::spectral);
  }
  f.require(Rep::spectral, "transform(to_physical)");
  std::vector<cplx> in(f.values());
  for (int j = 0; j < K; ++j)
    if (g.index(j) & 1)
      in[j] = -in[j];
  auto out = dft(in, FFTW_BACKWARD);
  const double w = 1.0 / std::sqrt(g.L());
  for (auto &c : out)
    c *= w;
  return Field(g, std::move(out), Rep::physical);
}

inline Field to_spectral(const Field &f) {
  return f.rep() == Rep::spectral ? f : transform(f, Direction::to_spectral);
}

inline Field to_physical(const Field &f) {
  return f.rep() == Rep::physical ? f : transform(f, Direction::to_physical);
}

inline Field as_rep(const Field &f, Rep r) {
  return r == Rep::spectral ? to_spectral(f) : to_physical(f);
}

inline void zero_nyquist(Field &f) {
  f.require(Rep::spectral, "zero_nyquist");
  f[f.grid().K() / 2] = 0.0;
}

//! d/dx; returned in the representation of the input.
inline Field derivative(const Field &f) {
  Field s = to_spectral(f);
  const Grid &g = s.grid();
  for (int j = 0; j < g.K(); ++j)
    s[j] *= cplx(0.0, g.xi_slot(j));
  zero_nyquist(s);
  return as_rep(s, f.rep());
}

inline double japanese(double xi) { return std::sqrt(1.0 + xi * xi); }

//! (sum <xi>^{2s} |f_hat|^2)^{1/2}.
inline double sobolev_norm(const Field &f, double s) {
  Field h = to_spectral(f);
  const Grid &g = h.grid();
  CompensatedSum<double> acc;
  for (int j = 0; j < g.K(); ++j)
    acc.add(std::pow(japanese(g.xi_slot(j)), 2.0 * s) * std::norm(h[j]));
  return std::sqrt(acc.value());
}

//! Trapezoidal L^p norm over one period; p = infinity gives the max modulus.
inline double lebesgue_norm(const Field &f, double p) {
  if (!(p >= 1.0))
    throw DomainError("lebesgue_norm: p must be >= 1");
  Field h = to_physical(f);
  if (std::isinf(p)) {
    double m = 0.0;
    for (auto c : h.values())
      m = std::max(m, std::abs(c));
    return m;
  }
  CompensatedSum<double> acc;
  for (auto c : h.values())
    acc.add(std::pow(std::abs(c), p));
  return std::pow(acc.value() * h.grid().dx(), 1.0 / p);
}

inline double l2_norm(const Field &f) { return lebesgue_norm(f, 2.0); }

//! Spectral l2 inner product sum conj(f_hat) g_hat.
inline cplx inner(const Field &f, const Field &g) {
  Field a = to_spectral(f), b = to_spectral(g);
  if (a.grid() != b.grid())
    throw ContractViolation("inner: grid mismatch");
  CompensatedSum<cplx> acc;
  for (int j = 0; j < a.size(); ++j)
    acc.add(std::conj(a[j]) * b[j]);
  return acc.value();
}

//! |f|_6^6 / (|f|_2^4 |f_x|_2^2); the sharp Gagliardo-Nirenberg bound is 4/pi^2.
inline double gn_ratio(const Field &f) {
  double dnorm = l2_norm(derivative(f));
  double n2 = l2_norm(f);
  if (!(dnorm > 0.0) || !(n2 > 0.0))
    throw DomainError("gn_ratio: field has zero derivative");
  double n6 = lebesgue_norm(f, 6.0);
  return std::pow(n6, 6) / (std::pow(n2, 4) * dnorm * dnorm);
}

inline constexpr double kGnSharp = 4.0 / (kPi * kPi);

//! Zero every coefficient with |index| > kmax (and the Nyquist slot).
inline Field project_band(const Field &f, int kmax) {
  if (kmax <= 0)
    throw DomainError("project_band: cutoff must be positive");
  if (kmax > f.grid().K() / 2)
    throw DomainError("project_band: cutoff exceeds K/2");
  Field s = to_spectral(f);
  const Grid &g = s.grid();
  for (int j = 0; j < g.K(); ++j)
    if (std::abs(g.index(j)) > kmax)
      s[j] = 0.0;
  zero_nyquist(s);
  return as_rep(s, f.rep());
}

//! 2/3-rule mask: keep |k| <= floor(K/3).
inline Field dealias(const Field &f) { return project_band(f, f.grid().dealias_band()); }

//! Same coefficients on a grid with the same L and a different K (band
//! limited input assumed when shrinking).
inline Field regrid(const Field &f, int K_new) {
  Field s = to_spectral(f);
  Grid g2(s.grid().L(), K_new);
  Field out(g2, Rep::spectral);
  int lim = std::min(s.grid().K(), K_new) / 2;
  for (int k = -lim + 1; k < lim; ++k)
    out.set_coef(k, s.coef(k));
  return out;
}

//! Samples of the trigonometric interpolant of f on a grid with the same L
//! and Kp >= K points.
inline std::vector<cplx> padded_samples(const Field &f, int Kp) {
  return to_physical(regrid(f, Kp)).values();
}

//! Spectral field on grid g from samples on the padded grid (same L),
//! keeping only the indices representable on g (Nyquist zeroed).
inline Field from_padded(const Grid &g, std::vector<cplx> samples) {
  Grid gp(g.L(), static_cast<int>(samples.size()));
  Field s = to_spectral(Field(gp, std::move(samples), Rep::physical));
  return regrid(s, g.K());
}

//! Trigonometric polynomial sum_k c_k e^{i xi_k x} / sqrt(L) from (k, c_k) pairs.
inline Field make_modes(const Grid &g, const std::vector<std::pair<int, cplx>> &modes) {
  Field f(g, Rep::spectral);
  for (auto &[k, c] : modes) {
    if (std::abs(k) >= g.K() / 2)
      throw DomainError("make_modes: index outside the grid");
    f.set_coef(k, f.coef(k) + c);
  }
  return f;
}

enum class DataKind { gaussian, two_mode, random_hs };

inline DataKind parse_data_kind(const std::string &s) {
  if (s == "gaussian")
    return DataKind::gaussian;
  if (s == "two_mode")
    return DataKind::two_mode;
  if (s == "random_hs")
    return DataKind::random_hs;
  throw ConfigError("unknown data kind: " + s);
}

inline const char *data_kind_name(DataKind k) {
  switch (k) {
  case DataKind::gaussian:
    return "gaussian";
  case DataKind::two_mode:
    return "two_mode";
  default:
    return "random_hs";
  }
}

struct TestDataParams {
  double mass = -1.0;   // target L2 norm; negative leaves the natural scale
  bool strict = true;   // enforce mass < sqrt(2 pi)
  double width = 1.0;   // gaussian standard deviation
  double center = 0.0;
  double carrier = 0.0; // gaussian carrier frequency
  int k1 = 1, k2 = 3;   // two_mode indices
  double a1 = 0.5, a2 = 0.4;
  double s = 0.5;       // random_hs regularity
  int band = 0;         // random_hs max index (0: dealias band)
  double envelope = 0.0; // random_hs gaussian envelope width (0: none)
};

//! Deterministic test data. two_mode is returned spectral (two exact lines),
//! the other kinds physical.
inline Field make_test_data(const Grid &g, DataKind kind, const TestDataParams &p,
                            std::uint64_t seed) {
  if (p.strict && p.mass >= kSmallMass)
    throw ConstraintError("make_test_data: requested mass violates |f|_2 < sqrt(2 pi)");
  Field f(g, Rep::physical);
  switch (kind) {
  case DataKind::gaussian: {
    for (int j = 0; j < g.K(); ++j) {
      double y = (g.x(j) - p.center) / p.width;
      f[j] = std::exp(-0.5 * y * y) * std::polar(1.0, p.carrier * g.x(j));
    }
    break;
  }
  case DataKind::two_mode: {
    f = Field(g, Rep::spectral);
    const double sl = std::sqrt(g.L());
    int lim = g.dealias_band();
    if (std::abs(p.k1) > lim || std::abs(p.k2) > lim || p.k1 == p.k2)
      throw DomainError("make_test_data: two_mode indices must be distinct and inside the band");
    f.set_coef(p.k1, p.a1 * sl);
    f.set_coef(p.k2, p.a2 * sl);
    break;
  }
  case DataKind::random_hs: {
    Rng rng(seed);
    Field h(g, Rep::spectral);
    int band = p.band > 0 ? std::min(p.band, g.dealias_band()) : g.dealias_band();
    for (int k = -band; k <= band; ++k) {
      double re = rng.normal(), im = rng.normal();
      double amp = std::pow(japanese(g.xi(k)), -(p.s + 0.6));
      h.set_coef(k, cplx(re, im) * (amp / std::sqrt(2.0)));
    }
    f = to_physical(h);
    if (p.envelope > 0.0)
      for (int j = 0; j < g.K(); ++j) {
        double y = (g.x(j) - p.center) / p.envelope;
        f[j] *= std::exp(-0.5 * y * y);
      }
    break;
  }
  }
  if (p.mass > 0.0) {
    double n = l2_norm(f);
    if (!(n > 0.0))
      throw DomainError("make_test_data: cannot normalize a zero field");
    double c = p.mass / n;
    for (auto &v : f.values())
      v *= c;
  }
  return f;
}

} // namespace dnls
