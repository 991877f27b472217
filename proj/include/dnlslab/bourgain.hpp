#pragma once
#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "spectral.hpp"

namespace dnls {

//! Temporal cutoff applied to every space-time field.
//! bump: psi(t) = exp(1 - 1/(1 - r^2)), r = 2t/T - 1 (zero for |r| >= 1).
//! hann: psi(t) = sin^2(pi t / T).
enum class Window { bump, hann };

inline Window parse_window(const std::string &s) {
  if (s == "bump")
    return Window::bump;
  if (s == "hann")
    return Window::hann;
  throw ConfigError("unknown window: " + s);
}

inline const char *window_name(Window w) { return w == Window::bump ? "bump" : "hann"; }

inline double window_value(Window w, double t, double T) {
  if (t <= 0.0 || t >= T)
    return 0.0;
  if (w == Window::hann) {
    double s = std::sin(kPi * t / T);
    return s * s;
  }
  double r = 2.0 * t / T - 1.0;
  double d = 1.0 - r * r;
  return d <= 0.0 ? 0.0 : std::exp(1.0 - 1.0 / d);
}

//! ||psi||_{L^2(0,T)} by composite Simpson on 2^16 panels.
inline double window_factor(Window w, double T) {
  const int n = 1 << 16;
  const double h = T / n;
  CompensatedSum<double> acc;
  for (int j = 0; j <= n; ++j) {
    double v = window_value(w, j * h, T);
    double c = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    acc.add(c * v * v);
  }
  return std::sqrt(acc.value() * h / 3.0);
}

//! Space-time lattice: the spatial grid times K_t samples t_n = n T / K_t.
struct Lattice {
  Grid grid{2.0 * kPi, 64};
  double T = 1.0;
  int Kt = 256;
  Window window = Window::bump;

  void validate() const {
    if (!(T > 0.0))
      throw DomainError("Lattice: T must be positive");
    if (Kt < 4 || (Kt & (Kt - 1)) != 0)
      throw DomainError("Lattice: K_t must be a power of two >= 4");
  }
  double dt() const { return T / Kt; }
  double t(int n) const { return n * dt(); }
  double dtau() const { return 2.0 * kPi / T; }
  int tau_index(int slot) const { return slot < Kt / 2 ? slot : slot - Kt; }
  double tau_slot(int slot) const { return dtau() * tau_index(slot); }
  bool operator==(const Lattice &o) const {
    return grid == o.grid && T == o.T && Kt == o.Kt && window == o.window;
  }
};

//! Values on the K x K_t lattice, row-major with time as the slow index.
//! Physical: samples u(x_j, t_n). Spectral: coefficients in the orthonormal
//! basis e^{i(xi x + tau t)} / sqrt(L T), so that e^{i(kx - k^2 t)} lands at
//! tau = -k^2 and the sums below are Riemann-free Plancherel sums.
class SpaceTimeField {
public:
  SpaceTimeField(const Lattice &lat, std::vector<cplx> v, Rep r)
      : lat_(lat), rep_(r), v_(std::move(v)) {
    lat_.validate();
    if (v_.size() != static_cast<std::size_t>(lat_.grid.K()) * lat_.Kt)
      throw ContractViolation("SpaceTimeField: value count does not match lattice");
  }

  const Lattice &lattice() const { return lat_; }
  Rep rep() const { return rep_; }
  int K() const { return lat_.grid.K(); }
  int Kt() const { return lat_.Kt; }
  const std::vector<cplx> &values() const { return v_; }
  std::vector<cplx> &values() { return v_; }
  cplx at(int n, int j) const { return v_[static_cast<std::size_t>(n) * K() + j]; }
  cplx &at(int n, int j) { return v_[static_cast<std::size_t>(n) * K() + j]; }

  void require(Rep r, const char *op) const {
    if (rep_ != r)
      throw ContractViolation(std::string(op) + ": expected " + rep_name(r) +
                              " representation, got " + rep_name(rep_));
  }

private:
  Lattice lat_;
  Rep rep_;
  std::vector<cplx> v_;
};

//! Samples psi(t) f(x, t) on the lattice.
inline SpaceTimeField sample_windowed(const Lattice &lat,
                                      const std::function<cplx(double, double)> &f) {
  lat.validate();
  const int K = lat.grid.K();
  std::vector<cplx> v(static_cast<std::size_t>(K) * lat.Kt);
  for (int n = 0; n < lat.Kt; ++n) {
    double t = lat.t(n), w = window_value(lat.window, t, lat.T);
    for (int j = 0; j < K; ++j)
      v[static_cast<std::size_t>(n) * K + j] = w == 0.0 ? cplx(0.0) : w * f(lat.grid.x(j), t);
  }
  return {lat, std::move(v), Rep::physical};
}

//! Windowed free wave e^{i(kx - sign k^2 t)}: sign +1 solves i u_t + u_xx = 0,
//! sign -1 its mirror.
inline SpaceTimeField free_wave(const Lattice &lat, int k, int sign = 1, cplx amp = 1.0) {
  double xi = lat.grid.xi(k), w = sign * xi * xi;
  return sample_windowed(lat, [=](double x, double t) { return amp * std::exp(cplx(0.0, xi * x - w * t)); });
}

//! Unitary 2-D transform between sample and coefficient representations.
inline SpaceTimeField st_transform(const SpaceTimeField &F) {
  const Lattice &lat = F.lattice();
  const Grid &g = lat.grid;
  const int K = g.K(), Kt = lat.Kt;
  const double w = std::sqrt(g.L() * lat.T) / (static_cast<double>(K) * Kt);
  if (F.rep() == Rep::physical) {
    auto out = dft2(F.values(), Kt, K, FFTW_FORWARD);
    for (int n = 0; n < Kt; ++n)
      for (int j = 0; j < K; ++j)
        out[static_cast<std::size_t>(n) * K + j] *= (g.index(j) & 1) ? -w : w;
    return {lat, std::move(out), Rep::spectral};
  }
  std::vector<cplx> in(F.values());
  for (int n = 0; n < Kt; ++n)
    for (int j = 0; j < K; ++j)
      if (g.index(j) & 1)
        in[static_cast<std::size_t>(n) * K + j] = -in[static_cast<std::size_t>(n) * K + j];
  auto out = dft2(in, Kt, K, FFTW_BACKWARD);
  const double b = 1.0 / std::sqrt(g.L() * lat.T);
  for (auto &c : out)
    c *= b;
  return {lat, std::move(out), Rep::physical};
}

inline SpaceTimeField st_spectral(const SpaceTimeField &F) {
  return F.rep() == Rep::spectral ? F : st_transform(F);
}

inline SpaceTimeField st_physical(const SpaceTimeField &F) {
  return F.rep() == Rep::physical ? F : st_transform(F);
}

//! Zeroes every coefficient with |k| > kmax.
inline SpaceTimeField st_truncate(const SpaceTimeField &F, int kmax) {
  SpaceTimeField S = st_spectral(F);
  for (int q = 0; q < S.Kt(); ++q)
    for (int j = 0; j < S.K(); ++j)
      if (std::abs(S.lattice().grid.index(j)) > kmax)
        S.at(q, j) = 0.0;
  return S;
}

enum class NormKind { X, Y, Z };

//! X^{sign}_{s,b}: <xi>^{2s} <tau + sign xi^2>^{2b} weighted l^2 of coefficients.
//! Y^{sign}_s: X^{sign}_{s,1/2} + || <xi>^s f_hat ||_{L^2_xi L^1_tau}.
//! Z_s: X_{s,-1/2} + || <xi>^s f_hat / <tau + xi^2> ||_{L^2_xi L^1_tau}.
//! The L^1_tau sums carry the factor T^{-1/2}, which makes the mixed term
//! an upper bound for sup_t || <xi>^s f(t) ||_{L^2_xi}.
struct NormSpec {
  NormKind kind = NormKind::X;
  double s = 0.0;
  double b = 0.0;
  int sign = 1;

  static NormSpec X(double s, double b, int sign = 1) { return {NormKind::X, s, b, sign}; }
  static NormSpec Y(double s, int sign = 1) { return {NormKind::Y, s, 0.5, sign}; }
  static NormSpec Z(double s) { return {NormKind::Z, s, -0.5, 1}; }

  std::string describe() const {
    std::ostringstream os;
    const char *sg = sign > 0 ? "+" : "-";
    if (kind == NormKind::X)
      os << "X" << sg << "(s=" << s << ",b=" << b << ")";
    else if (kind == NormKind::Y)
      os << "Y" << sg << "(s=" << s << ")";
    else
      os << "Z(s=" << s << ")";
    return os.str();
  }
};

namespace detail {

inline double xsb_sq(const SpaceTimeField &S, double s, double b, int sign) {
  const Lattice &lat = S.lattice();
  std::vector<double> rows(S.K());
  for (int j = 0; j < S.K(); ++j) {
    double xi = lat.grid.xi_slot(j), wx = std::pow(japanese(xi), 2.0 * s);
    CompensatedSum<double> acc;
    for (int q = 0; q < S.Kt(); ++q) {
      double tw = b == 0.0 ? 1.0 : std::pow(japanese(lat.tau_slot(q) + sign * xi * xi), 2.0 * b);
      acc.add(tw * std::norm(S.at(q, j)));
    }
    rows[j] = wx * acc.value();
  }
  return pairwise_sum(rows);
}

//! sum_xi <xi>^{2s} ( T^{-1/2} sum_tau |f_hat| / <tau + xi^2>^{d} )^2
inline double mixed_sq(const SpaceTimeField &S, double s, int sign, double d) {
  const Lattice &lat = S.lattice();
  std::vector<double> rows(S.K());
  for (int j = 0; j < S.K(); ++j) {
    double xi = lat.grid.xi_slot(j);
    CompensatedSum<double> acc;
    for (int q = 0; q < S.Kt(); ++q) {
      double den = d == 0.0 ? 1.0 : std::pow(japanese(lat.tau_slot(q) + sign * xi * xi), d);
      acc.add(std::abs(S.at(q, j)) / den);
    }
    double l1 = acc.value() / std::sqrt(lat.T);
    rows[j] = std::pow(japanese(xi), 2.0 * s) * l1 * l1;
  }
  return pairwise_sum(rows);
}

} // namespace detail

inline double st_norm(const SpaceTimeField &F, const NormSpec &spec) {
  if (spec.sign != 1 && spec.sign != -1)
    throw DomainError("st_norm: sign must be +1 or -1");
  SpaceTimeField S = st_spectral(F);
  switch (spec.kind) {
  case NormKind::X:
    return std::sqrt(detail::xsb_sq(S, spec.s, spec.b, spec.sign));
  case NormKind::Y:
    return std::sqrt(detail::xsb_sq(S, spec.s, 0.5, spec.sign)) +
           std::sqrt(detail::mixed_sq(S, spec.s, spec.sign, 0.0));
  default:
    return std::sqrt(detail::xsb_sq(S, spec.s, -0.5, 1)) +
           std::sqrt(detail::mixed_sq(S, spec.s, 1, 1.0));
  }
}

//! (dx dt sum |u|^p)^{1/p} on the lattice; p = infinity gives max |u|.
inline double st_lebesgue(const SpaceTimeField &F, double p) {
  if (!(p >= 1.0))
    throw DomainError("st_lebesgue: p must be >= 1");
  SpaceTimeField P = st_physical(F);
  const auto &v = P.values();
  if (std::isinf(p)) {
    double m = 0.0;
    for (auto c : v)
      m = std::max(m, std::abs(c));
    return m;
  }
  std::vector<double> rows(P.Kt());
  for (int n = 0; n < P.Kt(); ++n) {
    CompensatedSum<double> acc;
    for (int j = 0; j < P.K(); ++j)
      acc.add(std::pow(std::abs(P.at(n, j)), p));
    rows[n] = acc.value();
  }
  const Lattice &lat = P.lattice();
  return std::pow(pairwise_sum(rows) * lat.grid.dx() * lat.dt(), 1.0 / p);
}

//! sup_t || <xi>^s u(t) ||_{L^2_x} over the time samples.
inline double st_sup_sobolev(const SpaceTimeField &F, double s) {
  SpaceTimeField P = st_physical(F);
  const Grid &g = P.lattice().grid;
  double m = 0.0;
  for (int n = 0; n < P.Kt(); ++n) {
    std::vector<cplx> row(P.values().begin() + static_cast<std::ptrdiff_t>(n) * P.K(),
                          P.values().begin() + static_cast<std::ptrdiff_t>(n + 1) * P.K());
    m = std::max(m, sobolev_norm(Field(g, std::move(row), Rep::physical), s));
  }
  return m;
}

enum class BilinearSign { minus, plus };

namespace detail {

//! Per-time spatial coefficients, indexed [n][slot].
inline std::vector<cplx> x_coefficients(const SpaceTimeField &P) {
  const Grid &g = P.lattice().grid;
  std::vector<cplx> out(P.values().size());
  parallel_for(static_cast<std::size_t>(P.Kt()), [&](std::size_t n) {
    std::vector<cplx> row(P.values().begin() + static_cast<std::ptrdiff_t>(n) * P.K(),
                          P.values().begin() + static_cast<std::ptrdiff_t>(n + 1) * P.K());
    Field f = to_spectral(Field(g, std::move(row), Rep::physical));
    std::copy(f.values().begin(), f.values().end(),
              out.begin() + static_cast<std::ptrdiff_t>(n) * P.K());
  });
  return out;
}

inline void require_band(const std::vector<cplx> &c, const Grid &g, int Kt, int band,
                         const char *who) {
  double mx = 0.0, out = 0.0;
  for (int n = 0; n < Kt; ++n)
    for (int j = 0; j < g.K(); ++j) {
      double a = std::abs(c[static_cast<std::size_t>(n) * g.K() + j]);
      mx = std::max(mx, a);
      if (std::abs(g.index(j)) >= band)
        out = std::max(out, a);
    }
  if (out > 1e-12 * mx)
    throw DomainError(std::string(who) + ": input not supported in |k| < K/4");
}

} // namespace detail

//! I_{-/+}^s(f, g): convolution of f_hat and g_hat in (xi, tau) weighted by
//! |xi_1 -/+ xi_2|^s. The symbol does not involve tau, so the tau convolution
//! is carried out as a pointwise product in t (cyclic on the lattice). Inputs
//! must be supported in |k| < K/4 so the xi convolution does not wrap.
inline SpaceTimeField bilinear_apply(const SpaceTimeField &f, const SpaceTimeField &g, double s,
                                     BilinearSign sign) {
  if (!(f.lattice() == g.lattice()))
    throw ContractViolation("bilinear_apply: lattice mismatch");
  if (s < 0.0 || s > 0.5)
    throw DomainError("bilinear_apply: s must lie in [0, 1/2]");
  const Lattice &lat = f.lattice();
  const Grid &gr = lat.grid;
  const int K = gr.K(), Kt = lat.Kt, band = K / 4;
  auto cf = detail::x_coefficients(st_physical(f));
  auto cg = detail::x_coefficients(st_physical(g));
  detail::require_band(cf, gr, Kt, band, "bilinear_apply");
  detail::require_band(cg, gr, Kt, band, "bilinear_apply");

  std::vector<double> sym(static_cast<std::size_t>(2 * band) * 2 * band);
  for (int k1 = -band + 1; k1 < band; ++k1)
    for (int k2 = -band + 1; k2 < band; ++k2) {
      double a = gr.xi(k1), b = gr.xi(k2);
      double m = std::abs(sign == BilinearSign::minus ? a - b : a + b);
      sym[static_cast<std::size_t>(k1 + band) * 2 * band + (k2 + band)] =
          s == 0.0 ? 1.0 : std::pow(m, s);
    }

  const double w = 1.0 / std::sqrt(gr.L());
  std::vector<cplx> out(cf.size());
  parallel_for(static_cast<std::size_t>(Kt), [&](std::size_t n) {
    const cplx *F = cf.data() + n * K;
    const cplx *G = cg.data() + n * K;
    std::vector<cplx> row(K);
    for (int k = -2 * band + 2; k <= 2 * band - 2; ++k) {
      if (k < -K / 2 || k >= K / 2)
        continue;
      CompensatedSum<cplx> acc;
      for (int k1 = std::max(-band + 1, k - band + 1); k1 <= std::min(band - 1, k + band - 1); ++k1) {
        int k2 = k - k1;
        acc.add(sym[static_cast<std::size_t>(k1 + band) * 2 * band + (k2 + band)] *
                F[gr.slot(k1)] * G[gr.slot(k2)]);
      }
      row[gr.slot(k)] = w * acc.value();
    }
    Field h = to_physical(Field(gr, std::move(row), Rep::spectral));
    std::copy(h.values().begin(), h.values().end(), out.begin() + static_cast<std::ptrdiff_t>(n) * K);
  });
  return {lat, std::move(out), Rep::physical};
}

// ---------------------------------------------------------------------------
// Empirical constants of the linear and bilinear space-time estimates

//! Exponents standing in for "1/2+" and "0-"; "1/2-" is 1/2 + zero_minus and
//! "theta+" is theta + (half_plus - 1/2).
struct Exponents {
  double half_plus = kHalfPlus;
  double zero_minus = kZeroMinus;

  void validate() const {
    if (!(half_plus > 0.5 && half_plus < 1.0))
      throw ConfigError("Exponents: half_plus must lie in (1/2, 1)");
    if (!(zero_minus < 0.0 && zero_minus > -0.5))
      throw ConfigError("Exponents: zero_minus must lie in (-1/2, 0)");
  }
  double eps() const { return half_plus - 0.5; }
  double half_minus() const { return 0.5 + zero_minus; }
};

//! Seeded corpus member: one or two windowed fields.
struct CorpusItem {
  SpaceTimeField f;
  SpaceTimeField g;
};

//! free: 1-3 windowed free waves, |k| <= K/8, Gaussian amplitudes.
//! offshell: the same with each temporal frequency shifted by up to +-8.
//! packet: a windowed free Gaussian packet with random centre and width.
inline const std::vector<std::string> &corpus_names() {
  static const std::vector<std::string> v{"free", "offshell", "packet"};
  return v;
}

inline SpaceTimeField corpus_field(const std::string &corpus, const Lattice &lat, int sign,
                                   Rng &r) {
  const Grid &g = lat.grid;
  const int kmax = std::max(1, g.K() / 8);
  std::vector<std::pair<double, cplx>> modes; // (k, amplitude); offsets in `shift`
  std::vector<double> shift;
  if (corpus == "free" || corpus == "offshell") {
    int waves = r.integer(1, 3);
    for (int i = 0; i < waves; ++i) {
      int k = r.integer(-kmax, kmax);
      cplx a(r.normal(), r.normal());
      modes.emplace_back(k, a);
      shift.push_back(corpus == "offshell" ? r.uniform(-8.0, 8.0) : 0.0);
    }
  } else if (corpus == "packet") {
    double k0 = r.uniform(-0.5 * kmax, 0.5 * kmax);
    double width = r.uniform(1.0, 0.25 * kmax + 1.0);
    for (int k = -kmax; k <= kmax; ++k) {
      double z = (k - k0) / width;
      modes.emplace_back(k, std::exp(-0.5 * z * z) * std::exp(cplx(0.0, r.uniform(0.0, 2.0 * kPi))));
      shift.push_back(0.0);
    }
  } else {
    throw ConfigError("unknown corpus: " + corpus);
  }
  // separable evaluation: e^{i xi x_j} and e^{-i w t_n} tabulated per mode
  const int K = g.K(), Kt = lat.Kt;
  const double rtL = 1.0 / std::sqrt(g.L());
  std::vector<cplx> v(static_cast<std::size_t>(K) * Kt, 0.0);
  std::vector<cplx> ex(K), et(Kt);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    double xi = g.xi(static_cast<int>(modes[i].first));
    double w = sign * xi * xi + shift[i];
    for (int j = 0; j < K; ++j)
      ex[j] = rtL * modes[i].second * std::exp(cplx(0.0, xi * g.x(j)));
    for (int n = 0; n < Kt; ++n)
      et[n] = window_value(lat.window, lat.t(n), lat.T) * std::exp(cplx(0.0, -w * lat.t(n)));
    for (int n = 0; n < Kt; ++n)
      for (int j = 0; j < K; ++j)
        v[static_cast<std::size_t>(n) * K + j] += et[n] * ex[j];
  }
  return {lat, std::move(v), Rep::physical};
}

struct EstimateSpec {
  std::string id;
  std::string statement;
  int sign_f = 1;
  int sign_g = 1;
  bool bilinear = false;
  std::function<double(const CorpusItem &, const Exponents &)> ratio;
  std::function<std::string(const Exponents &)> exponents_used;
};

namespace detail {

inline std::string fmt_exp(std::initializer_list<std::pair<const char *, double>> kv) {
  std::ostringstream os;
  bool first = true;
  for (auto &[k, v] : kv) {
    os << (first ? "" : " ") << k << "=" << v;
    first = false;
  }
  return os.str();
}

inline double lin_ratio(const CorpusItem &c, double q, const NormSpec &rhs) {
  return st_lebesgue(c.f, q) / st_norm(c.f, rhs);
}

inline double bil_ratio(const CorpusItem &c, double s, BilinearSign sg, const NormSpec &nf,
                        const NormSpec &ng) {
  return st_lebesgue(bilinear_apply(c.f, c.g, s, sg), 2.0) / (st_norm(c.f, nf) * st_norm(c.g, ng));
}

} // namespace detail

inline const std::vector<EstimateSpec> &estimate_registry() {
  using detail::bil_ratio;
  using detail::fmt_exp;
  using detail::lin_ratio;
  using E = Exponents;
  static const std::vector<EstimateSpec> reg{
      {"XE1", "|u|_{L^6} <= C |u|_{X_{0,1/2+}}", 1, 1, false,
       [](const CorpusItem &c, const E &e) { return lin_ratio(c, 6.0, NormSpec::X(0.0, e.half_plus)); },
       [](const E &e) { return fmt_exp({{"b", e.half_plus}}); }},
      {"XE2", "|u|_{L^4} <= C |u|_{X_{0,3/8+}}", 1, 1, false,
       [](const CorpusItem &c, const E &e) {
         return lin_ratio(c, 4.0, NormSpec::X(0.0, 0.375 + e.eps()));
       },
       [](const E &e) { return fmt_exp({{"q", 4}, {"b", 0.375 + e.eps()}}); }},
      {"XE4", "|f|_{L^inf} <= C |f|_{Y_{1/2+}}", 1, 1, false,
       [](const CorpusItem &c, const E &e) {
         return lin_ratio(c, INFINITY, NormSpec::Y(e.half_plus));
       },
       [](const E &e) { return fmt_exp({{"s", e.half_plus}}); }},
      {"XE5", "|f|_{L^6} <= C |f|_{Y_{0+}}", 1, 1, false,
       [](const CorpusItem &c, const E &e) { return lin_ratio(c, 6.0, NormSpec::Y(e.eps())); },
       [](const E &e) { return fmt_exp({{"s", e.eps()}}); }},
      {"XE6", "|f|_{L^8} <= C |f|_{Y_{1/8+}}", 1, 1, false,
       [](const CorpusItem &c, const E &e) {
         return lin_ratio(c, 8.0, NormSpec::Y(0.125 + e.eps()));
       },
       [](const E &e) { return fmt_exp({{"q", 8}, {"s", 0.125 + e.eps()}}); }},
      {"BI-minus-pp", "|I_-^{1/2}(f,g)|_{L^2} <= C |f|_{X+_{0,1/2+}} |g|_{X+_{0,1/2+}}", 1, 1, true,
       [](const CorpusItem &c, const E &e) {
         return bil_ratio(c, 0.5, BilinearSign::minus, NormSpec::X(0.0, e.half_plus, 1),
                          NormSpec::X(0.0, e.half_plus, 1));
       },
       [](const E &e) { return fmt_exp({{"s", 0.5}, {"b", e.half_plus}}); }},
      {"BI-minus-mm", "|I_-^{1/2}(f,g)|_{L^2} <= C |f|_{X-_{0,1/2+}} |g|_{X-_{0,1/2+}}", -1, -1, true,
       [](const CorpusItem &c, const E &e) {
         return bil_ratio(c, 0.5, BilinearSign::minus, NormSpec::X(0.0, e.half_plus, -1),
                          NormSpec::X(0.0, e.half_plus, -1));
       },
       [](const E &e) { return fmt_exp({{"s", 0.5}, {"b", e.half_plus}}); }},
      {"BI-plus-pm", "|I_+^{1/2}(f,g)|_{L^2} <= C |f|_{X+_{0,1/2+}} |g|_{X-_{0,1/2+}}", 1, -1, true,
       [](const CorpusItem &c, const E &e) {
         return bil_ratio(c, 0.5, BilinearSign::plus, NormSpec::X(0.0, e.half_plus, 1),
                          NormSpec::X(0.0, e.half_plus, -1));
       },
       [](const E &e) { return fmt_exp({{"s", 0.5}, {"b", e.half_plus}}); }},
      {"BI-zero", "|fg|_{L^2} <= C |f|_{X_{0,3/8+}} |g|_{X_{0,3/8+}}", 1, 1, true,
       [](const CorpusItem &c, const E &e) {
         double b = 0.375 + e.eps();
         return bil_ratio(c, 0.0, BilinearSign::minus, NormSpec::X(0.0, b), NormSpec::X(0.0, b));
       },
       [](const E &e) { return fmt_exp({{"s", 0.0}, {"b", 0.375 + e.eps()}}); }},
      {"BI-interp", "|I_-^{1/4}(f,g)|_{L^2} <= C |f|_{X+_{0,3/8+}} |g|_{X+_{0,1/2+}}", 1, 1, true,
       [](const CorpusItem &c, const E &e) {
         // s = 1/4, s' = 1/2: b1 = (1 - s' + s)/2, b2 = (2 s' + 1)/4
         return bil_ratio(c, 0.25, BilinearSign::minus, NormSpec::X(0.0, 0.375 + e.eps()),
                          NormSpec::X(0.0, 0.5 + e.eps()));
       },
       [](const E &e) { return fmt_exp({{"s", 0.25}, {"b1", 0.375 + e.eps()}, {"b2", 0.5 + e.eps()}}); }},
      {"BI-crude-pp", "|I_-^{1/2-}(f,g)|_{L^2} <= C |f|_{X+_{0,1/2-}} |g|_{X+_{0,1/2-}}", 1, 1, true,
       [](const CorpusItem &c, const E &e) {
         double h = e.half_minus();
         return bil_ratio(c, h, BilinearSign::minus, NormSpec::X(0.0, h, 1), NormSpec::X(0.0, h, 1));
       },
       [](const E &e) { return fmt_exp({{"s", e.half_minus()}, {"b", e.half_minus()}}); }},
      {"BI-crude-mm", "|I_-^{1/2-}(f,g)|_{L^2} <= C |f|_{X-_{0,1/2-}} |g|_{X-_{0,1/2-}}", -1, -1, true,
       [](const CorpusItem &c, const E &e) {
         double h = e.half_minus();
         return bil_ratio(c, h, BilinearSign::minus, NormSpec::X(0.0, h, -1), NormSpec::X(0.0, h, -1));
       },
       [](const E &e) { return fmt_exp({{"s", e.half_minus()}, {"b", e.half_minus()}}); }},
      {"BI-crude-pm", "|I_+^{1/2-}(f,g)|_{L^2} <= C |f|_{X+_{0,1/2-}} |g|_{X-_{0,1/2-}}", 1, -1, true,
       [](const CorpusItem &c, const E &e) {
         double h = e.half_minus();
         return bil_ratio(c, h, BilinearSign::plus, NormSpec::X(0.0, h, 1), NormSpec::X(0.0, h, -1));
       },
       [](const E &e) { return fmt_exp({{"s", e.half_minus()}, {"b", e.half_minus()}}); }},
  };
  return reg;
}

inline const EstimateSpec &find_estimate(const std::string &id) {
  for (auto &e : estimate_registry())
    if (e.id == id)
      return e;
  throw ConfigError("unregistered estimate id: " + id);
}

inline std::vector<std::string> all_estimate_ids() {
  std::vector<std::string> v;
  for (auto &e : estimate_registry())
    v.push_back(e.id);
  return v;
}

inline CorpusItem corpus_item(const EstimateSpec &e, const std::string &corpus, const Lattice &lat,
                              std::uint64_t seed, long long index) {
  Rng r(seed, static_cast<std::uint64_t>(index));
  SpaceTimeField f = corpus_field(corpus, lat, e.sign_f, r);
  SpaceTimeField g = e.bilinear ? corpus_field(corpus, lat, e.sign_g, r) : f;
  return {std::move(f), std::move(g)};
}

struct EstimateReport {
  std::string id;
  std::string corpus;
  std::uint64_t seed = 0;
  long long count = 0;
  Lattice lattice;
  Exponents exponents;
  std::string exponents_used;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  double q50 = 0.0;
  long long argmax_index = -1;
};

//! LHS / RHS of the estimate over `count` seeded corpus members.
inline EstimateReport estimate_ratio(const std::string &id, const std::string &corpus = "free",
                                     const Lattice &lat = {}, long long count = 32,
                                     std::uint64_t seed = 1, const Exponents &ex = {}) {
  const EstimateSpec &e = find_estimate(id);
  lat.validate();
  ex.validate();
  if (count < 1)
    throw ConfigError("estimate_ratio: count must be positive");
  std::vector<double> r(count);
  for (long long i = 0; i < count; ++i) {
    CorpusItem c = corpus_item(e, corpus, lat, seed, i);
    r[i] = e.ratio(c, ex);
    if (!std::isfinite(r[i]))
      throw Error("estimate " + id + ": non-finite ratio at member " + std::to_string(i));
  }
  EstimateReport rep;
  rep.id = id;
  rep.corpus = corpus;
  rep.seed = seed;
  rep.count = count;
  rep.lattice = lat;
  rep.exponents = ex;
  rep.exponents_used = e.exponents_used(ex);
  auto it = std::max_element(r.begin(), r.end());
  rep.max_ratio = *it;
  rep.argmax_index = it - r.begin();
  rep.min_ratio = *std::min_element(r.begin(), r.end());
  std::vector<double> sorted(r);
  std::sort(sorted.begin(), sorted.end());
  rep.q50 = sorted[(sorted.size() - 1) / 2];
  return rep;
}

//! Same lattice with K and K_t doubled.
inline Lattice doubled(const Lattice &lat) {
  return {Grid(lat.grid.L(), 2 * lat.grid.K()), lat.T, 2 * lat.Kt, lat.window};
}

} // namespace dnls
