#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "conventions.hpp"
#include "errors.hpp"
#include "spectral.hpp"

namespace dnls {

enum class Tail { power_law, smooth_blend };

inline Tail parse_tail(const std::string &s) {
  if (s == "power_law" || s == "power-law" || s == "sharp")
    return Tail::power_law;
  if (s == "smooth_blend" || s == "smooth-blend" || s == "blend")
    return Tail::smooth_blend;
  throw ConfigError("unknown m tail: " + s);
}

inline std::string tail_name(Tail t) {
  return t == Tail::power_law ? "power_law" : "smooth_blend";
}

//! Parameters of the Fourier multiplier m of the I-operator. N is measured in
//! the same units as the frequencies handed to the evaluators; energies and
//! Lambda sums use physical frequencies 2 pi k / L (see physical_cutoff).
//! N is a physical frequency; configurations given in grid-index units
//! (N >= 1) convert with physical_cutoff.
struct IParams {
  double N = 64.0;
  double s = 0.5;
  Tail tail = Tail::power_law;

  void validate() const {
    if (!(N > 0.0))
      throw ConfigError("IParams: N must be positive");
    if (!(s >= 0.5 && s < 1.0))
      throw ConfigError("IParams: s must lie in [1/2, 1)");
  }
};

//! Cutoff given as a mode index converted to physical frequency units.
inline double physical_cutoff(double N_index, const Grid &g) { return N_index * g.dxi(); }

namespace detail {

template <class T> struct LogM {
  T g0, g1, g2; // log m and its first two derivatives in x = |xi| > N
};

template <class T> LogM<T> log_m(T x, const IParams &p) {
  const T N = p.N, a = T(1) - T(p.s);
  if (p.tail == Tail::power_law || x >= 2 * N)
    return {a * (std::log(N) - std::log(x)), -a / x, a / (x * x)};
  T t = (x - N) / N;
  T S = t * t * t * (10 + t * (-15 + 6 * t));
  T S1 = t * t * (30 + t * (-60 + 30 * t));
  T S2 = t * (60 + t * (-180 + 120 * t));
  T l = std::log1p(t), q = 1 / (1 + t);
  return {-a * S * l, -a / N * (S1 * l + S * q), -a / (N * N) * (S2 * l + 2 * S1 * q - S * q * q)};
}

} // namespace detail

//! m(xi): 1 on |xi| <= N, (N/|xi|)^{1-s} beyond 2N, power law or C^2 blend
//! in between.
template <class T = double> T m_value(T xi, const IParams &p) {
  T x = std::abs(xi);
  if (x <= T(p.N))
    return T(1);
  return std::exp(detail::log_m<T>(x, p).g0);
}

inline double m_eval(double xi, const IParams &p) { return m_value<double>(xi, p); }

//! e(xi) = (m^2 - 1) xi^2 and its derivatives in xi. At the power-law kink
//! |xi| = N the one-sided derivative values are averaged.
template <class T> struct EDerivs {
  T e, d1, d2;
};

template <class T> EDerivs<T> e_derivs(T xi, const IParams &p) {
  T x = std::abs(xi);
  const T N = p.N;
  if (x < N || (x == N && p.tail == Tail::smooth_blend))
    return {0, 0, 0};
  auto [g0, g1, g2] = detail::log_m<T>(std::max(x, N), p);
  T m = std::exp(g0), m1 = m * g1, m2 = m * (g2 + g1 * g1);
  T e = (m * m - 1) * x * x;
  T d1 = 2 * m * m1 * x * x + 2 * (m * m - 1) * x;
  T d2 = 2 * (m1 * m1 + m * m2) * x * x + 8 * m * m1 * x + 2 * (m * m - 1);
  if (x == N) {
    d1 /= 2;
    d2 /= 2;
  }
  if (xi < 0)
    d1 = -d1;
  return {e, d1, d2};
}

template <class T> T e_value(T xi, const IParams &p) {
  T x = std::abs(xi);
  if (x <= T(p.N))
    return T(0);
  T m = std::exp(detail::log_m<T>(x, p).g0);
  return (m * m - 1) * x * x;
}

//! Coefficientwise multiplication by m; frequencies are physical, so p.N
//! must be in physical units.
inline Field apply_I(const Field &f, const IParams &p) {
  Field s = to_spectral(f);
  const Grid &g = s.grid();
  for (int j = 0; j < g.K(); ++j)
    s[j] *= m_eval(g.xi_slot(j), p);
  return as_rep(s, f.rep());
}

//! A point of the hyperplane xi_1 + ... + xi_n = 0.
class FrequencyTuple {
public:
  FrequencyTuple() = default;
  explicit FrequencyTuple(std::vector<double> xi) : xi_(std::move(xi)) {
    if (xi_.empty() || xi_.size() % 2 != 0)
      throw ContractViolation("FrequencyTuple: arity must be even and positive");
    double sum = 0.0, mx = 0.0;
    for (double v : xi_) {
      sum += v;
      mx = std::max(mx, std::abs(v));
    }
    if (std::abs(sum) > kTol.hyperplane * std::max(mx, 1e-300) && std::abs(sum) > 0.0)
      throw ContractViolation("FrequencyTuple: frequencies do not sum to zero");
  }
  //! Builds a tuple from the first n-1 entries, fixing the last by the constraint.
  static FrequencyTuple closing(std::vector<double> head) {
    double s = 0.0;
    for (double v : head)
      s += v;
    head.push_back(-s);
    return FrequencyTuple(std::move(head));
  }

  int n() const { return static_cast<int>(xi_.size()); }
  double operator[](int j) const { return xi_[j]; } // zero-based
  double at(int j) const { return xi_.at(j - 1); }  // one-based, as in the formulas
  const double *data() const { return xi_.data(); }
  std::span<const double> values() const { return xi_; }
  //! Magnitudes in decreasing order, |xi*_1| >= |xi*_2| >= ...
  std::vector<double> sorted_magnitudes() const {
    std::vector<double> v(xi_.size());
    std::transform(xi_.begin(), xi_.end(), v.begin(), [](double x) { return std::abs(x); });
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
  }

private:
  std::vector<double> xi_;
};

//! alpha_n = i sum_j (-1)^j xi_j^2 (j one-based).
inline cplx alpha_raw(const double *xi, int n) {
  double s = 0.0;
  for (int j = 0; j < n; ++j)
    s += (j % 2 == 0 ? -1.0 : 1.0) * xi[j] * xi[j];
  return {0.0, s};
}

inline cplx alpha_eval(const FrequencyTuple &t) { return alpha_raw(t.data(), t.n()); }

// ---------------------------------------------------------------------------
// M4

namespace detail {

template <class T> T m4_tail_direct(T x1, T x2, T x3, T x4, const IParams &p) {
  T P = e_value(x1, p) * x3 + e_value(x3, p) * x1 + e_value(x2, p) * x4 + e_value(x4, p) * x2;
  return -P / (2 * (x1 + x2) * (x1 + x4));
}

//! Removable limit of the tail part -P_e / D on D = 0. Writing the odd and
//! even pairs as v +- sqrt(z1), -v +- sqrt(z2), the tail part equals minus
//! one half of the divided difference of psi(z) = e(v - sqrt z)(v + sqrt z)
//! + e(v + sqrt z)(v - sqrt z) between z1 and z2; here psi' is taken at the
//! midpoint.
inline long double m4_tail_limit(long double x1, long double x2, long double x3, long double x4,
                                 long double S, const IParams &p) {
  long double v = (x1 + x3) / 2;
  long double z1 = (x1 - x3) * (x1 - x3) / 4, z2 = (x2 - x4) * (x2 - x4) / 4;
  long double r = std::sqrt((z1 + z2) / 2);
  long double dpsi;
  if (r > 1e-7L * S) {
    long double x = v - r, y = v + r;
    auto ex = e_derivs<long double>(x, p), ey = e_derivs<long double>(y, p);
    long double Hx = ex.d1 * y + ey.e, Hy = ex.e + ey.d1 * x;
    dpsi = (Hy - Hx) / (2 * r);
  } else {
    auto ev = e_derivs<long double>(v, p);
    dpsi = ev.d2 * v - 2 * ev.d1;
  }
  return -dpsi / 2;
}

} // namespace detail

//! M4 on Gamma_4. The x^2 part of m^2 x^2 contributes (xi_1 + xi_3)/2
//! exactly; the remainder is evaluated directly, in extended precision when
//! the denominator is small, and through its removable limit near
//! (xi_1 + xi_2)(xi_1 + xi_4) = 0.
inline double M4(double x1, double x2, double x3, double x4, const IParams &p) {
  // canonical order within the odd and even pairs makes the symmetry bitwise
  if (x3 < x1)
    std::swap(x1, x3);
  if (x4 < x2)
    std::swap(x2, x4);
  const double base = 0.5 * (x1 + x3);
  const double S = std::max({std::abs(x1), std::abs(x2), std::abs(x3), std::abs(x4)});
  if (S <= p.N)
    return base;
  // distance to the singular set, symmetric under both swaps off the hyperplane too
  const double ab = std::min(std::abs(x1 + x2), std::abs(x3 + x4)) *
                    std::min(std::abs(x1 + x4), std::abs(x2 + x3)),
               S2 = S * S;
  if (ab > 1e-2 * S2)
    return base + detail::m4_tail_direct<double>(x1, x2, x3, x4, p);
  if (ab > kTol.singular_rel * S2)
    return base + static_cast<double>(
                      detail::m4_tail_direct<long double>(x1, x2, x3, x4, p));
  if (std::abs(x1 + x2 + x3 + x4) > kTol.hyperplane * S)
    throw SingularityError("M4: singular denominator off the hyperplane");
  return base + static_cast<double>(detail::m4_tail_limit(x1, x2, x3, x4, S, p));
}

inline double M4_eval(const FrequencyTuple &t, const IParams &p) {
  if (t.n() != 4)
    throw ContractViolation("M4_eval: arity 4 required");
  return M4(t[0], t[1], t[2], t[3], p);
}

// ---------------------------------------------------------------------------
// M6

//! beta6 = (i/6) sum (-1)^j m_j^2 xi_j^2 (sign fixed in conventions.hpp).
inline cplx beta6_raw(const double *xi, const IParams &p) {
  double s = 0.0;
  for (int j = 0; j < 6; ++j) {
    double m = m_eval(xi[j], p);
    s += (j % 2 == 0 ? -1.0 : 1.0) * m * m * xi[j] * xi[j];
  }
  return {0.0, kBeta6Sign * s / 6.0};
}

inline cplx beta6_eval(const FrequencyTuple &t, const IParams &p) {
  if (t.n() != 6)
    throw ContractViolation("beta6_eval: arity 6 required");
  return beta6_raw(t.data(), p);
}

namespace detail {

inline constexpr std::array<std::array<int, 3>, 6> kPerm3{{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

} // namespace detail

//! M6 as the full symmetrized sum over the 36 assignments
//! {a,c,e} = {1,3,5}, {b,d,f} = {2,4,6} of the four shifted M4 terms.
inline cplx M6_literal(const double *x, const IParams &p) {
  static constexpr int odd[3] = {0, 2, 4}, even[3] = {1, 3, 5};
  double acc = 0.0;
  for (auto &po : detail::kPerm3)
    for (auto &pe : detail::kPerm3) {
      double a = x[odd[po[0]]], c = x[odd[po[1]]], e = x[odd[po[2]]];
      double b = x[even[pe[0]]], d = x[even[pe[1]]], f = x[even[pe[2]]];
      acc += M4(a + b + c, d, e, f, p) * b + M4(a, b + c + d, e, f, p) * c +
             M4(a, b, c + d + e, f, p) * d + M4(a, b, c, d + e + f, p) * e;
    }
  return beta6_raw(x, p) + cplx(0.0, -acc / 72.0);
}

//! Sum of the 18 distinct shifted M4 terms of M6 (each occurs 8 times among
//! the 144 literal terms).
inline double M6_merged_sum(const double *x, const IParams &p) {
  double acc = 0.0;
  // odd multiplier c inside an even-odd-even block in an even slot
  for (int c = 0; c < 6; c += 2) {
    int a = (c + 2) % 6, e = (c + 4) % 6;
    for (int f = 1; f < 6; f += 2) {
      double blk = -x[a] - x[e] - x[f];
      acc += M4(x[a], blk, x[e], x[f], p) * x[c];
    }
  }
  // even multiplier b inside an odd-even-odd block in an odd slot
  for (int b = 1; b < 6; b += 2) {
    int d = (b + 2) % 6, f = (b + 4) % 6;
    for (int e = 0; e < 6; e += 2) {
      double blk = -x[d] - x[e] - x[f];
      acc += M4(blk, x[d], x[e], x[f], p) * x[b];
    }
  }
  return acc;
}

//! Merged constant: M6 = beta6 + C6 * M6_merged_sum.
inline constexpr cplx kC6{0.0, -1.0 / 9.0};

//! M6 through the merged sum.
inline cplx M6_fast(const double *x, const IParams &p) {
  return beta6_raw(x, p) + kC6 * M6_merged_sum(x, p);
}

inline cplx M6_eval(const FrequencyTuple &t, const IParams &p) {
  if (t.n() != 6)
    throw ContractViolation("M6_eval: arity 6 required");
  return M6_literal(t.data(), p);
}

//! Non-symmetric kernel with Lambda_6(M6_kernel) = Lambda_6(M6) for every w.
inline cplx M6_kernel(const double *x, const IParams &p) {
  double t = M4(x[2], x[1] + x[0] + x[3], x[4], x[5], p) * x[0] +
             M4(x[0] + x[1] + x[2], x[3], x[4], x[5], p) * x[1];
  return beta6_raw(x, p) + cplx(0.0, -t);
}

// ---------------------------------------------------------------------------
// M8

//! M8 = (i/4) Sym sum_j (-1)^{j+1} X_j^4(M4). Of the 2304 shifted terms the
//! positive ones (a 3-odd/2-even block) take 24 distinct values, the negative
//! ones (2-odd/3-even) another 24, each with multiplicity 48.
inline cplx M8_eval_raw(const double *x, const IParams &p) {
  static constexpr int odd[4] = {0, 2, 4, 6}, even[4] = {1, 3, 5, 7};
  double P = 0.0, Q = 0.0;
  for (int g = 0; g < 4; ++g)            // odd index outside the block
    for (int i = 0; i < 4; ++i)          // pair of evens outside
      for (int j = i + 1; j < 4; ++j) {
        double xg = x[odd[g]], xf = x[even[i]], xh = x[even[j]];
        P += M4(-xg - xf - xh, xf, xg, xh, p);
      }
  for (int h = 0; h < 4; ++h)            // even index outside
    for (int i = 0; i < 4; ++i)          // pair of odds outside
      for (int j = i + 1; j < 4; ++j) {
        double xa = x[odd[i]], xg = x[odd[j]], xh = x[even[h]];
        Q += M4(xa, -xa - xg - xh, xg, xh, p);
      }
  return {0.0, (P - Q) / 48.0};
}

inline cplx M8_eval(const FrequencyTuple &t, const IParams &p) {
  if (t.n() != 8)
    throw ContractViolation("M8_eval: arity 8 required");
  return M8_eval_raw(t.data(), p);
}

//! Non-symmetric kernel with Lambda_8(M8_kernel) = Lambda_8(M8).
inline cplx M8_kernel(const double *x, const IParams &p) {
  double P = M4(x[0] + x[1] + x[2] + x[3] + x[4], x[5], x[6], x[7], p);
  double Q = M4(x[0], x[1] + x[2] + x[3] + x[4] + x[5], x[6], x[7], p);
  return {0.0, 0.5 * (P - Q)};
}

// ---------------------------------------------------------------------------
// Generic multipliers and the contraction X_j^l

inline constexpr int kMaxArity = 16;

//! A multiplier of fixed arity acting on a pointer to n frequencies.
struct Multiplier {
  int arity = 0;
  std::function<cplx(const double *)> fn;

  cplx operator()(const double *xi) const { return fn(xi); }
  cplx operator()(std::span<const double> xi) const {
    if (static_cast<int>(xi.size()) != arity)
      throw ContractViolation("Multiplier: arity mismatch");
    return fn(xi.data());
  }
  cplx operator()(const FrequencyTuple &t) const { return (*this)(t.values()); }
};

inline Multiplier constant_multiplier(int n, cplx c) {
  return {n, [c](const double *) { return c; }};
}

//! X_j^l(M)(xi_1..xi_{n+l}) = M(xi_1, .., xi_{j-1}, xi_j + .. + xi_{j+l}, ..); j one-based.
inline Multiplier X_shift(int j, int l, const Multiplier &M) {
  if (j < 1 || j > M.arity)
    throw ContractViolation("X_shift: slot out of range");
  if (l < 0 || l % 2 != 0)
    throw ContractViolation("X_shift: contraction length must be even");
  if (M.arity + l > kMaxArity)
    throw ContractViolation("X_shift: arity too large");
  const int n = M.arity;
  auto inner = M.fn;
  return {n + l, [=](const double *xi) {
            std::array<double, kMaxArity> y{};
            for (int k = 0; k < j - 1; ++k)
              y[k] = xi[k];
            double s = 0.0;
            for (int k = j - 1; k <= j - 1 + l; ++k)
              s += xi[k];
            y[j - 1] = s;
            for (int k = j; k < n; ++k)
              y[k] = xi[k + l];
            return inner(y.data());
          }};
}

//! Kernels produced by d/dt Lambda_n(M): arity n (M alpha_n), n+2 and n+4.
struct DerivativeExpansion {
  Multiplier same, plus2, plus4;
};

inline DerivativeExpansion derivative_expansion(const Multiplier &M) {
  const int n = M.arity;
  Multiplier same{n, [M, n](const double *xi) { return M(xi) * alpha_raw(xi, n); }};
  std::vector<Multiplier> x2, x4;
  for (int j = 1; j <= n; ++j) {
    x2.push_back(X_shift(j, 2, M));
    x4.push_back(X_shift(j, 4, M));
  }
  Multiplier p2{n + 2, [x2, n](const double *xi) {
                  cplx s = 0.0;
                  for (int j = 1; j <= n; ++j)
                    s += x2[j - 1](xi) * xi[j];
                  return cplx(0.0, -1.0) * s;
                }};
  Multiplier p4{n + 4, [x4, n](const double *xi) {
                  cplx s = 0.0;
                  for (int j = 1; j <= n; ++j)
                    s += (j % 2 == 1 ? 1.0 : -1.0) * x4[j - 1](xi);
                  return cplx(0.0, 0.5) * s;
                }};
  return {same, p2, p4};
}

//! Average of M over all permutations of odd slots and of even slots.
inline Multiplier symmetrize(const Multiplier &M) {
  const int n = M.arity, h = n / 2;
  if (h > 5)
    throw ContractViolation("symmetrize: arity above 10 not supported");
  std::vector<std::vector<int>> perms;
  std::vector<int> q(h);
  for (int i = 0; i < h; ++i)
    q[i] = i;
  do
    perms.push_back(q);
  while (std::next_permutation(q.begin(), q.end()));
  return {n, [M, perms, n, h](const double *xi) {
            std::array<double, kMaxArity> y{};
            cplx acc = 0.0;
            for (auto &po : perms)
              for (auto &pe : perms) {
                for (int i = 0; i < h; ++i) {
                  y[2 * i] = xi[2 * po[i]];
                  y[2 * i + 1] = xi[2 * pe[i] + 1];
                }
                acc += M(y.data());
              }
            return acc / static_cast<double>(perms.size() * perms.size());
          }};
}

// Named multipliers as Multiplier objects.

inline Multiplier M2_energy(const IParams &p) {
  return {2, [p](const double *x) {
            return cplx(-x[0] * x[1] * m_eval(x[0], p) * m_eval(x[1], p), 0.0);
          }};
}

//! Quartic kernel of E(Iw): (1/4) xi_13 m_1 m_2 m_3 m_4.
inline Multiplier M4_E1(const IParams &p) {
  return {4, [p](const double *x) {
            return cplx(0.25 * (x[0] + x[2]) * m_eval(x[0], p) * m_eval(x[1], p) *
                            m_eval(x[2], p) * m_eval(x[3], p),
                        0.0);
          }};
}

inline Multiplier M4_multiplier(const IParams &p) {
  return {4, [p](const double *x) { return cplx(M4(x[0], x[1], x[2], x[3], p), 0.0); }};
}

inline Multiplier M6_multiplier(const IParams &p) {
  return {6, [p](const double *x) { return M6_literal(x, p); }};
}

inline Multiplier M6_kernel_multiplier(const IParams &p) {
  return {6, [p](const double *x) { return M6_kernel(x, p); }};
}

inline Multiplier M8_multiplier(const IParams &p) {
  return {8, [p](const double *x) { return M8_eval_raw(x, p); }};
}

inline Multiplier M8_kernel_multiplier(const IParams &p) {
  return {8, [p](const double *x) { return M8_kernel(x, p); }};
}

} // namespace dnls
