#pragma once
#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "log.hpp"
#include "multipliers.hpp"

namespace dnls {

//! Numerical realization of a ~ b, a >> b and a >~ N.
struct ComparisonPolicy {
  double C_sim = 2.0;
  double C_gg = 8.0;
  double C_gtr = 0.5;

  void validate() const {
    if (!(C_sim > 1.0))
      throw ConfigError("ComparisonPolicy: C_sim must exceed 1");
    if (!(C_gg > C_sim))
      throw ConfigError("ComparisonPolicy: C_gg must exceed C_sim");
    if (!(C_gtr > 0.0 && C_gtr <= 1.0))
      throw ConfigError("ComparisonPolicy: C_gtr must lie in (0, 1]");
  }
  bool sim(double a, double b) const {
    double hi = std::max(a, b), lo = std::min(a, b);
    return hi <= C_sim * lo && hi > 0.0;
  }
  bool gg(double a, double b) const { return a >= C_gg * b && a > 0.0; }
  bool gtr(double a, double N) const { return a >= C_gtr * N; }
};

enum class Region { outside, omega1, omega2, omega3 };

inline std::string region_name(Region r) {
  switch (r) {
  case Region::omega1: return "Omega1";
  case Region::omega2: return "Omega2";
  case Region::omega3: return "Omega3";
  default: return "outside";
  }
}

//! Membership in Omega = Omega_1 u Omega_2 u Omega_3 (all inside Upsilon),
//! reported with precedence Omega_1 > Omega_2 > Omega_3. Odd and even entries
//! are first ordered by magnitude, so xi_1, xi_2 denote the largest odd and
//! even frequencies.
inline Region omega_classify_raw(const double *x, const IParams &p, const ComparisonPolicy &pol) {
  double o[3] = {std::abs(x[0]), std::abs(x[2]), std::abs(x[4])};
  double e[3] = {std::abs(x[1]), std::abs(x[3]), std::abs(x[5])};
  std::sort(o, o + 3, std::greater<>());
  std::sort(e, e + 3, std::greater<>());
  double all[6] = {o[0], o[1], o[2], e[0], e[1], e[2]};
  std::sort(all, all + 6, std::greater<>());
  const double n1 = all[0], n2 = all[1], n3 = all[2], n4 = all[3];
  if (!(pol.sim(n1, n2) && pol.gtr(n2, p.N)))
    return Region::outside;
  if ((pol.sim(o[0], o[1]) && pol.gg(o[1], n3)) || (pol.sim(e[0], e[1]) && pol.gg(e[1], n3)))
    return Region::omega1;
  // xi_1 + xi_2 for the largest odd and even entries, with their signs
  double x1 = 0.0, x2 = 0.0;
  for (int j = 0; j < 6; j += 2)
    if (std::abs(x[j]) == o[0]) {
      x1 = x[j];
      break;
    }
  for (int j = 1; j < 6; j += 2)
    if (std::abs(x[j]) == e[0]) {
      x2 = x[j];
      break;
    }
  if (pol.sim(o[0], e[0]) && pol.gtr(std::min(o[0], e[0]), p.N) && pol.gg(p.N, n3) &&
      pol.gg(std::sqrt(o[0]) * std::abs(x1 + x2), std::pow(n3, 1.5)))
    return Region::omega2;
  if (pol.gg(n3, n4))
    return Region::omega3;
  return Region::outside;
}

inline Region omega_classify(const FrequencyTuple &t, const IParams &p,
                             const ComparisonPolicy &pol = {}) {
  if (t.n() != 6)
    throw ContractViolation("omega_classify: arity 6 required");
  return omega_classify_raw(t.data(), p, pol);
}

namespace detail {
inline std::atomic<long long> &leak_counter() {
  static std::atomic<long long> c{0};
  return c;
}
} // namespace detail

//! Number of Omega tuples with |alpha_6| below the floor since the last reset.
inline long long sigma6_leak_count() { return detail::leak_counter().load(); }
inline void reset_sigma6_leaks() { detail::leak_counter().store(0); }

//! sigma6 = -M6 / alpha6 on Omega, 0 elsewhere.
inline cplx sigma6_raw(const double *x, const IParams &p, const ComparisonPolicy &pol) {
  if (omega_classify_raw(x, p, pol) == Region::outside)
    return 0.0;
  cplx a = alpha_raw(x, 6);
  double n1 = 0.0;
  for (int j = 0; j < 6; ++j)
    n1 = std::max(n1, std::abs(x[j]));
  if (std::abs(a) < kTol.leak_floor * n1 * n1) {
    if (detail::leak_counter().fetch_add(1) == 0)
      warn("sigma6: |alpha6| below the resonance floor inside Omega; value clamped to 0");
    return 0.0;
  }
  return -M6_fast(x, p) / a;
}

inline cplx sigma6_eval(const FrequencyTuple &t, const IParams &p,
                        const ComparisonPolicy &pol = {}) {
  if (t.n() != 6)
    throw ContractViolation("sigma6_eval: arity 6 required");
  return sigma6_raw(t.data(), p, pol);
}

//! M8~ = -i sum_{j=1}^{6} X_j^2(sigma6) xi_{j+1}.
inline cplx M8tilde_raw(const double *x, const IParams &p, const ComparisonPolicy &pol) {
  cplx s = 0.0;
  double y[6];
  for (int j = 0; j < 6; ++j) {
    for (int k = 0; k < j; ++k)
      y[k] = x[k];
    y[j] = x[j] + x[j + 1] + x[j + 2];
    for (int k = j + 1; k < 6; ++k)
      y[k] = x[k + 2];
    s += sigma6_raw(y, p, pol) * x[j + 1];
  }
  return cplx(0.0, -1.0) * s;
}

inline cplx M8tilde_eval(const FrequencyTuple &t, const IParams &p,
                         const ComparisonPolicy &pol = {}) {
  if (t.n() != 8)
    throw ContractViolation("M8tilde_eval: arity 8 required");
  return M8tilde_raw(t.data(), p, pol);
}

//! M10 = (i/2) sum_{j=1}^{6} (-1)^{j+1} X_j^4(sigma6).
inline cplx M10_raw(const double *x, const IParams &p, const ComparisonPolicy &pol) {
  cplx s = 0.0;
  double y[6];
  for (int j = 0; j < 6; ++j) {
    for (int k = 0; k < j; ++k)
      y[k] = x[k];
    y[j] = x[j] + x[j + 1] + x[j + 2] + x[j + 3] + x[j + 4];
    for (int k = j + 1; k < 6; ++k)
      y[k] = x[k + 4];
    s += (j % 2 == 0 ? 1.0 : -1.0) * sigma6_raw(y, p, pol);
  }
  return cplx(0.0, 0.5) * s;
}

inline cplx M10_eval(const FrequencyTuple &t, const IParams &p, const ComparisonPolicy &pol = {}) {
  if (t.n() != 10)
    throw ContractViolation("M10_eval: arity 10 required");
  return M10_raw(t.data(), p, pol);
}

inline Multiplier sigma6_multiplier(const IParams &p, const ComparisonPolicy &pol) {
  return {6, [p, pol](const double *x) { return sigma6_raw(x, p, pol); }};
}

//! M6 restricted to the complement of Omega.
inline Multiplier M6_off_omega_kernel(const IParams &p, const ComparisonPolicy &pol) {
  return {6, [p, pol](const double *x) {
            return omega_classify_raw(x, p, pol) == Region::outside ? M6_kernel(x, p) : cplx(0.0);
          }};
}

inline Multiplier M8tilde_multiplier(const IParams &p, const ComparisonPolicy &pol) {
  return {8, [p, pol](const double *x) { return M8tilde_raw(x, p, pol); }};
}

inline Multiplier M10_multiplier(const IParams &p, const ComparisonPolicy &pol) {
  return {10, [p, pol](const double *x) { return M10_raw(x, p, pol); }};
}

} // namespace dnls
