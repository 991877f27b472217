#pragma once
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "omega.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace dnls {

//! Which tuples to draw. Upper magnitudes scale with N, lower ones are fixed
//! at 1, so profiles at N and 2N are matched.
struct SampleProfile {
  int n = 4;
  std::string pattern = "generic";
  double N = 64.0;
  long long count = 10000;
  std::uint64_t seed = 1;
};

struct BoundReport {
  std::string id, pattern;
  double N = 0.0, s = 0.5;
  Tail tail = Tail::power_law;
  ComparisonPolicy policy{};
  std::uint64_t seed = 0;
  long long samples = 0, valid = 0;
  double coverage = 0.0;
  double max_ratio = 0.0, q50 = 0.0, q90 = 0.0, q99 = 0.0;
  long long argmax_index = -1;
  std::vector<double> argmax_tuple;
};

namespace detail {

inline double sgn(Rng &r) { return r.uniform() < 0.5 ? -1.0 : 1.0; }
inline double logu(Rng &r, double lo, double hi) { return lo >= hi ? lo : r.log_uniform(lo, hi); }

inline std::vector<double> sorted_mags(const double *x, int n) {
  std::vector<double> v(n);
  for (int j = 0; j < n; ++j)
    v[j] = std::abs(x[j]);
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

//! Fills slot `close` so the entries sum to zero.
inline void close_tuple(std::vector<double> &x, int close) {
  double s = 0.0;
  for (int j = 0; j < static_cast<int>(x.size()); ++j)
    if (j != close)
      s += x[j];
  x[close] = -s;
}

//! Two large entries in slots i, j (value about +-A), all others small with
//! magnitudes log-uniform in [1, smax]; slot j closes the tuple.
inline std::vector<double> pair_shape(Rng &r, int n, int i, int j, double A, double smax) {
  std::vector<double> x(n, 0.0);
  x[i] = sgn(r) * A;
  for (int k = 0; k < n; ++k)
    if (k != i && k != j)
      x[k] = sgn(r) * logu(r, 1.0, smax);
  close_tuple(x, j);
  return x;
}

inline std::optional<std::vector<double>> try_shape(const std::string &pat, int n, double N,
                                                    const IParams &p, const ComparisonPolicy &pol,
                                                    Rng &r) {
  const double gg = pol.C_gg, lowA = pol.C_gtr * N, hiA = 16.0 * N;
  if (pat == "generic") {
    std::vector<double> x(n);
    for (int k = 0; k < n - 1; ++k)
      x[k] = sgn(r) * logu(r, 1.0, hiA);
    if (r.uniform() < 0.25) // near-pairing of slots 1 and 2
      x[1] = -x[0] * (1.0 + sgn(r) * logu(r, 1e-9, 1e-2));
    close_tuple(x, n - 1);
    return x;
  }
  if (pat == "all<<N") {
    std::vector<double> x(n);
    for (int k = 0; k < n - 1; ++k)
      x[k] = sgn(r) * logu(r, 1.0, N / gg);
    close_tuple(x, n - 1);
    if (std::abs(x[n - 1]) > N / gg)
      return std::nullopt;
    return x;
  }
  if (pat == "N1~N3>>N3*") { // odd pair large
    double A = logu(r, lowA, hiA);
    return pair_shape(r, n, 0, 2, A, std::min(N, A / 2.0) / gg);
  }
  if (pat == "N1~N2>>N3*") { // xi_1 = xi*_1, xi_2 the other large one
    double A = logu(r, lowA, hiA);
    auto x = pair_shape(r, n, 0, 1, A, std::min(N, A / 2.0) / gg);
    if (std::abs(x[1]) > std::abs(x[0]))
      return std::nullopt;
    return x;
  }
  if (pat == "N3*<<N") {
    double A = logu(r, 1.0, hiA);
    int kind = r.integer(0, 2);
    int i = 0, j = kind == 0 ? 1 : (kind == 1 ? 2 : 3);
    if (kind == 2)
      i = 1;
    return pair_shape(r, n, i, j, A, std::min(N / gg, A / 2.0));
  }
  if (pat == "N3*>~N") {
    std::vector<double> x(n);
    for (int k = 0; k < n - 1; ++k)
      x[k] = sgn(r) * logu(r, lowA, hiA);
    close_tuple(x, n - 1);
    if (sorted_mags(x.data(), n)[2] < lowA)
      return std::nullopt;
    return x;
  }
  if (pat == "xi2*=xi2") {
    double A = logu(r, 1.0, hiA);
    std::vector<double> x(n);
    x[0] = sgn(r) * A;
    for (int k = 2; k < n; ++k)
      x[k] = sgn(r) * logu(r, 1.0, A / 2.0);
    close_tuple(x, 1);
    auto m = sorted_mags(x.data(), n);
    if (std::abs(x[0]) != m[0] || std::abs(x[1]) != m[1])
      return std::nullopt;
    return x;
  }
  if (pat == "Omega1" || pat == "Omega1&N3*<<N") {
    double A = logu(r, lowA, hiA);
    double smax = A / (2.0 * gg);
    if (pat == "Omega1&N3*<<N")
      smax = std::min(smax, N / gg);
    bool odd_pair = r.uniform() < 0.5;
    auto x = odd_pair ? pair_shape(r, n, 0, 2, A, smax) : pair_shape(r, n, 1, 3, A, smax);
    return x;
  }
  if (pat == "Omega2") {
    double A = logu(r, lowA, hiA);
    auto x = pair_shape(r, n, 0, 1, A, std::min(N, A) / (2.0 * gg));
    if (std::abs(x[1]) > std::abs(x[0]))
      return std::nullopt;
    return x;
  }
  if (pat == "Omega3") {
    // three large entries with the smallest of them >> the rest
    double A = logu(r, lowA, hiA), B = logu(r, lowA, hiA);
    std::vector<int> slots{0, 1, 2, 3, 4, 5};
    for (int k = 5; k > 0; --k)
      std::swap(slots[k], slots[r.integer(0, k)]);
    std::vector<double> x(n, 0.0);
    x[slots[0]] = sgn(r) * A;
    x[slots[1]] = sgn(r) * B;
    double third = std::abs(x[slots[0]] + x[slots[1]]);
    double smax = std::max(1.0, third / (4.0 * gg));
    for (int k = 3; k < 6; ++k)
      x[slots[k]] = sgn(r) * logu(r, 1.0, smax);
    close_tuple(x, slots[2]);
    return x;
  }
  if (pat == "Omega") {
    static const char *sub[3] = {"Omega1", "Omega2", "Omega3"};
    return try_shape(sub[r.integer(0, 2)], n, N, p, pol, r);
  }
  if (pat == "offOmega&N3*<<N") {
    double A = logu(r, 1.0, hiA);
    double s0 = logu(r, 1.0, std::min(N, A) / (2.0 * gg));
    std::vector<double> x(n, 0.0);
    x[0] = sgn(r) * A;
    for (int k = 2; k < n - 1; ++k)
      x[k] = sgn(r) * s0 * r.uniform(1.0, 2.0);
    double x12 = 0.0;
    if (r.uniform() < 0.5) // keep |xi_12| below the Omega_2 threshold
      x12 = sgn(r) * r.uniform(0.0, 1.0) * std::pow(s0, 1.5) / std::sqrt(A);
    else
      x12 = sgn(r) * r.uniform(0.0, 1.0) * s0;
    double rest = 0.0;
    for (int k = 2; k < n - 1; ++k)
      rest += x[k];
    x[n - 1] = -x12 - rest;
    x[1] = x12 - x[0];
    return x;
  }
  throw ConfigError("sample_tuples: unknown pattern " + pat);
}

//! Shape generator followed by the Omega membership the pattern names.
inline std::optional<std::vector<double>> try_generate(const std::string &pat, int n, double N,
                                                       const IParams &p,
                                                       const ComparisonPolicy &pol, Rng &r) {
  auto x = try_shape(pat, n, N, p, pol, r);
  if (!x || n != 6 || (pat.rfind("Omega", 0) != 0 && pat.rfind("offOmega", 0) != 0))
    return x;
  Region c = omega_classify_raw(x->data(), p, pol);
  bool small = pol.gg(N, sorted_mags(x->data(), 6)[2]);
  bool ok = (pat == "Omega" && c != Region::outside) || (pat == "Omega1" && c == Region::omega1) ||
            (pat == "Omega1&N3*<<N" && c == Region::omega1 && small) ||
            (pat == "Omega2" && c == Region::omega2) || (pat == "Omega3" && c == Region::omega3) ||
            (pat == "offOmega&N3*<<N" && c == Region::outside && small);
  return ok ? x : std::nullopt;
}

} // namespace detail

inline const std::vector<std::string> &known_patterns() {
  static const std::vector<std::string> v{"generic", "all<<N", "N1~N3>>N3*", "N1~N2>>N3*",
                                          "N3*<<N", "N3*>~N", "xi2*=xi2", "Omega", "Omega1",
                                          "Omega1&N3*<<N", "Omega2", "Omega3",
                                          "offOmega&N3*<<N"};
  return v;
}

//! Tuple number `index` of the stream for `prof` (each index has its own
//! random stream, so any sample can be regenerated in isolation).
inline std::vector<double> sample_tuple(const SampleProfile &prof, long long index,
                                        const IParams &p, const ComparisonPolicy &pol = {}) {
  if (prof.n < 2 || prof.n % 2 != 0 || prof.n > kMaxArity)
    throw ContractViolation("sample_tuples: arity must be even");
  if (prof.pattern.rfind("Omega", 0) == 0 || prof.pattern.rfind("offOmega", 0) == 0)
    if (prof.n != 6)
      throw ConfigError("sample_tuples: Omega patterns need arity 6");
  Rng r(prof.seed, static_cast<std::uint64_t>(index));
  for (int attempt = 0; attempt < 10000; ++attempt) {
    auto x = detail::try_generate(prof.pattern, prof.n, prof.N, p, pol, r);
    if (x)
      return *x;
  }
  throw GenerationError("sample_tuples: pattern " + prof.pattern +
                        " infeasible after 10000 attempts");
}

inline std::vector<std::vector<double>> sample_tuples(const SampleProfile &prof, const IParams &p,
                                                      const ComparisonPolicy &pol = {}) {
  std::vector<std::vector<double>> out(prof.count);
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = sample_tuple(prof, static_cast<long long>(i), p, pol);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Registry

//! Ratio |quantity| / envelope on one tuple, or nothing when the tuple
//! violates the bound's hypothesis.
using RatioFn = std::function<std::optional<double>(const double *, const IParams &,
                                                    const ComparisonPolicy &)>;

struct BoundSpec {
  std::string id;
  int arity;
  std::string pattern;
  std::string statement;
  bool omega_conditioned;
  long long default_samples;
  RatioFn ratio;
};

//! Second constant of the principal part of M6 when |xi_1| ~ |xi_2| >> |xi*_3|.
inline constexpr cplx kC6prime{0.0, 1.0 / 9.0}; // C6/2 + i/6

//! Least-squares C with M6_literal - beta6 = C * M6_merged_sum over `count`
//! seeded generic tuples.
inline cplx calibrate_C6(const IParams &p, long long count = 200, std::uint64_t seed = 1) {
  cplx num = 0.0;
  double den = 0.0;
  for (long long i = 0; i < count; ++i) {
    Rng r(seed, static_cast<std::uint64_t>(i));
    double x[6], s = 0.0;
    for (int j = 0; j < 5; ++j) {
      x[j] = r.uniform(-8.0 * p.N, 8.0 * p.N);
      s += x[j];
    }
    x[5] = -s;
    double S = M6_merged_sum(x, p);
    num += S * (M6_literal(x, p) - beta6_raw(x, p));
    den += S * S;
  }
  return num / den;
}

//! -C6 xi1 xi12 + C6' (m2^2 xi2^2 - m1^2 xi1^2) - C6 m1^2 xi1 xi12.
inline cplx M6_principal(const double *x, const IParams &p, cplx C6 = kC6, cplx C6p = kC6prime) {
  double x1 = x[0], x2 = x[1], x12 = x1 + x2;
  double m1 = m_eval(x1, p), m2 = m_eval(x2, p);
  return -C6 * x1 * x12 + C6p * (m2 * m2 * x2 * x2 - m1 * m1 * x1 * x1) -
         C6 * m1 * m1 * x1 * x12;
}

namespace detail {

inline double mstar(const double *x, int n, const IParams &p) {
  double n1 = 0.0;
  for (int j = 0; j < n; ++j)
    n1 = std::max(n1, std::abs(x[j]));
  double m = m_eval(n1, p);
  return m * m;
}

inline bool small3(const std::vector<double> &mg, const IParams &p, const ComparisonPolicy &pol) {
  return pol.gg(p.N, mg[2]);
}

inline bool pair_large(double a, double b, const std::vector<double> &mg, const IParams &p,
                       const ComparisonPolicy &pol) {
  double A = std::abs(a), B = std::abs(b);
  return pol.sim(A, B) && pol.gtr(std::min(A, B), p.N) && small3(mg, p, pol);
}

inline std::optional<double> safe_ratio(double num, double env) {
  if (!(env > 0.0))
    return num == 0.0 ? std::optional<double>(0.0) : std::nullopt;
  return num / env;
}

} // namespace detail

inline const std::vector<BoundSpec> &bound_registry() {
  using detail::mstar;
  using detail::pair_large;
  using detail::safe_ratio;
  using detail::sorted_mags;
  using R = std::optional<double>;
  static const std::vector<BoundSpec> reg{
      {"EM4-0", 4, "generic", "|M4| <~ m(N1*)^2 N1*", false, 200000,
       [](const double *x, const IParams &p, const ComparisonPolicy &) -> R {
         auto mg = sorted_mags(x, 4);
         return safe_ratio(std::abs(M4(x[0], x[1], x[2], x[3], p)), mstar(x, 4, p) * mg[0]);
       }},
      {"EM4-1", 4, "N1~N3>>N3*", "|xi1|~|xi3| >~ N >> |xi3*|: |M4| <~ m1^2 N3*", false, 200000,
       [](const double *x, const IParams &p, const ComparisonPolicy &pol) -> R {
         auto mg = sorted_mags(x, 4);
         if (!pair_large(x[0], x[2], mg, p, pol))
           return std::nullopt;
         return safe_ratio(std::abs(M4(x[0], x[1], x[2], x[3], p)), mstar(x, 4, p) * mg[2]);
       }},
      {"EM4-2", 4, "N1~N2>>N3*",
       "|xi1|~|xi2| >~ N >> |xi3*|: M4 = m1^2 xi1 / 2 + R, |R| <~ N3*", false, 200000,
       [](const double *x, const IParams &p, const ComparisonPolicy &pol) -> R {
         auto mg = sorted_mags(x, 4);
         if (!pair_large(x[0], x[1], mg, p, pol) || std::abs(x[0]) < std::abs(x[1]))
           return std::nullopt;
         double m1 = m_eval(x[0], p);
         double rem = M4(x[0], x[1], x[2], x[3], p) - 0.5 * m1 * m1 * x[0];
         return safe_ratio(std::abs(rem), mg[2]);
       }},
      {"EM6-1", 6, "N3*>~N", "|xi3*| >~ N: |M6| <~ m1^2 N1*^2", false, 20000,
       [](const double *x, const IParams &p, const ComparisonPolicy &pol) -> R {
         auto mg = sorted_mags(x, 6);
         if (!pol.gtr(mg[2], p.N))
           return std::nullopt;
         return safe_ratio(std::abs(M6_fast(x, p)), mstar(x, 6, p) * mg[0] * mg[0]);
       }},
      {"EM6-2", 6, "N3*<<N", "|xi3*| << N: |M6| <~ N1* N3*", false, 20000,
       [](const double *x, const IParams &p, const ComparisonPolicy &pol) -> R {
         auto mg = sorted_mags(x, 6);
         if (!detail::small3(mg, p, pol))
           return std::nullopt;
         return safe_ratio(std::abs(M6_fast(x, p)), mg[0] * mg[2]);
       }},
      {"EM6-1-fur", 6, "xi2*=xi2", "xi2* = xi2: |M6| <~ N1* N3*", false, 20000,
       [](const double *x, const IParams &p, const ComparisonPolicy &) -> R {
         auto mg = sorted_mags(x, 6);
         if (std::abs(x[0]) != mg[0] || std::abs(x[1]) != mg[1])
           return std::nullopt;
         return safe_ratio(std::abs(M6_fast(x, p)), mg[0] * mg[2]);
       }},
      {"EM6-2-fur", 6, "N1~N2>>N3*",
       "|xi1|~|xi2| >~ N >> |xi3*|: M6 - principal part = O(N3*^2)", false, 20000,
       [](const double *x, const IParams &p, const ComparisonPolicy &pol) -> R {
         auto mg = sorted_mags(x, 6);
         if (!pair_large(x[0], x[1], mg, p, pol) || std::abs(x[0]) < std::abs(x[1]))
           return std::nullopt;
         return safe_ratio(std::abs(M6_fast(x, p) - M6_principal(x, p)), mg[2] * mg[2]);
       }},
      {"EM6-3", 6, "offOmega&N3*<<N",
       "|xi3*| << N off Omega: |M6| <~ N1*^(1/2) N3*^(1/2) N4*", true, 20000,
       [](const double *x, const IParams &p, const ComparisonPolicy &pol) -> R {
         auto mg = sorted_mags(x, 6);
         if (!detail::small3(mg, p, pol) || omega_classify_raw(x, p, pol) != Region::outside)
           return std::nullopt;
         return safe_ratio(std::abs(M6_fast(x, p)), std::sqrt(mg[0] * mg[2]) * mg[3]);
       }},
      {"EM8-1", 8, "generic", "|M8| <~ N1*", false, 20000,
       [](const double *x, const IParams &p, const ComparisonPolicy &) -> R {
         auto mg = sorted_mags(x, 8);
         return safe_ratio(std::abs(M8_eval_raw(x, p)), mg[0]);
       }},
      {"EM8-2", 8, "N3*<<N", "|xi3*| << N: |M8| <~ N3*", false, 20000,
       [](const double *x, const IParams &p, const ComparisonPolicy &pol) -> R {
         auto mg = sorted_mags(x, 8);
         if (!detail::small3(mg, p, pol))
           return std::nullopt;
         return safe_ratio(std::abs(M8_eval_raw(x, p)), mg[2]);
       }},
      {"EM8'-1", 8, "generic", "|M8~| <~ N1*", true, 10000,
       [](const double *x, const IParams &p, const ComparisonPolicy &pol) -> R {
         auto mg = sorted_mags(x, 8);
         return safe_ratio(std::abs(M8tilde_raw(x, p, pol)), mg[0]);
       }},
      {"EM8'-2", 8, "N3*<<N", "|xi3*| << N: |M8~| <~ N1*^(1/2) N3*^(1/2)", true, 10000,
       [](const double *x, const IParams &p, const ComparisonPolicy &pol) -> R {
         auto mg = sorted_mags(x, 8);
         if (!detail::small3(mg, p, pol))
           return std::nullopt;
         return safe_ratio(std::abs(M8tilde_raw(x, p, pol)), std::sqrt(mg[0] * mg[2]));
       }},
      {"sigma6-1", 6, "Omega", "in Omega: |sigma6| <~ 1", true, 20000,
       [](const double *x, const IParams &p, const ComparisonPolicy &pol) -> R {
         if (omega_classify_raw(x, p, pol) == Region::outside)
           return std::nullopt;
         return std::abs(sigma6_raw(x, p, pol));
       }},
      {"sigma6-2", 6, "Omega1&N3*<<N", "in Omega1 with |xi3*| << N: |sigma6| <~ N3*/N1*", true,
       20000,
       [](const double *x, const IParams &p, const ComparisonPolicy &pol) -> R {
         auto mg = sorted_mags(x, 6);
         if (omega_classify_raw(x, p, pol) != Region::omega1 || !detail::small3(mg, p, pol))
           return std::nullopt;
         return safe_ratio(std::abs(sigma6_raw(x, p, pol)), mg[2] / mg[0]);
       }},
      {"EM10", 10, "generic", "|M10| <~ 1", true, 10000,
       [](const double *x, const IParams &p, const ComparisonPolicy &pol) -> R {
         return std::abs(M10_raw(x, p, pol));
       }},
      {"alfa-6", 6, "Omega2", "in Omega2: |alpha6| ~ |xi1||xi1+xi2| (two-sided)", true, 50000,
       [](const double *x, const IParams &p, const ComparisonPolicy &pol) -> R {
         if (omega_classify_raw(x, p, pol) != Region::omega2)
           return std::nullopt;
         // xi_1, xi_2: largest odd and even entries
         int i1 = 0, i2 = 1;
         for (int j = 2; j < 6; j += 2)
           if (std::abs(x[j]) > std::abs(x[i1]))
             i1 = j;
         for (int j = 3; j < 6; j += 2)
           if (std::abs(x[j]) > std::abs(x[i2]))
             i2 = j;
         double env = std::abs(x[i1]) * std::abs(x[i1] + x[i2]);
         double a = std::abs(alpha_raw(x, 6));
         if (!(env > 0.0) || !(a > 0.0))
           return std::nullopt;
         return std::max(a / env, env / a);
       }},
      {"L4.9-1", 6, "Omega3", "in Omega3: |alpha6| >~ N1* N3*", true, 50000,
       [](const double *x, const IParams &p, const ComparisonPolicy &pol) -> R {
         if (omega_classify_raw(x, p, pol) != Region::omega3)
           return std::nullopt;
         auto mg = sorted_mags(x, 6);
         double a = std::abs(alpha_raw(x, 6));
         if (!(a > 0.0))
           return std::nullopt;
         return mg[0] * mg[2] / a;
       }},
  };
  return reg;
}

inline const BoundSpec &find_bound(const std::string &id) {
  for (auto &b : bound_registry())
    if (b.id == id)
      return b;
  throw ConfigError("unregistered bound id: " + id);
}

inline std::vector<std::string> all_bound_ids() {
  std::vector<std::string> v;
  for (auto &b : bound_registry())
    v.push_back(b.id);
  v.push_back("MTV");
  v.push_back("DMTV");
  return v;
}

namespace detail {

inline BoundReport summarize(const std::string &id, const std::string &pattern,
                             const std::vector<std::optional<double>> &ratios,
                             const std::function<std::vector<double>(long long)> &regen,
                             const IParams &p, const ComparisonPolicy &pol, std::uint64_t seed) {
  BoundReport rep;
  rep.id = id;
  rep.pattern = pattern;
  rep.N = p.N;
  rep.s = p.s;
  rep.tail = p.tail;
  rep.policy = pol;
  rep.seed = seed;
  rep.samples = static_cast<long long>(ratios.size());
  std::vector<double> vals;
  for (std::size_t i = 0; i < ratios.size(); ++i)
    if (ratios[i]) {
      if (!std::isfinite(*ratios[i]))
        throw Error("bound " + id + ": non-finite ratio at sample " + std::to_string(i));
      vals.push_back(*ratios[i]);
      if (*ratios[i] > rep.max_ratio || rep.argmax_index < 0) {
        rep.max_ratio = *ratios[i];
        rep.argmax_index = static_cast<long long>(i);
      }
    }
  rep.valid = static_cast<long long>(vals.size());
  rep.coverage = rep.samples > 0 ? static_cast<double>(rep.valid) / rep.samples : 0.0;
  if (!vals.empty()) {
    std::sort(vals.begin(), vals.end());
    auto q = [&](double f) {
      std::size_t k = static_cast<std::size_t>(std::floor(f * (vals.size() - 1)));
      return vals[k];
    };
    rep.q50 = q(0.5);
    rep.q90 = q(0.9);
    rep.q99 = q(0.99);
    rep.argmax_tuple = regen(rep.argmax_index);
  }
  return rep;
}

} // namespace detail

//! Samples the bound's hypothesis region and reports |quantity| / envelope.
inline BoundReport verify_bound(const std::string &id, const IParams &p,
                                const ComparisonPolicy &pol = {}, long long count = 0,
                                std::uint64_t seed = 1, const std::string &pattern = "") {
  const BoundSpec &b = find_bound(id);
  p.validate();
  pol.validate();
  SampleProfile prof{b.arity, pattern.empty() ? b.pattern : pattern, p.N,
                     count > 0 ? count : b.default_samples, seed};
  std::vector<std::optional<double>> ratios(prof.count);
  parallel_for(ratios.size(), [&](std::size_t i) {
    auto x = sample_tuple(prof, static_cast<long long>(i), p, pol);
    ratios[i] = b.ratio(x.data(), p, pol);
  });
  return detail::summarize(
      id, prof.pattern, ratios,
      [&](long long i) { return sample_tuple(prof, i, p, pol); }, p, pol, seed);
}

// ---------------------------------------------------------------------------
// Mean value theorems for a(xi) = m(xi)^2 xi^2, controlled by b = a.

enum class MvtKind { single, dbl };

namespace detail {

template <class T = double> T a_fn(T x, const IParams &p) {
  T m = m_value<T>(x, p);
  return m * m * x * x;
}

//! xi, eta, lambda with |eta|, |lambda| <= |xi| / C_gg; `region` selects
//! plateau (all points <= N), tail (all points > N) or generic.
inline std::array<double, 3> mvt_point(const std::string &region, double N,
                                       const ComparisonPolicy &pol, Rng &r) {
  double lo = 1.0, hi = 16.0 * N;
  if (region == "plateau")
    hi = N / (1.0 + 2.0 / pol.C_gg);
  else if (region == "tail")
    lo = N * (1.0 + 2.0 / pol.C_gg) * 1.0000001;
  else if (region != "generic")
    throw ConfigError("verify_mvt: unknown region " + region);
  double xi = sgn(r) * logu(r, lo, hi);
  double e = sgn(r) * logu(r, std::abs(xi) * 1e-6, std::abs(xi) / pol.C_gg);
  double l = sgn(r) * logu(r, std::abs(xi) * 1e-6, std::abs(xi) / pol.C_gg);
  return {xi, e, l};
}

inline bool straddles_kink(std::initializer_list<double> pts, double N) {
  bool below = false, above = false;
  for (double v : pts) {
    if (std::abs(v) < N)
      below = true;
    if (std::abs(v) > N)
      above = true;
  }
  return below && above;
}

} // namespace detail

//! Mean value theorem (single) or double mean value theorem for a = m^2 xi^2.
//! With the power-law tail a is not C^2 at |xi| = N; samples whose points
//! straddle N violate the smoothness hypothesis and are skipped.
inline BoundReport verify_mvt(MvtKind kind, const IParams &p, const ComparisonPolicy &pol = {},
                              long long count = 200000, std::uint64_t seed = 1,
                              const std::string &region = "generic") {
  p.validate();
  pol.validate();
  std::vector<std::optional<double>> ratios(count);
  auto point = [&](long long i) {
    Rng r(seed, static_cast<std::uint64_t>(i));
    return detail::mvt_point(region, p.N, pol, r);
  };
  parallel_for(ratios.size(), [&](std::size_t i) {
    auto [xi, eta, lam] = point(static_cast<long long>(i));
    using detail::a_fn;
    using ld = long double;
    double b = a_fn(xi, p), ax = std::abs(xi);
    if (kind == MvtKind::single) {
      if (p.tail == Tail::power_law && detail::straddles_kink({xi, xi + eta}, p.N))
        return;
      ld d = a_fn<ld>(ld(xi) + eta, p) - a_fn<ld>(xi, p);
      ratios[i] = static_cast<double>(std::abs(d)) / (std::abs(eta) * b / ax);
    } else {
      if (p.tail == Tail::power_law &&
          detail::straddles_kink({xi, xi + eta, xi + lam, xi + eta + lam}, p.N))
        return;
      // points and second difference in extended precision
      ld d = a_fn<ld>(ld(xi) + eta + lam, p) - a_fn<ld>(ld(xi) + eta, p) -
             a_fn<ld>(ld(xi) + lam, p) + a_fn<ld>(xi, p);
      ratios[i] = static_cast<double>(std::abs(d)) / (std::abs(eta) * std::abs(lam) * b / (ax * ax));
    }
  });
  return detail::summarize(
      kind == MvtKind::single ? "MTV" : "DMTV", region, ratios,
      [&](long long i) {
        auto a = point(i);
        return std::vector<double>{a[0], a[1], a[2]};
      },
      p, pol, seed);
}

//! Dispatches registry ids and MTV / DMTV.
inline BoundReport verify_any(const std::string &id, const IParams &p,
                              const ComparisonPolicy &pol = {}, long long count = 0,
                              std::uint64_t seed = 1, const std::string &pattern = "") {
  if (id == "MTV" || id == "DMTV")
    return verify_mvt(id == "MTV" ? MvtKind::single : MvtKind::dbl, p, pol,
                      count > 0 ? count : 200000, seed, pattern.empty() ? "generic" : pattern);
  return verify_bound(id, p, pol, count, seed, pattern);
}

// ---------------------------------------------------------------------------
// Reports

inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string bound_csv_header() {
  return "id,pattern,N,s,tail,C_sim,C_gg,C_gtr,seed,samples,valid,coverage,max_ratio,q50,q90,"
         "q99,argmax_index,argmax_tuple";
}

inline std::string bound_csv_row(const BoundReport &r) {
  std::ostringstream os;
  os << r.id << ',' << r.pattern << ',' << fmt_g17(r.N) << ',' << fmt_g17(r.s) << ','
     << tail_name(r.tail) << ',' << fmt_g17(r.policy.C_sim) << ',' << fmt_g17(r.policy.C_gg)
     << ',' << fmt_g17(r.policy.C_gtr) << ',' << r.seed << ',' << r.samples << ',' << r.valid
     << ',' << fmt_g17(r.coverage) << ',' << fmt_g17(r.max_ratio) << ',' << fmt_g17(r.q50)
     << ',' << fmt_g17(r.q90) << ',' << fmt_g17(r.q99) << ',' << r.argmax_index << ',';
  for (std::size_t i = 0; i < r.argmax_tuple.size(); ++i)
    os << (i ? " " : "") << fmt_g17(r.argmax_tuple[i]);
  return os.str();
}

inline nlohmann::json bound_json(const BoundReport &r) {
  return {{"id", r.id},
          {"pattern", r.pattern},
          {"N", r.N},
          {"s", r.s},
          {"tail", tail_name(r.tail)},
          {"policy", {{"C_sim", r.policy.C_sim}, {"C_gg", r.policy.C_gg}, {"C_gtr", r.policy.C_gtr}}},
          {"seed", r.seed},
          {"samples", r.samples},
          {"valid", r.valid},
          {"coverage", r.coverage},
          {"max_ratio", r.max_ratio},
          {"quantiles", {{"q50", r.q50}, {"q90", r.q90}, {"q99", r.q99}}},
          {"argmax_index", r.argmax_index},
          {"argmax_tuple", r.argmax_tuple}};
}

//! Fixture file name for a parameter pair, e.g. "bounds_s0.5_power_law.json".
inline std::string bound_fixture_name(double s, Tail t) {
  std::ostringstream os;
  os << "bounds_s" << s << '_' << tail_name(t) << ".json";
  return os.str();
}

} // namespace dnls
