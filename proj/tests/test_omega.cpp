#include <catch_amalgamated.hpp>

#include <dnlslab/bounds.hpp>
#include <dnlslab/omega.hpp>

#include "support.hpp"

using namespace dnls;
using namespace dnls::test;

namespace {

std::vector<double> closed(Rng &r, int n, double lo, double hi) {
  std::vector<double> x(n);
  double s = 0.0;
  for (int j = 0; j < n - 1; ++j) {
    x[j] = r.uniform(lo, hi);
    s += x[j];
  }
  x[n - 1] = -s;
  return x;
}

double sorted_magnitude(const std::vector<double> &x, int k) {
  std::vector<double> m;
  for (double v : x)
    m.push_back(std::abs(v));
  std::sort(m.begin(), m.end(), std::greater<>());
  return m[k];
}

} // namespace

TEST_CASE("comparison policy contracts", "[omega]") {
  ComparisonPolicy pol;
  CHECK_NOTHROW(pol.validate());
  CHECK(pol.sim(3.0, 5.0));
  CHECK_FALSE(pol.sim(3.0, 7.0));
  CHECK_FALSE(pol.sim(0.0, 0.0));
  CHECK(pol.gg(80.0, 10.0));
  CHECK_FALSE(pol.gg(79.0, 10.0));
  CHECK(pol.gtr(32.0, 64.0));
  CHECK_FALSE(pol.gtr(31.0, 64.0));
  for (auto bad : {ComparisonPolicy{1.0, 8.0, 0.5}, ComparisonPolicy{2.0, 2.0, 0.5},
                   ComparisonPolicy{2.0, 8.0, 0.0}, ComparisonPolicy{2.0, 8.0, 1.5}})
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("Omega classification examples", "[omega]") {
  IParams p{64.0, 0.5, Tail::power_law};
  CHECK(omega_classify(FrequencyTuple({256, 4, -256, 2, -4, -2}), p) == Region::omega1);
  CHECK(omega_classify(FrequencyTuple({300, -480, 176, 2, 1, 1}), p) == Region::omega3);
  CHECK_THROWS_AS(omega_classify(FrequencyTuple({1, -1}), p), ContractViolation);
  CHECK(region_name(Region::omega2) == "Omega2");
}

TEST_CASE("small tuples lie outside Omega", "[omega][property]") {
  IParams p{64.0, 0.5, Tail::power_law};
  ComparisonPolicy pol;
  Rng r(3);
  const double lim = 0.5 * p.N * pol.C_gtr / 3.0;
  for (int i = 0; i < 5000; ++i) {
    auto x = closed(r, 6, -lim, lim);
    REQUIRE(*std::max_element(x.begin(), x.end()) < p.N * pol.C_gtr);
    CHECK(omega_classify_raw(x.data(), p, pol) == Region::outside);
    CHECK(sigma6_raw(x.data(), p, pol) == cplx(0.0));
  }
}

TEST_CASE("classification ignores the order within odd and even slots", "[omega][property]") {
  IParams p{64.0, 0.5, Tail::power_law};
  ComparisonPolicy pol;
  for (const char *pat : {"Omega1", "Omega2", "Omega3"}) {
    SampleProfile prof{6, pat, p.N, 300, 5};
    for (long long i = 0; i < prof.count; ++i) {
      auto x = sample_tuple(prof, i, p, pol);
      Region c = omega_classify_raw(x.data(), p, pol);
      CHECK(region_name(c) == std::string(pat));
      auto y = x;
      std::swap(y[0], y[4]);
      std::swap(y[1], y[3]);
      CHECK(omega_classify_raw(y.data(), p, pol) == c);
    }
  }
}

TEST_CASE("sigma6 solves sigma6 alpha6 + M6 = 0 on Omega", "[omega][oracle]") {
  IParams p{64.0, 0.5, Tail::power_law};
  ComparisonPolicy pol;
  reset_sigma6_leaks();
  SampleProfile prof{6, "Omega", p.N, 2000, 9};
  for (long long i = 0; i < prof.count; ++i) {
    auto x = sample_tuple(prof, i, p, pol);
    cplx s = sigma6_raw(x.data(), p, pol);
    cplx m6 = M6_fast(x.data(), p);
    CHECK(std::abs(s * alpha_raw(x.data(), 6) + m6) <= 1e-12 * std::abs(m6));
    // the merged form agrees with the 144-term sum at the scale of its terms
    double n1 = sorted_magnitude(x, 0);
    CHECK(std::abs(m6 - M6_literal(x.data(), p)) <= 1e-12 * n1 * n1);
  }
  // the default policy keeps Omega away from the resonant set
  CHECK(sigma6_leak_count() == 0);
}

TEST_CASE("sigma6 vanishes off Omega", "[omega]") {
  IParams p{64.0, 0.5, Tail::power_law};
  ComparisonPolicy pol;
  SampleProfile prof{6, "offOmega&N3*<<N", p.N, 500, 13};
  for (long long i = 0; i < prof.count; ++i) {
    auto x = sample_tuple(prof, i, p, pol);
    CHECK(sigma6_raw(x.data(), p, pol) == cplx(0.0));
  }
}

TEST_CASE("resonance guard clamps and counts", "[omega]") {
  // a loose but valid policy admits this exactly resonant Omega_3 tuple
  IParams p{16.0, 0.5, Tail::power_law};
  ComparisonPolicy pol{1.9, 2.0, 0.5};
  std::vector<double> x{-40.0, -32.0, 16.0, 8.0, 16.0, 32.0};
  REQUIRE(omega_classify_raw(x.data(), p, pol) == Region::omega3);
  REQUIRE(alpha_raw(x.data(), 6) == cplx(0.0));
  reset_sigma6_leaks();
  CHECK(sigma6_raw(x.data(), p, pol) == cplx(0.0));
  CHECK(sigma6_raw(x.data(), p, pol) == cplx(0.0));
  CHECK(sigma6_leak_count() == 2);
  reset_sigma6_leaks();
  CHECK(sigma6_leak_count() == 0);
}

TEST_CASE("M8 tilde and M10 vanish for small frequencies", "[omega]") {
  IParams p{64.0, 0.5, Tail::power_law};
  ComparisonPolicy pol;
  Rng r(19);
  const double lim = p.N * pol.C_gtr / pol.C_gg;
  for (int i = 0; i < 2000; ++i) {
    auto x8 = closed(r, 8, -lim / 8.0, lim / 8.0);
    CHECK(M8tilde_eval(FrequencyTuple(x8), p, pol) == cplx(0.0));
    auto x10 = closed(r, 10, -lim / 10.0, lim / 10.0);
    CHECK(M10_eval(FrequencyTuple(x10), p, pol) == cplx(0.0));
  }
  CHECK_THROWS_AS(M10_eval(FrequencyTuple({1, -1}), p, pol), ContractViolation);
  CHECK_THROWS_AS(M8tilde_eval(FrequencyTuple({1, -1}), p, pol), ContractViolation);
}

TEST_CASE("M8 tilde and M10 match their definitions through X_shift", "[omega][oracle]") {
  IParams p{16.0, 0.5, Tail::power_law};
  ComparisonPolicy pol;
  Multiplier sig = sigma6_multiplier(p, pol);
  Multiplier tilde_oracle{8, [&](const double *x) {
                            cplx s = 0.0;
                            for (int j = 1; j <= 6; ++j)
                              s += X_shift(j, 2, sig)(x) * x[j];
                            return cplx(0.0, -1.0) * s;
                          }};
  Multiplier ten_oracle{10, [&](const double *x) {
                          cplx s = 0.0;
                          for (int j = 1; j <= 6; ++j)
                            s += (j % 2 == 1 ? 1.0 : -1.0) * X_shift(j, 4, sig)(x);
                          return cplx(0.0, 0.5) * s;
                        }};
  Rng r(23);
  int nonzero = 0;
  for (int i = 0; i < 3000; ++i) {
    auto x8 = closed(r, 8, -60.0, 60.0);
    cplx a = M8tilde_raw(x8.data(), p, pol), b = tilde_oracle(x8.data());
    CHECK(a == b);
    auto x10 = closed(r, 10, -60.0, 60.0);
    cplx c = M10_raw(x10.data(), p, pol), d = ten_oracle(x10.data());
    CHECK(c == d);
    nonzero += (a != cplx(0.0)) + (c != cplx(0.0));
  }
  CHECK(nonzero > 0);
}
