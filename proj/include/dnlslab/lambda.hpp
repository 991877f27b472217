#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "multipliers.hpp"
#include "omega.hpp"
#include "parallel.hpp"

namespace dnls {

//! Highest |k| retained by a truncation to K_trunc modes (symmetric band);
//! K_trunc <= 0 keeps every mode of the grid except the Nyquist one.
inline int truncation_band(const Grid &g, int K_trunc) {
  int full = g.K() / 2 - 1;
  return K_trunc > 0 ? std::min(full, (K_trunc - 1) / 2) : full;
}

namespace detail {

struct SlotData {
  std::vector<int> k;      // retained frequency indices with nonzero coefficient
  std::vector<cplx> c;     // matching coefficients
  std::vector<cplx> dense; // indexed by k + band
  int kmin = 0, kmax = 0;
};

inline SlotData slot_data(const Field &s, int band, bool conj_reflect) {
  SlotData d;
  d.dense.assign(2 * band + 1, 0.0);
  for (int k = -band; k <= band; ++k) {
    cplx v = conj_reflect ? std::conj(s.coef(-k)) : s.coef(k);
    d.dense[k + band] = v;
    if (v != 0.0) {
      d.k.push_back(k);
      d.c.push_back(v);
    }
  }
  if (!d.k.empty()) {
    d.kmin = d.k.front();
    d.kmax = d.k.back();
  }
  return d;
}

} // namespace detail

//! Number of multiplier evaluations Lambda_n would perform before pruning
//! by the hyperplane constraint.
inline double lambda_cost(int n, const Field &w, int K_trunc) {
  Field s = to_spectral(w);
  int band = truncation_band(s.grid(), K_trunc);
  auto odd = detail::slot_data(s, band, false), even = detail::slot_data(s, band, true);
  double c = 1.0;
  for (int j = 0; j < n - 1; ++j)
    c *= static_cast<double>(j % 2 == 0 ? odd.k.size() : even.k.size());
  return c;
}

//! Lambda_n(M; w) restricted to modes |k| <= truncation_band(K_trunc):
//! L^{1-n/2} sum over grid tuples on Gamma_n of
//! M(xi) w_hat(xi_1) conj(w_hat(-xi_2)) ... conj(w_hat(-xi_n)).
//! Zero coefficients are skipped. The sum is split into fixed chunks over
//! the first two slots, each accumulated with compensation and combined
//! pairwise, so the result does not depend on the number of workers.
inline cplx Lambda_eval(const Multiplier &M, const Field &w, int K_trunc = 0,
                        double budget = kLambdaBudget) {
  const int n = M.arity;
  if (n < 2 || n % 2 != 0 || n > kMaxArity)
    throw ContractViolation("Lambda_eval: arity must be even, 2..16");
  Field s = to_spectral(w);
  const Grid &g = s.grid();
  const int band = truncation_band(g, K_trunc);
  const double cost = lambda_cost(n, s, K_trunc);
  if (cost > budget) {
    std::ostringstream os;
    os << "Lambda_" << n << ": " << cost << " multiplier evaluations exceed the budget "
       << budget << "; lower K_trunc (advised: 32 for n=6, 16 for n=8, 8 for n=10)";
    throw BudgetExceeded(os.str());
  }
  const auto odd = detail::slot_data(s, band, false);
  const auto even = detail::slot_data(s, band, true);
  const double weight = std::pow(g.L(), 1.0 - n / 2.0);
  const double dxi = g.dxi();
  if (odd.k.empty() || even.k.empty())
    return 0.0;

  // achievable sums of the slots d..n-1 (zero-based), for pruning
  std::vector<int> lo(n + 1, 0), hi(n + 1, 0);
  for (int d = n - 1; d >= 0; --d) {
    const auto &sd = d % 2 == 0 ? odd : even;
    lo[d] = lo[d + 1] + sd.kmin;
    hi[d] = hi[d + 1] + sd.kmax;
  }

  auto chunk = [&](std::size_t idx) -> cplx {
    const std::size_t i0 = idx / even.k.size(), i1 = idx % even.k.size();
    std::array<double, kMaxArity> xi{};
    std::array<int, kMaxArity> ks{};
    CompensatedSum<cplx> acc;
    ks[0] = odd.k[i0];
    ks[1] = even.k[i1];
    xi[0] = ks[0] * dxi;
    xi[1] = ks[1] * dxi;
    const cplx c01 = odd.c[i0] * even.c[i1];
    if (n == 2) {
      if (ks[0] + ks[1] == 0)
        acc.add(M(xi.data()) * c01);
      return acc.value();
    }
    auto rec = [&](auto &&self, int d, int partial, cplx coef) -> void {
      if (-partial < lo[d] || -partial > hi[d])
        return;
      if (d == n - 1) {
        int k = -partial;
        cplx c = even.dense[k + band];
        if (c == 0.0)
          return;
        xi[d] = k * dxi;
        acc.add(M(xi.data()) * (coef * c));
        return;
      }
      const auto &sd = d % 2 == 0 ? odd : even;
      for (std::size_t i = 0; i < sd.k.size(); ++i) {
        xi[d] = sd.k[i] * dxi;
        self(self, d + 1, partial + sd.k[i], coef * sd.c[i]);
      }
    };
    rec(rec, 2, ks[0] + ks[1], c01);
    return acc.value();
  };
  const std::size_t nchunks = odd.k.size() * even.k.size();
  return weight * parallel_chunk_sum<cplx>(nchunks, chunk);
}

//! Wraps a multiplier that is invariant under odd-slot and even-slot
//! permutations with a cache keyed by the sorted grid indices. Frequencies
//! must be integer multiples of `unit`; arity at most 6, |k| < 512.
class SymmetricCache {
public:
  SymmetricCache(Multiplier M, double unit) : M_(std::move(M)), unit_(unit) {
    if (M_.arity > 6)
      throw ContractViolation("SymmetricCache: arity above 6");
  }

  cplx operator()(const double *xi) {
    const int n = M_.arity;
    std::array<int, 3> o{}, e{};
    for (int j = 0; j < n / 2; ++j) {
      o[j] = static_cast<int>(std::lround(xi[2 * j] / unit_));
      e[j] = static_cast<int>(std::lround(xi[2 * j + 1] / unit_));
    }
    std::sort(o.begin(), o.begin() + n / 2);
    std::sort(e.begin(), e.begin() + n / 2);
    std::uint64_t key = 0;
    for (int j = 0; j < n / 2; ++j) {
      if (std::abs(o[j]) >= 512 || std::abs(e[j]) >= 512)
        return M_(xi);
      key = (key << 10) | static_cast<std::uint64_t>(o[j] + 512);
      key = (key << 10) | static_cast<std::uint64_t>(e[j] + 512);
    }
    auto &sh = shards_[key % kShards];
    {
      std::lock_guard lk(sh.mu);
      auto it = sh.map.find(key);
      if (it != sh.map.end())
        return it->second;
    }
    // evaluate at the sorted tuple so the stored value does not depend on
    // which ordering reached the cache first
    std::array<double, 6> c{};
    for (int j = 0; j < n / 2; ++j) {
      c[2 * j] = o[j] * unit_;
      c[2 * j + 1] = e[j] * unit_;
    }
    cplx v = M_(c.data());
    std::lock_guard lk(sh.mu);
    sh.map.emplace(key, v);
    return v;
  }

  std::size_t size() const {
    std::size_t s = 0;
    for (auto &sh : shards_)
      s += sh.map.size();
    return s;
  }

private:
  static constexpr std::size_t kShards = 64;
  struct Shard {
    std::mutex mu;
    std::unordered_map<std::uint64_t, cplx> map;
  };
  Multiplier M_;
  double unit_;
  std::array<Shard, kShards> shards_;
};

//! sigma6 with the Omega test done first and the expensive branch cached.
inline Multiplier sigma6_cached(const IParams &p, const ComparisonPolicy &pol, double unit) {
  auto cache = std::make_shared<SymmetricCache>(sigma6_multiplier(p, pol), unit);
  return {6, [p, pol, cache](const double *x) -> cplx {
            if (omega_classify_raw(x, p, pol) == Region::outside)
              return 0.0;
            return (*cache)(x);
          }};
}

} // namespace dnls
