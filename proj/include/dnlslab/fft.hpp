#pragma once
#include <complex>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include <fftw3.h>

namespace dnls {

using cplx = std::complex<double>;

namespace detail {

//! FFTW plans keyed by shape and sign. The planner is not thread-safe, so
//! creation is serialized; execution uses the new-array interface, which is.
class PlanCache {
public:
  static PlanCache &instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n0, int n1, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(n0, n1, sign);
    auto it = plans_.find(key);
    if (it != plans_.end())
      return it->second;
    std::size_t total = static_cast<std::size_t>(n0) * (n1 > 0 ? n1 : 1);
    std::vector<cplx> a(total), b(total);
    auto *in = reinterpret_cast<fftw_complex *>(a.data());
    auto *out = reinterpret_cast<fftw_complex *>(b.data());
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = n1 > 0 ? fftw_plan_dft_2d(n0, n1, in, out, sign, flags)
                         : fftw_plan_dft_1d(n0, in, out, sign, flags);
    plans_.emplace(key, p);
    return p;
  }

private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

} // namespace detail

//! Unnormalized DFT, out[j] = sum_n in[n] exp(sign * 2 pi i j n / K).
inline std::vector<cplx> dft(const std::vector<cplx> &in, int sign) {
  int n = static_cast<int>(in.size());
  std::vector<cplx> out(in.size());
  fftw_plan p = detail::PlanCache::instance().get(n, 0, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex *>(const_cast<cplx *>(in.data())),
                   reinterpret_cast<fftw_complex *>(out.data()));
  return out;
}

//! Unnormalized 2-D DFT on a row-major n0 x n1 array.
inline std::vector<cplx> dft2(const std::vector<cplx> &in, int n0, int n1, int sign) {
  std::vector<cplx> out(in.size());
  fftw_plan p = detail::PlanCache::instance().get(n0, n1, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex *>(const_cast<cplx *>(in.data())),
                   reinterpret_cast<fftw_complex *>(out.data()));
  return out;
}

} // namespace dnls
