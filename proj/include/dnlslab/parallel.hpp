#pragma once
#include <algorithm>
#include <atomic>
#include <complex>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace dnls {

namespace detail {
inline std::atomic<int> &worker_override() {
  static std::atomic<int> w{0};
  return w;
}
} // namespace detail

//! Number of worker threads: explicit override, then DNLS_WORKERS, then the
//! hardware count.
inline int worker_count() {
  int w = detail::worker_override().load();
  if (w > 0)
    return w;
  if (const char *env = std::getenv("DNLS_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0)
      return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline void set_worker_count(int w) { detail::worker_override().store(w); }

//! Runs body(i) for i in [0, n) on the worker pool. Work assignment is
//! dynamic; callers must write results to slot i only.
template <class F> void parallel_for(std::size_t n, F &&body) {
  int workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n)
        return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t)
    pool.emplace_back(run);
  run();
  for (auto &t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

//! Pairwise (cascade) summation; the tree shape depends only on the length.
template <class T> T pairwise_sum(std::span<const T> v) {
  if (v.empty())
    return T{};
  if (v.size() <= 8) {
    T s = v[0];
    for (std::size_t i = 1; i < v.size(); ++i)
      s += v[i];
    return s;
  }
  std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

template <class T> T pairwise_sum(const std::vector<T> &v) {
  return pairwise_sum(std::span<const T>(v.data(), v.size()));
}

//! Sum of chunk results computed in parallel; bit-identical for any worker
//! count because chunking and the reduction tree are fixed by n_chunks.
template <class T, class F> T parallel_chunk_sum(std::size_t n_chunks, F &&chunk) {
  std::vector<T> parts(n_chunks);
  parallel_for(n_chunks, [&](std::size_t i) { parts[i] = chunk(i); });
  return pairwise_sum(parts);
}

//! Neumaier compensated accumulator.
template <class T> class CompensatedSum {
public:
  void add(T x) {
    T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

private:
  T sum_{};
  T comp_{};
};

template <class T> class CompensatedSum<std::complex<T>> {
public:
  void add(std::complex<T> x) {
    re_.add(x.real());
    im_.add(x.imag());
  }
  std::complex<T> value() const { return {re_.value(), im_.value()}; }

private:
  CompensatedSum<T> re_, im_;
};

} // namespace dnls
