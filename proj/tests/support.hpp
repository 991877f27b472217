#pragma once
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <dnlslab/random.hpp>
#include <dnlslab/spectral.hpp>

namespace dnls::test {

inline double rel(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

inline double max_diff(const Field &a, const Field &b) {
  double m = 0.0;
  for (int j = 0; j < a.size(); ++j)
    m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

//! Gaussian exp(-(x-c)^2 / (2 w^2)) e^{i q x} sampled on g.
inline Field gaussian(const Grid &g, double width = 1.0, double amp = 1.0, double center = 0.0,
                      double carrier = 0.0) {
  Field f(g, Rep::physical);
  for (int j = 0; j < g.K(); ++j) {
    double y = (g.x(j) - center) / width;
    f[j] = amp * std::exp(-0.5 * y * y) * std::polar(1.0, carrier * g.x(j));
  }
  return f;
}

//! A e^{i xi_k x} sampled on g.
inline Field plane_wave(const Grid &g, int k, cplx A = 1.0) {
  Field f(g, Rep::physical);
  for (int j = 0; j < g.K(); ++j)
    f[j] = A * std::polar(1.0, g.xi(k) * g.x(j));
  return f;
}

//! Physical samples with iid complex Gaussian entries.
inline Field random_field(const Grid &g, std::uint64_t seed) {
  Rng r(seed);
  Field f(g, Rep::physical);
  for (auto &v : f.values())
    v = cplx(r.normal(), r.normal());
  return f;
}

//! Random smooth band-limited field supported in |k| <= band.
inline Field random_band(const Grid &g, int band, double scale, std::uint64_t seed) {
  Rng r(seed);
  Field f(g, Rep::spectral);
  for (int k = -band; k <= band; ++k)
    f.set_coef(k, scale * cplx(r.normal(), r.normal()) / (1.0 + k * k));
  return f;
}

} // namespace dnls::test
