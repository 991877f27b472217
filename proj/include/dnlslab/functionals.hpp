#pragma once
#include <cmath>

#include "spectral.hpp"

namespace dnls {

namespace detail {

//! Samples of f and f_x on a 2K grid. For fields in the 2/3 band every
//! integrand below is a trigonometric polynomial of degree < 2K, so the
//! trapezoid on this grid is exact.
struct PaddedPair {
  std::vector<cplx> f, fx;
  double dx;
};

inline PaddedPair padded_pair(const Field &f) {
  int Kp = 2 * f.grid().K();
  Field s = to_spectral(f);
  return {padded_samples(s, Kp), padded_samples(derivative(s), Kp), f.grid().L() / Kp};
}

} // namespace detail

//! M(f) = int |f|^2.
inline double mass(const Field &f) {
  Field s = to_spectral(f);
  CompensatedSum<double> acc;
  for (auto c : s.values())
    acc.add(std::norm(c));
  return acc.value();
}

//! H(u) = int |u_x|^2 + (3/2) Im |u|^2 u conj(u_x) + (1/2) |u|^6.
inline double hamiltonian(const Field &u) {
  auto p = detail::padded_pair(u);
  CompensatedSum<double> acc;
  for (std::size_t j = 0; j < p.f.size(); ++j) {
    double r = std::norm(p.f[j]);
    acc.add(std::norm(p.fx[j]) + 1.5 * r * std::imag(p.f[j] * std::conj(p.fx[j])) +
            0.5 * r * r * r);
  }
  return acc.value() * p.dx;
}

//! E(f) = int |f_x|^2 - (1/2) Im int |f|^2 f conj(f_x).
inline double energy_E(const Field &f) {
  auto p = detail::padded_pair(f);
  CompensatedSum<double> acc;
  for (std::size_t j = 0; j < p.f.size(); ++j) {
    double r = std::norm(p.f[j]);
    acc.add(std::norm(p.fx[j]) - 0.5 * r * std::imag(p.f[j] * std::conj(p.fx[j])));
  }
  return acc.value() * p.dx;
}

//! int |f|^6 (exact on the 2/3 band).
inline double sextic(const Field &f) {
  auto p = detail::padded_pair(f);
  CompensatedSum<double> acc;
  for (auto c : p.f) {
    double r = std::norm(c);
    acc.add(r * r * r);
  }
  return acc.value() * p.dx;
}

} // namespace dnls
