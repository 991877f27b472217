#pragma once
#include <cmath>
#include <string>

#include "config.hpp"
#include "log.hpp"
#include "spectral.hpp"

namespace dnls {

//! Fraction of the L2 mass lying in the outer strips of the box.
inline double boundary_mass_fraction(const Field &f, double strip = kTol.boundary_strip) {
  Field h = to_physical(f);
  const Grid &g = h.grid();
  int w = std::max(1, static_cast<int>(std::floor(strip * g.K())));
  double edge = 0.0, total = 0.0;
  for (int j = 0; j < g.K(); ++j) {
    double m = std::norm(h[j]);
    total += m;
    if (j < w || j >= g.K() - w)
      edge += m;
  }
  return total > 0.0 ? edge / total : 0.0;
}

//! Phi(x_j) = int_{x_0}^{x_j} |f|^2 dy at the grid points, x_0 = -L/2.
//! |f|^2 is formed on a 2K grid (alias free for the interpolant of f) and
//! integrated exactly in Fourier space.
inline std::vector<double> mass_antiderivative(const Field &f) {
  const Grid &g = f.grid();
  const int Kp = 2 * g.K();
  Grid gp(g.L(), Kp);
  auto u = padded_samples(f, Kp);
  std::vector<cplx> rho(Kp);
  for (int j = 0; j < Kp; ++j)
    rho[j] = std::norm(u[j]);
  Field rh = to_spectral(Field(gp, std::move(rho), Rep::physical));
  cplx mean = rh[0];
  for (int j = 0; j < Kp; ++j) {
    double xi = gp.xi_slot(j);
    rh[j] = (j == 0 || j == Kp / 2) ? cplx(0.0) : rh[j] / cplx(0.0, xi);
  }
  Field G = to_physical(rh);
  const double isl = 1.0 / std::sqrt(g.L());
  std::vector<double> phi(g.K());
  for (int j = 0; j < g.K(); ++j) {
    double x = gp.x(2 * j);
    phi[j] = (isl * mean * (x - gp.x(0)) + G[2 * j] - G[0]).real();
  }
  return phi;
}

//! f -> exp(-i c Phi) f.
inline Field gauge_twist(const Field &f, double c) {
  Field h = to_physical(f);
  if (boundary_mass_fraction(h) > kTol.boundary_mass)
    warn("gauge: field mass near the box boundary exceeds threshold; the base point "
         "at the left endpoint no longer stands in for -infinity");
  auto phi = mass_antiderivative(h);
  for (int j = 0; j < h.size(); ++j)
    h[j] *= std::polar(1.0, -c * phi[j]);
  return h;
}

//! The gauge map f -> exp(-i int_{-inf}^x |f|^2) f (base point: left box edge).
inline Field gauge_forward(const Field &f) { return gauge_twist(f, 1.0); }

//! Inverse map; |G f| = |f| so the same antiderivative undoes the twist.
inline Field gauge_inverse(const Field &f) { return gauge_twist(f, -1.0); }

//! Coefficient c making H(u) = |v_x|^2 - |v|_6^6/16 an identity for
//! v = exp(-i c int |u|^2) u.
inline constexpr double kVariantGauge = 0.75;

inline Field gauge_variant(const Field &u, double c = kVariantGauge) { return gauge_twist(u, c); }

} // namespace dnls
