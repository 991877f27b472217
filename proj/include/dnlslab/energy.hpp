#pragma once
#include <cmath>
#include <string>
#include <vector>

#include "functionals.hpp"
#include "lambda.hpp"
#include "solver.hpp"

namespace dnls {

struct EnergyOptions {
  int K4 = 0;          // truncation of the quartic sum (0: full grid band)
  int K6 = kTruncL6;   // truncation of Lambda_6(sigma6)
  double budget = kLambdaBudget;
};

struct EnergyValue {
  double value = 0.0;  // real part of the modified energy
  double imag = 0.0;   // imaginary residual
  double quadratic = 0.0;
  cplx quartic = 0.0;
  cplx sextic = 0.0;
  long long leaks = 0;
};

//! |d/dx Iw|^2 = Lambda_2(-xi_1 xi_2 m_1 m_2), summed directly.
inline double quadratic_part(const Field &w, const IParams &p) {
  Field s = to_spectral(w);
  CompensatedSum<double> acc;
  for (int j = 0; j < s.size(); ++j) {
    double xi = s.grid().xi_slot(j), m = m_eval(xi, p);
    acc.add(xi * xi * m * m * std::norm(s[j]));
  }
  return acc.value();
}

//! E^1 = E(Iw), E^2 = |(Iw)_x|^2 + Lambda_4(M4)/2, E^3 = E^2 + Lambda_6(sigma6).
//! Frequencies are physical, so p.N is in physical units.
inline EnergyValue modified_energy(int order, const Field &w, const IParams &p,
                                   const ComparisonPolicy &pol = {}, const EnergyOptions &opt = {}) {
  if (order < 1 || order > 3)
    throw ContractViolation("modified_energy: order must be 1, 2 or 3");
  p.validate();
  Field s = to_spectral(w);
  EnergyValue out;
  if (order == 1) {
    out.value = energy_E(apply_I(s, p));
    out.quadratic = quadratic_part(s, p);
    out.quartic = out.value - out.quadratic;
    return out;
  }
  out.quadratic = quadratic_part(s, p);
  out.quartic = 0.5 * Lambda_eval(M4_multiplier(p), s, opt.K4, opt.budget);
  cplx total = out.quadratic + out.quartic;
  if (order == 3) {
    long long before = sigma6_leak_count();
    out.sextic = Lambda_eval(sigma6_cached(p, pol, s.grid().dxi()), s, opt.K6, opt.budget);
    out.leaks = sigma6_leak_count() - before;
    total += out.sextic;
  }
  out.value = total.real();
  out.imag = total.imag();
  return out;
}

//! Lambda-form of E^1 for cross-checking the physical evaluation.
inline cplx E1_lambda(const Field &w, const IParams &p, int K_trunc = 0) {
  return Lambda_eval(M2_energy(p), w, K_trunc) + Lambda_eval(M4_E1(p), w, K_trunc);
}

struct ResidualTerm {
  std::string name;
  cplx value;
};

struct ResidualOptions {
  int K_trunc = 0;     // multiplier side (0: 16, 12, 8 for orders 1, 2, 3)
  int K_fd = 0;        // truncation used for the energies in the difference quotient
  double budget = kLambdaBudget;
};

struct ResidualReport {
  int order = 0;
  double t = 0.0, dt = 0.0;
  double fd = 0.0;             // centered difference of E^order
  cplx side = 0.0;             // multiplier side
  std::vector<ResidualTerm> terms;
  double residual = 0.0;       // |fd - Re side|
  double scale = 0.0;          // max(|fd|, sum |terms|)
  double normalized = 0.0;     // residual / scale
  int K_trunc = 0;
  int band = 0;                // highest retained |k| on the multiplier side
  long long leaks = 0;
};

inline int default_residual_trunc(int order) { return order == 1 ? 16 : order == 2 ? 12 : 8; }

//! Kernels of d/dt E^order as (name, multiplier) pairs.
inline std::vector<std::pair<std::string, Multiplier>>
derivative_kernels(int order, const IParams &p, const ComparisonPolicy &pol) {
  std::vector<std::pair<std::string, Multiplier>> k;
  if (order == 1) {
    auto e2 = derivative_expansion(M2_energy(p));
    auto e4 = derivative_expansion(M4_E1(p));
    k.emplace_back("L2(A2 alpha2)", e2.same);
    k.emplace_back("L4(X^2 A2)", e2.plus2);
    k.emplace_back("L4(A4 alpha4)", e4.same);
    k.emplace_back("L6(X^4 A2)", e2.plus4);
    k.emplace_back("L6(X^2 A4)", e4.plus2);
    k.emplace_back("L8(X^4 A4)", e4.plus4);
  } else if (order == 2) {
    k.emplace_back("L6(M6)", M6_kernel_multiplier(p));
    k.emplace_back("L8(M8)", M8_kernel_multiplier(p));
  } else {
    k.emplace_back("L6(M6 chi_off)", M6_off_omega_kernel(p, pol));
    k.emplace_back("L8(M8)", M8_kernel_multiplier(p));
    k.emplace_back("L8(M8~)", M8tilde_multiplier(p, pol));
    k.emplace_back("L10(M10)", M10_multiplier(p, pol));
  }
  return k;
}

//! Compares the centered difference of E^order along the trajectory at
//! sample `index` with the multiplier side evaluated at that sample.
inline ResidualReport derivative_residual(int order, const Trajectory &traj, std::size_t index,
                                          const IParams &p, const ComparisonPolicy &pol = {},
                                          const ResidualOptions &opt = {}) {
  if (order < 1 || order > 3)
    throw ContractViolation("derivative_residual: order must be 1, 2 or 3");
  if (traj.equation.kind != EquationKind::gauged)
    throw ContractViolation("derivative_residual: trajectory must solve the gauged equation");
  if (index == 0 || index + 1 >= traj.fields.size())
    throw ContractViolation("derivative_residual: index must be an interior sample");
  ResidualReport r;
  r.order = order;
  r.t = traj.times[index];
  double tm = traj.times[index - 1], tp = traj.times[index + 1];
  r.dt = 0.5 * (tp - tm);
  if (std::abs((tp - r.t) - (r.t - tm)) > 1e-9 * r.dt)
    throw ContractViolation("derivative_residual: samples around index must be equally spaced");
  r.K_trunc = opt.K_trunc > 0 ? opt.K_trunc : default_residual_trunc(order);
  r.band = truncation_band(traj.fields[index].grid(), r.K_trunc);

  EnergyOptions eo;
  eo.K4 = opt.K_fd;
  eo.K6 = opt.K_fd;
  eo.budget = opt.budget;
  long long before = sigma6_leak_count();
  double ep = modified_energy(order, traj.fields[index + 1], p, pol, eo).value;
  double em = modified_energy(order, traj.fields[index - 1], p, pol, eo).value;
  r.fd = (ep - em) / (tp - tm);

  double mag = 0.0;
  for (auto &[name, M] : derivative_kernels(order, p, pol)) {
    cplx v = Lambda_eval(M, traj.fields[index], r.K_trunc, opt.budget);
    r.terms.push_back({name, v});
    r.side += v;
    mag += std::abs(v);
  }
  r.leaks = sigma6_leak_count() - before;
  r.residual = std::abs(r.fd - r.side.real());
  r.scale = std::max(std::abs(r.fd), mag);
  r.normalized = r.scale > 0.0 ? r.residual / r.scale : r.residual;
  return r;
}

//! Samples at -dt, 0, dt around w0 (one integrating-factor step each way).
inline Trajectory centered_trajectory(const Equation &eq, const Field &w0, double dt,
                                      bool dealias_on = true) {
  Stepper st(eq, dealias_on);
  Field c = dealias_on ? dealias(to_spectral(w0)) : to_spectral(w0);
  Trajectory tr{eq, {-dt, 0.0, dt}, {st.step(c, -dt), c, st.step(c, dt)}, {}};
  for (std::size_t i = 0; i < 3; ++i)
    tr.ledger.push_back(ledger_entry(eq, tr.fields[i], tr.times[i], false));
  return tr;
}

} // namespace dnls
