#pragma once
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "functionals.hpp"
#include "gauge.hpp"
#include "spectral.hpp"

namespace dnls {

enum class EquationKind { dnls, gauged };

//! i u_t + u_xx = i lambda (|u|^2 u)_x, or the gauged form
//! i w_t + w_xx = -i w^2 conj(w)_x - (1/2)|w|^4 w.
struct Equation {
  EquationKind kind = EquationKind::gauged;
  double lambda = 1.0;

  static Equation dnls(double lambda = 1.0) { return {EquationKind::dnls, lambda}; }
  static Equation gauged() { return {EquationKind::gauged, 1.0}; }
  std::string name() const { return kind == EquationKind::dnls ? "dnls" : "gauged"; }
};

//! Spectral nonlinear term of the equation, i.e. d/dt f minus the linear part
//! -i xi^2 f_hat. With dealiasing the products are formed on a 2K grid and
//! the result restricted to the 2/3 band; without it, on the K grid.
inline Field nonlinear_term(const Equation &eq, const Field &f, bool dealias_on = true) {
  Field s = to_spectral(f);
  const Grid &g = s.grid();
  const int Kp = dealias_on ? 2 * g.K() : g.K();
  auto u = padded_samples(s, Kp);
  std::vector<cplx> prod(Kp);
  if (eq.kind == EquationKind::dnls) {
    for (int j = 0; j < Kp; ++j)
      prod[j] = std::norm(u[j]) * u[j];
    Field p = from_padded(g, std::move(prod));
    for (int j = 0; j < g.K(); ++j)
      p[j] *= cplx(0.0, eq.lambda * g.xi_slot(j));
    zero_nyquist(p);
    return dealias_on ? dealias(p) : p;
  }
  auto ux = padded_samples(derivative(s), Kp);
  for (int j = 0; j < Kp; ++j) {
    double r = std::norm(u[j]);
    prod[j] = -u[j] * u[j] * std::conj(ux[j]) + cplx(0.0, 0.5) * r * r * u[j];
  }
  Field p = from_padded(g, std::move(prod));
  return dealias_on ? dealias(p) : p;
}

//! Full right-hand side d/dt f (spectral, or physical if f is physical).
inline Field rhs_eval(const Equation &eq, const Field &f, bool dealias_on = true) {
  Field s = to_spectral(f);
  Field n = nonlinear_term(eq, s, dealias_on);
  const Grid &g = s.grid();
  Field lin = dealias_on ? dealias(s) : s;
  for (int j = 0; j < g.K(); ++j) {
    double xi = g.xi_slot(j);
    n[j] += cplx(0.0, -xi * xi) * lin[j];
  }
  return as_rep(n, f.rep());
}

//! Integrating-factor RK4 in spectral space; the linear propagator
//! exp(-i xi^2 h) is applied exactly. Steps may be negative.
class Stepper {
public:
  Stepper(Equation eq, bool dealias_on = true) : eq_(eq), dealias_(dealias_on) {}

  Field step(const Field &w, double h) const {
    Field s = to_spectral(w);
    const Grid &g = s.grid();
    const int K = g.K();
    std::vector<cplx> e1(K), e2(K);
    for (int j = 0; j < K; ++j) {
      double xi = g.xi_slot(j);
      e1[j] = std::polar(1.0, -xi * xi * h);
      e2[j] = std::polar(1.0, -0.5 * xi * xi * h);
    }
    auto N = [&](const Field &x) { return nonlinear_term(eq_, x, dealias_); };
    Field k1 = N(s);
    Field t(g, Rep::spectral);
    for (int j = 0; j < K; ++j)
      t[j] = e2[j] * (s[j] + 0.5 * h * k1[j]);
    Field k2 = N(t);
    for (int j = 0; j < K; ++j)
      t[j] = e2[j] * s[j] + 0.5 * h * k2[j];
    Field k3 = N(t);
    for (int j = 0; j < K; ++j)
      t[j] = e1[j] * s[j] + h * e2[j] * k3[j];
    Field k4 = N(t);
    Field out(g, Rep::spectral);
    for (int j = 0; j < K; ++j)
      out[j] = e1[j] * s[j] +
               (h / 6.0) * (e1[j] * k1[j] + 2.0 * e2[j] * (k2[j] + k3[j]) + k4[j]);
    if (dealias_)
      out = dealias(out);
    else
      zero_nyquist(out);
    return out;
  }

  const Equation &equation() const { return eq_; }
  bool dealias_on() const { return dealias_; }

private:
  Equation eq_;
  bool dealias_;
};

struct InitialData {
  DataKind kind = DataKind::gaussian;
  TestDataParams params{};
  std::uint64_t seed = 0;
};

struct SimConfig {
  Equation equation = Equation::gauged();
  Grid grid{64.0, 512};
  double dt = 1e-4;
  double T = 1.0;
  InitialData initial{};
  std::optional<Field> initial_field; // overrides `initial` when set
  bool dealias_on = true;
  std::uint64_t seed = 0;
  int sample_every = 100;       // steps between recorded samples
  bool cross_ledger = true;     // compute H for gauged runs (via G^{-1}) and E for DNLS runs (via G)
  double dt_guard = 50.0;       // dt <= dt_guard * dx^2

  void validate() const {
    if (!(dt > 0.0))
      throw ConfigError("SimConfig: dt must be positive");
    if (!(T > 0.0))
      throw ConfigError("SimConfig: T must be positive");
    if (sample_every < 1)
      throw ConfigError("SimConfig: sample_every must be >= 1");
    if (dt > dt_guard * grid.dx() * grid.dx())
      throw ConfigError("SimConfig: dt exceeds the step-size guard dt <= C dx^2");
  }
};

struct LedgerEntry {
  double t, mass, hamiltonian, energy_E;
};

struct Trajectory {
  Equation equation;
  std::vector<double> times;
  std::vector<Field> fields; // spectral
  std::vector<LedgerEntry> ledger;
};

inline LedgerEntry ledger_entry(const Equation &eq, const Field &f, double t, bool cross) {
  LedgerEntry e{t, mass(f), 0.0, 0.0};
  if (eq.kind == EquationKind::gauged) {
    e.energy_E = energy_E(f);
    e.hamiltonian = cross ? hamiltonian(dealias(to_spectral(gauge_inverse(f)))) : e.energy_E;
  } else {
    e.hamiltonian = hamiltonian(f);
    e.energy_E = cross ? energy_E(dealias(to_spectral(gauge_forward(f)))) : e.hamiltonian;
  }
  return e;
}

inline Field initial_field(const SimConfig &cfg) {
  Field f = cfg.initial_field ? *cfg.initial_field
                              : make_test_data(cfg.grid, cfg.initial.kind, cfg.initial.params,
                                               cfg.initial.seed);
  if (f.grid() != cfg.grid)
    throw ConfigError("SimConfig: initial field grid differs from the configured grid");
  if (cfg.equation.kind == EquationKind::gauged && l2_norm(f) >= kSmallMass)
    throw ConstraintError("SimConfig: gauged run requires |w0|_2 < sqrt(2 pi)");
  Field s = to_spectral(f);
  return cfg.dealias_on ? dealias(s) : s;
}

inline double max_modulus(const Field &f) { return lebesgue_norm(f, INFINITY); }

//! Integrates from t = 0 to T, recording a sample every `sample_every` steps
//! and at T.
inline Trajectory evolve(const SimConfig &cfg) {
  cfg.validate();
  Stepper stepper(cfg.equation, cfg.dealias_on);
  Field w = initial_field(cfg);
  const long long n = std::max(1LL, std::llround(cfg.T / cfg.dt));
  const double h = cfg.T / static_cast<double>(n);
  const double amp0 = std::max(max_modulus(w), 1e-300);
  Trajectory tr{cfg.equation, {}, {}, {}};
  auto record = [&](double t) {
    tr.times.push_back(t);
    tr.fields.push_back(w);
    tr.ledger.push_back(ledger_entry(cfg.equation, w, t, cfg.cross_ledger));
  };
  record(0.0);
  double t_valid = 0.0;
  for (long long i = 1; i <= n; ++i) {
    Field next = stepper.step(w, h);
    bool bad = false;
    for (auto c : next.values())
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
        bad = true;
        break;
      }
    if (bad || max_modulus(next) > kTol.blowup_factor * amp0)
      throw BlowUpError("evolve: blow-up detected after t = " + std::to_string(t_valid),
                        t_valid);
    w = std::move(next);
    t_valid = i * h;
    if (i % cfg.sample_every == 0 || i == n)
      record(t_valid);
  }
  return tr;
}

//! Evolves f by `steps` steps of size h (h may be negative).
inline Field advance(const Equation &eq, const Field &f, double h, long long steps,
                     bool dealias_on = true) {
  Stepper st(eq, dealias_on);
  Field w = to_spectral(f);
  for (long long i = 0; i < steps; ++i)
    w = st.step(w, h);
  return w;
}

//! Value of the trigonometric interpolant of f at an arbitrary point.
inline cplx eval_at(const Field &f, double x) {
  Field s = to_spectral(f);
  const Grid &g = s.grid();
  CompensatedSum<cplx> acc;
  for (int j = 0; j < g.K(); ++j)
    if (s[j] != 0.0)
      acc.add(s[j] * std::polar(1.0, g.xi_slot(j) * x));
  return acc.value() / std::sqrt(g.L());
}

//! w_mu(x) = mu^{-1/2} w(x/mu).
inline Field rescale(const Field &f, double mu) {
  if (!(mu > 0.0))
    throw DomainError("rescale: mu must be positive");
  Field p = to_physical(f);
  const Grid &g = p.grid();
  if (mu == 1.0)
    return f;
  if (mu > 1.0) {
    // mass of f outside |x| < L/(2 mu) would leave the box
    double inside = 0.5 * g.L() / mu * (1.0 - kTol.boundary_strip);
    double out = 0.0, total = 0.0;
    for (int j = 0; j < g.K(); ++j) {
      double m = std::norm(p[j]);
      total += m;
      if (std::abs(g.x(j)) > inside)
        out += m;
    }
    if (total > 0.0 && out / total > kTol.boundary_mass)
      throw DomainError("rescale: rescaled support does not fit in the box");
  }
  Field s = to_spectral(p);
  Field r(g, Rep::physical);
  const double c = 1.0 / std::sqrt(mu);
  std::vector<std::pair<double, cplx>> modes;
  for (int j = 0; j < g.K(); ++j)
    if (s[j] != 0.0)
      modes.emplace_back(g.xi_slot(j), s[j]);
  const double isl = 1.0 / std::sqrt(g.L());
  for (int j = 0; j < g.K(); ++j) {
    double x = g.x(j) / mu;
    if (std::abs(x) > 0.5 * g.L())
      continue; // outside the original box the data are taken to vanish
    cplx acc = 0.0;
    for (auto &[xi, a] : modes)
      acc += a * std::polar(1.0, xi * x);
    r[j] = c * isl * acc;
  }
  return as_rep(r, f.rep());
}

//! Exact plane-wave solution A e^{i(k x - omega t)} frequency.
inline double plane_wave_omega(const Equation &eq, double k, double A) {
  if (eq.kind == EquationKind::dnls)
    return k * k - eq.lambda * A * A * k;
  return k * k - A * A * k - 0.5 * std::pow(A, 4);
}

} // namespace dnls
