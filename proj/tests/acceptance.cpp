//! Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>

#include <dnlslab/bounds.hpp>
#include <dnlslab/bourgain.hpp>
#include <dnlslab/experiments.hpp>
#include <dnlslab/fixtures.hpp>
#include <dnlslab/gauge.hpp>
#include <dnlslab/omega.hpp>
#include <dnlslab/parallel.hpp>

using namespace dnls;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

//! n-1 uniform entries in [-a, a] closed by the last; resampled until it also lies in [-a, a].
std::vector<double> closed_within(Rng &r, int n, double a) {
  std::vector<double> x(n);
  for (;;) {
    double s = 0.0;
    for (int j = 0; j < n - 1; ++j) {
      x[j] = r.uniform(-a, a);
      s += x[j];
    }
    x[n - 1] = -s;
    if (std::abs(s) <= a)
      return x;
  }
}

double max_abs(const std::vector<double> &x) {
  double m = 0.0;
  for (double v : x)
    m = std::max(m, std::abs(v));
  return m;
}

Outcome collapse() {
  Rng r(101);
  IParams p{64.0, 0.5, Tail::power_law};
  double worst4 = 0.0;
  for (int i = 0; i < 100000; ++i) {
    auto x = closed_within(r, 4, p.N);
    double d = std::abs(M4_eval(FrequencyTuple(x), p) - 0.5 * (x[0] + x[2]));
    worst4 = std::max(worst4, d / max_abs(x));
  }
  IParams q{512.0, 0.5, Tail::power_law};
  double worst6 = 0.0, worst8 = 0.0;
  for (int i = 0; i < 10000; ++i) {
    auto x = closed_within(r, 6, q.N / 8);
    double m = max_abs(x);
    worst6 = std::max(worst6, std::abs(M6_eval(FrequencyTuple(x), q)) / (m * m));
    auto y = closed_within(r, 8, q.N / 8);
    worst8 = std::max(worst8, std::abs(M8_eval(FrequencyTuple(y), q)) / max_abs(y));
  }
  return {worst4 <= 1e-12 && worst6 <= 1e-10 && worst8 <= 1e-10,
          "M4 " + fmt("%.2e", worst4) + ", M6 " + fmt("%.2e", worst6) + ", M8 " + fmt("%.2e", worst8)};
}

Outcome sigma6_identity() {
  IParams p{64.0, 0.5, Tail::power_law};
  ComparisonPolicy pol;
  reset_sigma6_leaks();
  SampleProfile on{6, "Omega", p.N, 100000, 7};
  auto xs = sample_tuples(on, p, pol);
  double worst = 0.0;
  for (auto &x : xs) {
    cplx m6 = M6_fast(x.data(), p);
    worst = std::max(worst, std::abs(sigma6_raw(x.data(), p, pol) * alpha_raw(x.data(), 6) + m6) / std::abs(m6));
  }
  long long nonzero_off = 0;
  SampleProfile off{6, "offOmega&N3*<<N", p.N, 20000, 8};
  for (auto &x : sample_tuples(off, p, pol))
    nonzero_off += sigma6_raw(x.data(), p, pol) != cplx(0.0);
  Rng r(9);
  for (int i = 0; i < 20000; ++i) {
    auto x = closed_within(r, 6, 10.0);
    nonzero_off += sigma6_raw(x.data(), p, pol) != cplx(0.0);
  }
  long long leaks = sigma6_leak_count();
  return {worst <= 1e-12 && nonzero_off == 0 && leaks == 0,
          "max rel " + fmt("%.2e", worst) + " on Omega, " + std::to_string(nonzero_off) +
              " nonzero off Omega, " + std::to_string(leaks) + " leaks"};
}

Outcome factorization() {
  Rng r(202);
  long long bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    double x1 = r.integer(-100000, 100000), x2 = r.integer(-100000, 100000), x4 = r.integer(-100000, 100000);
    double x[4] = {x1, x2, -x1 - x2 - x4, x4};
    double lhs = std::abs(alpha_raw(x, 4)), rhs = 2.0 * std::abs((x1 + x2) * (x1 + x4));
    double d = std::abs(lhs - rhs) / std::max(rhs, 1.0);
    worst = std::max(worst, d);
    bad += d > 1e-12;
  }
  return {bad == 0, "max rel " + fmt("%.2e", worst) + " on 1e6 grid tuples"};
}

Outcome conservation() {
  SimConfig c;
  c.initial.kind = DataKind::gaussian;
  c.initial.params.mass = 0.9 * kSmallMass;
  c.dt = 1e-4;
  c.T = 1.0;
  c.grid = Grid(32.0, 512);
  Trajectory tr = evolve(c);
  const auto &a = tr.ledger.front();
  double dm = 0.0, de = 0.0, dh = 0.0;
  for (auto &e : tr.ledger) {
    dm = std::max(dm, std::abs(e.mass - a.mass) / a.mass);
    de = std::max(de, std::abs(e.energy_E - a.energy_E) / std::abs(a.energy_E));
    dh = std::max(dh, std::abs(e.hamiltonian - a.hamiltonian) / std::abs(a.hamiltonian));
  }
  return {dm <= 1e-10 && de <= 1e-8 && dh <= 1e-8 && tr.times.back() >= 1.0 - 1e-12,
          "mass " + fmt("%.2e", dm) + ", E " + fmt("%.2e", de) + ", H " + fmt("%.2e", dh)};
}

Outcome plane_wave() {
  Grid g(2.0 * kPi, 256);
  double worst = 0.0;
  for (auto [k, A] : {std::pair{3, 0.6}, std::pair{-2, 0.9}, std::pair{5, 0.3}}) {
    SimConfig c;
    c.grid = g;
    c.dt = 1e-4;
    c.T = 1.0;
    c.cross_ledger = false;
    c.sample_every = 10000;
    Field f(g, Rep::spectral);
    f.set_coef(k, A * std::sqrt(g.L()));
    c.initial_field = f;
    Field w = to_physical(evolve(c).fields.back());
    double om = k * k - A * A * k - 0.5 * std::pow(A, 4);
    for (int j = 0; j < g.K(); ++j)
      worst = std::max(worst, std::abs(w[j] - std::polar(A, k * g.x(j) - om)));
  }
  return {worst <= 1e-9, "max error " + fmt("%.2e", worst) + " at t = 1"};
}

Outcome gauge_equivalence() {
  Grid g(32.0, 1024);
  TestDataParams tp;
  tp.mass = 0.6 * kSmallMass;
  Field u0 = dealias(to_spectral(make_test_data(g, DataKind::gaussian, tp, 0)));
  Field w0 = dealias(to_spectral(gauge_forward(u0)));
  const double dt = 5e-5;
  const long long n = 10000;
  Field u = advance(Equation::dnls(1.0), u0, dt, n);
  Field w = advance(Equation::gauged(), w0, dt, n);
  Field Gu = to_physical(gauge_forward(u)), wp = to_physical(w);
  Field d(g, Rep::physical);
  for (int j = 0; j < g.K(); ++j)
    d[j] = Gu[j] - wp[j];
  double e = l2_norm(d);
  return {e <= 1e-6, "L2 distance " + fmt("%.2e", e) + " at t = 0.5"};
}

Outcome identities() {
  ExperimentConfig cfg;
  auto r = run_identity_suite(cfg, {}, false);
  bool ok = r.gate_passed && r.order2 && r.order2->normalized <= 1e-4 && r.order3 && r.order3->leaks == 0;
  std::string d = "order-1 observed order " + fmt("%.3f", r.min_observed_order);
  if (r.order2)
    d += ", order-2 normalized " + fmt("%.2e", r.order2->normalized);
  if (r.order3)
    d += ", order-3 normalized " + fmt("%.2e", r.order3->normalized) + " with " +
         std::to_string(r.order3->leaks) + " leaks";
  return {ok, d};
}

Outcome band_limited() {
  Grid g(2.0 * kPi, 64);
  IParams p{64.0, 0.5, Tail::power_law};
  EnergyOptions eo;
  eo.K6 = 17;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng r(seed);
    Field w(g, Rep::spectral);
    for (int k = -8; k <= 8; ++k)
      w.set_coef(k, 0.4 * cplx(r.normal(), r.normal()) / (1.0 + k * k));
    double e1 = modified_energy(1, w, p, {}, eo).value;
    for (int order : {2, 3}) {
      double e = modified_energy(order, w, p, {}, eo).value;
      worst = std::max(worst, std::abs(e - e1) / std::abs(e1));
    }
  }
  return {worst <= 1e-10, "max rel " + fmt("%.2e", worst) + " on data in [-N/8, N/8]"};
}

Outcome bound_suite() {
  int failures = 0, checked = 0;
  double worst = 0.0;
  std::string first;
  for (const char *name : {"bounds_s0.5_power_law.json", "bounds_s0.5_smooth_blend.json"}) {
    auto fx = nlohmann::json::parse(read_file(std::string(DNLSLAB_FIXTURE_DIR "/") + name));
    IParams p{64.0, fx["s"].get<double>(), parse_tail(fx["tail"].get<std::string>())};
    auto seed = fx["seed"].get<std::uint64_t>();
    for (auto &id : all_bound_ids()) {
      IParams p2 = p;
      p2.N = 128.0;
      auto a = verify_any(id, p, {}, 0, seed), b = verify_any(id, p2, {}, 0, seed);
      worst = std::max(worst, b.max_ratio / a.max_ratio);
      bool ok = b.max_ratio <= 2.0 * a.max_ratio;
      for (auto *r : {&a, &b}) {
        auto c = check_bound_fixture(fx, *r);
        ok = ok && c.present && c.pass;
        if (!(c.present && c.pass) && first.empty())
          first = c.message;
      }
      ++checked;
      if (!ok) {
        ++failures;
        if (first.empty())
          first = id + ": doubling";
      }
    }
  }
  return {failures == 0, std::to_string(checked) + " bound runs, max ratio(128)/ratio(64) " + fmt("%.3f", worst) +
                             (failures ? ", first failure: " + first : std::string())};
}

Outcome scaling() {
  ExperimentConfig cfg;
  auto r = run_scaling_study(cfg, false);
  std::ostringstream d;
  d << "dE1 nonincreasing " << (r.E1_nonincreasing ? "yes" : "no") << ", slope(dE3) " << fmt("%.3f", r.fit_E3.slope)
    << " [" << fmt("%.3f", r.fit_E3.lo) << ", " << fmt("%.3f", r.fit_E3.hi) << "], target "
    << fmt("%.1f", r.target_slope_E3);
  return {r.E1_nonincreasing && r.E3_slope_ok, d.str()};
}

Outcome determinism() {
  int mismatches = 0;
  auto twice = [&](const std::function<std::string()> &run) {
    set_worker_count(1);
    std::string a = run();
    set_worker_count(4);
    std::string b = run();
    set_worker_count(0);
    mismatches += a != b;
  };
  IParams p{64.0, 0.5, Tail::power_law};
  for (const char *id : {"EM4-0", "EM6-2", "sigma6-1", "DMTV"})
    twice([&] { return bound_csv_row(verify_any(id, p, {}, 5000, 3)); });
  auto dir = fs::temp_directory_path() / "dnlslab_acceptance";
  ExperimentConfig cfg;
  cfg.out_dir = dir.string();
  twice([&] {
    run_identity_suite(cfg, {}, true);
    return read_file((dir / "identities.csv").string());
  });
  ExperimentConfig en = cfg;
  en.sim.grid = Grid(2.0 * kPi, 64);
  en.sim.dt = 1e-3;
  en.sim.T = 0.02;
  en.sim.sample_every = 10;
  en.sim.cross_ledger = false;
  en.N_list = {4, 8};
  twice([&] {
    run_energy_series(en, true);
    return read_file((dir / "energies_N4.csv").string()) + read_file((dir / "energies_N8.csv").string());
  });
  Lattice lat{Grid(2.0 * kPi, 32), 1.0, 64, Window::bump};
  twice([&] { return fmt_g17(estimate_ratio("BI-plus-pm", "packet", lat, 8, 2).max_ratio); });
  fs::remove_all(dir);
  return {mismatches == 0, std::to_string(mismatches) + " mismatches across 8 report pairs (1 vs 4 workers)"};
}

} // namespace

int main() {
  struct Criterion {
    const char *name;
    Outcome (*run)();
  };
  const Criterion all[] = {
      {"multiplier collapse", collapse},
      {"sigma6 identity", sigma6_identity},
      {"Gamma_4 factorization", factorization},
      {"solver conservation", conservation},
      {"plane-wave regression", plane_wave},
      {"gauge equivalence", gauge_equivalence},
      {"derivative identities", identities},
      {"band-limited energy collapse", band_limited},
      {"bound suite", bound_suite},
      {"almost-conservation scaling", scaling},
      {"determinism", determinism},
  };
  int failed = 0, i = 0;
  for (auto &c : all) {
    ++i;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("criterion %2d %-30s %s  %s (%.1fs)\n", i, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", i - failed, i);
  return failed ? 1 : 0;
}
