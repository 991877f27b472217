#include <catch_amalgamated.hpp>

#include <filesystem>

#include <dnlslab/persist.hpp>
#include <dnlslab/solver.hpp>

#include "support.hpp"

using namespace dnls;
using namespace dnls::test;

namespace {

SimConfig gaussian_config(double L, int K, double mass, double dt, double T) {
  SimConfig c;
  c.grid = Grid(L, K);
  c.dt = dt;
  c.T = T;
  c.initial.kind = DataKind::gaussian;
  c.initial.params.mass = mass;
  c.sample_every = 200;
  return c;
}

double rel_l2(const Field &a, const Field &b) {
  Field pa = to_physical(a), pb = to_physical(b);
  Field d(pa.grid(), Rep::physical);
  for (int j = 0; j < pa.size(); ++j)
    d[j] = pa[j] - pb[j];
  return l2_norm(d) / l2_norm(pb);
}

} // namespace

TEST_CASE("rhs of plane waves is a phase rotation", "[solver]") {
  Grid g(2.0 * kPi, 64);
  const cplx A = std::polar(0.7, 0.3);
  for (auto eq : {Equation::dnls(1.0), Equation::dnls(-0.5), Equation::gauged()})
    for (int k : {-3, 0, 2, 5}) {
      Field f = plane_wave(g, k, A);
      Field r = to_physical(rhs_eval(eq, f));
      double w = k * k - (eq.kind == EquationKind::dnls ? eq.lambda * std::norm(A) * k
                                                         : std::norm(A) * k + 0.5 * std::pow(std::norm(A), 2));
      CHECK(w == Catch::Approx(plane_wave_omega(eq, k, std::abs(A))).epsilon(1e-14));
      double err = 0.0;
      for (int j = 0; j < g.K(); ++j)
        err = std::max(err, std::abs(r[j] - cplx(0.0, -w) * f[j]));
      CHECK(err < 1e-12 * std::max(1.0, std::abs(w)));
    }
  Field z(g, Rep::spectral);
  CHECK(lebesgue_norm(rhs_eval(Equation::gauged(), z), INFINITY) == 0.0);
  CHECK(lebesgue_norm(rhs_eval(Equation::dnls(), z), INFINITY) == 0.0);
}

TEST_CASE("plane wave evolution matches the exact solution", "[solver]") {
  Grid g(2.0 * kPi, 256);
  const double A = 0.6;
  const int k = 3;
  SimConfig c;
  c.grid = g;
  c.dt = 1e-4;
  c.T = 1.0;
  c.initial_field = plane_wave(g, k, A);
  c.sample_every = 10000;
  c.cross_ledger = false;
  Trajectory tr = evolve(c);
  Field exact = plane_wave(g, k, std::polar(A, -plane_wave_omega(c.equation, k, A) * 1.0));
  CHECK(tr.times.back() == Catch::Approx(1.0));
  CHECK(lebesgue_norm(to_physical(tr.fields.back()), INFINITY) > 0.0);
  double err = 0.0;
  Field w = to_physical(tr.fields.back());
  for (int j = 0; j < g.K(); ++j)
    err = std::max(err, std::abs(w[j] - exact[j]));
  CHECK(err < 1e-9);
}

TEST_CASE("conserved functionals of a plane wave", "[solver]") {
  Grid g(2.0 * kPi, 64);
  for (double A : {0.3, 1.1})
    for (int k : {-2, 1, 4}) {
      Field f = to_spectral(plane_wave(g, k, A));
      double xi = g.xi(k), L = g.L();
      CHECK(rel(mass(f), A * A * L) < 1e-12);
      CHECK(rel(energy_E(f), L * (A * A * xi * xi + 0.5 * xi * std::pow(A, 4))) < 1e-12);
      CHECK(rel(hamiltonian(f), L * (A * A * xi * xi - 1.5 * xi * std::pow(A, 4) + 0.5 * std::pow(A, 6))) <
            1e-12);
    }
}

TEST_CASE("ledger is conserved along a gauged trajectory", "[solver][property]") {
  Trajectory tr = evolve(gaussian_config(32.0, 256, 0.5 * kSmallMass, 1e-4, 0.2));
  const auto &e0 = tr.ledger.front();
  for (std::size_t i = 1; i < tr.times.size(); ++i) {
    CHECK(tr.times[i] > tr.times[i - 1]);
    const auto &e = tr.ledger[i];
    CHECK(std::isfinite(e.mass));
    CHECK(std::isfinite(e.hamiltonian));
    CHECK(std::abs(e.mass - e0.mass) <= 1e-10 * e0.mass);
    CHECK(std::abs(e.energy_E - e0.energy_E) <= 1e-8 * std::abs(e0.energy_E));
    CHECK(std::abs(e.hamiltonian - e0.hamiltonian) <= 1e-8 * std::abs(e0.hamiltonian));
  }
}

TEST_CASE("integrator is fourth order", "[solver]") {
  Grid g(32.0, 64);
  TestDataParams tp;
  tp.mass = 0.8 * kSmallMass;
  tp.carrier = 1.0;
  Field w0 = dealias(to_spectral(make_test_data(g, DataKind::gaussian, tp, 0)));
  const double T = 0.4;
  std::vector<Field> sol;
  for (int n : {20, 40, 80, 160})
    sol.push_back(advance(Equation::gauged(), w0, T / n, n));
  double e1 = rel_l2(sol[0], sol[3]), e2 = rel_l2(sol[1], sol[3]), e3 = rel_l2(sol[2], sol[3]);
  // Richardson: successive differences shrink by 2^4
  double r1 = rel_l2(sol[0], sol[1]) / rel_l2(sol[1], sol[2]);
  double r2 = rel_l2(sol[1], sol[2]) / rel_l2(sol[2], sol[3]);
  CHECK(e1 > e2);
  CHECK(e2 > e3);
  CHECK(r1 > 12.0);
  CHECK(r1 < 20.0);
  CHECK(r2 > 12.0);
  CHECK(r2 < 20.0);
}

TEST_CASE("time reversal returns the initial data", "[solver][property]") {
  Grid g(32.0, 128);
  TestDataParams tp;
  tp.mass = 0.7 * kSmallMass;
  Field w0 = dealias(to_spectral(make_test_data(g, DataKind::gaussian, tp, 0)));
  for (auto eq : {Equation::gauged(), Equation::dnls(1.0)}) {
    Field w1 = advance(eq, w0, 1e-3, 200);
    Field back = advance(eq, w1, -1e-3, 200);
    CHECK(rel_l2(back, w0) < 1e-7);
  }
}

TEST_CASE("evolution is deterministic", "[solver]") {
  auto c = gaussian_config(16.0, 64, 1.0, 1e-3, 0.1);
  c.sample_every = 10;
  Trajectory a = evolve(c), b = evolve(c);
  REQUIRE(a.fields.size() == b.fields.size());
  for (std::size_t i = 0; i < a.fields.size(); ++i)
    CHECK(a.fields[i].values() == b.fields[i].values());
}

TEST_CASE("configuration contracts", "[solver]") {
  auto c = gaussian_config(16.0, 64, 1.0, 1e-3, 0.1);
  auto bad = c;
  bad.dt = 0.0;
  CHECK_THROWS_AS(evolve(bad), ConfigError);
  bad = c;
  bad.T = -1.0;
  CHECK_THROWS_AS(evolve(bad), ConfigError);
  bad = c;
  bad.dt = 10.0;
  CHECK_THROWS_AS(evolve(bad), ConfigError);
  bad = c;
  bad.initial.params.strict = false;
  bad.initial.params.mass = 1.01 * kSmallMass;
  CHECK_THROWS_AS(evolve(bad), ConstraintError);
  bad.equation = Equation::dnls(1.0);
  CHECK_NOTHROW(evolve(bad));
}

TEST_CASE("rescaling", "[solver]") {
  Grid g(64.0, 512);
  Field f = gaussian(g, 1.0, 0.8, 0.0, 1.0);
  double m = l2_norm(f), d = l2_norm(derivative(f));
  for (double mu : {0.5, 2.0, 3.0}) {
    Field r = rescale(f, mu);
    CHECK(rel(l2_norm(r), m) < 1e-10);
    CHECK(rel(l2_norm(derivative(r)), d / mu) < 1e-8);
  }
  CHECK(rescale(f, 1.0).values() == f.values());
  CHECK_THROWS_AS(rescale(f, 20.0), DomainError);
  CHECK_THROWS_AS(rescale(f, 0.0), DomainError);
}

TEST_CASE("trajectory persistence roundtrip", "[solver][io]") {
  auto c = gaussian_config(16.0, 64, 1.0, 1e-3, 0.05);
  c.sample_every = 10;
  Trajectory tr = evolve(c);
  auto dir = std::filesystem::temp_directory_path() / "dnlslab_test_traj";
  std::filesystem::remove_all(dir);
  save_trajectory(tr, dir, {{"note", "test"}});
  for (auto &e : std::filesystem::directory_iterator(dir.parent_path()))
    CHECK(e.path().filename().string().find(".tmp.") == std::string::npos);
  std::string ledger = read_file((dir / "ledger.csv").string());
  CHECK(ledger.substr(0, ledger.find('\n') + 1) == read_file(DNLSLAB_GOLDEN_DIR "/ledger_header.csv"));
  Trajectory back = load_trajectory(dir);
  CHECK(back.times == tr.times);
  REQUIRE(back.fields.size() == tr.fields.size());
  for (std::size_t i = 0; i < tr.fields.size(); ++i) {
    CHECK(back.fields[i].values() == tr.fields[i].values());
    CHECK(back.ledger[i].mass == tr.ledger[i].mass);
    CHECK(back.ledger[i].energy_E == tr.ledger[i].energy_E);
  }
  std::filesystem::remove_all(dir);
}
