#include <catch_amalgamated.hpp>

#include <dnlslab/field_io.hpp>
#include <dnlslab/spectral.hpp>

#include "support.hpp"

using namespace dnls;
using namespace dnls::test;

TEST_CASE("transform of a constant concentrates at zero frequency", "[spectral]") {
  Grid g(64.0, 128);
  cplx c(0.3, -1.2);
  Field f(g, std::vector<cplx>(g.K(), c), Rep::physical);
  Field s = transform(f, Direction::to_spectral);
  CHECK(s.rep() == Rep::spectral);
  CHECK(std::abs(s.coef(0) - c * std::sqrt(g.L())) < 1e-12);
  for (int k = 1; k < g.K() / 2; ++k) {
    CHECK(std::abs(s.coef(k)) < 1e-12);
    CHECK(std::abs(s.coef(-k)) < 1e-12);
  }
}

TEST_CASE("on-grid plane wave has a single coefficient", "[spectral]") {
  Grid g(10.0, 64);
  for (int k : {-7, 0, 3, 20}) {
    Field s = to_spectral(plane_wave(g, k));
    for (int q = -g.K() / 2; q < g.K() / 2; ++q) {
      cplx expect = q == k ? cplx(std::sqrt(g.L())) : cplx(0.0);
      CHECK(std::abs(s.coef(q) - expect) < 1e-12);
    }
  }
}

TEST_CASE("transform rejects the wrong representation", "[spectral]") {
  Grid g(1.0, 8);
  Field f(g, Rep::spectral);
  CHECK_THROWS_AS(transform(f, Direction::to_spectral), ContractViolation);
  CHECK_THROWS_AS(transform(to_physical(f), Direction::to_physical), ContractViolation);
}

TEST_CASE("roundtrip and unitarity on 100 random fields", "[spectral][property]") {
  Grid g(7.5, 256);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Field f = random_field(g, seed);
    Field s = to_spectral(f);
    Field b = to_physical(s);
    double n = l2_norm(f);
    CHECK(max_diff(f, b) <= 1e-12 * lebesgue_norm(f, INFINITY));
    double sn = 0.0;
    for (auto c : s.values())
      sn += std::norm(c);
    CHECK(rel(std::sqrt(sn), n) <= 1e-12);
    CHECK(rel(sobolev_norm(f, 0.0), n) <= 1e-12);
  }
}

TEST_CASE("derivative of plane waves and constants", "[spectral]") {
  Grid g(2.0 * kPi, 64);
  for (int k : {-5, 1, 9}) {
    Field d = to_physical(derivative(plane_wave(g, k)));
    Field e = plane_wave(g, k, cplx(0.0, g.xi(k)));
    CHECK(max_diff(d, e) < 1e-12 * std::abs(g.xi(k)) * 10);
  }
  Field c(g, std::vector<cplx>(g.K(), cplx(2.0, 1.0)), Rep::physical);
  CHECK(lebesgue_norm(derivative(c), INFINITY) < 1e-13);
}

TEST_CASE("derivative matches an eighth-order finite-difference oracle", "[spectral][oracle]") {
  Grid g(64.0, 512);
  auto fn = [](double x) { return std::exp(-0.5 * x * x) * std::polar(1.0, 0.8 * x); };
  Field f(g, Rep::physical);
  for (int j = 0; j < g.K(); ++j)
    f[j] = fn(g.x(j));
  Field d = to_physical(derivative(f));
  const double h = g.dx() / 4.0;
  const double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  double err = 0.0;
  for (int j = 0; j < g.K(); ++j) {
    double x = g.x(j);
    cplx fd = 0.0;
    for (int m = 1; m <= 4; ++m)
      fd += c[m - 1] * (fn(x + m * h) - fn(x - m * h));
    err = std::max(err, std::abs(fd / h - d[j]));
  }
  CHECK(err < 1e-8);
}

TEST_CASE("sobolev norm of plane waves and refinement", "[spectral]") {
  Grid g(12.0, 64);
  for (int k : {0, 3, -11})
    for (double s : {0.0, 0.5, 1.0, -0.3})
      CHECK(rel(sobolev_norm(plane_wave(g, k), s), std::pow(japanese(g.xi(k)), s) * std::sqrt(g.L())) <
            1e-12);
  Field a = gaussian(Grid(64.0, 512), 1.0, 1.0, 0.0, 0.5);
  Field b = gaussian(Grid(64.0, 1024), 1.0, 1.0, 0.0, 0.5);
  CHECK(rel(sobolev_norm(a, 0.5), sobolev_norm(b, 0.5)) < 1e-8);
}

TEST_CASE("lebesgue norms", "[spectral]") {
  Grid g(5.0, 32);
  cplx c(-0.6, 0.8);
  Field f(g, std::vector<cplx>(g.K(), c), Rep::physical);
  for (double p : {1.0, 2.0, 3.5, 6.0})
    CHECK(rel(lebesgue_norm(f, p), std::abs(c) * std::pow(g.L(), 1.0 / p)) < 1e-12);
  CHECK(rel(lebesgue_norm(f, INFINITY), 1.0) < 1e-12);
  CHECK(rel(lebesgue_norm(plane_wave(g, 4), 6.0), std::pow(g.L(), 1.0 / 6.0)) < 1e-12);
  CHECK_THROWS_AS(lebesgue_norm(f, 0.5), DomainError);

  // |exp(-x^2/2)|^6 integrates to sqrt(pi/3)
  double exact = std::pow(std::sqrt(kPi / 3.0), 1.0 / 6.0);
  double n1 = lebesgue_norm(gaussian(Grid(64.0, 512)), 6.0);
  double n2 = lebesgue_norm(gaussian(Grid(64.0, 1024)), 6.0);
  CHECK(rel(n1, n2) < 1e-8);
  CHECK(rel(n1, exact) < 1e-8);
}

TEST_CASE("Gagliardo-Nirenberg ratio", "[spectral]") {
  Grid g(2.0 * kPi, 64);
  for (int k : {1, 2, 5}) {
    double xi = g.xi(k);
    CHECK(rel(gn_ratio(plane_wave(g, k)), 1.0 / (g.L() * g.L() * xi * xi)) < 1e-12);
  }
  Field c(g, std::vector<cplx>(g.K(), cplx(1.0)), Rep::physical);
  CHECK_THROWS_AS(gn_ratio(c), DomainError);

  // Gaussian of width w: ratio 2 / (sqrt(3) pi) for every w
  Grid big(64.0, 1024);
  double r = gn_ratio(gaussian(big, 3.0));
  CHECK(rel(r, 2.0 / (std::sqrt(3.0) * kPi)) < 1e-8);
  CHECK(r < kGnSharp);

  double base = gn_ratio(gaussian(big, 1.0, 0.7, 0.0, 1.3));
  for (double lam : {0.5, 2.0, 4.0}) {
    Field fl(big, Rep::physical);
    for (int j = 0; j < big.K(); ++j) {
      double y = lam * big.x(j);
      fl[j] = std::sqrt(lam) * 0.7 * std::exp(-0.5 * y * y) * std::polar(1.0, 1.3 * y);
    }
    CHECK(rel(gn_ratio(fl), base) < 1e-6);
  }
}

TEST_CASE("Gagliardo-Nirenberg bound over the test corpus", "[spectral][property]") {
  Grid g(64.0, 512);
  std::vector<Field> corpus;
  for (double w : {0.5, 1.0, 2.0, 4.0})
    for (double q : {0.0, 1.0, 3.0})
      corpus.push_back(gaussian(g, w, 1.0, 0.0, q));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    TestDataParams tp;
    tp.envelope = 3.0;
    tp.band = 40;
    corpus.push_back(make_test_data(g, DataKind::random_hs, tp, seed));
  }
  for (auto &f : corpus)
    CHECK(gn_ratio(f) <= kGnSharp + kTol.gn_slack);
}

TEST_CASE("band projection", "[spectral]") {
  Grid g(64.0, 256);
  Field f = random_field(g, 3);
  Field full = project_band(f, g.K() / 2);
  Field s = to_spectral(f);
  zero_nyquist(s);
  CHECK(max_diff(full, to_physical(s)) < 1e-12);
  CHECK(lebesgue_norm(project_band(plane_wave(g, 40), 20), INFINITY) < 1e-12);
  CHECK_THROWS_AS(project_band(f, 0), DomainError);

  Field gs = to_spectral(gaussian(g, 0.7));
  Field p = project_band(gs, 8);
  double tail = 0.0;
  for (int j = 0; j < g.K(); ++j)
    if (std::abs(g.index(j)) > 8)
      tail += std::norm(gs[j]);
  Field diff = gs;
  for (int j = 0; j < g.K(); ++j)
    diff[j] -= p[j];
  CHECK(rel(std::pow(l2_norm(diff), 2), tail) < 1e-10);

  // idempotent and self-adjoint
  Field h = random_field(g, 4);
  CHECK(max_diff(project_band(p, 8), p) == 0.0);
  cplx a = inner(project_band(f, 17), h), b = inner(f, project_band(h, 17));
  CHECK(std::abs(a - b) < 1e-12 * std::abs(a));
}

TEST_CASE("test data generation", "[spectral]") {
  Grid g(64.0, 512);
  TestDataParams tp;
  tp.mass = 0.9 * kSmallMass;
  CHECK(std::abs(l2_norm(make_test_data(g, DataKind::gaussian, tp, 0)) - tp.mass) < 1e-10);

  TestDataParams two;
  two.k1 = 2;
  two.k2 = -5;
  Field t = make_test_data(g, DataKind::two_mode, two, 0);
  int lines = 0;
  for (auto c : t.values())
    lines += std::abs(c) > 0.0;
  CHECK(lines == 2);
  CHECK(std::abs(t.coef(2)) > 0.0);
  CHECK(std::abs(t.coef(-5)) > 0.0);

  TestDataParams rh;
  rh.s = 0.5;
  rh.mass = 1.0;
  Field a = make_test_data(g, DataKind::random_hs, rh, 42);
  Field b = make_test_data(g, DataKind::random_hs, rh, 42);
  CHECK(a.values() == b.values());
  CHECK(std::abs(l2_norm(a) - 1.0) < 1e-10);
  CHECK(a.values() != make_test_data(g, DataKind::random_hs, rh, 43).values());

  TestDataParams bad;
  bad.mass = kSmallMass;
  CHECK_THROWS_AS(make_test_data(g, DataKind::gaussian, bad, 0), ConstraintError);
  bad.strict = false;
  CHECK_NOTHROW(make_test_data(g, DataKind::gaussian, bad, 0));
}

TEST_CASE("field serialization matches the golden files", "[spectral][io]") {
  Grid g(2.0, 4);
  Field f(g, {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0.5, -0.25)}, Rep::physical);
  std::string golden_json = read_file(DNLSLAB_GOLDEN_DIR "/field_K4.json");
  CHECK(field_to_json(f).dump() + "\n" == golden_json);
  std::string golden_bin = read_file(DNLSLAB_GOLDEN_DIR "/field_K4.bin");
  CHECK(field_to_binary(f) == golden_bin);

  Field j = field_from_json(nlohmann::json::parse(golden_json));
  Field b = field_from_binary(golden_bin);
  CHECK(j.values() == f.values());
  CHECK(b.values() == f.values());
  CHECK(b.grid() == g);

  Field r = to_spectral(random_field(Grid(3.0, 64), 9));
  Field rb = field_from_binary(field_to_binary(r));
  CHECK(rb.rep() == Rep::spectral);
  CHECK(rb.values() == r.values());
  CHECK_THROWS(field_from_binary("DNLSFLD2" + golden_bin.substr(8)));
}
