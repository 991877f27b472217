//! Command-line front end: simulations, energy series, scaling study,
//! identity suite, bound verification, space-time estimates, budget,
//! multiplier batches, fixture freezing and calibration.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dnlslab/experiments.hpp"
#include "dnlslab/fixtures.hpp"

using namespace dnls;

namespace {

struct Regression : Error {
  using Error::Error;
};

ExperimentConfig resolve_config(const std::string &path, const std::string &out) {
  ExperimentConfig c = path.empty() ? ExperimentConfig{} : load_config(path);
  apply_environment(c);
  if (!out.empty())
    c.out_dir = out;
  c.validate();
  return c;
}

void emit(const std::string &content, const std::string &out) {
  if (out.empty() || out == "-")
    std::cout << content;
  else
    atomic_write(out, content);
}

nlohmann::json load_json(const std::string &path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ComparisonPolicy policy_from(double csim, double cgg, double cgtr) {
  ComparisonPolicy p{csim, cgg, cgtr};
  p.validate();
  return p;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"dnlslab: pseudospectral lab for the derivative NLS and the I-method"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers, "worker threads (default: hardware concurrency)");

  // simulate / energies / scaling / identities share --config and --out
  std::string config, out;
  auto *sim = app.add_subcommand("simulate", "evolve the configured data and save the trajectory");
  auto *en = app.add_subcommand("energies", "E1/E2/E3 series along a trajectory for each N");
  auto *sc = app.add_subcommand("scaling", "increments of the modified energies across the N sweep");
  auto *id = app.add_subcommand("identities", "derivative-identity residuals at orders 1-3");
  for (auto *c : {sim, en, sc, id}) {
    c->add_option("--config", config, "JSON configuration file");
    c->add_option("--out", out, "output directory (overrides out_dir)");
  }
  bool force = false;
  id->add_flag("--force", force, "run orders 2-3 even when the order-1 gate fails");

  // verify
  auto *ver = app.add_subcommand("verify", "empirical constants of the multiplier bounds");
  std::string bound = "all", profile, tail = "power_law", fixture, vfreeze, vout;
  double N = 64.0, s = 0.5, csim = 2.0, cgg = 8.0, cgtr = 0.5;
  long long samples = 0;
  std::uint64_t seed = 1;
  bool doubling = false;
  ver->add_option("--bound", bound, "bound id or 'all'");
  ver->add_option("--N", N, "cutoff N");
  ver->add_option("--s", s, "Sobolev index s in [1/2, 1)");
  ver->add_option("--tail", tail, "power_law | smooth_blend");
  ver->add_option("--samples", samples, "samples per bound (0: registry default)");
  ver->add_option("--seed", seed, "sampling seed");
  ver->add_option("--profile", profile, "sampling pattern override");
  ver->add_option("--csim", csim, "constant realizing ~");
  ver->add_option("--cgg", cgg, "constant realizing >>");
  ver->add_option("--cgtr", cgtr, "constant realizing >~ N");
  ver->add_option("--fixture", fixture, "frozen ratios to compare against (exit 1 on regression)");
  ver->add_flag("--doubling", doubling, "also run at 2N and require ratio(2N) <= 2 ratio(N)");
  ver->add_option("--freeze", vfreeze, "run at N = 64 and 128 and write the ratios as a fixture");
  ver->add_option("--out", vout, "CSV report path (default: stdout)");

  // bourgain
  auto *bg = app.add_subcommand("bourgain", "empirical constants of the space-time estimates");
  std::string estimate = "all", corpus = "free", window = "bump", bfixture, bfreeze, bout;
  long long count = 32;
  double L = 2.0 * kPi, T = 1.0, half_plus = kHalfPlus, zero_minus = kZeroMinus;
  int K = 64, Kt = 256;
  std::uint64_t bseed = 1;
  bg->add_option("--estimate", estimate, "estimate id or 'all'");
  bg->add_option("--corpus", corpus, "free | offshell | packet");
  bg->add_option("--seed", bseed, "corpus seed");
  bg->add_option("--count", count, "corpus size");
  bg->add_option("--L", L, "spatial period");
  bg->add_option("--K", K, "spatial modes");
  bg->add_option("--T", T, "window length");
  bg->add_option("--Kt", Kt, "time samples");
  bg->add_option("--window", window, "bump | hann");
  bg->add_option("--half-plus", half_plus, "exponent used for 1/2+");
  bg->add_option("--zero-minus", zero_minus, "exponent used for 0-");
  bg->add_option("--fixture", bfixture, "frozen ratios to compare against (exit 1 on regression)");
  bg->add_option("--freeze", bfreeze, "run on the lattice and its doubling and write a fixture");
  bg->add_option("--out", bout, "CSV report path (default: stdout)");

  // calibrate
  auto *cal = app.add_subcommand("calibrate", "least-squares constant of the merged M6 form");
  double cN = 64.0, cs = 0.5;
  std::string ctail = "power_law", cal_out;
  long long ccount = 200;
  std::uint64_t cseed = 1;
  cal->add_option("--N", cN, "cutoff N");
  cal->add_option("--s", cs, "Sobolev index");
  cal->add_option("--tail", ctail, "power_law | smooth_blend");
  cal->add_option("--count", ccount, "number of seeded tuples");
  cal->add_option("--seed", cseed, "tuple seed");
  cal->add_option("--out", cal_out, "fixture path (default: stdout)");

  // budget
  auto *bu = app.add_subcommand("budget", "iteration budget mu, M, T for given s and N");
  double bs = 0.5, bN = 64.0, mass = 0.0;
  std::optional<double> mu_exp;
  std::string buout;
  bu->add_option("--s", bs, "Sobolev index")->required();
  bu->add_option("--N", bN, "cutoff N")->required();
  bu->add_option("--mass", mass, "|u0|_2");
  bu->add_option("--mu-exponent", mu_exp, "override the exponent of mu");
  bu->add_option("--out", buout, "JSON report path");

  // multipliers batch
  auto *mu = app.add_subcommand("multipliers", "multiplier evaluation");
  auto *batch = mu->add_subcommand("batch", "evaluate a multiplier on CSV rows xi1..xin");
  mu->require_subcommand(1);
  std::string kind = "M4", in, mout, mtail = "power_law";
  double mN = 64.0, ms = 0.5, mcsim = 2.0, mcgg = 8.0, mcgtr = 0.5;
  batch->add_option("--kind", kind, "alpha | M4 | M6 | M8 | sigma6 | M8tilde | M10")->required();
  batch->add_option("--in", in, "input CSV")->required();
  batch->add_option("--out", mout, "output CSV (default: stdout)");
  batch->add_option("--N", mN, "cutoff N");
  batch->add_option("--s", ms, "Sobolev index");
  batch->add_option("--tail", mtail, "power_law | smooth_blend");
  batch->add_option("--csim", mcsim, "constant realizing ~");
  batch->add_option("--cgg", mcgg, "constant realizing >>");
  batch->add_option("--cgtr", mcgtr, "constant realizing >~ N");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    if (workers > 0)
      set_worker_count(workers);

    if (sim->parsed()) {
      auto c = resolve_config(config, out);
      Trajectory tr = evolve(c.sim);
      save_trajectory(tr, fs::path(c.out_dir) / "trajectory", config_to_json(c));
      auto &a = tr.ledger.front(), &b = tr.ledger.back();
      std::printf("simulate: %zu samples to t=%g, mass drift %.3e, E drift %.3e, H drift %.3e\n",
                  tr.times.size(), b.t, (b.mass - a.mass) / a.mass,
                  (b.energy_E - a.energy_E) / std::abs(a.energy_E),
                  (b.hamiltonian - a.hamiltonian) / std::abs(a.hamiltonian));
    } else if (en->parsed()) {
      auto c = resolve_config(config, out);
      auto series = run_energy_series(c);
      std::printf("energies: %zu N values, %zu samples each, written to %s\n", series.size(),
                  series.empty() ? 0 : series.front().rows.size(), c.out_dir.c_str());
    } else if (sc->parsed()) {
      auto c = resolve_config(config, out);
      auto r = run_scaling_study(c);
      std::printf("scaling: dE1 nonincreasing=%s, slope(dE3)=%.3f [%.3f, %.3f] (target -2.5), "
                  "written to %s\n",
                  r.E1_nonincreasing ? "yes" : "no", r.fit_E3.slope, r.fit_E3.lo, r.fit_E3.hi,
                  c.out_dir.c_str());
      if (!r.E1_nonincreasing || !r.E3_slope_ok)
        throw Regression("scaling: requirement not met");
    } else if (id->parsed()) {
      auto c = resolve_config(config, out);
      IdentityOptions o;
      o.force = force;
      auto r = run_identity_suite(c, o);
      std::printf("identities: order-1 observed order %.3f (gate %s)", r.min_observed_order,
                  r.gate_passed ? "passed" : "failed");
      if (r.order2)
        std::printf(", order-2 normalized %.3e", r.order2->normalized);
      if (r.order3)
        std::printf(", order-3 normalized %.3e leaks %lld", r.order3->normalized, r.order3->leaks);
      std::printf(", written to %s\n", c.out_dir.c_str());
      if (!r.gate_passed)
        throw Regression("identities: order-1 convergence gate failed");
    } else if (ver->parsed()) {
      IParams p{N, s, parse_tail(tail)};
      p.validate();
      auto pol = policy_from(csim, cgg, cgtr);
      std::vector<std::string> ids = bound == "all" ? all_bound_ids() : std::vector<std::string>{bound};
      std::optional<nlohmann::json> fx;
      if (!fixture.empty())
        fx = load_json(fixture);
      std::string csv = bound_csv_header() + "\n";
      int failures = 0;
      if (!vfreeze.empty() && N != 64.0)
        throw ConfigError("verify --freeze records N = 64 and N = 128; pass --N 64");
      std::vector<std::pair<BoundReport, BoundReport>> frozen;
      for (auto &b : ids) {
        auto r = verify_any(b, p, pol, samples, seed, profile);
        csv += bound_csv_row(r) + "\n";
        if (fx) {
          auto chk = check_bound_fixture(*fx, r);
          if (!chk.present || !chk.pass) {
            std::cerr << chk.message << "\n";
            ++failures;
          }
        }
        if (doubling || !vfreeze.empty()) {
          IParams p2 = p;
          p2.N = 2.0 * N;
          auto r2 = verify_any(b, p2, pol, samples, seed, profile);
          csv += bound_csv_row(r2) + "\n";
          if (r2.max_ratio > 2.0 * r.max_ratio) {
            std::cerr << b << ": ratio at 2N " << r2.max_ratio << " exceeds twice " << r.max_ratio << "\n";
            ++failures;
          }
          frozen.emplace_back(r, r2);
        }
      }
      if (!vfreeze.empty())
        atomic_write(vfreeze, bound_fixture(frozen).dump(2) + "\n");
      emit(csv, vout);
      std::fprintf(vout.empty() ? stderr : stdout, "verify: %zu bound(s), %d failure(s)\n",
                   ids.size(), failures);
      if (failures)
        throw Regression("verify: regression against fixture or doubling check");
    } else if (bg->parsed()) {
      Lattice lat{Grid(L, K), T, Kt, parse_window(window)};
      lat.validate();
      Exponents ex{half_plus, zero_minus};
      std::vector<std::string> ids = estimate == "all" ? all_estimate_ids() : std::vector<std::string>{estimate};
      std::optional<nlohmann::json> fx;
      if (!bfixture.empty())
        fx = load_json(bfixture);
      std::string csv = "id,corpus,seed,count,L,K,T,Kt,window,half_plus,zero_minus,exponents,"
                        "max_ratio,q50,min_ratio,argmax_index\n";
      int failures = 0;
      std::vector<std::pair<EstimateReport, EstimateReport>> frozen;
      for (auto &e : ids) {
        auto r = estimate_ratio(e, corpus, lat, count, bseed, ex);
        if (!bfreeze.empty())
          frozen.emplace_back(r, estimate_ratio(e, corpus, doubled(lat), count, bseed, ex));
        std::ostringstream os;
        os << r.id << ',' << r.corpus << ',' << r.seed << ',' << r.count << ',' << fmt_g17(L) << ','
           << K << ',' << fmt_g17(T) << ',' << Kt << ',' << window_name(lat.window) << ','
           << fmt_g17(ex.half_plus) << ',' << fmt_g17(ex.zero_minus) << ',' << r.exponents_used
           << ',' << fmt_g17(r.max_ratio) << ',' << fmt_g17(r.q50) << ',' << fmt_g17(r.min_ratio)
           << ',' << r.argmax_index << '\n';
        csv += os.str();
        if (fx) {
          auto chk = check_estimate_fixture(*fx, r);
          if (!chk.present || !chk.pass) {
            std::cerr << chk.message << "\n";
            ++failures;
          }
        }
      }
      if (!bfreeze.empty())
        atomic_write(bfreeze, estimate_fixture(frozen).dump(2) + "\n");
      emit(csv, bout);
      std::fprintf(bout.empty() ? stderr : stdout, "bourgain: %zu estimate(s), %d failure(s)\n",
                   ids.size(), failures);
      if (failures)
        throw Regression("bourgain: regression against fixture");
    } else if (cal->parsed()) {
      IParams p{cN, cs, parse_tail(ctail)};
      p.validate();
      cplx c6 = calibrate_C6(p, ccount, cseed);
      cplx c6p = 0.5 * c6 + cplx(0.0, 1.0 / 6.0);
      nlohmann::json j{{"schema_version", 1},
                       {"kind", "calibration"},
                       {"N", cN},
                       {"s", cs},
                       {"tail", ctail},
                       {"count", ccount},
                       {"seed", cseed},
                       {"C6", {{"re", c6.real()}, {"im", c6.imag()}}},
                       {"C6prime", {{"re", c6p.real()}, {"im", c6p.imag()}}}};
      emit(j.dump(2) + "\n", cal_out);
      std::fprintf(stderr, "calibrate: C6 = %.17g%+.17gi\n", c6.real(), c6.imag());
    } else if (bu->parsed()) {
      auto b = gwp_budget(bs, bN, mass, mu_exp);
      std::printf("budget: s=%g N=%g mu=%.6g (N^%.6g) M=%.6g (N^%.6g) T=%.6g (N^%.6g)\n", b.s, b.N,
                  b.mu, b.mu_exponent, b.M, b.M_exponent, b.T, b.T_exponent);
      if (!buout.empty())
        atomic_write(buout, budget_json(b).dump(2) + "\n");
    } else if (batch->parsed()) {
      IParams p{mN, ms, parse_tail(mtail)};
      auto csv = multiplier_batch(kind, read_file(in), p, policy_from(mcsim, mcgg, mcgtr));
      emit(csv, mout);
    }
  } catch (const Regression &e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ConstraintError &e) {
    std::cerr << "constraint violated: " << e.what() << "\n";
    return 2;
  } catch (const DomainError &e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
