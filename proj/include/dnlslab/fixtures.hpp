#pragma once
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bounds.hpp"
#include "bourgain.hpp"

namespace dnls {

//! Relative tolerance when comparing a rerun against a frozen ratio. Reruns
//! are deterministic; the slack only absorbs libm differences between
//! platforms.
inline constexpr double kFixtureRel = 1e-6;

struct FixtureCheck {
  bool present = false;
  bool pass = false;
  double expected = 0.0;
  double actual = 0.0;
  std::string message;
};

inline FixtureCheck compare_to_fixture(const std::string &id, double expected, double actual) {
  FixtureCheck c{true, false, expected, actual, ""};
  double tol = kFixtureRel * std::max(1.0, std::abs(expected));
  c.pass = std::abs(actual - expected) <= tol;
  c.message = id + (c.pass ? ": matches fixture " : ": REGRESSION, fixture ") + fmt_g17(expected) +
              (c.pass ? "" : " vs measured " + fmt_g17(actual));
  return c;
}

// Bound fixture layout:
//   {"schema_version":1,"kind":"bounds","s":..,"tail":..,"seed":..,
//    "policy":{..},"entries":{"<id>":{"samples":..,"N64":ratio,"N128":ratio,"pattern":..}}}
inline nlohmann::json bound_fixture_entry(const BoundReport &r64, const BoundReport &r128) {
  return {{"samples", r64.samples}, {"pattern", r64.pattern}, {"N64", r64.max_ratio},
          {"N128", r128.max_ratio}, {"coverage64", r64.coverage}};
}

//! Fixture document for matched runs at N = 64 (r64) and N = 128 (r128).
inline nlohmann::json bound_fixture(const std::vector<std::pair<BoundReport, BoundReport>> &runs) {
  if (runs.empty())
    throw ContractViolation("bound_fixture: no runs");
  const BoundReport &f = runs.front().first;
  nlohmann::json fx{{"schema_version", 1}, {"kind", "bounds"}, {"s", f.s}, {"tail", tail_name(f.tail)},
                    {"seed", f.seed},
                    {"policy", {{"C_sim", f.policy.C_sim}, {"C_gg", f.policy.C_gg}, {"C_gtr", f.policy.C_gtr}}}};
  for (auto &[a, b] : runs) {
    if (a.N != 64.0 || b.N != 128.0)
      throw ContractViolation("bound_fixture: runs must be at N = 64 and N = 128");
    fx["entries"][a.id] = bound_fixture_entry(a, b);
  }
  return fx;
}

//! Looks up the frozen ratio for r (by id and N in {64, 128}) and compares.
inline FixtureCheck check_bound_fixture(const nlohmann::json &fx, const BoundReport &r) {
  FixtureCheck c;
  if (!fx.contains("entries") || !fx["entries"].contains(r.id)) {
    c.message = r.id + ": no fixture entry";
    return c;
  }
  auto &e = fx["entries"][r.id];
  std::string key = r.N == 64.0 ? "N64" : r.N == 128.0 ? "N128" : "";
  const auto &pol = fx.value("policy", nlohmann::json::object());
  bool same_params = fx.value("s", -1.0) == r.s && fx.value("tail", std::string()) == tail_name(r.tail) &&
                     pol.value("C_sim", 0.0) == r.policy.C_sim && pol.value("C_gg", 0.0) == r.policy.C_gg &&
                     pol.value("C_gtr", 0.0) == r.policy.C_gtr;
  if (!same_params) {
    c.message = r.id + ": fixture recorded for other s, tail or policy";
    return c;
  }
  if (key.empty() || fx.value("seed", std::uint64_t{0}) != r.seed ||
      e.value("samples", 0LL) != r.samples || e.value("pattern", std::string()) != r.pattern) {
    c.message = r.id + ": fixture recorded for N in {64,128}, seed " +
                std::to_string(fx.value("seed", std::uint64_t{0})) + ", samples " +
                std::to_string(e.value("samples", 0LL)) + "; run parameters differ";
    return c;
  }
  return compare_to_fixture(r.id, e[key].get<double>(), r.max_ratio);
}

// Estimate fixture layout:
//   {"schema_version":1,"kind":"estimates","corpus":..,"seed":..,"count":..,
//    "lattice":{"L":..,"K":..,"T":..,"Kt":..,"window":..},
//    "entries":{"<id>":{"base":ratio,"doubled":ratio,"exponents":".."}}}
inline nlohmann::json lattice_json(const Lattice &l) {
  return {{"L", l.grid.L()}, {"K", l.grid.K()}, {"T", l.T}, {"Kt", l.Kt}, {"window", window_name(l.window)}};
}

//! Fixture document for runs on a lattice (base) and on doubled(base).
inline nlohmann::json estimate_fixture(const std::vector<std::pair<EstimateReport, EstimateReport>> &runs) {
  if (runs.empty())
    throw ContractViolation("estimate_fixture: no runs");
  const EstimateReport &f = runs.front().first;
  nlohmann::json fx{{"schema_version", 1},
                    {"kind", "estimates"},
                    {"corpus", f.corpus},
                    {"seed", f.seed},
                    {"count", f.count},
                    {"lattice", lattice_json(f.lattice)},
                    {"exponents", {{"half_plus", f.exponents.half_plus}, {"zero_minus", f.exponents.zero_minus}}}};
  for (auto &[a, b] : runs) {
    if (!(b.lattice == doubled(a.lattice)))
      throw ContractViolation("estimate_fixture: second run must use the doubled lattice");
    fx["entries"][a.id] = {{"base", a.max_ratio}, {"doubled", b.max_ratio}, {"exponents", a.exponents_used}};
  }
  return fx;
}

inline FixtureCheck check_estimate_fixture(const nlohmann::json &fx, const EstimateReport &r) {
  FixtureCheck c;
  if (!fx.contains("entries") || !fx["entries"].contains(r.id)) {
    c.message = r.id + ": no fixture entry";
    return c;
  }
  const Lattice base{Grid(fx["lattice"]["L"].get<double>(), fx["lattice"]["K"].get<int>()),
                     fx["lattice"]["T"].get<double>(), fx["lattice"]["Kt"].get<int>(),
                     parse_window(fx["lattice"]["window"].get<std::string>())};
  std::string key = r.lattice == base ? "base" : r.lattice == doubled(base) ? "doubled" : "";
  if (key.empty() || fx.value("corpus", std::string()) != r.corpus ||
      fx.value("seed", std::uint64_t{0}) != r.seed || fx.value("count", 0LL) != r.count ||
      fx["entries"][r.id].value("exponents", std::string()) != r.exponents_used) {
    c.message = r.id + ": run parameters differ from the fixture's";
    return c;
  }
  return compare_to_fixture(r.id, fx["entries"][r.id][key].get<double>(), r.max_ratio);
}

} // namespace dnls
