#pragma once
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "field_io.hpp"
#include "solver.hpp"

namespace dnls {

namespace fs = std::filesystem;

namespace detail {
inline std::string temp_suffix() {
  static std::atomic<unsigned> counter{0};
  std::ostringstream os;
  os << ".tmp." << ::getpid() << '.' << counter.fetch_add(1);
  return os.str();
}
} // namespace detail

//! Writes `content` to a sibling temporary file and renames it over `path`,
//! so readers never observe a partial file.
inline void atomic_write(const fs::path &path, const std::string &content) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += detail::temp_suffix();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw ConfigError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw ConfigError("write failed: " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

//! Builds a directory under a temporary name with `fill` and renames it into
//! place, replacing any previous directory of that name.
template <class Fill> void atomic_write_dir(const fs::path &dir, Fill &&fill) {
  fs::path tmp = dir;
  tmp += detail::temp_suffix();
  fs::create_directories(tmp);
  try {
    fill(tmp);
  } catch (...) {
    fs::remove_all(tmp);
    throw;
  }
  if (fs::exists(dir))
    fs::remove_all(dir);
  fs::rename(tmp, dir);
}

inline const char *kLedgerHeader = "t,mass,hamiltonian,energy_E";

inline std::string ledger_csv(const std::vector<LedgerEntry> &ledger) {
  std::ostringstream os;
  os << kLedgerHeader << '\n';
  char buf[160];
  for (auto &e : ledger) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", e.t, e.mass, e.hamiltonian,
                  e.energy_E);
    os << buf;
  }
  return os.str();
}

// Trajectory directory layout:
//   metadata.json    {"format":"dnlslab.trajectory","version":1,"equation":..,
//                     "lambda":..,"L":..,"K":..,"times":[..],"files":[..],"config":{..}}
//   field_NNNNNN.bin one binary field record per sample (spectral)
//   ledger.csv       t,mass,hamiltonian,energy_E
inline void save_trajectory(const Trajectory &tr, const fs::path &dir,
                            const nlohmann::json &config = nlohmann::json::object()) {
  if (tr.fields.empty())
    throw ContractViolation("save_trajectory: empty trajectory");
  atomic_write_dir(dir, [&](const fs::path &tmp) {
    nlohmann::json meta;
    meta["format"] = "dnlslab.trajectory";
    meta["version"] = 1;
    meta["equation"] = tr.equation.name();
    meta["lambda"] = tr.equation.lambda;
    meta["L"] = tr.fields.front().grid().L();
    meta["K"] = tr.fields.front().grid().K();
    meta["times"] = tr.times;
    meta["config"] = config;
    nlohmann::json files = nlohmann::json::array();
    for (std::size_t i = 0; i < tr.fields.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "field_%06zu.bin", i);
      atomic_write(tmp / name, field_to_binary(tr.fields[i]));
      files.push_back(name);
    }
    meta["files"] = files;
    atomic_write(tmp / "metadata.json", meta.dump(2) + "\n");
    atomic_write(tmp / "ledger.csv", ledger_csv(tr.ledger));
  });
}

inline Trajectory load_trajectory(const fs::path &dir) {
  auto meta = nlohmann::json::parse(read_file((dir / "metadata.json").string()));
  if (meta.value("format", "") != "dnlslab.trajectory" || meta.value("version", 0) != 1)
    throw ConfigError("load_trajectory: not a version-1 trajectory directory");
  Trajectory tr;
  std::string eq = meta.at("equation");
  tr.equation = eq == "dnls" ? Equation::dnls(meta.at("lambda").get<double>()) : Equation::gauged();
  tr.times = meta.at("times").get<std::vector<double>>();
  for (auto &name : meta.at("files"))
    tr.fields.push_back(to_spectral(field_from_binary(read_file((dir / name.get<std::string>()).string()))));
  if (tr.fields.size() != tr.times.size())
    throw ConfigError("load_trajectory: file and time counts differ");
  std::istringstream in(read_file((dir / "ledger.csv").string()));
  std::string line;
  std::getline(in, line);
  if (line != kLedgerHeader)
    throw ConfigError("load_trajectory: unexpected ledger header");
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    LedgerEntry e{};
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &e.t, &e.mass, &e.hamiltonian, &e.energy_E) != 4)
      throw ConfigError("load_trajectory: malformed ledger row");
    tr.ledger.push_back(e);
  }
  return tr;
}

} // namespace dnls
