#pragma once
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "spectral.hpp"

namespace dnls {

// JSON layout:
//   {"format":"dnlslab.field","version":1,"L":..,"K":..,
//    "representation":"physical"|"spectral","data":[re0,im0,re1,im1,...]}
// Spectral data are stored in FFT slot order.
//
// Binary layout (little endian):
//   8 bytes  magic "DNLSFLD1"
//   uint32   version (1)
//   uint32   representation (0 physical, 1 spectral)
//   float64  L
//   uint64   K
//   2K x float64 interleaved re/im

inline nlohmann::json field_to_json(const Field &f) {
  nlohmann::json j;
  j["format"] = "dnlslab.field";
  j["version"] = 1;
  j["L"] = f.grid().L();
  j["K"] = f.grid().K();
  j["representation"] = rep_name(f.rep());
  std::vector<double> data;
  data.reserve(2 * f.size());
  for (auto c : f.values()) {
    data.push_back(c.real());
    data.push_back(c.imag());
  }
  j["data"] = data;
  return j;
}

inline Field field_from_json(const nlohmann::json &j) {
  if (j.value("format", "") != "dnlslab.field")
    throw ConfigError("field json: wrong format tag");
  if (j.value("version", 0) != 1)
    throw ConfigError("field json: unsupported version");
  Grid g(j.at("L").get<double>(), j.at("K").get<int>());
  std::string r = j.at("representation").get<std::string>();
  if (r != "physical" && r != "spectral")
    throw ConfigError("field json: bad representation " + r);
  auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != 2u * g.K())
    throw ConfigError("field json: data length mismatch");
  std::vector<cplx> v(g.K());
  for (int i = 0; i < g.K(); ++i)
    v[i] = cplx(data[2 * i], data[2 * i + 1]);
  return Field(g, std::move(v), r == "physical" ? Rep::physical : Rep::spectral);
}

inline std::string field_to_binary(const Field &f) {
  std::string out("DNLSFLD1");
  auto put = [&out](const void *p, std::size_t n) {
    out.append(static_cast<const char *>(p), n);
  };
  std::uint32_t version = 1, rep = f.rep() == Rep::physical ? 0 : 1;
  double L = f.grid().L();
  std::uint64_t K = f.grid().K();
  put(&version, 4);
  put(&rep, 4);
  put(&L, 8);
  put(&K, 8);
  for (auto c : f.values()) {
    double re = c.real(), im = c.imag();
    put(&re, 8);
    put(&im, 8);
  }
  return out;
}

inline Field field_from_binary(const std::string &bytes) {
  if (bytes.size() < 32 || bytes.compare(0, 8, "DNLSFLD1") != 0)
    throw ConfigError("field binary: bad header");
  std::size_t pos = 8;
  auto get = [&](void *p, std::size_t n) {
    if (pos + n > bytes.size())
      throw ConfigError("field binary: truncated");
    std::memcpy(p, bytes.data() + pos, n);
    pos += n;
  };
  std::uint32_t version, rep;
  double L;
  std::uint64_t K;
  get(&version, 4);
  get(&rep, 4);
  get(&L, 8);
  get(&K, 8);
  if (version != 1 || rep > 1)
    throw ConfigError("field binary: unsupported version or representation");
  Grid g(L, static_cast<int>(K));
  std::vector<cplx> v(K);
  for (auto &c : v) {
    double re, im;
    get(&re, 8);
    get(&im, 8);
    c = cplx(re, im);
  }
  return Field(g, std::move(v), rep == 0 ? Rep::physical : Rep::spectral);
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace dnls
