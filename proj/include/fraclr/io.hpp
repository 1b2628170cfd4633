#pragma once

// Serialization: raw little-endian float64 field dumps with a JSON sidecar
// header, and the one-row-per-report CSV format. All numeric text output
// goes through a fixed shortest-round-trip formatter so that byte-identical
// runs produce byte-identical files.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "fraclr/grid.hpp"
#include "fraclr/leibniz.hpp"

namespace fraclr {

// Shortest representation that round-trips a double exactly.
inline std::string format_g17(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  return buf;
}

inline void write_field(const RealField& f, const std::string& path) {
  {
    std::ofstream bin(path, std::ios::binary | std::ios::trunc);
    if (!bin) throw std::runtime_error("write_field: cannot open " + path);
    bin.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!bin) throw std::runtime_error("write_field: short write to " + path);
  }
  nlohmann::ordered_json header;
  header["dim"] = f.grid.dim;
  header["N"] = f.grid.n;
  header["L"] = f.grid.length;
  header["dtype"] = "f64-le";
  header["layout"] = "row-major";
  std::ofstream side(path + ".json", std::ios::trunc);
  if (!side) throw std::runtime_error("write_field: cannot open " + path + ".json");
  side << header.dump(2) << "\n";
}

inline RealField read_field(const std::string& path) {
  std::ifstream side(path + ".json");
  if (!side) throw std::runtime_error("read_field: missing sidecar " + path + ".json");
  nlohmann::json header;
  try {
    side >> header;
  } catch (const std::exception& e) {
    throw std::runtime_error("read_field: malformed sidecar " + path + ".json: " + e.what());
  }
  for (const char* key : {"dim", "N", "L", "dtype", "layout"}) {
    if (!header.contains(key)) throw std::runtime_error(std::string("read_field: sidecar missing key ") + key);
  }
  if (header["dtype"] != "f64-le" || header["layout"] != "row-major")
    throw std::runtime_error("read_field: unsupported dtype/layout in " + path + ".json");
  GridSpec g;
  g.dim = header["dim"].get<int>();
  g.n = header["N"].get<int>();
  g.length = header["L"].get<double>();
  g.validate();

  RealField f = RealField::zeros(g);
  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("read_field: missing data file " + path);
  bin.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(bin.tellg());
  if (bytes != f.values.size() * sizeof(double))
    throw std::runtime_error("read_field: header/body length mismatch for " + path);
  bin.seekg(0, std::ios::beg);
  bin.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(bytes));
  if (!bin) throw std::runtime_error("read_field: short read from " + path);
  return f;
}

inline const char* report_csv_header() {
  return "kind,family,lambda,k,s,s1,s2,p,p1,p2,lhs,rhs,ratio,grid_N,seed";
}

inline std::string report_csv_row(const EstimateReport& rep) {
  auto param = [&](const char* key, double fallback) {
    auto it = rep.family_params.find(key);
    return it == rep.family_params.end() ? fallback : it->second;
  };
  std::ostringstream os;
  os << to_string(rep.kind) << ',' << rep.family_label << ',' << format_g17(param("lambda", 1.0)) << ','
     << static_cast<long long>(param("k", -1.0)) << ',' << format_g17(rep.spec.s) << ',' << format_g17(rep.spec.s1)
     << ',' << format_g17(rep.spec.s2) << ',' << format_g17(rep.spec.p) << ',' << format_g17(rep.spec.p1) << ','
     << format_g17(rep.spec.p2) << ',' << format_g17(rep.lhs) << ',' << format_g17(rep.rhs) << ','
     << format_g17(rep.ratio) << ',' << rep.grid_n << ',' << static_cast<unsigned long long>(param("seed", 0.0));
  return os.str();
}

inline std::string reports_to_csv(const std::vector<EstimateReport>& reports) {
  std::ostringstream os;
  os << report_csv_header() << '\n';
  for (const auto& rep : reports) os << report_csv_row(rep) << '\n';
  return os.str();
}

}  // namespace fraclr
