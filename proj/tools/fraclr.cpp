// Command-line front end for the fractional-Leibniz verification toolkit.
//
// Subcommands:
//   verify       run a sweep plan, write reports.csv + verdict.json
//   apply        evaluate one operator on field dumps
//   scan-symbols cone-bound / homogeneity scan of the symbol family
//   dump-family  write the dyadic band multiplier tables as field dumps
//
// Exit codes: 0 success (and verdict PASS), 1 FAIL verdict, 2 configuration
// or input error. A JSON config file can predefine any flag value (keys match
// the long flag names without dashes); explicit flags win.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fraclr/fraclr.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json load_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string(what) + ": cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string(what) + ": " + path + ": " + e.what());
  }
  return j;
}

// Pull a default from the config object for any flag the user did not pass.
template <typename T>
void config_default(const json& cfg, const CLI::App* cmd, const std::string& flag, const std::string& key, T& value) {
  if (cfg.is_object() && cmd->count(flag) == 0 && cfg.contains(key)) {
    try {
      value = cfg.at(key).get<T>();
    } catch (const json::exception& e) {
      throw std::runtime_error("config key '" + key + "': " + e.what());
    }
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::vector<std::pair<fraclr::MultiIndex, fraclr::MultiIndex>> all_order_pairs(int dim, int max_order) {
  std::vector<std::pair<fraclr::MultiIndex, fraclr::MultiIndex>> orders;
  for (int ta = 0; ta <= max_order; ++ta) {
    for (int tb = 0; tb <= max_order - ta; ++tb) {
      for (const auto& a : fraclr::detail::indices_of_order(dim, ta)) {
        for (const auto& b : fraclr::detail::indices_of_order(dim, tb)) {
          orders.emplace_back(a, b);
        }
      }
    }
  }
  return orders;
}

int cmd_verify(const std::string& plan_path, const std::string& tol_path, int threads, const std::string& out_dir) {
  fraclr::SweepPlan plan =
      plan_path.empty() ? fraclr::make_default_plan() : fraclr::plan_from_json(load_json_file(plan_path, "plan"));
  fraclr::ToleranceProfile tol = tol_path.empty()
                                     ? fraclr::ToleranceProfile::defaults()
                                     : fraclr::tolerances_from_json(load_json_file(tol_path, "tolerances"));
  const fraclr::SweepResult result = fraclr::run_sweep(plan, tol, threads);

  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "reports.csv", fraclr::reports_to_csv(result.rows));
  write_text(fs::path(out_dir) / "verdict.json", result.verdict_json().dump(2) + "\n");

  for (const fraclr::CheckResult& c : result.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  measured=" << fraclr::format_g17(c.measured)
              << "  threshold=" << fraclr::format_g17(c.threshold) << "\n";
  }
  std::cout << "rows=" << result.rows.size() << " verdict=" << (result.pass ? "PASS" : "FAIL") << "\n";
  return result.pass ? 0 : 1;
}

struct ApplyArgs {
  std::string op;
  std::vector<std::string> inputs;
  std::string out_name = "out.f64";
  double s = 1.0;
  double theta = 0.0;
  int m = 0;
  int ell = 0;  // 0: derive from s
  int band = 0;
  int j_min = 0;
  int j_max = -1;  // -1: top resolvable band
  int quad = 32;
  double constant = 1.0;
  std::string symbol = "sumriesz";
};

fraclr::SymbolSpec parse_symbol(const ApplyArgs& a) {
  if (a.symbol == "constant") return fraclr::SymbolSpec::make_constant(a.constant);
  if (a.symbol == "sumriesz") return fraclr::SymbolSpec::sum_riesz(a.s);
  if (a.symbol == "shiftedriesz") return fraclr::SymbolSpec::shifted_riesz(a.s, a.theta);
  if (a.symbol == "thetaderiv") return fraclr::SymbolSpec::theta_deriv(a.s, a.theta, a.m);
  throw std::runtime_error("unknown symbol name: " + a.symbol);
}

int cmd_apply(const ApplyArgs& a, const std::string& out_dir) {
  const bool unary = a.op == "riesz" || a.op == "project";
  const std::size_t need = unary ? 1 : 2;
  if (a.inputs.size() != need) {
    throw std::runtime_error("operator '" + a.op + "' expects " + std::to_string(need) + " input field(s)");
  }
  const fraclr::RealField f = fraclr::read_field(a.inputs[0]);

  auto family_for = [&](const fraclr::GridSpec& grid) {
    const int hi = a.j_max >= 0 ? a.j_max : fraclr::max_resolvable_band(grid);
    return fraclr::build_family(grid, a.j_min, hi);
  };

  fraclr::RealField out = fraclr::RealField::zeros(f.grid);
  if (a.op == "riesz") {
    out = fraclr::riesz_potential(f, a.s);
  } else if (a.op == "project") {
    out = fraclr::project(f, family_for(f.grid), a.band);
  } else {
    const fraclr::RealField g = fraclr::read_field(a.inputs[1]);
    if (a.op == "commutator") {
      out = fraclr::commutator(f, g, a.s);
    } else if (a.op == "remainder-first") {
      out = fraclr::leibniz_remainder(f, g, a.s);
    } else if (a.op == "remainder-second") {
      out = fraclr::leibniz_remainder_second(f, g, a.s);
    } else if (a.op == "remainder-taylor") {
      fraclr::EstimateSpec spec;
      spec.s = a.s;
      spec.s1 = a.s;
      spec.s2 = 0.0;
      spec.ell = a.ell > 0 ? a.ell : std::max(1, std::min(3, static_cast<int>(std::ceil(a.s - 1e-12))));
      out = fraclr::taylor_corrected_remainder(f, g, family_for(f.grid), spec);
    } else if (a.op == "bilinear-direct") {
      out = fraclr::bilinear_apply_direct(parse_symbol(a), f, g);
    } else {
      throw std::runtime_error("unknown operator: " + a.op);
    }
  }

  fs::create_directories(out_dir);
  const fs::path path = fs::path(out_dir) / a.out_name;
  fraclr::write_field(out, path.string());
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_scan(const std::vector<double>& s_list, int max_order, int dim, double tolerance, const std::string& report,
             const std::string& out_dir) {
  if (max_order < 0 || max_order > 4) throw std::runtime_error("scan-symbols: max order must lie in [0, 4]");
  const auto orders = all_order_pairs(dim, max_order);
  const fraclr::HomogeneityScan scan = fraclr::homogeneity_scan(s_list, orders, dim, tolerance);

  ordered_json j;
  j["pass"] = scan.pass;
  j["max_spread"] = scan.max_spread;
  j["tolerance"] = scan.spread_tolerance;
  j["reports"] = ordered_json::array();
  for (const fraclr::ConeBoundReport& rep : scan.reports) {
    ordered_json rj;
    rj["s"] = rep.s;
    rj["dim"] = rep.dim;
    rj["entries"] = ordered_json::array();
    for (const fraclr::ConeBoundEntry& e : rep.entries) {
      ordered_json ej;
      ej["alpha"] = {e.alpha.entries[0], e.alpha.entries[1]};
      ej["beta"] = {e.beta.entries[0], e.beta.entries[1]};
      ej["q"] = e.q;
      ej["scale_spread"] = e.scale_spread;
      ej["singular_points"] = e.singular_points;
      ej["per_scale"] = e.per_scale;
      rj["entries"].push_back(ej);
    }
    j["reports"].push_back(rj);
  }

  const std::string text = j.dump(2) + "\n";
  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / report, text);
  std::cout << text;
  return scan.pass ? 0 : 1;
}

int cmd_dump_family(int dim, int n, double length, int j_min, int j_max, const std::string& out_dir) {
  fraclr::GridSpec grid{dim, n, length};
  const int hi = j_max >= 0 ? j_max : fraclr::max_resolvable_band(grid);
  const fraclr::LPFamily fam = fraclr::build_family(grid, j_min, hi);
  fs::create_directories(out_dir);
  for (int j = fam.j_min; j <= fam.j_max; ++j) {
    fraclr::RealField tab{grid, fam.band_table(j)};
    fraclr::write_field(tab, (fs::path(out_dir) / ("band_" + std::to_string(j) + ".f64")).string());
  }
  for (int j = fam.lowpass_lo(); j <= fam.j_max; ++j) {
    const std::string name = "lowpass_" + (j < 0 ? "m" + std::to_string(-j) : std::to_string(j)) + ".f64";
    fraclr::RealField tab{grid, fam.lowpass_table(j)};
    fraclr::write_field(tab, (fs::path(out_dir) / name).string());
  }
  std::cout << "wrote " << (fam.j_max - fam.j_min + 1) << " band and " << (fam.j_max - fam.lowpass_lo() + 1)
            << " low-pass tables to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral fractional-Leibniz verification toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // let --out-dir/--threads/--config appear after the subcommand

  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  app.add_option("--config", config_path, "JSON file with default flag values");
  app.add_option("--out-dir", out_dir, "Directory for all outputs");
  app.add_option("--threads", threads, "Worker threads (0 = FRACLR_THREADS env or hardware)");

  auto* verify = app.add_subcommand("verify", "Run a sweep plan and report the verdict");
  std::string plan_path, tol_path;
  verify->add_option("--plan", plan_path, "Sweep plan JSON (omit for the built-in default plan)");
  verify->add_option("--tolerances", tol_path, "Tolerance profile JSON");

  auto* apply = app.add_subcommand("apply", "Evaluate one operator on field dumps");
  ApplyArgs aa;
  apply->add_option("operator", aa.op,
                    "riesz | project | commutator | remainder-first | remainder-second | "
                    "remainder-taylor | bilinear-direct")
      ->required();
  apply->add_option("--in", aa.inputs, "Input field dump path(s)")->expected(1, 2);
  apply->add_option("--out", aa.out_name, "Output field name (under --out-dir)");
  apply->add_option("--s", aa.s, "Derivative order s");
  apply->add_option("--theta", aa.theta, "Symbol shift parameter");
  apply->add_option("--m", aa.m, "Correction order for thetaderiv symbols");
  apply->add_option("--ell", aa.ell, "Taylor correction order (0 = derive from s)");
  apply->add_option("--band", aa.band, "Band index for project");
  apply->add_option("--j-min", aa.j_min, "Lowest family band");
  apply->add_option("--j-max", aa.j_max, "Highest family band (-1 = top resolvable)");
  apply->add_option("--quad", aa.quad, "Quadrature order");
  apply->add_option("--value", aa.constant, "Constant symbol value");
  apply->add_option("--symbol", aa.symbol, "constant | sumriesz | shiftedriesz | thetaderiv");

  auto* scan = app.add_subcommand("scan-symbols", "Cone-bound homogeneity scan");
  std::vector<double> s_list;
  int max_order = 4;
  int scan_dim = 1;
  double scan_tol = 1e-9;
  std::string report_name = "scan.json";
  scan->add_option("--s", s_list, "Orders s to scan")->expected(-1);
  scan->add_option("--max-order", max_order, "Largest |alpha|+|beta|");
  scan->add_option("--dim", scan_dim, "Frequency dimension (1 or 2)");
  scan->add_option("--tolerance", scan_tol, "Homogeneity spread tolerance");
  scan->add_option("--report", report_name, "Report file name (under --out-dir)");

  auto* dump = app.add_subcommand("dump-family", "Write multiplier tables as field dumps");
  int fam_dim = 1, fam_n = 256, fam_j_min = 0, fam_j_max = -1;
  double fam_length = fraclr::kTau;
  dump->add_option("--dim", fam_dim, "Grid dimension");
  dump->add_option("--n", fam_n, "Grid points per axis");
  dump->add_option("--length", fam_length, "Physical period");
  dump->add_option("--j-min", fam_j_min, "Lowest band");
  dump->add_option("--j-max", fam_j_max, "Highest band (-1 = top resolvable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version → 0, any parse problem → 2
  }

  try {
    json cfg;
    if (!config_path.empty()) cfg = load_json_file(config_path, "config");
    config_default(cfg, &app, "--out-dir", "out-dir", out_dir);
    config_default(cfg, &app, "--threads", "threads", threads);

    if (verify->parsed()) {
      config_default(cfg, verify, "--plan", "plan", plan_path);
      config_default(cfg, verify, "--tolerances", "tolerances", tol_path);
      return cmd_verify(plan_path, tol_path, threads, out_dir);
    }
    if (apply->parsed()) {
      config_default(cfg, apply, "--s", "s", aa.s);
      config_default(cfg, apply, "--ell", "ell", aa.ell);
      config_default(cfg, apply, "--j-min", "j-min", aa.j_min);
      config_default(cfg, apply, "--j-max", "j-max", aa.j_max);
      config_default(cfg, apply, "--quad", "quad", aa.quad);
      return cmd_apply(aa, out_dir);
    }
    if (scan->parsed()) {
      config_default(cfg, scan, "--max-order", "max-order", max_order);
      config_default(cfg, scan, "--dim", "dim", scan_dim);
      config_default(cfg, scan, "--tolerance", "tolerance", scan_tol);
      if (s_list.empty() && cfg.is_object() && cfg.contains("s")) s_list = cfg.at("s").get<std::vector<double>>();
      if (s_list.empty()) s_list = {0.5, 1.0, 1.5, 2.0, 2.5};
      return cmd_scan(s_list, max_order, scan_dim, scan_tol, report_name, out_dir);
    }
    if (dump->parsed()) {
      return cmd_dump_family(fam_dim, fam_n, fam_length, fam_j_min, fam_j_max, out_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
