#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dnspec/dnsystem.hpp"
#include "dnspec/harness.hpp"
#include "dnspec/hspace.hpp"
#include "dnspec/interp.hpp"
#include "dnspec/parallel.hpp"
#include "dnspec/pdo.hpp"
#include "dnspec/report.hpp"
#include "dnspec/roparam.hpp"

namespace {

using namespace dnspec;

struct Options {
  std::string system_file;
  std::vector<std::string> phis;
  std::vector<int> grids;
  int trials = 100;
  std::uint64_t seed = 0;
  double sigma = 1.0;
  int lambda = 0;
  int component = 1;
  double tolerance = 1e-9;
  double c2 = 0.0;
  double s0 = 0.0, s1 = 0.0;
  std::string report_path;
  std::string field_path;
  std::string orders;
  bool project = false;
  int threads = 1;
};

// 15 significant digits, scientific
std::string format_norm(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.14e", v);
  return buf;
}

DNSystem load_system(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open system file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
  }
  return DNSystem::from_json(j);
}

std::vector<ROParam> battery(const Options& opt) {
  std::vector<ROParam> phis;
  for (const auto& s : opt.phis) phis.push_back(param_from_spec(s));
  if (phis.empty()) phis.push_back(ROParam::power(0));
  return phis;
}

std::vector<int> grids_or(const Options& opt, std::vector<int> fallback) {
  return opt.grids.empty() ? fallback : opt.grids;
}

int finish(const std::string& command, std::vector<Report> reports, const Options& opt) {
  Verdict worst = Verdict::pass;
  for (const auto& r : reports) {
    std::cout << r.summary() << "\n";
    if (r.verdict == Verdict::fail)
      worst = Verdict::fail;
    else if (r.verdict == Verdict::inconclusive && worst == Verdict::pass)
      worst = Verdict::inconclusive;
  }
  if (!opt.report_path.empty()) {
    nlohmann::ordered_json out;
    out["command"] = command;
    out["reports"] = nlohmann::ordered_json::array();
    for (const auto& r : reports) out["reports"].push_back(r.to_json());
    std::ofstream os(opt.report_path, std::ios::binary);
    if (!os) throw std::invalid_argument("cannot write report: " + opt.report_path);
    os << out.dump(2) << "\n";
  }
  return exit_code(worst);
}

int run_dn_numbers(const Options& opt) {
  std::vector<std::vector<int>> orders;
  if (!opt.orders.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(opt.orders);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument(std::string("malformed --orders JSON: ") + e.what());
    }
    orders = j.get<std::vector<std::vector<int>>>();
  } else if (!opt.system_file.empty()) {
    orders = load_system(opt.system_file).order_matrix();
  } else {
    throw std::invalid_argument("dn-numbers: pass --orders or a system file");
  }
  const DnNumbers dn = solve_dn_numbers(orders);
  Report rep;
  rep.name = "dn_numbers";
  rep.config["orders"] = orders;
  rep.constants["l"] = dn.l;
  rep.constants["m"] = dn.m;
  rep.constants["q"] = dn.q();
  bool ok = true;
  for (std::size_t j = 0; j < orders.size(); ++j)
    for (std::size_t k = 0; k < orders.size(); ++k)
      if (orders[j][k] >= 0 && orders[j][k] > dn.l[j] + dn.m[k] + 1e-9) ok = false;
  rep.verdict = ok ? Verdict::pass : Verdict::fail;
  return finish("dn-numbers", {rep}, opt);
}

int run_check_elliptic(const Options& opt) {
  const DNSystem sys = load_system(opt.system_file);
  return finish("check-elliptic", {ellipticity_margin(sys, opt.tolerance)}, opt);
}

int run_check_condition_b(const Options& opt) {
  const DNSystem sys = load_system(opt.system_file);
  const Grid lattice(sys.n, grids_or(opt, {16}).front());
  return finish("check-condition-b",
                {condition_b_margin(sys, opt.c2, lattice, opt.tolerance)}, opt);
}

int run_norm(const Options& opt) {
  VectorField f = [&] {
    if (!opt.field_path.empty()) return read_field(opt.field_path);
    const int N = grids_or(opt, {16}).front();
    const int dim = 2;
    return random_vector_field(Grid(dim, N), 1, opt.seed);
  }();
  std::vector<Report> reports;
  for (const auto& phi : battery(opt)) {
    Report rep;
    rep.name = "hnorm";
    rep.config["phi"] = phi.describe();
    rep.grid_sizes = {f.grid().modes_per_axis()};
    std::vector<double> norms;
    for (int k = 0; k < f.p(); ++k) norms.push_back(hnorm(f[k], phi));
    rep.constants["component_norms"] = norms;
    for (int k = 0; k < f.p(); ++k)
      std::cout << "|w_" << (k + 1) << "|_{" << phi.describe()
                << "} = " << format_norm(norms[k]) << "\n";
    reports.push_back(rep);
  }
  return finish("norm", reports, opt);
}

int run_apriori(const Options& opt) {
  const DNSystem sys = load_system(opt.system_file);
  const auto grids = grids_or(opt, {16, 32, 64});
  std::vector<Report> reports;
  for (const auto& phi : battery(opt))
    reports.push_back(apriori_check(sys, phi, opt.sigma, opt.trials, grids, opt.seed));
  return finish("apriori", reports, opt);
}

int run_regularity(const Options& opt) {
  const DNSystem sys = load_system(opt.system_file);
  RegularityOptions ro;
  ro.grid_sizes = grids_or(opt, {16, 32, 64});
  ro.project = opt.project;
  ro.seed = opt.seed;
  std::vector<Report> reports;
  for (const auto& phi : battery(opt)) reports.push_back(regularity_check(sys, phi, ro));
  return finish("regularity", reports, opt);
}

int run_continuity(const Options& opt) {
  const DNSystem sys = load_system(opt.system_file);
  const auto grids = grids_or(opt, {16, 32, 64});
  std::vector<Report> reports;
  for (const auto& phi : battery(opt))
    reports.push_back(
        continuity_check(sys, phi, opt.lambda, opt.component - 1, grids, opt.seed));
  return finish("continuity", reports, opt);
}

int run_fredholm(const Options& opt) {
  const DNSystem sys = load_system(opt.system_file);
  const Grid grid(sys.n, grids_or(opt, {16}).front());
  const auto phis = battery(opt);
  return finish("fredholm", {fredholm_report(sys, grid, phis, opt.trials, opt.seed)}, opt);
}

int run_interp_verify(const Options& opt) {
  std::vector<Report> reports;
  const auto grids = grids_or(opt, {16, 32});
  for (const auto& phi : battery(opt)) {
    double s0 = opt.s0, s1 = opt.s1;
    if (s0 == 0.0 && s1 == 0.0) {
      // bracket the declared indices with unit margin
      const double lo = phi.declared_sigma0().value_or(0.0);
      const double hi = phi.declared_sigma1().value_or(0.0);
      s0 = lo - 1.0;
      s1 = hi + 1.0;
    }
    for (int N : grids)
      reports.push_back(verify_prop1(phi, s0, s1, opt.trials, Grid(2, N), opt.seed));
  }
  return finish("interp-verify", reports, opt);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral verification of Douglis-Nirenberg elliptic systems in weighted Hormander-type spaces"};
  app.require_subcommand(1);

  Options opt;
  app.add_option("--threads", opt.threads, "worker threads (results are bit-identical for any count)");

  auto add_common = [&](CLI::App* sub, bool with_system) {
    if (with_system)
      sub->add_option("system", opt.system_file, "system JSON file");
    sub->add_option("--phi", opt.phis, "weight parameter spec, e.g. power:1.5 or powerlog:0,1")
        ->take_all();
    sub->add_option("--grid", opt.grids, "modes per axis (repeatable)")->take_all();
    sub->add_option("--trials", opt.trials, "random trials");
    sub->add_option("--seed", opt.seed, "RNG seed");
    sub->add_option("--tolerance", opt.tolerance, "margin tolerance");
    sub->add_option("--report", opt.report_path, "write the JSON report here");
  };

  auto* dn = app.add_subcommand("dn-numbers", "solve for the DN number vectors (l, m)");
  dn->add_option("--orders", opt.orders, "order matrix as JSON, e.g. [[2,1],[1,0]]");
  add_common(dn, true);

  auto* elliptic = app.add_subcommand("check-elliptic", "uniform ellipticity margin (condition ii)");
  add_common(elliptic, true);

  auto* condb = app.add_subcommand("check-condition-b", "full-symbol margin of condition b");
  condb->add_option("--c2", opt.c2, "sample restriction |x|+|xi| >= c2");
  add_common(condb, true);

  auto* norm = app.add_subcommand("norm", "weighted norms of a stored or random field");
  norm->add_option("--field", opt.field_path, "binary field file");
  add_common(norm, false);

  auto* apriori = app.add_subcommand("apriori", "theorem 1 a priori estimate");
  apriori->add_option("--sigma", opt.sigma, "lower-order shift sigma > 0");
  add_common(apriori, true);

  auto* regularity = app.add_subcommand("regularity", "theorem 2 regularity lifting");
  regularity->add_flag("--project", opt.project, "project unsolvable content");
  add_common(regularity, true);

  auto* continuity = app.add_subcommand("continuity", "theorem 3 derivative continuity");
  continuity->add_option("--lambda", opt.lambda, "derivative order");
  continuity->add_option("--component", opt.component, "solution component (1-based)");
  add_common(continuity, true);

  auto* fredholm = app.add_subcommand("fredholm", "theorem 4 kernel/solvability analysis");
  add_common(fredholm, true);

  auto* interp = app.add_subcommand("interp-verify", "proposition 1 norm equality");
  interp->add_option("--s0", opt.s0, "lower Sobolev exponent");
  interp->add_option("--s1", opt.s1, "upper Sobolev exponent");
  add_common(interp, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  set_thread_count(opt.threads);
  try {
    if (dn->parsed()) return run_dn_numbers(opt);
    if (elliptic->parsed()) return run_check_elliptic(opt);
    if (condb->parsed()) return run_check_condition_b(opt);
    if (norm->parsed()) return run_norm(opt);
    if (apriori->parsed()) return run_apriori(opt);
    if (regularity->parsed()) return run_regularity(opt);
    if (continuity->parsed()) return run_continuity(opt);
    if (fredholm->parsed()) return run_fredholm(opt);
    if (interp->parsed()) return run_interp_verify(opt);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
