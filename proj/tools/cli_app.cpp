#include "cli_app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <variant>

#include "qsm/acceptance.hpp"
#include "qsm/dev.hpp"
#include "qsm/errors.hpp"
#include "qsm/ising_chain.hpp"
#include "qsm/kernels.hpp"
#include "qsm/oracles.hpp"
#include "qsm/spherical.hpp"
#include "qsm/toeplitz.hpp"

#ifndef QSM_VERSION
#define QSM_VERSION "0.0.0"
#endif

namespace qsm::cli {

namespace {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Column {
  std::string name;
  std::string unit;
};

struct Table {
  std::string command;
  std::vector<std::pair<std::string, Cell>> config;
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;
  int exit_code = kOk;
};

std::string format_double(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

std::string to_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

nlohmann::json to_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  return std::get<std::string>(c);
}

void write_csv(const Table& t, std::ostream& os) {
  os << "# qsm " << QSM_VERSION << "\n";
  os << "# command: " << t.command << "\n";
  for (const auto& [key, value] : t.config) os << "# " << key << " = " << to_text(value) << "\n";
  os << "# units:";
  for (const auto& c : t.columns) os << " " << c.name << " [" << (c.unit.empty() ? "1" : c.unit) << "]";
  os << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i].name;
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << to_text(row[i]);
    os << "\n";
  }
}

void write_json(const Table& t, std::ostream& os) {
  nlohmann::ordered_json doc;
  doc["tool"] = "qsm";
  doc["version"] = QSM_VERSION;
  doc["command"] = t.command;
  doc["config"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : t.config) doc["config"][key] = to_json(value);
  doc["columns"] = nlohmann::ordered_json::array();
  for (const auto& c : t.columns) doc["columns"].push_back({{"name", c.name}, {"unit", c.unit}});
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r;
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i].name] = to_json(row[i]);
    doc["rows"].push_back(std::move(r));
  }
  os << doc.dump(2) << "\n";
}

struct Grid {
  std::vector<double> points;
};

// LO:HI:COUNT, evenly spaced and inclusive.
Grid parse_scan(const std::string& text) {
  double lo = 0.0, hi = 0.0;
  long count = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%ld%c", &lo, &hi, &count, &tail) != 3 || count < 1 || !(lo <= hi))
    throw InvalidArgument("--scan expects LO:HI:COUNT with LO <= HI and COUNT >= 1, got '" + text + "'");
  Grid g;
  for (long i = 0; i < count; ++i) g.points.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  return g;
}

// Evaluates the rows of a scan concurrently; rows stay in grid order.
template <class Fn>
std::vector<std::vector<Cell>> scan_rows(const std::vector<double>& grid, Fn&& fn) {
  const auto n = static_cast<std::int64_t>(grid.size());
  std::vector<std::vector<Cell>> rows(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      rows[i] = fn(grid[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

struct Options {
  std::string out_path;
  std::string format = "csv";
  int threads = 0;
  std::uint64_t seed = 0;
  std::string fault = "none";

  double J = 1.0;
  double B = 0.0;
  double H = 0.0;
  double beta = 1.0;
  int d = 1;
  bool ground = false;
  std::string mode = "limit";
  std::string scan;

  double k = 0.0;
  int n_max = 20;

  int L = 0;
  std::int64_t samples = 1'000'000;
  std::int64_t batch_size = 10'000;
  double tol = 0.0;

  std::string filter;
};

Table tfim_free_energy(const Options& o) {
  Table t;
  t.command = "tfim free-energy";
  t.config = {{"J", o.J}, {"B", o.B}, {"beta", o.ground ? Cell{"inf"} : Cell{o.beta}}, {"scan", o.scan}};
  t.columns = {{"J", "energy"}, {"B", "energy"}, {"beta", "1/energy"}, {"f", "energy"}, {"err_est", "energy"}, {"method", ""}};
  const std::vector<double> grid = o.scan.empty() ? std::vector<double>{o.B} : parse_scan(o.scan).points;
  for (double B : grid) ising::IsingParams{o.J, B, o.ground ? 1.0 : o.beta}.validate();
  t.rows = scan_rows(grid, [&](double B) -> std::vector<Cell> {
    if (o.ground) {
      const auto r = ising::ground_energy(o.J, B);
      return {o.J, B, std::string("inf"), r.value, r.err_est, std::string(to_string(r.method))};
    }
    const auto r = ising::free_energy({o.J, B, o.beta});
    return {o.J, B, o.beta, r.value, r.err_est, std::string(to_string(r.method))};
  });
  return t;
}

Table tfim_correlation(const Options& o) {
  toeplitz::CorrelationQuery{o.k, o.n_max}.validate();
  Table t;
  t.command = "tfim correlation";
  t.config = {{"k", o.k}, {"n_max", std::int64_t{o.n_max}}};
  t.columns = {{"n", "sites"}, {"det_value", ""}, {"szego_limit", ""}};
  for (const auto& r : toeplitz::correlation_sequence(o.k, o.n_max))
    t.rows.push_back({std::int64_t{r.n}, r.det_value, r.szego_limit});
  return t;
}

spherical::Spectrum make_spectrum(const std::string& mode, int d) {
  if (mode == "limit") return spherical::Spectrum::limit(d);
  if (mode.rfind("finite:", 0) == 0) {
    int L = 0;
    char tail = 0;
    if (std::sscanf(mode.c_str() + 7, "%d%c", &L, &tail) != 1) throw InvalidArgument("--mode finite:L needs an integer L");
    return spherical::Spectrum::finite(spherical::LatticeSpec::make(d, L));
  }
  throw InvalidArgument("--mode must be 'limit' or 'finite:L', got '" + mode + "'");
}

std::string status_name(bool edge) { return edge ? "edge" : "interior"; }

Table spherical_command(const Options& o) {
  Table t;
  t.command = "spherical";
  t.config = {{"J", o.J}, {"B", o.B}, {"H", o.H}, {"d", std::int64_t{o.d}},
              {"beta", o.ground ? Cell{"inf"} : Cell{o.beta}}, {"mode", o.ground ? "ground" : o.mode}, {"scan", o.scan}};
  t.columns = {{"B", "energy"}, {"H", "energy"}, {"beta", "1/energy"}, {"w0", ""}, {"f", "energy"}, {"status", ""}};
  const std::vector<double> grid = o.scan.empty() ? std::vector<double>{o.B} : parse_scan(o.scan).points;
  for (double B : grid) spherical::SphericalParams{o.J, B, o.H, o.d, o.ground ? 1.0 : o.beta}.validate();

  if (o.ground) {
    t.rows = scan_rows(grid, [&](double B) -> std::vector<Cell> {
      const auto g = spherical::ground_energy(o.J, B, o.H, o.d);
      return {B, o.H, std::string("inf"), g.u0 - o.d, g.energy, status_name(g.at_edge)};
    });
    return t;
  }
  const auto spectrum = make_spectrum(o.mode, o.d);
  t.rows = scan_rows(grid, [&](double B) -> std::vector<Cell> {
    const auto s = spherical::solve_saddle({o.J, B, o.H, o.d, o.beta}, spectrum);
    return {B, o.H, o.beta, s.w0, s.f_per_site, status_name(s.status == spherical::SaddleStatus::edge)};
  });
  return t;
}

Table oracle_tfim_ed(const Options& o) {
  const int L = o.L > 0 ? o.L : 12;
  const double tol = o.tol > 0.0 ? o.tol : 5e-3;
  const oracles::ChainSpec chain{L, o.J, o.B, o.beta};
  chain.validate();
  ising::IsingParams{o.J, std::abs(o.B), o.beta}.validate();

  Table t;
  t.command = "oracle tfim-ed";
  t.config = {{"L", std::int64_t{L}}, {"J", o.J}, {"B", o.B}, {"beta", o.beta}, {"tol", tol}};
  t.columns = {{"L", "sites"},       {"f_ed", "energy"}, {"f_chain", "energy"}, {"abs_diff", "energy"},
               {"tol", "energy"},    {"verdict", ""}};
  const double f_ed = oracles::ed_free_energy(chain);
  const double f_chain = ising::free_energy({o.J, std::abs(o.B), o.beta}).value;
  const double diff = std::abs(f_ed - f_chain);
  const bool pass = diff <= tol;
  t.rows.push_back({std::int64_t{L}, f_ed, f_chain, diff, tol, std::string(pass ? "pass" : "fail")});
  t.exit_code = pass ? kOk : kOracleMismatch;
  return t;
}

// Both spherical oracles report the same comparison; they differ in which
// estimate is the value and which is the reference.
Table oracle_spherical(const Options& o, bool mc_is_value) {
  const int L = o.L > 0 ? o.L : 4;
  const double tol = o.tol > 0.0 ? o.tol : 1e-2;
  const spherical::SphericalParams params{o.J, o.B, o.H, o.d, o.beta};
  oracles::validate_oracle_params(params);
  const auto lattice = spherical::LatticeSpec::make(o.d, L);
  oracles::MCSpec mc;
  mc.samples = o.samples;
  mc.batch_size = o.batch_size;
  mc.stream = numerics::RandomStream(o.seed, 0);
  mc.validate();

  Table t;
  t.command = mc_is_value ? "oracle spherical-mc" : "oracle spherical-contour";
  t.config = {{"J", o.J}, {"B", o.B}, {"H", o.H}, {"d", std::int64_t{o.d}}, {"L", std::int64_t{L}},
              {"beta", o.beta}, {"samples", o.samples}, {"batch_size", o.batch_size},
              {"seed", static_cast<std::int64_t>(o.seed)}, {"tol", tol}};
  t.columns = {{"N", "sites"},  {"log_Z_contour", ""}, {"contour_err", ""}, {"log_Z_mc", ""}, {"mc_std_err", ""},
               {"abs_diff", ""}, {"three_sigma", ""},  {"tol", ""},         {"verdict", ""}};

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const bool mc_possible = lattice.N <= 64;
  if (mc_is_value && !mc_possible) throw DimensionCap("sphere Monte Carlo is limited to N <= 64 sites");

  const auto contour = oracles::contour_partition(params, lattice);
  if (!mc_possible) {
    t.rows.push_back({lattice.N, contour.log_Z, contour.err_est, nan, nan, nan, nan, tol, std::string("n/a")});
    return t;
  }
  const auto sample = oracles::sphere_mc_partition(params, lattice, mc);
  const double diff = std::abs(contour.log_Z - sample.log_Z);
  const double three_sigma = 3.0 * std::hypot(contour.err_est, sample.std_err);
  std::string verdict = "inconclusive";
  if (three_sigma <= tol) {
    verdict = diff <= three_sigma ? "pass" : "fail";
    if (verdict == "fail") t.exit_code = kOracleMismatch;
  }
  t.rows.push_back({lattice.N, contour.log_Z, contour.err_est, sample.log_Z, sample.std_err, diff, three_sigma, tol, verdict});
  return t;
}

int check_command(const Options& o, std::ostream& out) {
  int failed = 0;
  const auto results = acceptance::run(o.filter, [&](const acceptance::CriterionResult& r) {
    out << acceptance::format_line(r) << std::endl;
    if (!r.passed) ++failed;
  });
  if (results.empty()) throw InvalidArgument("no acceptance criterion matches filter '" + o.filter + "'");
  out << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
  return failed == 0 ? kOk : kCheckFailed;
}

void add_chain_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--J", o.J, "Coupling J")->capture_default_str();
  cmd->add_option("--B", o.B, "Transverse field B")->capture_default_str();
  cmd->add_option("--beta", o.beta, "Inverse temperature")->capture_default_str();
}

class FaultGuard {
 public:
  explicit FaultGuard(dev::Fault f) { dev::inject(f); }
  ~FaultGuard() { dev::inject(dev::Fault::none); }
  FaultGuard(const FaultGuard&) = delete;
  FaultGuard& operator=(const FaultGuard&) = delete;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Transverse-field Ising chain and quantum spherical model calculator", "qsm"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", QSM_VERSION);
  app.add_option("--out", o.out_path, "Write the table to PATH instead of stdout");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--threads", o.threads, "Worker threads (0: all cores)")->envname("QSM_THREADS")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", o.seed, "Monte Carlo seed")->capture_default_str();
  app.add_option("--inject-fault", o.fault, "Development only")->group("");

  auto* tfim = app.add_subcommand("tfim", "Transverse-field Ising chain");
  tfim->require_subcommand(1);
  auto* tfim_fe = tfim->add_subcommand("free-energy", "Free energy per site, or the ground energy with --ground");
  add_chain_options(tfim_fe, o);
  tfim_fe->add_flag("--ground", o.ground, "Zero-temperature energy");
  tfim_fe->add_option("--scan", o.scan, "Scan B over LO:HI:COUNT");
  auto* tfim_corr = tfim->add_subcommand("correlation", "s^x s^x correlation at separations 1..n-max");
  tfim_corr->add_option("--k", o.k, "Field ratio B / J")->capture_default_str();
  tfim_corr->add_option("--n-max", o.n_max, "Largest separation (<= 256)")->capture_default_str();

  auto* sph = app.add_subcommand("spherical", "Quantum spherical model by steepest descent");
  add_chain_options(sph, o);
  sph->add_option("--H", o.H, "Longitudinal field H")->capture_default_str();
  sph->add_option("--d", o.d, "Lattice dimension")->capture_default_str();
  sph->add_flag("--ground", o.ground, "Zero-temperature energy");
  sph->add_option("--mode", o.mode, "Spectrum: limit or finite:L")->capture_default_str();
  sph->add_option("--scan", o.scan, "Scan B over LO:HI:COUNT");

  auto* oracle = app.add_subcommand("oracle", "Independent finite-size reference computations");
  oracle->require_subcommand(1);
  auto* ed = oracle->add_subcommand("tfim-ed", "Exact diagonalisation of a periodic chain");
  add_chain_options(ed, o);
  ed->add_option("--L", o.L, "Chain length, 4..12 (default 12)");
  ed->add_option("--tol", o.tol, "Agreement tolerance (default 5e-3)");
  auto* contour = oracle->add_subcommand("spherical-contour", "Exact contour integral for log Z_N, checked against Monte Carlo");
  auto* mc = oracle->add_subcommand("spherical-mc", "Monte Carlo on the constraint sphere, checked against the contour integral");
  for (auto* cmd : {contour, mc}) {
    add_chain_options(cmd, o);
    cmd->add_option("--H", o.H, "Longitudinal field H")->capture_default_str();
    cmd->add_option("--d", o.d, "Lattice dimension")->capture_default_str();
    cmd->add_option("--L", o.L, "Side length (default 4)");
    cmd->add_option("--samples", o.samples, "Monte Carlo samples")->capture_default_str();
    cmd->add_option("--batch-size", o.batch_size, "Monte Carlo batch size")->capture_default_str();
    cmd->add_option("--tol", o.tol, "3-sigma width above which the comparison is inconclusive (default 1e-2)");
  }

  auto* check = app.add_subcommand("check", "Run the acceptance suite");
  check->add_option("--filter", o.filter, "Only criteria whose name or tag contains this text");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const auto fault = dev::parse_fault(o.fault);
  if (!fault) {
    err << "error: unknown fault '" << o.fault << "'\n";
    return kUsage;
  }
  FaultGuard guard(*fault);
  kernels::set_thread_count(o.threads);

  try {
    std::ofstream file;
    std::ostream* sink = &out;
    if (!o.out_path.empty()) {
      file.open(o.out_path);
      if (!file) throw InvalidArgument("cannot open output file '" + o.out_path + "'");
      sink = &file;
    }
    if (check->parsed()) return check_command(o, *sink);

    Table table;
    if (tfim_fe->parsed()) table = tfim_free_energy(o);
    else if (tfim_corr->parsed()) table = tfim_correlation(o);
    else if (sph->parsed()) table = spherical_command(o);
    else if (ed->parsed()) table = oracle_tfim_ed(o);
    else if (contour->parsed()) table = oracle_spherical(o, false);
    else table = oracle_spherical(o, true);

    table.config.insert(table.config.begin(), {"threads", std::int64_t{kernels::thread_count()}});
    if (o.format == "json") write_json(table, *sink);
    else write_csv(table, *sink);
    if (table.exit_code == kOracleMismatch) err << "oracle mismatch\n";
    return table.exit_code;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNonConvergence;
  }
}

}  // namespace qsm::cli
