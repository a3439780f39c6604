// dfs: experiment runner for discrete fermion systems.
//
//   dfs critical    --m M [--restarts R --seed S ...]
//   dfs constrained --m M --f F (--kappa-min | --kappa K | --sweep a:b:n) [--pf] [--analyze]
//   dfs oracle NAME [--kappa K --theta T --alpha A --m M --mu MU --phi-sign +-1]
//   dfs analyze PSI.json
//
// Every command writes its fully resolved configuration to config.json in the
// output directory; `--config that/config.json` repeats the run. Output
// directory: --output-dir, else $DFS_OUTPUT_DIR, else ./dfs-out.
// Exit codes: 0 success, 1 usage error, 2 validation error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dfs/bloch.hpp"
#include "dfs/causal.hpp"
#include "dfs/closedform.hpp"
#include "dfs/constrained.hpp"
#include "dfs/critical.hpp"
#include "dfs/io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using dfs::io::format_number;

namespace {

constexpr const char* kConfigFormat = "dfsys.config/1";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Options that may also come from a JSON config file. Flags given on the
// command line win over the file.
class Params {
 public:
  explicit Params(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& key, T& var, const std::string& help) {
    CLI::Option* opt = app_->add_option("--" + key, var, help)->capture_default_str();
    entries_.push_back({key, opt, [&var, key](const json& j) {
                          try {
                            var = j.get<T>();
                          } catch (const json::exception&) {
                            throw UsageError("config: wrong type for '" + key + "'");
                          }
                        },
                        [&var] { return json(var); }});
    return opt;
  }

  CLI::Option* flag(const std::string& key, bool& var, const std::string& help) {
    CLI::Option* opt = app_->add_flag("--" + key, var, help);
    entries_.push_back({key, opt, [&var, key](const json& j) {
                          if (!j.is_boolean()) throw UsageError("config: '" + key + "' must be boolean");
                          var = j.get<bool>();
                        },
                        [&var] { return json(var); }});
    return opt;
  }

  void apply_config(const json& cfg) {
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
      if (it.key() == "format" || it.key() == "command") continue;
      auto e = std::find_if(entries_.begin(), entries_.end(),
                            [&](const Entry& x) { return x.key == it.key(); });
      if (e == entries_.end()) throw UsageError("config: unknown key '" + it.key() + "'");
      if (e->opt->count() == 0) e->set(it.value());
    }
  }

  json resolved(const std::string& command) const {
    json j;
    j["format"] = kConfigFormat;
    j["command"] = command;
    for (const Entry& e : entries_) j[e.key] = e.get();
    return j;
  }

 private:
  struct Entry {
    std::string key;
    CLI::Option* opt;
    std::function<void(const json&)> set;
    std::function<json()> get;
  };
  CLI::App* app_;
  std::vector<Entry> entries_;
};

json load_config(const std::string& path, const std::string& command) {
  json cfg;
  try {
    cfg = json::parse(dfs::io::read_file(path));
  } catch (const json::parse_error& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config " + path + ": top level must be an object");
  if (cfg.contains("format") && cfg["format"] != kConfigFormat) {
    throw UsageError("config " + path + ": unsupported format " + cfg["format"].dump());
  }
  if (cfg.contains("command") && cfg["command"] != command) {
    throw UsageError("config " + path + " is for command " + cfg["command"].dump());
  }
  return cfg;
}

class Output {
 public:
  void open(const std::string& dir) {
    dir_ = dir;
    fs::create_directories(dir_);
  }
  fs::path path(const std::string& name) const { return dir_ / name; }
  void write(const std::string& name, const std::string& content) {
    const fs::path p = path(name);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    dfs::io::write_file(p.string(), content);
    written_.push_back(p.string());
  }
  void report() const {
    for (const auto& p : written_) std::cout << "wrote " << p << '\n';
  }

 private:
  fs::path dir_;
  std::vector<std::string> written_;
};

std::string default_output_dir() {
  if (const char* env = std::getenv("DFS_OUTPUT_DIR"); env && *env) return env;
  return "dfs-out";
}

std::string causal_report(const dfs::FermionMatrix& psi) {
  return dfs::causal_matrix(dfs::operator_from_columns(psi)).to_csv();
}

void write_system(Output& out, const std::string& stem, const dfs::FermionMatrix& psi) {
  out.write(stem + ".json", dfs::io::fermion_matrix_to_json(psi));
  const auto p = dfs::operator_from_columns(psi);
  const auto cm = dfs::causal_matrix(p);
  out.write(stem + "_causal.csv", cm.to_csv());
  out.write(stem + "_causal.json", cm.to_json() + "\n");
  if (psi.particles() == 2) {
    out.write(stem + "_bloch.csv", dfs::io::bloch_csv(dfs::bloch_configuration(psi)));
  }
}

// --- critical -----------------------------------------------------------------

struct CriticalArgs {
  int m = 0;
  int f = 2;
  double mu = 0.5;
  int restarts = 0;
  std::uint64_t seed = 0;
  int workers = 0;
  bool logs = true;
  dfs::critical::PenaltySchedule schedule{};
};

int run_critical(const CriticalArgs& a, Output& out) {
  if (a.m < 1) throw UsageError("critical: --m must be >= 1");
  if (a.f < 1 || a.f > 2) throw UsageError("critical: --f must be 1 or 2");
  if (a.m == 1) {
    // a single point carries one chain A = P; S_mu = f - mu f^2 with f <= m = 1
    const double s = 1.0 - a.mu;
    std::cout << "m = 1: the only closed chain is A = P, so the variational principle is trivial.\n"
              << "No two-particle system exists on one point; for f = 1, S_mu = f - mu f^2 = "
              << format_number(s) << ".\n";
    json j{{"m", 1}, {"trivial", true}, {"f", 1}, {"mu", a.mu}, {"action", s}};
    out.write("summary.json", j.dump(2) + "\n");
    return 0;
  }
  if (a.f == 2 && a.mu != 0.5) {
    throw UsageError("critical: the two-particle optimizer implements mu = 1/2 only");
  }
  if (a.f == 1 && !(a.mu < 1.0)) {
    throw UsageError("critical: for f = 1 the action is unbounded below unless mu < 1");
  }
  if (a.f > a.m) throw UsageError("critical: need f <= m");

  dfs::critical::MultiStartOptions opt;
  opt.restarts = a.restarts;
  opt.seed = a.seed;
  opt.workers = a.workers;
  opt.schedule = a.schedule;
  const auto res = a.f == 2 ? dfs::critical::multi_start(a.m, opt)
                            : dfs::critical::multi_start_one_particle(a.m, a.mu, opt);

  out.write("results.csv", res.results_csv(a.m));
  if (a.logs) {
    for (const auto& r : res.runs) {
      char name[64];
      std::snprintf(name, sizeof name, "logs/restart_%04d.jsonl", r.restart);
      out.write(name, r.log_jsonl());
    }
  }
  int feasible = 0;
  for (const auto& r : res.runs) feasible += r.feasible ? 1 : 0;

  json summary;
  summary["m"] = a.m;
  summary["f"] = a.f;
  summary["mu"] = a.mu;
  summary["restarts"] = res.runs.size();
  summary["feasible_runs"] = feasible;
  if (res.best < 0) {
    std::cout << "no restart reached the feasibility threshold (" << res.runs.size()
              << " runs); see results.csv\n";
    summary["best_action"] = nullptr;
    out.write("summary.json", summary.dump(2) + "\n");
    return 0;
  }
  const auto& best = res.best_run();
  summary["best_action"] = best.action;
  summary["best_restart"] = best.restart;
  summary["best_seed"] = best.seed;
  std::cout << "m = " << a.m << ", f = " << a.f << ": best action " << format_number(best.action)
            << " (restart " << best.restart << ", seed " << best.seed << "), " << feasible << "/"
            << res.runs.size() << " runs feasible\n";
  write_system(out, "best_psi", best.psi);
  std::cout << "causal matrix of the best minimizer:\n" << causal_report(best.psi);
  if (a.f == 2) {
    const auto classes = dfs::critical::distinct_minimizers(res, 1e-6, 1e-4);
    json cl = json::array();
    for (const auto& c : classes) cl.push_back({{"restarts", c.restarts}, {"fingerprint", c.fingerprint}});
    summary["distinct_minimizers"] = cl;
    std::cout << classes.size() << " Gram-distinct Bloch configuration(s) within 1e-6 of the best action\n";
  }
  out.write("summary.json", summary.dump(2) + "\n");
  return 0;
}

// --- constrained ----------------------------------------------------------------

struct ConstrainedArgs {
  int m = 0;
  int f = 2;
  bool kappa_min = false;
  double kappa = std::nan("");
  std::string sweep;
  bool pf = false;
  bool analyze = false;
  std::uint64_t seed = 0;
  int restarts = 4;
  int neighbors = 64;
  long budget = 1000000;
  std::string normalization = "retraction";
  double l_norm = 1000.0;
  double l_orth = 1000.0;
  double l_side = 1.0;
};

std::vector<double> parse_sweep(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("--sweep expects a:b:n");
  double a = 0.0;
  double b = 0.0;
  int n = 0;
  try {
    a = std::stod(parts[0]);
    b = std::stod(parts[1]);
    n = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw UsageError("--sweep expects numbers a:b:n");
  }
  if (n < 1) throw UsageError("--sweep needs n >= 1");
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return out;
}

dfs::constrained::SearchConfig search_config(const ConstrainedArgs& a) {
  dfs::constrained::SearchConfig cfg;
  cfg.seed = a.seed;
  cfg.restarts = a.restarts;
  cfg.descent.neighbors = a.neighbors;
  cfg.budget = a.budget;
  if (a.normalization == "retraction") {
    cfg.normalization = dfs::constrained::Normalization::Retraction;
  } else if (a.normalization == "penalty") {
    cfg.normalization = dfs::constrained::Normalization::Penalty;
  } else {
    throw UsageError("--normalization must be 'retraction' or 'penalty'");
  }
  cfg.weights = {a.l_norm, a.l_orth, a.l_side};
  if (cfg.restarts < 1 || a.neighbors < 1 || a.budget < 1) {
    throw UsageError("restarts, neighbors and budget must be >= 1");
  }
  return cfg;
}

void print_analysis(const dfs::FermionMatrix& psi) {
  std::cout << "causal matrix:\n" << causal_report(psi);
  if (psi.particles() == 2) {
    std::cout << "Bloch data:\n" << dfs::io::bloch_csv(dfs::bloch_configuration(psi));
  }
}

int run_constrained(const ConstrainedArgs& a, Output& out) {
  if (a.m < 1 || a.f < 1 || a.f > a.m) throw UsageError("constrained: need 1 <= f <= m");
  const int modes = (a.kappa_min ? 1 : 0) + (std::isnan(a.kappa) ? 0 : 1) + (a.sweep.empty() ? 0 : 1);
  if (modes != 1) throw UsageError("constrained: give exactly one of --kappa-min, --kappa, --sweep");
  const auto cfg = search_config(a);
  namespace dc = dfs::constrained;

  if (a.kappa_min) {
    const auto r = dc::kappa_min(a.m, a.f, cfg);
    std::cout << "kappa_min(m = " << a.m << ", f = " << a.f << ") = " << format_number(r.value)
              << " (normalization defect " << format_number(r.normalization_defect) << ")\n";
    const auto z = dc::minimize_Z(a.m, a.f, r.value, cfg, r.psi.entries());
    std::cout << "Z at kappa_min = " << format_number(z.z) << "\n";
    json j{{"m", a.m}, {"f", a.f}, {"kappa_min", r.value}, {"Z_at_kappa_min", z.z},
           {"seed", r.seed}, {"evals", r.evaluations}, {"feasible", r.feasible}};
    out.write("kappa_min.json", j.dump(2) + "\n");
    write_system(out, "kappa_min_psi", r.psi);
    if (a.analyze) print_analysis(r.psi);
    return 0;
  }

  const std::vector<double> grid = a.sweep.empty() ? std::vector<double>{a.kappa} : parse_sweep(a.sweep);
  std::vector<dc::SweepRow> rows;
  std::vector<dc::SweepRow> pf_rows;
  json dominance = json::array();
  std::optional<dfs::FermionMatrix> last;
  for (const double k : grid) {
    const auto r = dc::minimize_Z(a.m, a.f, k, cfg);
    rows.push_back({a.m, a.f, k, r.z, r.constraint_residual, r.feasible, r.seed, r.evaluations, "projector"});
    std::cout << "kappa " << format_number(k) << ": Z = " << format_number(r.z) << ", residual "
              << format_number(r.constraint_residual) << (r.feasible ? "" : " (infeasible)");
    if (a.pf) {
      const auto p = dc::minimize_Z_pf(a.m, a.f, k, cfg, r.psi.entries());
      pf_rows.push_back({a.m, a.f, k, p.z, p.constraint_residual, p.feasible, p.seed, p.evaluations, "pf"});
      const bool dom = p.z <= r.z + 1e-6;
      dominance.push_back({{"kappa", k}, {"Z", r.z}, {"Z_pf", p.z}, {"dominance", dom},
                           {"pf_is_projector", p.projector}});
      std::cout << ", Z_pf = " << format_number(p.z) << ", dominance " << (dom ? "true" : "false");
    }
    std::cout << '\n';
    last = r.psi;
  }
  out.write("sweep.csv", dc::sweep_csv(rows));
  if (a.pf) {
    out.write("sweep_pf.csv", dc::sweep_csv(pf_rows));
    std::ostringstream os;
    os << "kappa,Z,Z_pf,dominance\n";
    for (const auto& d : dominance) {
      os << format_number(d["kappa"].get<double>()) << ',' << format_number(d["Z"].get<double>()) << ','
         << format_number(d["Z_pf"].get<double>()) << ',' << (d["dominance"].get<bool>() ? "true" : "false")
         << '\n';
    }
    out.write("dominance.csv", os.str());
  }
  if (grid.size() == 1 && last) {
    write_system(out, "minimizer", *last);
    if (a.analyze) print_analysis(*last);
  }
  return 0;
}

// --- oracle ---------------------------------------------------------------------

struct OracleArgs {
  std::string name;
  double kappa = 2.0;
  double theta = 0.0;
  double alpha = 0.4;
  double mu = 0.0;
  int m = 2;
  int phi_sign = 1;
};

void print_system(const std::string& label, const dfs::FermionMatrix& psi) {
  const auto p = dfs::operator_from_columns(psi);
  std::cout << label << ": S_1/2 = " << format_number(dfs::action(p, 0.5))
            << ", kappa = " << format_number(dfs::constraint_value(p))
            << ", Z = " << format_number(dfs::target_value(p)) << '\n';
}

const std::map<std::string, std::string>& oracle_help() {
  static const std::map<std::string, std::string> names{
      {"one-particle", "one-particle minimizer (--m, --mu)"},
      {"two-point-critical", "two-point critical minimizer"},
      {"two-point-symmetric", "two-point symmetric family (--theta)"},
      {"two-point-constrained", "two-point constrained minimizer (--kappa >= 2)"},
      {"three-point-family", "S3-symmetric three-point family (--theta)"},
      {"three-point-constrained", "S3-symmetric constrained system (--kappa >= 2/3)"},
      {"four-point", "A4-symmetric tetrahedral system (--phi-sign +1/-1)"},
      {"five-point", "five-point Bloch family (--alpha in (0, 2/3))"},
      {"five-point-optimum", "optimal five-point parameter"},
      {"witness-mu-above-half", "two-particle divergence witness (--alpha, --mu, --m)"},
      {"witness-one-particle", "one-particle divergence witness (--alpha, --mu, --m)"},
      {"nonunique", "three-point family with alpha-independent Bloch data (--alpha)"},
  };
  return names;
}

int run_oracle(const OracleArgs& a, Output& out) {
  namespace cf = dfs::closedform;
  const auto& names = oracle_help();
  if (names.find(a.name) == names.end()) {
    std::ostringstream os;
    os << "unknown oracle '" << a.name << "'; available:\n";
    for (const auto& [k, v] : names) os << "  " << k << "  " << v << '\n';
    throw UsageError(os.str());
  }
  json j{{"name", a.name}};
  std::optional<dfs::FermionMatrix> psi;
  const std::string& n = a.name;
  if (n == "one-particle") {
    const auto r = cf::one_particle_minimizer(a.m, a.mu);
    std::cout << "one-particle minimizer, m = " << a.m << ", mu = " << format_number(a.mu)
              << ": S_mu = (1 - mu)/m^2 = " << format_number(r.action) << ", rho_x = "
              << format_number(1.0 / a.m) << '\n';
    j["action"] = r.action;
    psi = r.psi;
  } else if (n == "two-point-critical") {
    psi = cf::two_point_critical();
    print_system("two-point critical", *psi);
    j["action"] = dfs::action(dfs::operator_from_columns(*psi), 0.5);
  } else if (n == "two-point-symmetric") {
    psi = cf::two_point_symmetric_family(a.theta);
    print_system("two-point symmetric family", *psi);
  } else if (n == "two-point-constrained") {
    const auto r = cf::two_point_constrained(a.kappa);
    std::cout << "kappa = " << format_number(a.kappa) << ": Bloch length " << format_number(r.v)
              << ", Z = sqrt(kappa - 1) + kappa/2 = " << format_number(r.target) << ", mu = "
              << format_number(r.mu) << ", theta = " << format_number(r.theta) << '\n'
              << "stationarity residual dS_mu/dv = "
              << format_number(cf::two_point_symmetric_action_derivative(r.v, r.mu)) << '\n';
    j["target"] = r.target;
    j["mu"] = r.mu;
    j["v"] = r.v;
    psi = r.psi;
  } else if (n == "three-point-family") {
    psi = cf::three_point_family(a.theta);
    const double v = cf::three_point_bloch_length(a.theta);
    std::cout << "Bloch length " << format_number(v) << ", S(v) = "
              << format_number(cf::three_point_action(v)) << '\n';
    print_system("three-point family", *psi);
  } else if (n == "three-point-constrained") {
    const auto r = cf::three_point_constrained(a.kappa);
    std::cout << "kappa = " << format_number(a.kappa) << ": branch " << r.branch << ", Bloch length "
              << format_number(r.v) << ", Z = " << format_number(r.target)
              << ", off-diagonal pairs " << dfs::label_name(r.off_diagonal) << '\n';
    const double kc = cf::kThreePointCriticalKappa;
    if (std::abs(a.kappa - kc) < 1e-3) {
      const double z1 = cf::three_point_branch_one_target(kc);
      const double z2 = cf::three_point_branch_two_target(kc);
      std::cout << "branch boundary at kappa = 68/81: branch one Z = " << format_number(z1)
                << ", branch two Z = " << format_number(z2) << ", difference "
                << format_number(std::abs(z1 - z2)) << " (22/27 = " << format_number(22.0 / 27.0)
                << ")\n"
                << "with coefficient 8/81 the second branch would give "
                << format_number(cf::three_point_branch_two_target_alt(kc)) << '\n';
      j["branch_one_at_boundary"] = z1;
      j["branch_two_at_boundary"] = z2;
    }
    j["branch"] = r.branch;
    j["target"] = r.target;
    j["off_diagonal"] = dfs::label_name(r.off_diagonal);
    psi = r.psi;
  } else if (n == "four-point") {
    if (a.phi_sign != 1 && a.phi_sign != -1) throw UsageError("--phi-sign must be +1 or -1");
    psi = cf::four_point_family(a.phi_sign * 2.0 * cf::kPi / 3.0);
    print_system("tetrahedral system", *psi);
    std::cout << "orientation " << format_number(dfs::orientation_sign(dfs::bloch_configuration(*psi)))
              << '\n';
  } else if (n == "five-point") {
    const auto cfg = cf::five_point_bloch(a.alpha);
    psi = dfs::reconstruct_fermion_matrix(cfg);
    std::cout << "alpha = " << format_number(a.alpha) << ", beta = "
              << format_number(cf::five_point_beta(a.alpha))
              << ", S = " << format_number(cf::five_point_action(a.alpha)) << '\n';
    print_system("reconstructed system", *psi);
  } else if (n == "five-point-optimum") {
    const double alpha = cf::five_point_optimum();
    std::printf("alpha* = %.12g, beta* = %.12g, S = %.12g (bisection alpha* = %.12g)\n", alpha,
                cf::five_point_beta(alpha), cf::five_point_action(alpha),
                cf::five_point_optimum_numeric());
    j["alpha"] = alpha;
    j["action"] = cf::five_point_action(alpha);
    psi = dfs::reconstruct_fermion_matrix(cf::five_point_bloch(alpha));
  } else if (n == "witness-mu-above-half" || n == "witness-one-particle") {
    const auto kind = n == "witness-mu-above-half" ? cf::WitnessKind::MuAboveHalf
                                                    : cf::WitnessKind::OneParticleMuAboveOne;
    psi = cf::divergence_witness(kind, a.alpha, a.m);
    const double s = dfs::action(dfs::operator_from_columns(*psi), a.mu);
    std::cout << "alpha = " << format_number(a.alpha) << ", mu = " << format_number(a.mu)
              << ": S_mu = " << format_number(s) << '\n';
    j["action"] = s;
  } else if (n == "nonunique") {
    psi = cf::nonunique_family(a.alpha);
    std::cout << "Bloch data:\n" << dfs::io::bloch_csv(dfs::bloch_configuration(*psi));
    print_system("non-unique family", *psi);
  }
  if (psi) write_system(out, n, *psi);
  out.write(n + "_summary.json", j.dump(2) + "\n");
  return 0;
}

// --- analyze --------------------------------------------------------------------

int run_analyze(const std::string& file, Output& out) {
  const auto psi = dfs::io::fermion_matrix_from_json(dfs::io::read_file(file));
  psi.validate();
  const auto p = dfs::projector_from_fermion_matrix(psi);
  const auto defects = dfs::projector_defects(p, psi.particles());
  json j;
  j["m"] = psi.points();
  j["f"] = psi.particles();
  j["validation"] = {{"normalization", "ok"},
                     {"idempotence_defect", defects.idempotence},
                     {"self_adjoint_defect", defects.self_adjoint},
                     {"trace_error", defects.trace_error}};
  for (double mu : {0.0, 0.5, 1.0}) j["action"][format_number(mu)] = dfs::action(p, mu);
  j["kappa"] = dfs::constraint_value(p);
  j["Z"] = dfs::target_value(p);
  std::cout << "m = " << psi.points() << ", f = " << psi.particles() << ": normalization ok, "
            << "idempotence defect " << format_number(defects.idempotence) << '\n';
  std::cout << "S_0 = " << format_number(dfs::action(p, 0.0))
            << ", S_1/2 = " << format_number(dfs::action(p, 0.5))
            << ", S_1 = " << format_number(dfs::action(p, 1.0)) << '\n';
  std::cout << "kappa = " << format_number(dfs::constraint_value(p))
            << ", Z = " << format_number(dfs::target_value(p)) << '\n';
  const dfs::CMatrix gram = psi.gram();
  std::cout << "Gram matrix:\n" << dfs::io::complex_matrix_csv(gram);
  out.write("gram.csv", dfs::io::complex_matrix_csv(gram));
  const auto cm = dfs::causal_matrix(p);
  std::cout << "causal matrix:\n" << cm.to_csv();
  out.write("causal.csv", cm.to_csv());
  out.write("causal.json", cm.to_json() + "\n");
  if (psi.particles() == 2) {
    const auto cfg = dfs::bloch_configuration(psi);
    std::cout << "Bloch data:\n" << dfs::io::bloch_csv(cfg);
    out.write("bloch.csv", dfs::io::bloch_csv(cfg));
    out.write("bloch_gram.csv", dfs::io::matrix_csv(dfs::configuration_gram(cfg).gram));
  }
  out.write("analysis.json", j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for fermion systems in discrete space-time"};
  app.require_subcommand(1);
  app.fallthrough();  // -o may follow the subcommand
  std::string output_dir;
  app.add_option("--output-dir,-o", output_dir,
                 "output directory (default: $DFS_OUTPUT_DIR or ./dfs-out)");

  // critical
  CriticalArgs crit;
  std::string crit_config;
  auto* c = app.add_subcommand("critical", "minimize the critical action by penalty + conjugate gradients");
  c->add_option("--config", crit_config, "JSON config; command-line flags override it");
  Params cp(c);
  cp.add("m", crit.m, "number of space-time points");
  cp.add("f", crit.f, "number of particles (1 or 2)");
  cp.add("mu", crit.mu, "Lagrange multiplier (f = 2 requires 1/2)");
  cp.add("restarts", crit.restarts, "random restarts (0: 50 for m <= 6, else 100)");
  cp.add("seed", crit.seed, "base seed; restart i uses seed + i");
  cp.add("workers", crit.workers, "worker threads (0: hardware concurrency)");
  cp.add("L0", crit.schedule.L0, "initial penalty parameter");
  cp.add("tau0", crit.schedule.tau0, "initial gradient tolerance");
  cp.add("growth", crit.schedule.growth, "penalty growth factor");
  cp.add("shrink", crit.schedule.shrink, "tolerance shrink factor");
  cp.add("inner-max", crit.schedule.inner_max, "conjugate-gradient iterations per outer step");
  cp.add("outer-max", crit.schedule.outer_max, "outer penalty iterations");
  cp.add("feasibility-threshold", crit.schedule.feasibility_threshold, "stop once sum r_i^2 <= threshold");
  cp.flag("logs,!--no-logs", crit.logs, "write per-restart JSONL logs");

  // constrained
  ConstrainedArgs con;
  std::string con_config;
  auto* k = app.add_subcommand("constrained", "variational principle with constraint (random-neighbor descent)");
  k->add_option("--config", con_config, "JSON config; command-line flags override it");
  Params kp(k);
  kp.add("m", con.m, "number of space-time points");
  kp.add("f", con.f, "number of particles");
  kp.flag("kappa-min", con.kappa_min, "compute the smallest feasible kappa");
  kp.add("kappa", con.kappa, "minimize Z at this kappa");
  kp.add("sweep", con.sweep, "kappa grid a:b:n");
  kp.flag("pf", con.pf, "also minimize over the relaxed class P^f");
  kp.flag("analyze", con.analyze, "print causal and Bloch data of the minimizer");
  kp.add("seed", con.seed, "base seed");
  kp.add("restarts", con.restarts, "random restarts per kappa");
  kp.add("neighbors", con.neighbors, "neighbors per descent step");
  kp.add("budget", con.budget, "objective evaluations per restart");
  kp.add("normalization", con.normalization, "retraction or penalty");
  kp.add("L-norm", con.l_norm, "normalization penalty weight");
  kp.add("L-orth", con.l_orth, "orthogonality penalty weight");
  kp.add("L-side", con.l_side, "initial weight of the constraint penalty");

  // oracle
  OracleArgs ora;
  std::string ora_config;
  auto* o = app.add_subcommand("oracle", "closed-form families and reference values");
  o->add_option("--config", ora_config, "JSON config; command-line flags override it");
  Params op(o);
  o->add_option("name", ora.name, "family name")->required();
  op.add("kappa", ora.kappa, "constraint value");
  op.add("theta", ora.theta, "family parameter theta");
  op.add("alpha", ora.alpha, "family parameter alpha");
  op.add("mu", ora.mu, "Lagrange multiplier");
  op.add("m", ora.m, "number of space-time points");
  op.add("phi-sign", ora.phi_sign, "sign of phi = +-2 pi / 3");

  // analyze
  std::string psi_file;
  auto* an = app.add_subcommand("analyze", "validate and analyze a stored fermion matrix");
  an->add_option("psi", psi_file, "fermion matrix JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  Output out;
  try {
    out.open(output_dir.empty() ? default_output_dir() : output_dir);
    int rc = 0;
    if (c->parsed()) {
      if (!crit_config.empty()) cp.apply_config(load_config(crit_config, "critical"));
      out.write("config.json", cp.resolved("critical").dump(2) + "\n");
      rc = run_critical(crit, out);
    } else if (k->parsed()) {
      if (!con_config.empty()) kp.apply_config(load_config(con_config, "constrained"));
      json resolved = kp.resolved("constrained");
      if (std::isnan(con.kappa)) resolved["kappa"] = nullptr;
      out.write("config.json", resolved.dump(2) + "\n");
      rc = run_constrained(con, out);
    } else if (o->parsed()) {
      if (!ora_config.empty()) op.apply_config(load_config(ora_config, "oracle"));
      json resolved = op.resolved("oracle");
      resolved["name"] = ora.name;
      out.write("config.json", resolved.dump(2) + "\n");
      rc = run_oracle(ora, out);
    } else if (an->parsed()) {
      rc = run_analyze(psi_file, out);
    }
    out.report();
    return rc;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const dfs::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const dfs::io::ParseError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const dfs::InfeasibleError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
