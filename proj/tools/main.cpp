#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crnlyap/balance.hpp"
#include "crnlyap/cbp.hpp"
#include "crnlyap/compose.hpp"
#include "crnlyap/lyapunov.hpp"
#include "crnlyap/parallel.hpp"
#include "crnlyap/parser.hpp"
#include "crnlyap/sim.hpp"
#include "crnlyap/structure.hpp"
#include "json_io.hpp"

namespace fs = std::filesystem;
using namespace crnlyap;
using crnlyap::cli::Json;

namespace {

enum ExitCode { exit_ok = 0, exit_usage = 1, exit_parse = 2, exit_numerical = 3, exit_certificate = 4 };

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

struct Input {
  std::string path;
  ReactionNetwork network;
  std::optional<CompoundSpec> spec;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(exit_parse, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void report_diagnostics(const std::string& path, const std::vector<ParseDiagnostic>& diags) {
  for (const auto& d : diags) std::cerr << path << ": " << d.to_string() << "\n";
}

Input load_input(const std::string& path) {
  const std::string text = read_text(path);
  if (fs::path(path).extension() == ".crnc") {
    auto parsed = parse_compound(text);
    if (auto* diags = std::get_if<std::vector<ParseDiagnostic>>(&parsed)) {
      report_diagnostics(path, *diags);
      throw CliError(exit_parse, "parse failed");
    }
    auto spec = std::get<CompoundSpec>(std::move(parsed));
    ReactionNetwork net = spec.network;
    return Input{path, std::move(net), std::move(spec)};
  }
  const auto parsed = parse_network(text);
  if (!parsed.ok()) {
    report_diagnostics(path, parsed.diagnostics());
    throw CliError(exit_parse, "parse failed");
  }
  return Input{path, parsed.network(), std::nullopt};
}

State parse_state(const std::string& list, const ReactionNetwork& net, const char* flag) {
  std::vector<double> values;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
      values.push_back(v);
    } catch (const std::exception&) {
      throw CliError(exit_usage, std::string(flag) + ": not a number: '" + item + "'");
    }
  }
  if (values.size() != net.num_species()) {
    throw CliError(exit_usage, std::string(flag) + ": expected " + std::to_string(net.num_species()) +
                                   " values, got " + std::to_string(values.size()));
  }
  State x(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw CliError(exit_usage, std::string(flag) + ": values must be finite and non-negative");
    }
    x(static_cast<Eigen::Index>(i)) = values[i];
  }
  return x;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string vec_text(const Eigen::VectorXd& v) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v(i));
  return out + ")";
}

Json base_report(const std::string& command, const Input& in) {
  return Json{{"schema_version", "1"},
              {"command", command},
              {"input", Json{{"path", in.path}, {"format", in.spec ? "crnc" : "crn"}}}};
}

// --- report sections ----------------------------------------------------------

Json structure_json(const ReactionNetwork& net, const StructureReport& s) {
  Json complexes = Json::array();
  for (const auto& c : s.complexes) complexes.push_back(format_complex(net, c));
  return Json{{"num_species", net.num_species()},
              {"num_reactions", net.num_reactions()},
              {"num_complexes", s.num_complexes},
              {"num_linkage_classes", s.num_linkage_classes},
              {"dim_s", s.dim_s},
              {"deficiency", s.deficiency},
              {"weakly_reversible", s.weakly_reversible},
              {"complexes", std::move(complexes)},
              {"linkage_class", s.linkage_class},
              {"stoichiometric_matrix", cli::matrix_json(s.stoich_matrix)},
              {"conservation_laws", cli::matrix_json(IntMatrix(s.conservation_basis.transpose()))}};
}

Json equilibrium_json(const State& x0, const EquilibriumResult& eq) {
  return Json{{"x0", cli::vector_json(x0)},
              {"point", cli::vector_json(eq.point)},
              {"residual", eq.residual},
              {"is_complex_balanced", eq.is_complex_balanced},
              {"is_reaction_vector_balanced", eq.is_reaction_vector_balanced},
              {"has_unpaired_reaction_vector", eq.has_unpaired_reaction_vector},
              {"iterations", eq.iterations},
              {"restarts", eq.restarts}};
}

Json compound_json(const CompoundSpec& spec, const std::optional<State>& equilibrium) {
  const auto& names = spec.network.species();
  Json parts = Json::array();
  for (const auto& p : spec.parts) {
    Json species = Json::array();
    for (std::size_t g : p.species_layout) species.push_back(names[g]);
    Json part{{"kind", to_string(p.kind)}, {"species", std::move(species)}};
    part["shared"] = p.shared_global ? Json(names[*p.shared_global]) : Json(nullptr);
    parts.push_back(std::move(part));
  }
  Json cbp_species = Json::array();
  for (std::size_t g : spec.cbp_layout) cbp_species.push_back(names[g]);
  Json out{{"kind", to_string(spec.kind)},
           {"cbp_species", std::move(cbp_species)},
           {"cbp_weights", spec.cbp_weights ? cli::rationals_json(*spec.cbp_weights) : Json(nullptr)},
           {"parts", std::move(parts)},
           {"uniqueness", nullptr}};
  if (spec.kind == PartKind::autoca) {
    const auto u = check_uniqueness_conditions(spec, equilibrium);
    Json per_part = Json::array();
    for (const auto& c : u.parts) {
      per_part.push_back(Json{{"part", c.part},
                              {"tau", c.tau},
                              {"mass_conserved", c.mass_conserved},
                              {"has_index_above_two", c.has_index_above_two},
                              {"stability_sum", c.stability_sum ? Json(*c.stability_sum) : Json(nullptr)},
                              {"stability_sum_positive",
                               c.stability_sum_positive ? Json(*c.stability_sum_positive) : Json(nullptr)},
                              {"shared_stoichiometry_ok", c.shared_stoichiometry_ok},
                              {"cbp_consumes_shared", c.cbp_consumes_shared}});
    }
    out["uniqueness"] = Json{{"all_tau_at_most_two", u.all_tau_at_most_two},
                             {"high_order_parts_conserved", u.high_order_parts_conserved},
                             {"uniqueness_guaranteed", u.uniqueness_guaranteed},
                             {"stability_guaranteed",
                              u.stability_guaranteed ? Json(*u.stability_guaranteed) : Json(nullptr)},
                             {"decomposition_conditions_hold", u.decomposition_conditions_hold},
                             {"parts", std::move(per_part)}};
  }
  return out;
}

Json family_json(const LyapunovFunction& f) {
  Json out{{"family", to_string(f.kind())}};
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PseudoHelmholtz>) {
          out["weights"] = cli::vector_json(Eigen::VectorXd(g.weights()));
        } else if constexpr (std::is_same_v<T, OneDimIntegral>) {
          Json omega = Json::array();
          for (Eigen::Index i = 0; i < g.omega().size(); ++i) omega.push_back(g.omega()(i));
          out["omega"] = std::move(omega);
          out["betas"] = g.betas();
        } else if constexpr (std::is_same_v<T, CompoundSub1>) {
          out["weights"] = cli::vector_json(Eigen::VectorXd(g.cbp.weights()));
          out["num_parts"] = g.parts.size();
        } else {
          out["weights"] = cli::vector_json(Eigen::VectorXd(g.cbp.weights()));
          out["num_parts"] = g.parts.size();
        }
      },
      f.variant());
  return out;
}

Json certificate_json(const CertificateReport& c) {
  Json conditions = Json::array();
  for (const auto& k : c.conditions) {
    conditions.push_back(Json{{"name", k.name},
                              {"value", k.value},
                              {"pass", k.pass},
                              {"informational", k.informational},
                              {"detail", k.detail}});
  }
  return Json{{"equilibrium_residual", c.equilibrium_residual},
              {"equilibrium_ok", c.equilibrium_ok},
              {"projected_hessian_min_eigenvalue", c.projected_hessian_min_eigenvalue},
              {"hessian_pass", c.hessian_pass},
              {"conditions", std::move(conditions)},
              {"pass", c.pass}};
}

// --- shared pipeline pieces -----------------------------------------------------

EquilibriumResult solve_equilibrium(const ReactionNetwork& net, const State& x0, double tol) {
  try {
    return find_equilibrium(net, x0, tol);
  } catch (const ConvergenceError& e) {
    throw CliError(exit_numerical, std::string(e.what()));
  }
}

struct LyapunovSettings {
  std::string kind = "auto";
  int samples = 100;
  double tol = 1e-8;
  unsigned seed = 42;
  std::size_t jobs = 1;
};

LyapunovFunction build_function(const Input& in, const State& x_star, const std::string& kind) {
  if (in.spec && (kind == "auto" || kind == "compound")) return build_compound(*in.spec, x_star);
  if (kind == "compound") throw CliError(exit_usage, "--kind compound needs a .crnc input");
  const FamilyChoice choice = kind == "helmholtz" ? FamilyChoice::helmholtz
                              : kind == "onedim"  ? FamilyChoice::onedim
                                                  : FamilyChoice::automatic;
  return build_for_network(in.network, x_star, choice);
}

struct LyapunovOutcome {
  Json json;
  bool pass = false;
  std::string text;
};

LyapunovOutcome run_lyapunov(const Input& in, const State& x_star, const LyapunovSettings& s) {
  const LyapunovFunction f = build_function(in, x_star, s.kind);

  // Points are drawn sequentially so the sample set does not depend on --jobs.
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> u(-std::log(10.0), std::log(10.0));
  std::vector<State> points;
  for (int k = 0; k < s.samples; ++k) {
    State x(x_star.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = x_star(j) * std::exp(u(rng));
    points.push_back(std::move(x));
  }
  struct Sample {
    double residual;
    double scale;
  };
  const auto results = parallel_map<Sample>(points.size(), s.jobs, [&](std::size_t k) {
    return Sample{pde_residual(in.network, f, points[k]), pde_residual_scale(in.network, f, points[k])};
  });
  double max_abs = 0.0, max_rel = 0.0, sum_abs = 0.0;
  for (const auto& r : results) {
    max_abs = std::max(max_abs, std::abs(r.residual));
    if (r.scale > 0.0) max_rel = std::max(max_rel, std::abs(r.residual) / r.scale);
    sum_abs += std::abs(r.residual);
  }
  const double mean_abs = results.empty() ? 0.0 : sum_abs / static_cast<double>(results.size());
  const bool residual_pass = max_abs <= s.tol;

  const auto cert = stability_conditions(in.network, f, x_star, in.spec ? &*in.spec : nullptr);
  LyapunovOutcome out;
  out.pass = residual_pass && cert.pass;
  out.json = family_json(f);
  out.json["equilibrium"] = cli::vector_json(x_star);
  out.json["value_at_equilibrium"] = f.value(x_star);
  out.json["sampling"] = Json{{"region", "log-uniform in [x*/10, 10 x*] componentwise"},
                              {"samples", s.samples},
                              {"seed", s.seed},
                              {"tol", s.tol},
                              {"max_abs_residual", max_abs},
                              {"mean_abs_residual", mean_abs},
                              {"max_rel_residual", max_rel},
                              {"pass", residual_pass}};
  out.json["certificate"] = certificate_json(cert);
  out.json["pass"] = out.pass;

  std::ostringstream os;
  os << "family: " << to_string(f.kind()) << "\n";
  os << "equilibrium: " << vec_text(x_star) << "\n";
  os << "pde residual over " << s.samples << " samples: max " << num(max_abs) << ", mean " << num(mean_abs)
     << (residual_pass ? " (ok)" : " (above tolerance)") << "\n";
  os << "projected Hessian min eigenvalue: " << num(cert.projected_hessian_min_eigenvalue) << "\n";
  for (const auto& c : cert.conditions) {
    os << "condition " << c.name << " = " << num(c.value) << (c.pass ? " pass" : " fail")
       << (c.informational ? " (informational)" : "") << "\n";
  }
  os << "certificate: " << (out.pass ? "pass" : "FAIL") << "\n";
  out.text = os.str();
  return out;
}

struct SimSettings {
  double t_end = 0.0;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  int points = 0;
  bool lyapunov = false;
  std::string csv;
};

struct SimOutcome {
  Json json;
  bool ok = false;
  std::string text;
};

SimOutcome run_simulation(const Input& in, const State& x0, const SimSettings& s) {
  std::optional<LyapunovFunction> f;
  std::optional<State> x_star;
  if (s.lyapunov) {
    x_star = solve_equilibrium(in.network, x0, 1e-10).point;
    f = build_function(in, *x_star, "auto");
  }
  IntegrateOptions opts;
  opts.rel_tol = s.rel_tol;
  opts.abs_tol = s.abs_tol;
  if (s.points > 1) opts.grid_points = s.points - 1;
  Trajectory traj = integrate(in.network, x0, s.t_end, opts, f ? &*f : nullptr);
  const std::size_t steps = traj.times.size() - 1;
  if (s.points > 1) traj = resample(traj, s.points);

  SimOutcome out;
  out.ok = traj.status == IntegrationStatus::ok;
  out.json = Json{{"x0", cli::vector_json(x0)},
                  {"t_end", s.t_end},
                  {"rel_tol", s.rel_tol},
                  {"abs_tol", s.abs_tol},
                  {"status", to_string(traj.status)},
                  {"message", traj.message},
                  {"steps", steps},
                  {"rejected_steps", traj.rejected_steps},
                  {"clamp_events", traj.clamp_events},
                  {"final_time", traj.times.back()},
                  {"final_state", cli::vector_json(traj.states.back())},
                  {"lyapunov", nullptr},
                  {"csv", s.csv.empty() ? Json(nullptr) : Json(s.csv)}};
  std::ostringstream os;
  os << "integration " << to_string(traj.status) << " after " << steps << " steps, t = " << num(traj.times.back())
     << "\n";
  if (!traj.message.empty()) os << traj.message << "\n";
  os << "final state: " << vec_text(traj.states.back()) << "\n";
  if (f) {
    const auto rep = convergence_report(traj, *x_star);
    out.json["lyapunov"] = Json{{"family", to_string(f->kind())},
                                {"equilibrium", cli::vector_json(*x_star)},
                                {"f_initial", traj.f_values.front()},
                                {"f_final", traj.f_values.back()},
                                {"f_monotone", rep.f_monotone},
                                {"max_dissipation", rep.max_dissipation},
                                {"final_distance", rep.final_distance}};
    os << "lyapunov " << to_string(f->kind()) << ": f " << num(traj.f_values.front()) << " -> "
       << num(traj.f_values.back()) << (rep.f_monotone ? ", non-increasing" : ", NOT monotone")
       << ", max dissipation " << num(rep.max_dissipation) << ", distance to equilibrium "
       << num(rep.final_distance) << "\n";
  }
  if (!s.csv.empty()) {
    std::ofstream file(s.csv, std::ios::binary);
    if (!file) throw CliError(exit_usage, "cannot write " + s.csv);
    write_csv(file, in.network, traj);
    os << "wrote " << s.csv << "\n";
  }
  out.text = os.str();
  return out;
}

// --- output ---------------------------------------------------------------------

void emit(bool json, const Json& report, const std::string& text) {
  if (json) {
    std::cout << cli::dump_json(report);
  } else {
    std::cout << text;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural analysis, CBP transformations, and Lyapunov certificates for mass-action networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "crnlyap 0.1.0");

  std::string file;
  bool json = false;
  int jobs = 0;
  std::string x0_text;
  double tol = 1e-10;
  int max_denom = 64;
  std::size_t limit = 1000;
  std::string out_dir;
  double verify_t = 0.0;
  LyapunovSettings lyap;
  SimSettings sim;

  auto add_common = [&](CLI::App* sub, const char* file_help) {
    sub->add_option("file", file, file_help)->required();
    sub->add_flag("--json", json, "Print a JSON report instead of text");
    sub->add_option("--jobs", jobs, "Worker threads (default: CRN_LYAP_JOBS, else all cores)")
        ->check(CLI::PositiveNumber);
  };

  auto* parse_cmd = app.add_subcommand("parse", "Validate a network and print its canonical form");
  add_common(parse_cmd, "Network file (.crn or .crnc)");

  auto* analyze_cmd = app.add_subcommand("analyze", "Stoichiometry, deficiency, reversibility, CBP scalings");
  add_common(analyze_cmd, "Network file (.crn or .crnc)");
  analyze_cmd->add_option("--max-denom", max_denom, "Largest numerator/denominator of a scaling entry")
      ->check(CLI::Range(1, 1000));

  auto* eq_cmd = app.add_subcommand("equilibrium", "Positive equilibrium in the compatibility class of x0");
  add_common(eq_cmd, "Network file (.crn or .crnc)");
  eq_cmd->add_option("--x0", x0_text, "Comma-separated initial state")->required();
  eq_cmd->add_option("--tol", tol, "Residual tolerance")->check(CLI::PositiveNumber);

  auto* cbp_cmd = app.add_subcommand("cbp", "Enumerate CBP networks obtained by diagonal scalings");
  add_common(cbp_cmd, "Network file (.crn)");
  cbp_cmd->add_option("--max-denom", max_denom, "Largest numerator/denominator of a scaling entry")
      ->check(CLI::Range(1, 1000));
  cbp_cmd->add_option("--limit", limit, "Stop after this many networks")->check(CLI::PositiveNumber);
  cbp_cmd->add_option("--out", out_dir, "Write each network to DIR/<name>_cbp<k>.crn");
  cbp_cmd->add_option("--verify", verify_t, "Check the trajectory conjugacy on [0, T] from --x0 (default all ones)")
      ->check(CLI::PositiveNumber);
  cbp_cmd->add_option("--x0", x0_text, "Comma-separated initial state for --verify");

  auto* lyap_cmd = app.add_subcommand("lyapunov", "Build a Lyapunov function and check its certificate");
  add_common(lyap_cmd, "Network file (.crn or .crnc)");
  lyap_cmd->add_option("--x0", x0_text, "Comma-separated state selecting the compatibility class")->required();
  lyap_cmd->add_option("--kind", lyap.kind, "Family")
      ->check(CLI::IsMember({"auto", "helmholtz", "onedim", "compound"}));
  lyap_cmd->add_option("--samples", lyap.samples, "Number of residual samples")->check(CLI::Range(1, 10000000));
  lyap_cmd->add_option("--tol", lyap.tol, "Bound on the absolute PDE residual")->check(CLI::PositiveNumber);
  lyap_cmd->add_option("--seed", lyap.seed, "Sampling seed");

  auto* sim_cmd = app.add_subcommand("simulate", "Integrate the mass-action dynamics");
  add_common(sim_cmd, "Network file (.crn or .crnc)");
  sim_cmd->add_option("--x0", x0_text, "Comma-separated initial state")->required();
  sim_cmd->add_option("--t-end", sim.t_end, "Final time")->required()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--rel-tol", sim.rel_tol, "Relative tolerance")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--abs-tol", sim.abs_tol, "Absolute tolerance")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--points", sim.points, "Report on a uniform grid of this many points")
      ->check(CLI::Range(2, 100000000));
  sim_cmd->add_flag("--lyapunov", sim.lyapunov, "Record f and its dissipation along the trajectory");
  sim_cmd->add_option("--csv", sim.csv, "Write the trajectory as CSV");

  auto* comp_cmd = app.add_subcommand("compound", "Assemble a compound network and run the full pipeline");
  add_common(comp_cmd, "Compound file (.crnc)");
  comp_cmd->add_option("--x0", x0_text, "Comma-separated state selecting the compatibility class (default all ones)");
  comp_cmd->add_option("--samples", lyap.samples, "Number of residual samples")->check(CLI::Range(1, 10000000));
  comp_cmd->add_option("--tol", lyap.tol, "Bound on the absolute PDE residual")->check(CLI::PositiveNumber);
  comp_cmd->add_option("--seed", lyap.seed, "Sampling seed");
  comp_cmd->add_option("--t-end", sim.t_end, "Also simulate from x0 up to this time")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    const std::size_t n_jobs = resolve_jobs(jobs > 0 ? std::optional<int>(jobs) : std::nullopt);
    lyap.jobs = n_jobs;
    const Input in = load_input(file);
    const ReactionNetwork& net = in.network;
    auto x0_or_ones = [&]() {
      return x0_text.empty() ? State(State::Ones(static_cast<Eigen::Index>(net.num_species())))
                             : parse_state(x0_text, net, "--x0");
    };

    if (*parse_cmd) {
      Json r = base_report("parse", in);
      r["network"] = cli::network_json(net);
      if (in.spec) r["compound"] = compound_json(*in.spec, std::nullopt);
      emit(json, r, serialize_network(net));
      return exit_ok;
    }

    if (*analyze_cmd) {
      const auto s = analyze(net);
      Json r = base_report("analyze", in);
      r["network"] = cli::network_json(net);
      r["structure"] = structure_json(net, s);
      std::ostringstream os;
      os << "species " << net.num_species() << ", reactions " << net.num_reactions() << ", complexes "
         << s.num_complexes << ", linkage classes " << s.num_linkage_classes << "\n";
      os << "dim S = " << s.dim_s << ", deficiency = " << s.deficiency
         << ", weakly reversible: " << (s.weakly_reversible ? "yes" : "no") << "\n";
      for (Eigen::Index k = 0; k < s.conservation_basis.cols(); ++k) {
        os << "conservation law:";
        for (Eigen::Index j = 0; j < s.conservation_basis.rows(); ++j) os << " " << s.conservation_basis(j, k);
        os << "\n";
      }
      if (in.spec) {
        r["compound"] = compound_json(*in.spec, std::nullopt);
        os << "compound of kind " << to_string(in.spec->kind) << " with " << in.spec->num_parts() << " part(s)\n";
      } else {
        const auto sets = feasible_scalings(net, max_denom);
        std::vector<std::string> skipped;
        const auto results = enumerate_cbp(net, max_denom, limit, &skipped);
        Json feasible = Json::array();
        for (std::size_t j = 0; j < sets.size(); ++j) {
          feasible.push_back(Json{{"species", net.species()[j]},
                                  {"unconstrained", sets[j].unconstrained},
                                  {"values", cli::rationals_json(sets[j].values)}});
        }
        r["cbp_summary"] = Json{{"max_denominator", max_denom},
                                {"feasible", std::move(feasible)},
                                {"count", results.size()},
                                {"skipped", skipped.size()}};
        os << "CBP scalings with entries up to " << max_denom << ": " << results.size() << "\n";
      }
      emit(json, r, os.str());
      return exit_ok;
    }

    if (*eq_cmd) {
      const State x0 = parse_state(x0_text, net, "--x0");
      const auto eq = solve_equilibrium(net, x0, tol);
      Json r = base_report("equilibrium", in);
      r["equilibrium"] = equilibrium_json(x0, eq);
      std::ostringstream os;
      os << "equilibrium: " << vec_text(eq.point) << "\n";
      os << "residual: " << num(eq.residual) << "\n";
      os << "complex balanced: " << (eq.is_complex_balanced ? "yes" : "no") << "\n";
      os << "reaction-vector balanced: " << (eq.is_reaction_vector_balanced ? "yes" : "no")
         << (eq.has_unpaired_reaction_vector ? " (some reaction vector has no opposite)" : "") << "\n";
      emit(json, r, os.str());
      return exit_ok;
    }

    if (*cbp_cmd) {
      std::vector<std::string> skipped;
      const auto results = enumerate_cbp(net, max_denom, limit, &skipped);
      std::vector<double> deviations;
      State x0;
      if (verify_t > 0.0) {
        x0 = x0_or_ones();
        deviations = parallel_map<double>(results.size(), n_jobs, [&](std::size_t k) {
          return verify_conjugacy(net, results[k], x0, verify_t);
        });
      }
      if (!out_dir.empty()) fs::create_directories(out_dir);
      Json networks = Json::array();
      std::ostringstream os;
      os << results.size() << " CBP network(s)\n";
      for (std::size_t k = 0; k < results.size(); ++k) {
        const auto& res = results[k];
        const std::string text = serialize_network(res.network);
        Json item{{"scaling", cli::rationals_json(res.scaling.diag)}, {"canonical", text}, {"file", nullptr}};
        os << "\nD = " << res.scaling.to_string() << "\n" << text;
        if (!out_dir.empty()) {
          char name[32];
          std::snprintf(name, sizeof name, "_cbp%03zu.crn", k + 1);
          const fs::path path = fs::path(out_dir) / (fs::path(in.path).stem().string() + name);
          std::ofstream f(path, std::ios::binary);
          if (!f) throw CliError(exit_usage, "cannot write " + path.string());
          f << "# D = " << res.scaling.to_string() << "\n" << text;
          item["file"] = path.string();
        }
        if (verify_t > 0.0) {
          item["conjugacy_deviation"] = deviations[k];
          os << "conjugacy deviation on [0, " << num(verify_t) << "]: " << num(deviations[k]) << "\n";
        }
        networks.push_back(std::move(item));
      }
      Json r = base_report("cbp", in);
      r["cbp"] = Json{{"max_denominator", max_denom},
                      {"limit", limit},
                      {"count", results.size()},
                      {"networks", std::move(networks)},
                      {"skipped", skipped}};
      if (verify_t > 0.0) {
        r["cbp"]["verify"] = Json{{"t_end", verify_t}, {"x0", cli::vector_json(x0)}};
      }
      emit(json, r, os.str());
      return exit_ok;
    }

    if (*lyap_cmd) {
      const State x0 = parse_state(x0_text, net, "--x0");
      const auto eq = solve_equilibrium(net, x0, 1e-10);
      const auto outcome = run_lyapunov(in, eq.point, lyap);
      Json r = base_report("lyapunov", in);
      r["equilibrium"] = equilibrium_json(x0, eq);
      r["lyapunov"] = outcome.json;
      emit(json, r, outcome.text);
      return outcome.pass ? exit_ok : exit_certificate;
    }

    if (*sim_cmd) {
      const State x0 = parse_state(x0_text, net, "--x0");
      const auto outcome = run_simulation(in, x0, sim);
      Json r = base_report("simulate", in);
      r["simulation"] = outcome.json;
      emit(json, r, outcome.text);
      return outcome.ok ? exit_ok : exit_numerical;
    }

    if (*comp_cmd) {
      if (!in.spec) throw CliError(exit_usage, "compound needs a .crnc file");
      const State x0 = x0_or_ones();
      const auto s = analyze(net);
      const auto eq = solve_equilibrium(net, x0, 1e-10);
      lyap.kind = "compound";
      const auto lyap_out = run_lyapunov(in, eq.point, lyap);
      Json r = base_report("compound", in);
      r["network"] = cli::network_json(net);
      r["structure"] = structure_json(net, s);
      r["equilibrium"] = equilibrium_json(x0, eq);
      r["compound"] = compound_json(*in.spec, eq.point);
      r["lyapunov"] = lyap_out.json;
      std::ostringstream os;
      os << "compound of kind " << to_string(in.spec->kind) << " with " << in.spec->num_parts() << " part(s)\n";
      os << "dim S = " << s.dim_s << ", deficiency = " << s.deficiency << "\n";
      os << lyap_out.text;
      bool sim_ok = true;
      if (sim.t_end > 0.0) {
        sim.lyapunov = true;
        const auto sim_out = run_simulation(in, x0, sim);
        r["simulation"] = sim_out.json;
        os << sim_out.text;
        sim_ok = sim_out.ok;
      }
      emit(json, r, os.str());
      if (!sim_ok) return exit_numerical;
      return lyap_out.pass ? exit_ok : exit_certificate;
    }
  } catch (const CliError& e) {
    if (e.code() != exit_parse || std::string(e.what()) != "parse failed") std::cerr << "error: " << e.what() << "\n";
    return e.code();
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const NetworkError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numerical;
  }
  return exit_usage;
}
