#include "healthgame/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "healthgame/graph_export.hpp"
#include "healthgame/mc_simulator.hpp"
#include "healthgame/sml_chain.hpp"
#include "healthgame/sweep.hpp"
#include "healthgame/table_io.hpp"

namespace healthgame {

namespace {

namespace fs = std::filesystem;

struct RunConfig {
  GameParams params;
  std::string table_path;
  std::string variant = "baseline";
  std::string out_path;
  std::string graph_path;
  std::string format = "csv";
  double tol = 0.01;
  bool verbose = false;

  // table subcommands
  std::string input_path;

  // simulate
  SimConfig sim;
  int runs = 1;
  int jobs = 1;
  std::string initial = "DDD";

  // sweep
  SweepSpec sweep;
  std::string table_dbr_path;
  std::string table_dbp_path;
};

void add_param_flags(CLI::App* app, GameParams& p) {
  app->add_option("--N", p.population_size, "population size, agents per population (count)")->capture_default_str();
  app->add_option("--beta", p.selection, "intensity of selection (dimensionless, >= 0)")->capture_default_str();
  app->add_option("--bP", p.patient_benefit, "patient benefit b_P (utility units)")->capture_default_str();
  app->add_option("--bR", p.reputation_benefit, "reputation benefit b_R (utility units)")->capture_default_str();
  app->add_option("--cI", p.patient_cost, "patient cost c_I (utility units)")->capture_default_str();
  app->add_option("--cT", p.public_cost, "public provider cost c_T (utility units)")->capture_default_str();
  app->add_option("--cM", p.private_cost, "private provider cost c_M (utility units)")->capture_default_str();
  app->add_option("--epsilon", p.epsilon, "reputation scaling: a cooperating provider earns epsilon * b_R (in [0, 1])")
      ->capture_default_str();
  app->add_option("--u", p.punish_cost, "punishment cost paid by the patient per punished provider (utility units)")
      ->capture_default_str();
  app->add_option("--v", p.fine, "fine charged to each punished provider (utility units)")->capture_default_str();
}

void add_model_flags(CLI::App* app, RunConfig& cfg) {
  app->add_option("--table", cfg.table_path,
                  "payoff table file (.json structured, anything else CSV); default: reference family");
  app->add_option("--variant", cfg.variant, "baseline | punishment (applies u, v to the table)")
      ->check(CLI::IsMember({"baseline", "punishment"}))
      ->capture_default_str();
}

fs::path resolve_output(const std::string& path) {
  fs::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutDirEnv); dir != nullptr && *dir != '\0') return fs::path(dir) / p;
  }
  return p;
}

void write_file(const std::string& path, const std::string& content) {
  const fs::path target = resolve_output(path);
  std::ofstream f(target, std::ios::binary);
  if (!f) throw IoError("cannot open " + target.string() + " for writing");
  f << content;
  if (!f) throw IoError("write failed for " + target.string());
}

void print_params(std::ostream& out, const GameParams& p) {
  out << "# N=" << p.population_size << " beta=" << format_double(p.selection)
      << " b_P=" << format_double(p.patient_benefit) << " b_R=" << format_double(p.reputation_benefit)
      << " c_I=" << format_double(p.patient_cost) << " c_T=" << format_double(p.public_cost)
      << " c_M=" << format_double(p.private_cost) << " epsilon=" << format_double(p.epsilon)
      << " u=" << format_double(p.punish_cost) << " v=" << format_double(p.fine) << '\n';
}

PayoffTable model_table(const RunConfig& cfg) {
  PayoffTable table = cfg.table_path.empty() ? build_reference_table(cfg.params) : load_table_file(cfg.table_path);
  if (cfg.variant == "punishment") table = apply_punishment(table, cfg.params.punish_cost, cfg.params.fine);
  return table;
}

void print_source(std::ostream& out, const RunConfig& cfg) {
  out << "# table=" << (cfg.table_path.empty() ? "reference" : cfg.table_path) << " variant=" << cfg.variant << '\n';
}

int cmd_table_gen(const RunConfig& cfg, std::ostream& out) {
  cfg.params.validate();
  const auto table = build_reference_table(cfg.params);
  print_params(out, cfg.params);
  if (cfg.out_path.empty()) {
    save_table(out, table, TableFormat::Csv);
  } else {
    write_file(cfg.out_path, save_table(table, table_format_for(cfg.out_path)));
    out << "wrote " << resolve_output(cfg.out_path).string() << '\n';
  }
  return kExitOk;
}

int cmd_table_validate(const RunConfig& cfg, std::ostream& out) {
  const auto table = load_table_file(cfg.input_path);
  out << "ok: " << cfg.input_path << " has all 8 profiles\n";
  save_table(out, table, TableFormat::Csv);
  return kExitOk;
}

int cmd_table_punish(const RunConfig& cfg, std::ostream& out) {
  cfg.params.validate();
  const auto table = apply_punishment(load_table_file(cfg.input_path), cfg.params.punish_cost, cfg.params.fine);
  out << "# u=" << format_double(cfg.params.punish_cost) << " v=" << format_double(cfg.params.fine) << '\n';
  if (cfg.out_path.empty()) {
    save_table(out, table, TableFormat::Csv);
  } else {
    write_file(cfg.out_path, save_table(table, table_format_for(cfg.out_path)));
    out << "wrote " << resolve_output(cfg.out_path).string() << '\n';
  }
  return kExitOk;
}

int cmd_stationary(const RunConfig& cfg, std::ostream& out) {
  cfg.params.validate();
  if (!(cfg.tol > 0.0)) throw InvalidArgument("--tol must be > 0");
  const auto table = model_table(cfg);
  const int n = cfg.params.population_size;
  const auto chain = build_transition_matrix(table, n, cfg.params.selection);
  const auto dist = stationary_distribution(chain);
  const auto metrics = cooperation_metrics(dist);
  const auto edges = classify_edges(table, n, cfg.params.selection, cfg.tol);

  print_params(out, cfg.params);
  print_source(out, cfg);
  for (int i : kDisplayOrder) out << profile_of(i).label() << ' ' << format_double(dist(i)) << '\n';
  out << "# CCC frequency " << format_double(metrics.full_cooperation) << '\n';
  for (Population p : kPopulations)
    out << "# cooperation " << to_string(p) << ' ' << format_double(metrics.marginal[to_index(p)]) << '\n';
  for (const auto& e : edges.edges())
    out << "# edge " << e.lower.label() << '-' << e.upper.label() << ' ' << to_string(e.cls)
        << " rhoN_up=" << format_double(e.rho_up * n) << " rhoN_down=" << format_double(e.rho_down * n) << '\n';
  if (cfg.verbose) {
    out << "# transition matrix (rows/cols in index order DDD..CCC)\n";
    for (int i = 0; i < kNumProfiles; ++i) {
      out << "#";
      for (int j = 0; j < kNumProfiles; ++j) out << ' ' << format_double(chain.matrix()(i, j));
      out << '\n';
    }
  }
  if (!cfg.graph_path.empty()) write_file(cfg.graph_path, to_dot(edges, dist, n));
  return kExitOk;
}

std::string simulate_report(const ReplicateReport& rep, const std::string& format) {
  std::ostringstream s;
  if (format == "json") {
    nlohmann::ordered_json doc;
    doc["base_seed"] = rep.base_seed;
    doc["runs"] = rep.runs.size();
    doc["updates"] = rep.runs.front().updates;
    auto est = [](const Estimate& e) { return nlohmann::ordered_json{{"mean", e.mean}, {"stderr", e.std_error}}; };
    for (int i = 0; i < kNumProfiles; ++i) {
      doc["occupancy"][profile_of(i).label()] = est(rep.occupancy[i]);
      doc["conditional_occupancy"][profile_of(i).label()] = est(rep.conditional_occupancy[i]);
    }
    doc["monomorphic_time"] = est(rep.monomorphic_time);
    for (Population p : kPopulations)
      doc["cooperator_fraction"][std::string(to_string(p))] = est(rep.cooperator_fraction[to_index(p)]);
    s << doc.dump(2) << '\n';
    return s.str();
  }
  s << "statistic,mean,stderr\n";
  auto row = [&s](const std::string& name, const Estimate& e) {
    s << name << ',' << format_double(e.mean) << ',' << format_double(e.std_error) << '\n';
  };
  for (int i = 0; i < kNumProfiles; ++i) row("occ_" + profile_of(i).label(), rep.occupancy[i]);
  for (int i = 0; i < kNumProfiles; ++i) row("cond_" + profile_of(i).label(), rep.conditional_occupancy[i]);
  row("monomorphic_time", rep.monomorphic_time);
  for (Population p : kPopulations) row("coop_" + std::string(to_string(p)), rep.cooperator_fraction[to_index(p)]);
  return s.str();
}

int cmd_simulate(RunConfig cfg, std::ostream& out) {
  cfg.params.validate();
  const auto initial = parse_profile(cfg.initial);
  if (!initial) throw InvalidArgument("--initial must be a profile label such as DDD");
  cfg.sim.population_size = cfg.params.population_size;
  cfg.sim.selection = cfg.params.selection;
  cfg.sim.initial = *initial;
  const auto table = model_table(cfg);
  const auto rep = replicate(table, cfg.sim, cfg.runs, cfg.jobs);

  print_params(out, cfg.params);
  print_source(out, cfg);
  out << "# seed=" << cfg.sim.seed << " steps=" << cfg.sim.steps << " burn_in=" << cfg.sim.burn_in
      << " mu=" << format_double(cfg.sim.exploration) << " runs=" << cfg.runs << " initial=" << cfg.initial << '\n';
  out << "profile occupancy conditional\n";
  for (int i : kDisplayOrder)
    out << profile_of(i).label() << ' ' << format_double(rep.occupancy[i].mean) << ' '
        << format_double(rep.conditional_occupancy[i].mean) << '\n';
  out << "# monomorphic time " << format_double(rep.monomorphic_time.mean) << '\n';
  for (Population p : kPopulations)
    out << "# cooperator fraction " << to_string(p) << ' '
        << format_double(rep.cooperator_fraction[to_index(p)].mean) << '\n';
  if (!cfg.out_path.empty()) write_file(cfg.out_path, simulate_report(rep, cfg.format));
  return kExitOk;
}

int cmd_sweep(RunConfig cfg, std::ostream& out) {
  cfg.sweep.params = cfg.params;
  cfg.sweep.variant = *parse_variant(cfg.variant);
  if (!cfg.table_path.empty()) {
    LoadedTableSource src{load_table_file(cfg.table_path), std::nullopt};
    if (cfg.table_dbr_path.empty() != cfg.table_dbp_path.empty())
      throw InvalidArgument("--table-dbr and --table-dbp must be given together");
    if (!cfg.table_dbr_path.empty())
      src.rule = AffineSubstitution{load_table_file(cfg.table_dbr_path), load_table_file(cfg.table_dbp_path)};
    cfg.sweep.loaded = std::move(src);
  }
  cfg.sweep.validate();
  const auto grid = run_sweep(cfg.sweep, cfg.jobs);

  print_params(out, cfg.params);
  print_source(out, cfg);
  const auto& br = cfg.sweep.reputation_benefit;
  const auto& bp = cfg.sweep.patient_benefit;
  out << "# b_R in [" << format_double(br.min) << ", " << format_double(br.max) << "] x " << br.points
      << ", b_P in [" << format_double(bp.min) << ", " << format_double(bp.max) << "] x " << bp.points << '\n';
  const auto& ccc = grid.cells;
  auto best = ccc.begin();
  for (auto it = ccc.begin(); it != ccc.end(); ++it)
    if (it->frequencies(7) > best->frequencies(7)) best = it;
  out << "# cells " << ccc.size() << "; max CCC frequency " << format_double(best->frequencies(7)) << " at b_R="
      << format_double(best->reputation_benefit) << " b_P=" << format_double(best->patient_benefit) << '\n';
  const GridFormat format = cfg.format == "json" ? GridFormat::Json : GridFormat::Csv;
  if (cfg.out_path.empty()) emit_grid(out, grid, format);
  else write_file(cfg.out_path, emit_grid(grid, format));
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Evolutionary dynamics of the public provider / private provider / patient game"};
  app.require_subcommand(1);

  auto* table = app.add_subcommand("table", "generate, validate or punish payoff tables");
  table->require_subcommand(1);
  auto* gen = table->add_subcommand("gen", "write the reference-family table at the given parameters");
  add_param_flags(gen, cfg.params);
  gen->add_option("--out", cfg.out_path, "output table file (.json or .csv); default: stdout");
  auto* validate = table->add_subcommand("validate", "check a payoff table file");
  validate->add_option("path", cfg.input_path, "table file")->required();
  auto* punish = table->add_subcommand("punish", "apply peer punishment (u, v) to a table file");
  punish->add_option("path", cfg.input_path, "table file")->required();
  add_param_flags(punish, cfg.params);
  punish->add_option("--out", cfg.out_path, "output table file; default: stdout");

  auto* stationary = app.add_subcommand("stationary", "stationary distribution and fixation graph");
  add_param_flags(stationary, cfg.params);
  add_model_flags(stationary, cfg);
  stationary->add_option("--tol", cfg.tol, "neutral-edge tolerance, relative to 1/N")->capture_default_str();
  stationary->add_option("--graph", cfg.graph_path, "write the classified transition graph (Graphviz DOT)");
  stationary->add_flag("--verbose", cfg.verbose, "also print the transition matrix");

  auto* simulate = app.add_subcommand("simulate", "agent-based Monte Carlo simulation");
  add_param_flags(simulate, cfg.params);
  add_model_flags(simulate, cfg);
  simulate->add_option("--seed", cfg.sim.seed, "base seed (64-bit)")->capture_default_str();
  simulate->add_option("--steps", cfg.sim.steps, "total updates per run")->capture_default_str();
  simulate->add_option("--burn-in", cfg.sim.burn_in, "discarded leading updates")->capture_default_str();
  simulate->add_option("--mu", cfg.sim.exploration, "exploration probability per update")->capture_default_str();
  simulate->add_option("--runs", cfg.runs, "independent replicates")->capture_default_str();
  simulate->add_option("--jobs", cfg.jobs, "worker threads")->capture_default_str();
  simulate->add_option("--initial", cfg.initial, "starting profile")->capture_default_str();
  simulate->add_option("--out", cfg.out_path, "machine-readable report file");
  simulate->add_option("--format", cfg.format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "stationary frequencies over a (b_R, b_P) grid");
  add_param_flags(sweep, cfg.params);
  add_model_flags(sweep, cfg);
  sweep->add_option("--brmin", cfg.sweep.reputation_benefit.min, "b_R axis minimum")->capture_default_str();
  sweep->add_option("--brmax", cfg.sweep.reputation_benefit.max, "b_R axis maximum")->capture_default_str();
  sweep->add_option("--brsteps", cfg.sweep.reputation_benefit.points, "b_R axis points")->capture_default_str();
  sweep->add_option("--bpmin", cfg.sweep.patient_benefit.min, "b_P axis minimum")->capture_default_str();
  sweep->add_option("--bpmax", cfg.sweep.patient_benefit.max, "b_P axis maximum")->capture_default_str();
  sweep->add_option("--bpsteps", cfg.sweep.patient_benefit.points, "b_P axis points")->capture_default_str();
  sweep->add_option("--table-dbr", cfg.table_dbr_path, "with --table: per-unit change of every payoff in b_R");
  sweep->add_option("--table-dbp", cfg.table_dbp_path, "with --table: per-unit change of every payoff in b_P");
  sweep->add_option("--jobs", cfg.jobs, "worker threads")->capture_default_str();
  sweep->add_option("--out", cfg.out_path, "grid output file; default: stdout");
  sweep->add_option("--format", cfg.format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  std::vector<const char*> argv{"healthgame"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    // Prints help for the innermost selected subcommand, or the parse error.
    app.exit(e, out, err);
    return e.get_exit_code() == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*gen) return cmd_table_gen(cfg, out);
    if (*validate) return cmd_table_validate(cfg, out);
    if (*punish) return cmd_table_punish(cfg, out);
    if (*stationary) return cmd_stationary(cfg, out);
    if (*simulate) return cmd_simulate(cfg, out);
    if (*sweep) return cmd_sweep(cfg, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace healthgame
