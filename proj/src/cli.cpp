#include "hjnet/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "hjnet/config.hpp"
#include "hjnet/experiments.hpp"
#include "json.hpp"

namespace hjnet {

namespace {

struct Options {
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool strict = true;
  bool quiet = false;
};

const std::vector<std::string> kCommands{"solve",       "viscous",     "fluxlimiter",
                                         "compare",     "wholeline",   "equivalence",
                                         "viscosity",   "lemma-suite", "lemma-adversarial"};

std::optional<ExperimentKind> experiment_for(const std::string& command) {
  if (command == "compare") return ExperimentKind::comparison;
  if (command == "wholeline") return ExperimentKind::wholeline;
  if (command == "equivalence") return ExperimentKind::equivalence;
  if (command == "viscosity") return ExperimentKind::viscosity;
  if (command == "lemma-suite") return ExperimentKind::lemma_suite;
  if (command == "lemma-adversarial") return ExperimentKind::lemma_adversarial;
  return std::nullopt;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Trajectory runs share one output shape: trajectory.csv plus its sidecar.
void write_trajectory(const Trajectory& traj, const RunConfig& cfg, const std::string& command,
                      const std::filesystem::path& dir) {
  std::ostringstream csv;
  write_trajectory_csv(traj, csv);
  nlohmann::ordered_json meta;
  meta["command"] = command;
  meta["dt"] = traj.dt;
  meta["snapshots"] = traj.snapshots.size();
  meta["orientation"] = traj.orientation == Orientation::inward ? "inward" : "outward";
  meta["spec"] = nlohmann::ordered_json::parse(serialize(cfg));
  const auto path = dir / "trajectory.csv";
  write_file_atomic(path, csv.str());
  write_file_atomic(path.string() + ".meta.json", meta.dump(2) + "\n");
}

int run_trajectory(const Options& opt, const RunConfig& cfg, const std::filesystem::path& dir,
                   std::ostream& out) {
  const ExperimentSpec& spec = cfg.spec;
  const Grid grid = build_grid(spec.network, spec.dx_ladder.front());
  const std::size_t K = grid.branches();
  const auto hams = resolve_hamiltonians(spec, K);
  const GridFunction u0 = make_initial(spec.initial, grid, spec.seed);
  const bool kirchhoff = spec.boundary.kind == BoundarySpec::Kind::kirchhoff;

  Trajectory traj{grid, Orientation::inward, {}, {}, 0.0};
  if (opt.command == "solve" || opt.command == "viscous") {
    if (!kirchhoff)
      throw PreconditionError("'" + opt.command +
                              "' needs a kirchhoff boundary; use 'fluxlimiter' for type flux_limiter");
    if (opt.command == "solve") {
      traj = solve(grid, hams, KirchhoffBC{spec.boundary.value}, u0, spec.T, spec.solver);
    } else {
      traj = viscous_solve(grid, hams, spec.boundary.value, u0, spec.T,
                           ViscousConfig{spec.epsilon, spec.solver});
    }
  } else {
    if (kirchhoff) throw PreconditionError("'fluxlimiter' needs a flux_limiter boundary");
    const double A = spec.boundary.at_a0 ? a_naught(hams) : spec.boundary.value;
    traj = solve(grid, hams, make_flux_limiter(hams, A), u0, spec.T, spec.solver);
  }
  write_trajectory(traj, cfg, opt.command, dir);
  if (!opt.quiet)
    out << opt.command << ": " << traj.snapshots.size() << " snapshots, dt=" << traj.dt
        << ", junction u(T)=" << traj.snapshots.back().junction << " -> "
        << (dir / "trajectory.csv").string() << "\n";
  return exit_ok;
}

int run_table(const Options& opt, RunConfig cfg, ExperimentKind kind,
              const std::filesystem::path& dir, std::ostream& out, std::ostream& err) {
  cfg.spec.kind = kind;
  const ExperimentResult res = run_experiment(cfg.spec);
  const auto path = dir / (to_string(kind) + ".csv");
  write_result(res.table, path);
  if (!opt.quiet) {
    out << opt.command << ": " << res.table.rows.size() << " rows -> " << path.string() << "\n";
    out << to_csv(res.table);
  }
  if (!res.pass) {
    err << opt.command << ": FAIL: " << res.diagnostic << "\n";
    return exit_numeric;
  }
  if (!opt.quiet) out << opt.command << ": PASS\n";
  return exit_ok;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hamilton-Jacobi solvers and checks on star junctions"};
  Options opt;
  std::uint64_t seed = 0;
  app.add_option("command", opt.command, "what to run")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--config", opt.config_path, "JSON config file")->required();
  app.add_option("--out", opt.out_dir, "output directory (default: config 'output' or ./out)");
  auto* seed_opt = app.add_option("--seed", seed, "base seed, overrides the config");
  app.add_flag("--strict,!--no-strict", opt.strict, "reject unknown config keys (default on)");
  app.add_flag("--quiet", opt.quiet, "only print diagnostics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "hjnet: " << e.what() << "\n";
    return exit_config;
  }
  if (seed_opt->count() > 0) opt.seed = seed;

  RunConfig cfg;
  try {
    std::vector<std::string> warnings;
    cfg = parse_config(read_file(opt.config_path), opt.strict, &warnings);
    for (const auto& w : warnings) err << "hjnet: warning: " << w << "\n";
  } catch (const ConfigError& e) {
    for (const auto& line : e.errors()) err << "hjnet: config error: " << line << "\n";
    return exit_config;
  } catch (const IoError& e) {
    err << "hjnet: " << e.what() << "\n";
    return exit_io;
  }
  if (opt.seed) cfg.spec.seed = *opt.seed;

  const auto kind = experiment_for(opt.command);
  if (cfg.kind && cfg.kind != kind) {
    err << "hjnet: config error: kind: '" << to_string(*cfg.kind) << "' does not match command '"
        << opt.command << "'\n";
    return exit_config;
  }
  const std::filesystem::path dir =
      !opt.out_dir.empty() ? opt.out_dir : cfg.output.value_or("out");

  try {
    if (kind) return run_table(opt, cfg, *kind, dir, out, err);
    return run_trajectory(opt, cfg, dir, out);
  } catch (const IoError& e) {
    err << "hjnet: I/O error: " << e.what() << "\n";
    return exit_io;
  } catch (const NumericFailure& e) {
    err << "hjnet: numeric failure: " << e.what() << "\n";
    return exit_numeric;
  } catch (const PreconditionError& e) {
    err << "hjnet: config error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    err << "hjnet: numeric failure: " << e.what() << "\n";
    return exit_numeric;
  }
}

}  // namespace hjnet
