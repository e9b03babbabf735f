// Command-line front end: run a scenario to a trace plus metrics, validate a
// scenario file, or recompute metrics from an existing trace.
//
// Exit codes: 0 success, 1 scenario error (syntax or invariant), 2 runtime
// error. Diagnostics go to stderr; requested output goes to stdout or the
// named files.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <edass/edass.hpp>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw edass::Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw edass::Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw edass::Error("short write to '" + path + "'");
}

edass::Scenario load_scenario(const std::string& path) {
  return edass::parse_scenario(read_file(path));
}

struct RunArgs {
  std::string scenario_path;
  std::string trace_path;
  std::string metrics_path;
  std::optional<double> t_end;
  std::optional<std::uint64_t> seed;
  bool force_active = false;
};

int do_run(const RunArgs& a) {
  edass::Scenario scn = load_scenario(a.scenario_path);
  edass::RunOptions opts;
  opts.seed = a.seed;
  opts.t_end = a.t_end;
  opts.force_active = a.force_active;

  edass::RunResult result = edass::run_scenario(scn, opts);
  std::string trace = result.text();
  if (!a.trace_path.empty()) write_file(a.trace_path, trace);

  edass::MetricsSummary m = edass::compute_metrics(trace, scn);
  std::string text = edass::format_metrics(m);
  if (a.metrics_path.empty())
    std::cout << text;
  else
    write_file(a.metrics_path, text);
  return 0;
}

int do_validate(const std::string& path) {
  edass::Scenario scn = load_scenario(path);
  std::cout << "ok: " << scn.nodes.size() << " nodes, " << scn.targets.size()
            << " targets, seed " << scn.run.seed << "\n";
  return 0;
}

int do_metrics(const std::string& trace_path, const std::string& scn_path) {
  edass::Scenario scn = load_scenario(scn_path);
  edass::MetricsSummary m = edass::compute_metrics(read_file(trace_path), scn);
  std::cout << edass::format_metrics(m);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"e-DASS sensor network simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  double t_end_arg = 0;
  std::uint64_t seed_arg = 0;
  CLI::App* run = app.add_subcommand("run", "simulate a scenario");
  run->add_option("scenario", run_args.scenario_path, "scenario file")
      ->required();
  run->add_option("--trace", run_args.trace_path, "write the event trace here");
  run->add_option("--metrics", run_args.metrics_path,
                  "write the metrics summary here (default: stdout)");
  CLI::Option* t_end_opt =
      run->add_option("--t-end", t_end_arg, "override the simulation horizon");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed_arg, "override the scenario seed");
  run->add_flag("--force-active", run_args.force_active,
                "disable duty cycling; every node stays active");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("scenario", validate_path, "scenario file")->required();

  std::string metrics_trace, metrics_scn;
  CLI::App* metrics =
      app.add_subcommand("metrics", "summarize an existing trace");
  metrics->add_option("trace", metrics_trace, "trace file")->required();
  metrics->add_option("scenario", metrics_scn, "scenario that produced it")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run) {
      if (*t_end_opt) run_args.t_end = t_end_arg;
      if (*seed_opt) run_args.seed = seed_arg;
      return do_run(run_args);
    }
    if (*validate) return do_validate(validate_path);
    if (*metrics) return do_metrics(metrics_trace, metrics_scn);
  } catch (const edass::SyntaxError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 1;
  } catch (const edass::InvariantViolationError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
