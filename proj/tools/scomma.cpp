#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bench.hpp"
#include "scomma/backend.hpp"
#include "scomma/driver.hpp"
#include "scomma/eval.hpp"
#include "scomma/solution_io.hpp"
#include "scomma/solver.hpp"

namespace fs = std::filesystem;
using namespace scomma;

namespace {

enum Exit { kOk = 0, kDiagnostics = 1, kUsage = 2, kInfeasible = 3, kUnsupported = 4 };

struct Inputs {
  std::string model;
  std::string data;
};

std::vector<std::string> target_dirs(const std::vector<std::string>& extra) {
  std::vector<std::string> dirs;
  if (const char* env = std::getenv("SCOMMA_TARGET_PATH")) {
    std::stringstream ss(env);
    std::string d;
    while (std::getline(ss, d, ':'))
      if (!d.empty()) dirs.push_back(d);
  }
  dirs.insert(dirs.end(), extra.begin(), extra.end());
  return dirs;
}

TargetRegistry load_targets(const std::vector<std::string>& extra) {
  TargetRegistry reg = TargetRegistry::builtin();
  for (const auto& d : target_dirs(extra)) reg.add_directory(d).print(std::cerr);
  return reg;
}

std::optional<Compilation> compile(const Inputs& in) {
  auto r = compile_file(in.model, in.data.empty() ? std::nullopt : std::optional(in.data));
  r.diagnostics.print(std::cerr);
  if (!r) return std::nullopt;
  return std::move(*r.value);
}

std::optional<SearchConfig> parse_strategy(const std::string& s) {
  SearchConfig cfg;
  std::string var = s, val;
  if (auto comma = s.find(','); comma != std::string::npos) {
    var = s.substr(0, comma);
    val = s.substr(comma + 1);
  }
  if (var == "first_fail")
    cfg.var_order = SearchConfig::VarOrder::FirstFail;
  else if (var == "input_order")
    cfg.var_order = SearchConfig::VarOrder::InputOrder;
  else
    return std::nullopt;
  if (val.empty() || val == "min")
    cfg.value_order = SearchConfig::ValueOrder::Min;
  else if (val == "max")
    cfg.value_order = SearchConfig::ValueOrder::Max;
  else
    return std::nullopt;
  return cfg;
}

void print_stats(std::ostream& os, const SolveStats& s) {
  os << "// nodes=" << s.nodes << " failures=" << s.failures << " propagations=" << s.propagations
     << " solutions=" << s.solutions << " seconds=" << s.seconds << "\n";
}

void print_solution(const FlatModel& fm, const Solution& s) {
  std::vector<std::string> warnings;
  std::cout << render_solution(fm, s, &warnings);
  if (s.objective_value) std::cout << "// objective = " << *s.objective_value << "\n";
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_compile(const Inputs& in, const std::string& target, bool emit_flat, const std::string& out, bool no_rewrites,
                bool trace, const std::vector<std::string>& dirs) {
  if (emit_flat == !target.empty()) {
    std::cerr << "error: give exactly one of --target or --emit-flat\n";
    return kUsage;
  }
  TargetRegistry reg = load_targets(dirs);
  const std::string name = emit_flat ? "flat" : target;
  const BackendDescriptor* bd = reg.find(name);
  if (!bd) {
    std::cerr << "error: unknown target '" << name << "' (known:";
    for (const auto& n : reg.names()) std::cerr << " " << n;
    std::cerr << ")\n";
    return kUsage;
  }
  auto c = compile(in);
  if (!c) return kDiagnostics;
  if (trace)
    for (const auto& p : c->flat.trace.passes)
      std::cerr << "pass " << p.pass << ": " << p.nodes_before << " -> " << p.nodes_after << " nodes\n";
  std::string text;
  try {
    text = no_rewrites ? direct_emit(c->flat.model, *bd) : emit(c->flat.model, *bd);
  } catch (const Error& e) {
    std::cerr << in.model << ": error: " << e.what() << "\n";
    return kDiagnostics;
  }
  if (out.empty()) {
    std::cout << text;
    return kOk;
  }
  fs::path path = out;
  if (fs::is_directory(path)) path /= c->flat.model.name + bd->extension;
  try {
    write_file(path.string(), text);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDiagnostics;
  }
  std::cerr << "wrote " << path.string() << "\n";
  return kOk;
}

int cmd_solve(const Inputs& in, bool all, std::optional<std::uint64_t> limit, bool stats, const std::string& strategy,
              std::optional<double> time_limit) {
  auto cfg = parse_strategy(strategy);
  if (!cfg) {
    std::cerr << "error: unknown strategy '" << strategy << "' (use first_fail|input_order[,min|max])\n";
    return kUsage;
  }
  if (all && limit) {
    std::cerr << "error: --all and --limit are exclusive\n";
    return kUsage;
  }
  if (limit && *limit == 0) {
    std::cerr << "error: --limit must be at least 1\n";
    return kUsage;
  }
  cfg->time_limit = time_limit;
  auto c = compile(in);
  if (!c) return kDiagnostics;
  const FlatModel& fm = c->flat.model;
  try {
    SolverSpace space(fm);
    if (fm.objective) {
      auto r = optimize(space, *cfg);
      if (r.best) print_solution(fm, *r.best);
      if (r.status == OptimizeResult::Status::Truncated) std::cout << "// truncated: optimality not proven\n";
      if (stats) print_stats(std::cout, r.stats);
      if (!r.best) {
        std::cerr << (r.status == OptimizeResult::Status::Infeasible ? "no solution\n" : "no solution within the limits\n");
        return kInfeasible;
      }
      return kOk;
    }
    cfg->solution_limit = all ? std::nullopt : std::optional<std::uint64_t>(limit.value_or(1));
    Search search(space, *cfg);
    std::uint64_t n = 0;
    bool many = all || (limit && *limit > 1);
    while (auto s = search.next()) {
      ++n;
      if (many) std::cout << (n > 1 ? "\n" : "") << "// solution " << n << "\n";
      print_solution(fm, *s);
    }
    if (search.truncated() && (all || n == 0)) std::cout << "// truncated\n";
    if (stats) print_stats(std::cout, search.stats());
    if (n == 0) {
      std::cerr << (search.truncated() ? "no solution within the limits\n" : "no solution\n");
      return kInfeasible;
    }
    return kOk;
  } catch (const Unsupported& u) {
    std::cerr << in.model << ": error: the embedded solver does not handle:\n";
    for (const auto& x : u.constructs()) std::cerr << "  " << x << "\n";
    std::cerr << "hint: emit the model for an external solver with 'scomma compile --target <name>'\n";
    return kUnsupported;
  }
}

int cmd_check(const Inputs& in, const std::string& solution_path) {
  auto c = compile(in);
  if (!c) return kDiagnostics;
  std::string text;
  try {
    text = read_file(solution_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDiagnostics;
  }
  auto s = parse_solution(text, c->flat.model, solution_path);
  s.diagnostics.print(std::cerr);
  if (!s) return kDiagnostics;
  auto r = check_solution(c->flat.model, *s);
  if (r.satisfied) {
    std::cout << "satisfied\n";
    return kOk;
  }
  for (const auto& v : r.violations)
    std::cout << "violated: " << v.text << (v.reason.empty() ? "" : " (" + v.reason + ")") << "\n";
  return kDiagnostics;
}

int cmd_bench(const std::string& dir, const std::string& jsonl, bool all, double time_limit,
              const std::vector<std::string>& dirs) {
  if (!fs::is_directory(dir)) {
    std::cerr << "error: '" << dir << "' is not a directory\n";
    return kUsage;
  }
  TargetRegistry reg = load_targets(dirs);
  bench::Options opts;
  opts.all_solutions = all;
  opts.time_limit = time_limit;
  auto rows = bench::run_all(bench::discover(dir), reg, opts);
  std::cout << bench::format_table(rows, reg.names());
  if (!jsonl.empty()) {
    std::ofstream f(jsonl);
    if (!f) {
      std::cerr << "error: cannot write '" << jsonl << "'\n";
      return kDiagnostics;
    }
    for (const auto& r : rows) f << bench::to_json_line(r) << "\n";
  }
  for (const auto& r : rows)
    if (!r.ok) return kDiagnostics;
  return kOk;
}

int cmd_targets(const std::vector<std::string>& dirs) {
  TargetRegistry reg = load_targets(dirs);
  for (const auto& t : reg.list()) {
    std::cout << t.name << "  " << t.extension << "  " << t.origin;
    if (!t.rules.empty()) {
      std::cout << "  rules:";
      for (const auto& r : t.rules) std::cout << " " << r;
    }
    std::cout << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scomma: compile, solve and check object-oriented constraint models"};
  app.require_subcommand(1);
  std::vector<std::string> target_path;
  app.add_option("--target-path", target_path, "Extra directory of .bd target descriptors")->type_name("DIR");

  Inputs in;
  auto add_inputs = [&](CLI::App* c) {
    c->add_option("model", in.model, "Model file (.scm, or .flat)")->required()->check(CLI::ExistingFile);
    c->add_option("data", in.data, "Data file replacing the model's imports")->check(CLI::ExistingFile);
  };

  std::string target, out;
  bool emit_flat = false, no_rewrites = false, trace = false;
  auto* compile_cmd = app.add_subcommand("compile", "Flatten a model and emit it for a target");
  add_inputs(compile_cmd);
  compile_cmd->add_option("--target,-t", target, "Target name (see 'scomma targets')");
  compile_cmd->add_flag("--emit-flat", emit_flat, "Emit the flat model");
  compile_cmd->add_option("--out,-o", out, "Output file, or directory for <Model><ext>");
  compile_cmd->add_flag("--no-rewrites", no_rewrites, "Render with templates only, without rewrite rules");
  compile_cmd->add_flag("--trace", trace, "Print node counts around each flattening pass");

  bool all = false, stats = false;
  std::optional<std::uint64_t> limit;
  std::optional<double> time_limit;
  std::string strategy = "first_fail,min";
  auto* solve_cmd = app.add_subcommand("solve", "Solve a model with the embedded solver");
  add_inputs(solve_cmd);
  solve_cmd->add_flag("--all", all, "Enumerate every solution");
  solve_cmd->add_option("--limit", limit, "Stop after N solutions");
  solve_cmd->add_flag("--stats", stats, "Print search statistics");
  solve_cmd->add_option("--strategy", strategy, "first_fail|input_order[,min|max]");
  solve_cmd->add_option("--time-limit", time_limit, "Seconds before the search stops")->check(CLI::PositiveNumber);

  std::string solution_path;
  auto* check_cmd = app.add_subcommand("check", "Check a solution file against a model");
  check_cmd->add_option("model", in.model, "Model file")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("solution", solution_path, "Solution file")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("--data", in.data, "Data file replacing the model's imports")->check(CLI::ExistingFile);

  std::string corpus = "corpus", jsonl;
  double bench_time = 10.0;
  bool bench_all = false;
  auto* bench_cmd = app.add_subcommand("bench", "Run the benchmark corpus");
  bench_cmd->add_option("dir", corpus, "Corpus directory");
  bench_cmd->add_option("--jsonl", jsonl, "Write one JSON record per benchmark to this file");
  bench_cmd->add_flag("--all", bench_all, "Enumerate all solutions instead of the first");
  bench_cmd->add_option("--time-limit", bench_time, "Seconds per benchmark")->check(CLI::PositiveNumber);

  auto* targets_cmd = app.add_subcommand("targets", "List the available targets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*compile_cmd) return cmd_compile(in, target, emit_flat, out, no_rewrites, trace, target_path);
    if (*solve_cmd) return cmd_solve(in, all, limit, stats, strategy, time_limit);
    if (*check_cmd) return cmd_check(in, solution_path);
    if (*bench_cmd) return cmd_bench(corpus, jsonl, bench_all, bench_time, target_path);
    if (*targets_cmd) return cmd_targets(target_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDiagnostics;
  }
  return kUsage;
}
