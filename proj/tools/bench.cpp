#include "bench.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "scomma/driver.hpp"
#include "scomma/lexer.hpp"

namespace scomma::bench {

namespace fs = std::filesystem;

std::vector<Entry> discover(const std::string& dir) {
  std::vector<Entry> out;
  if (!fs::is_directory(dir)) return out;
  std::vector<fs::path> models;
  for (const auto& f : fs::recursive_directory_iterator(dir))
    if (f.is_regular_file() && f.path().extension() == ".scm") models.push_back(f.path());
  std::sort(models.begin(), models.end());
  for (const auto& m : models) {
    std::string stem = m.stem().string();
    std::vector<fs::path> variants;
    for (const auto& f : fs::directory_iterator(m.parent_path())) {
      std::string ds = f.path().stem().string();
      if (f.path().extension() == ".dat" && ds.size() > stem.size() && ds.compare(0, stem.size(), stem) == 0)
        variants.push_back(f.path());
    }
    std::sort(variants.begin(), variants.end());
    if (variants.empty()) {
      out.push_back({stem, m.string(), ""});
      continue;
    }
    for (const auto& d : variants) out.push_back({d.stem().string(), m.string(), d.string()});
  }
  return out;
}

namespace {

std::string source_text_of(const Entry& e, const Compilation& c) {
  if (e.data_path.empty()) return c.source_text;
  return read_file(e.model_path) + read_file(e.data_path);
}

}  // namespace

Row run(const Entry& e, const TargetRegistry& targets, const Options& opts) {
  Row r;
  r.entry = e;
  try {
    auto compiled = compile_file(e.model_path, e.data_path.empty() ? std::nullopt : std::optional(e.data_path));
    if (!compiled) {
      const auto& ds = compiled.diagnostics.all();
      auto first = std::find_if(ds.begin(), ds.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
      r.error = first == ds.end() ? "compilation failed" : format_diagnostic(*first);
      return r;
    }
    const FlatModel& fm = compiled->flat.model;
    r.source_tokens = count_tokens(source_text_of(e, *compiled));
    r.flat_variables = fm.variables.size();
    r.flat_elements = fm.element_count();
    r.flat_constraints = fm.constraints.size();
    bool emitted = true;
    for (const auto& info : targets.list()) {
      TargetSize t;
      t.target = info.name;
      try {
        t.tokens = count_tokens(emit(fm, *targets.find(info.name)));
        t.ok = true;
      } catch (const Error& ex) {
        t.error = ex.what();
        emitted = false;
      }
      r.targets.push_back(std::move(t));
    }
    SearchConfig cfg;
    cfg.time_limit = opts.time_limit;
    try {
      SolverSpace space(fm);
      if (fm.objective) {
        auto o = optimize(space, cfg);
        r.stats = o.stats;
        if (o.best) r.objective = o.best->objective_value;
        r.solve_status = o.status == OptimizeResult::Status::Optimal      ? "optimal"
                         : o.status == OptimizeResult::Status::Infeasible ? "infeasible"
                                                                          : "truncated";
      } else {
        if (!opts.all_solutions) cfg.solution_limit = 1;
        Search search(space, cfg);
        while (search.next()) {
        }
        r.stats = search.stats();
        if (search.truncated() && r.stats.solutions == 0)
          r.solve_status = "truncated";
        else
          r.solve_status = r.stats.solutions > 0 ? "solved" : "infeasible";
      }
    } catch (const Unsupported& u) {
      r.emit_only = true;
      r.solve_status = "unsupported";
      r.note = u.what();
    }
    r.ok = emitted && r.solve_status != "truncated";
    if (!emitted) r.error = "a target failed to emit";
  } catch (const std::exception& ex) {
    r.ok = false;
    r.error = ex.what();
  }
  return r;
}

std::vector<Row> run_all(const std::vector<Entry>& entries, const TargetRegistry& targets, const Options& opts) {
  std::vector<Row> rows;
  rows.reserve(entries.size());
  for (const auto& e : entries) rows.push_back(run(e, targets, opts));
  return rows;
}

std::string to_json_line(const Row& r) {
  nlohmann::ordered_json j;
  j["name"] = r.entry.name;
  j["model"] = r.entry.model_path;
  j["data"] = r.entry.data_path;
  j["ok"] = r.ok;
  j["error"] = r.error;
  j["source_tokens"] = r.source_tokens;
  j["flat_variables"] = r.flat_variables;
  j["flat_elements"] = r.flat_elements;
  j["flat_constraints"] = r.flat_constraints;
  nlohmann::ordered_json t = nlohmann::ordered_json::object();
  for (const auto& s : r.targets) t[s.target] = s.ok ? nlohmann::ordered_json(s.tokens) : nlohmann::ordered_json(nullptr);
  j["target_tokens"] = t;
  j["emit_only"] = r.emit_only;
  j["solve_status"] = r.solve_status;
  j["solutions"] = r.stats.solutions;
  j["nodes"] = r.stats.nodes;
  j["failures"] = r.stats.failures;
  j["propagations"] = r.stats.propagations;
  j["seconds"] = r.stats.seconds;
  j["objective"] = r.objective ? nlohmann::ordered_json(*r.objective) : nlohmann::ordered_json(nullptr);
  j["note"] = r.note;
  return j.dump();
}

std::string format_table(const std::vector<Row>& rows, const std::vector<std::string>& target_names) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-16s %7s %6s %6s", "benchmark", "source", "vars", "cons");
  os << buf;
  for (const auto& t : target_names) {
    std::snprintf(buf, sizeof buf, " %8s", t.c_str());
    os << buf;
  }
  os << "  solve\n";
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-16s %7zu %6lld %6zu", r.entry.name.c_str(), r.source_tokens,
                  static_cast<long long>(r.flat_elements), r.flat_constraints);
    os << buf;
    for (const auto& name : target_names) {
      auto it = std::find_if(r.targets.begin(), r.targets.end(), [&](const TargetSize& t) { return t.target == name; });
      if (it != r.targets.end() && it->ok)
        std::snprintf(buf, sizeof buf, " %8zu", it->tokens);
      else
        std::snprintf(buf, sizeof buf, " %8s", "-");
      os << buf;
    }
    if (!r.error.empty()) {
      os << "  FAILED: " << r.error << "\n";
      continue;
    }
    os << "  " << r.solve_status;
    if (r.objective) os << " (objective " << *r.objective << ")";
    if (r.solve_status != "unsupported") {
      std::snprintf(buf, sizeof buf, " %.3fs", r.stats.seconds);
      os << buf;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace scomma::bench
