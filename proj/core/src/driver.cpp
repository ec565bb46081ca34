#include "scomma/driver.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "scomma/parser.hpp"

namespace scomma {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("cannot write '" + path + "'");
}

namespace {

Result<Compilation> finish(const Model& model, const std::vector<DataFile>& data, Diagnostics diags,
                           std::string source_text) {
  Result<Compilation> r;
  auto merged = merge_data(data);
  diags.append(merged.diagnostics);
  if (diags.has_errors()) {
    r.diagnostics = std::move(diags);
    return r;
  }
  auto typed = analyze(model, *merged.value);
  diags.append(typed.diagnostics);
  if (!typed.ok()) {
    r.diagnostics = std::move(diags);
    return r;
  }
  Compilation c;
  c.typed = std::move(*typed.value);
  c.source_text = std::move(source_text);
  try {
    c.flat = flatten(c.typed);
  } catch (const FlattenError& e) {
    SourceSpan span = e.span();
    if (span.file.empty()) span.file = model.name;
    diags.error(e.what(), span);
    r.diagnostics = std::move(diags);
    return r;
  }
  for (const auto& w : c.flat.warnings) diags.warning(w.message, w.span);
  r.diagnostics = std::move(diags);
  r.value = std::move(c);
  return r;
}

}  // namespace

Result<Compilation> compile_text(const std::string& model_text, const std::string& model_name,
                                 const std::vector<std::pair<std::string, std::string>>& data_texts) {
  Result<Compilation> r;
  auto model = parse_model(model_text, model_name);
  Diagnostics diags = model.diagnostics;
  std::vector<DataFile> data;
  std::string source = model_text;
  for (const auto& [name, text] : data_texts) {
    auto d = parse_data(text, name);
    diags.append(d.diagnostics);
    if (d.ok()) data.push_back(std::move(*d.value));
    source += "\n" + text;
  }
  if (!model.ok() || diags.has_errors()) {
    r.diagnostics = std::move(diags);
    return r;
  }
  return finish(*model.value, data, std::move(diags), std::move(source));
}

Result<Compilation> compile_file(const std::string& model_path, const std::optional<std::string>& data_path) {
  Result<Compilation> r;
  std::string text;
  try {
    text = read_file(model_path);
  } catch (const Error& e) {
    r.diagnostics.error(e.what(), SourceSpan{model_path, 1, 1, 0});
    return r;
  }

  if (fs::path(model_path).extension() == ".flat") {
    auto flat = parse_flat(text, model_path);
    r.diagnostics = flat.diagnostics;
    if (!flat.ok()) return r;
    Compilation c;
    c.flat.model = std::move(*flat.value);
    c.typed.model.name = c.flat.model.name;
    c.typed.enums = c.flat.model.enum_types;
    c.source_text = text;
    r.value = std::move(c);
    return r;
  }

  auto model = parse_model(text, model_path);
  Diagnostics diags = model.diagnostics;
  if (!model.ok()) {
    r.diagnostics = std::move(diags);
    return r;
  }

  std::vector<std::pair<std::string, SourceSpan>> sources;
  if (data_path) {
    sources.emplace_back(*data_path, SourceSpan{*data_path, 1, 1, 0});
  } else {
    fs::path dir = fs::path(model_path).parent_path();
    for (std::size_t i = 0; i < model->imports.size(); ++i)
      sources.emplace_back((dir / model->imports[i]).string(), model->import_spans[i]);
  }

  std::vector<DataFile> data;
  std::string source = text;
  for (const auto& [path, span] : sources) {
    std::string dtext;
    try {
      dtext = read_file(path);
    } catch (const Error&) {
      diags.error("cannot read data file '" + path + "'", span);
      continue;
    }
    auto d = parse_data(dtext, path);
    diags.append(d.diagnostics);
    if (d.ok()) data.push_back(std::move(*d.value));
    source += "\n" + dtext;
  }
  if (diags.has_errors()) {
    r.diagnostics = std::move(diags);
    return r;
  }
  return finish(*model.value, data, std::move(diags), std::move(source));
}

}  // namespace scomma
