#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scomma/analyzer.hpp"
#include "scomma/flattener.hpp"
#include "scomma/source.hpp"

namespace scomma {

/// Reads a whole file; throws Error when it cannot be opened.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

struct Compilation {
  TypedModel typed;
  FlattenResult flat;
  std::string source_text;  // model text followed by the data texts
};

/// Parses a model file and its data, analyzes and flattens it. Data comes
/// from `data_path` when given, otherwise from the model's `import` lines
/// (resolved relative to the model's directory). A model whose path ends in
/// `.flat` is read as flat text directly.
Result<Compilation> compile_file(const std::string& model_path, const std::optional<std::string>& data_path = {});

/// Same pipeline over in-memory texts.
Result<Compilation> compile_text(const std::string& model_text, const std::string& model_name,
                                 const std::vector<std::pair<std::string, std::string>>& data_texts);

}  // namespace scomma
