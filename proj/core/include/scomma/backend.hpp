#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scomma/flat.hpp"
#include "scomma/source.hpp"

namespace scomma {

/// One element of a template body.
struct TemplateElem {
  enum class Kind { Text, Field, IfDefined, ForEach };
  Kind kind = Kind::Text;
  std::string text;               // Text: literal output
  std::vector<std::string> path;  // Field / IfDefined / ForEach: dotted field path
  std::string var;                // ForEach: loop variable
  std::string separator;          // ForEach
  std::vector<TemplateElem> body;       // IfDefined: then-branch; ForEach: per-item body
  std::vector<TemplateElem> otherwise;  // IfDefined: else-branch
  SourceSpan span;
};

struct Template {
  std::string concept_name;
  std::string qualifier;  // empty matches any node of the concept
  std::vector<TemplateElem> body;
  SourceSpan span;
};

struct RuleRef {
  std::string name;
  std::map<std::string, std::string> params;
  SourceSpan span;
};

/// A target emitter described as data: per-concept templates plus the
/// ordered rewrite rules the target needs.
struct BackendDescriptor {
  std::string name;
  std::string extension;
  std::string origin;  // "built-in" or the file it was loaded from
  std::vector<TemplateElem> header;
  std::vector<TemplateElem> footer;
  std::map<std::pair<std::string, std::string>, Template> templates;  // (concept, qualifier)
  std::vector<RuleRef> rules;
  std::vector<std::string> unsupported;  // construct names, see construct_names()
  std::vector<std::string> reserved;     // target keywords
  std::map<std::string, std::string> operators;  // source symbol -> target spelling
  bool parenthesize_all = false;

  const Template* find_template(const std::string& concept_name, const std::string& qualifier) const;
};

/// Concept names accepted by `template` declarations.
std::vector<std::string> concept_names();
/// Fields a concept exposes to templates.
std::vector<std::string> concept_fields(const std::string& concept_name);

/// Constructs a descriptor may declare `unsupported`, and the rule that
/// removes each one (empty when no rule does).
const std::vector<std::pair<std::string, std::string>>& construct_names();

/// Constructs of `construct_names()` present in `fm`, in catalogue order.
std::vector<std::string> constructs_in(const FlatModel& fm, const BackendDescriptor& bd);

// --- rewrite rules --------------------------------------------------------

struct RuleContext {
  std::map<std::string, std::string> params;
  std::vector<std::string> reserved;
};

class RewriteRule {
 public:
  virtual ~RewriteRule() = default;
  virtual std::string name() const = 0;
  /// Parameters the rule understands.
  virtual std::vector<std::string> params() const { return {}; }
  virtual bool applies(const FlatModel& fm, const RuleContext& ctx) const = 0;
  /// Throws BackendError naming the rule and the offending node when the
  /// model cannot be rewritten.
  virtual FlatModel apply(const FlatModel& fm, const RuleContext& ctx) const = 0;
};

/// Built-in rules: decompose_set_matrix, split_matrix_to_arrays,
/// rename_reserved_words, int_bounds_widen.
const std::vector<std::unique_ptr<RewriteRule>>& rule_registry();
const RewriteRule* find_rule(const std::string& name);

/// Applies `rules` in order; a rule whose guard is false leaves the model
/// unchanged. `reserved` feeds rename_reserved_words.
FlatModel apply_rewrites(const FlatModel& fm, const std::vector<RuleRef>& rules,
                         const std::vector<std::string>& reserved = {});

// --- emission -------------------------------------------------------------

/// Rewrites `fm` with the descriptor's rules, then renders it. Throws
/// BackendError when a template is missing, a field is absent on a node, or
/// an unsupported construct survives the rewrites.
std::string emit(const FlatModel& fm, const BackendDescriptor& bd);

/// Renders `fm` without rewrites. Fails when `fm` contains a construct the
/// descriptor declares unsupported, naming the rule that would remove it.
std::string direct_emit(const FlatModel& fm, const BackendDescriptor& bd);

// --- targets --------------------------------------------------------------

struct TargetInfo {
  std::string name;
  std::string extension;
  std::string origin;
  std::vector<std::string> rules;
};

/// Built-in descriptors plus descriptors loaded from directories. A later
/// descriptor with an existing name shadows the earlier one with a warning.
class TargetRegistry {
 public:
  /// Registry holding the built-in flat, gecodej and clp descriptors.
  static TargetRegistry builtin();

  /// Loads every `*.bd` file of `dir` in name order. Problems are reported
  /// in the returned diagnostics; a directory that does not exist is skipped.
  Diagnostics add_directory(const std::string& dir);
  Diagnostics add_file(const std::string& path);
  void add(BackendDescriptor bd, Diagnostics& diags, const SourceSpan& where = {});

  const BackendDescriptor* find(const std::string& name) const;
  std::vector<TargetInfo> list() const;
  std::vector<std::string> names() const;

 private:
  std::vector<BackendDescriptor> descriptors_;
};

/// Built-in descriptors followed by those found in `dirs`.
std::vector<TargetInfo> list_targets(const std::vector<std::string>& dirs = {}, Diagnostics* diags = nullptr);

/// Source text of a built-in descriptor, or nullptr.
const char* builtin_descriptor_text(const std::string& name);
std::vector<std::string> builtin_descriptor_names();

}  // namespace scomma
