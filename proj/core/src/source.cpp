#include "scomma/source.hpp"

#include <algorithm>
#include <sstream>

namespace scomma {

std::string format_diagnostic(const Diagnostic& d) {
  std::ostringstream os;
  os << (d.span.file.empty() ? "<input>" : d.span.file) << ':' << d.span.line << ':' << d.span.column << ": "
     << (d.severity == Severity::Error ? "error" : "warning") << ": " << d.message;
  return os.str();
}

void Diagnostics::error(std::string message, SourceSpan span) {
  items_.push_back({Severity::Error, std::move(message), std::move(span)});
}

void Diagnostics::warning(std::string message, SourceSpan span) {
  items_.push_back({Severity::Warning, std::move(message), std::move(span)});
}

void Diagnostics::append(const Diagnostics& other) {
  items_.insert(items_.end(), other.items_.begin(), other.items_.end());
}

bool Diagnostics::has_errors() const { return error_count() > 0; }

std::size_t Diagnostics::error_count() const {
  return static_cast<std::size_t>(
      std::count_if(items_.begin(), items_.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; }));
}

void Diagnostics::print(std::ostream& os) const {
  for (const auto& d : items_) os << format_diagnostic(d) << '\n';
}

IndexError::IndexError(std::string name, long long index)
    : EvalError("index " + std::to_string(index) + " out of bounds for '" + name + "'"),
      name_(std::move(name)),
      index_(index) {}

FlattenError::FlattenError(std::string pass, std::string message, SourceSpan span)
    : Error(pass.empty() ? message : pass + ": " + message), pass_(std::move(pass)), span_(std::move(span)) {}

FlattenError FlattenError::with_pass(std::string pass) const {
  if (!pass_.empty()) return *this;
  return FlattenError(std::move(pass), what(), span_);
}

}  // namespace scomma
