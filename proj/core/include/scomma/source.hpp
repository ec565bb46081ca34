#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace scomma {

/// A location in an input file. Lines and columns are 1-based.
struct SourceSpan {
  std::string file;
  int line = 1;
  int column = 1;
  int length = 0;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;
};

/// `file:line:col: severity: message`
std::string format_diagnostic(const Diagnostic& d);

class Diagnostics {
 public:
  void error(std::string message, SourceSpan span);
  void warning(std::string message, SourceSpan span);
  void append(const Diagnostics& other);

  bool has_errors() const;
  std::size_t error_count() const;
  const std::vector<Diagnostic>& all() const { return items_; }
  bool empty() const { return items_.empty(); }

  void print(std::ostream& os) const;

 private:
  std::vector<Diagnostic> items_;
};

/// Either a value or the diagnostics explaining why there is none. Warnings may
/// accompany a successful value.
template <class T>
struct Result {
  std::optional<T> value;
  Diagnostics diagnostics;

  bool ok() const { return value.has_value() && !diagnostics.has_errors(); }
  explicit operator bool() const { return ok(); }
  T& operator*() { return *value; }
  const T& operator*() const { return *value; }
  T* operator->() { return &*value; }
  const T* operator->() const { return &*value; }
};

/// Base for all errors raised after parsing (evaluation, lowering, emission).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

class IndexError : public EvalError {
 public:
  IndexError(std::string name, long long index);
  const std::string& name() const { return name_; }
  long long index() const { return index_; }

 private:
  std::string name_;
  long long index_;
};

/// Precondition violated by the caller (e.g. a partial assignment handed to a
/// checker that needs a total one).
class ContractError : public Error {
 public:
  using Error::Error;
};

class FlattenError : public Error {
 public:
  FlattenError(std::string pass, std::string message, SourceSpan span = {});
  const std::string& pass() const { return pass_; }
  const SourceSpan& span() const { return span_; }
  FlattenError with_pass(std::string pass) const;

 private:
  std::string pass_;
  SourceSpan span_;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

}  // namespace scomma
