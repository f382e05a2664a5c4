#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace acc2dc {

/// Base of every error the toolkit throws. Line numbers are 1-based physical
/// line numbers in the file being processed; 0 means "not tied to a line".
class Error : public std::runtime_error {
public:
  explicit Error(const std::string &message, std::size_t line = 0)
      : std::runtime_error(message), line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Input is not UTF-8 text, or is a fixed-form source.
class InputError : public Error {
public:
  using Error::Error;
};

enum class ParseErrorKind {
  UnknownDirective,
  Malformed,
  OrphanContinuation,
  UnmatchedEnd,
};

class ParseError : public Error {
public:
  ParseError(ParseErrorKind kind, const std::string &message, std::size_t line = 0)
      : Error(message, line), kind_(kind) {}

  ParseErrorKind kind() const { return kind_; }

private:
  ParseErrorKind kind_;
};

/// Unmatched begin/end directive pair. Carries both line numbers; for an
/// unterminated begin, `other_line` is the line where the mismatch was seen
/// (or one past the last line at end of file).
class StructureError : public Error {
public:
  StructureError(const std::string &message, std::size_t line, std::size_t other_line)
      : Error(message, line), other_line_(other_line) {}

  std::size_t other_line() const { return other_line_; }

private:
  std::size_t other_line_;
};

class SymbolError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class ReportError : public Error {
public:
  using Error::Error;
};

} // namespace acc2dc
