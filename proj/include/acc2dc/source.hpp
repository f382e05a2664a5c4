#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace acc2dc {

enum class LineKind { Code, Comment, AccDirective, Blank };

std::string_view to_string(LineKind kind);

/// One statement-level unit of a free-form Fortran file. Directive lines
/// joined through `!$acc&` and code lines joined through trailing `&` become
/// a single logical line spanning several physical lines.
struct LogicalLine {
  LineKind kind = LineKind::Blank;
  std::size_t first_physical_index = 0; ///< 0-based
  std::size_t span = 1;
  /// Continuation-joined content. For directives this is the text after the
  /// sentinel; for code it is the statement with trailing comments removed.
  std::string text;
  std::string indent;

  std::size_t last_physical_index() const { return first_physical_index + span - 1; }
  /// 1-based line number of the first physical line, for diagnostics.
  std::size_t line_number() const { return first_physical_index + 1; }
};

/// Raw file content split into physical lines. Line endings are normalized to
/// LF; whether the input ended with a newline is recorded so that emission
/// reproduces the input exactly.
class SourceFile {
public:
  SourceFile() = default;
  SourceFile(std::string path, std::vector<std::string> physical_lines,
             bool trailing_newline);

  const std::string &path() const { return path_; }
  const std::vector<std::string> &physical_lines() const { return lines_; }
  std::size_t line_count() const { return lines_.size(); }
  bool trailing_newline() const { return trailing_newline_; }

  friend bool operator==(const SourceFile &, const SourceFile &) = default;

private:
  std::string path_;
  std::vector<std::string> lines_;
  bool trailing_newline_ = false;
};

/// Replaces `count` physical lines starting at `first` with `replacement`.
/// `count == 0` inserts before `first`.
struct LineEdit {
  std::size_t first = 0;
  std::size_t count = 0;
  std::vector<std::string> replacement;
};

/// Throws InputError for non-UTF-8 content, NUL bytes, or a fixed-form file
/// extension (.f, .for, .ftn, .f77).
SourceFile load_source(std::string_view text, std::string path = {});

/// Reads a file from disk and calls load_source.
SourceFile read_source_file(const std::string &path);

/// Throws ParseError for an `!$acc&` continuation with no directive before it,
/// or a directive ending in `&` whose next line is not a directive line.
std::vector<LogicalLine> assemble_logical_lines(const SourceFile &src);

std::string emit_source(const SourceFile &src);

/// Applies non-overlapping edits. Edits may be given in any order.
SourceFile apply_edits(const SourceFile &src, std::span<const LineEdit> edits);

/// True when the first non-blank characters of `line` are the `!$acc`
/// sentinel (any case) followed by whitespace, `&`, or end of line.
bool starts_with_acc_sentinel(std::string_view line);

/// Leading spaces and tabs of `line`.
std::string_view leading_whitespace(std::string_view line);

} // namespace acc2dc
