#include "acc2dc/source.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "acc2dc/errors.hpp"
#include "acc2dc/lexer.hpp"

namespace acc2dc {

std::string_view to_string(LineKind kind) {
  switch (kind) {
  case LineKind::Code:
    return "code";
  case LineKind::Comment:
    return "comment";
  case LineKind::AccDirective:
    return "acc_directive";
  case LineKind::Blank:
    return "blank";
  }
  return "?";
}

SourceFile::SourceFile(std::string path, std::vector<std::string> physical_lines,
                       bool trailing_newline)
    : path_(std::move(path)), lines_(std::move(physical_lines)),
      trailing_newline_(trailing_newline) {}

namespace {

bool valid_utf8(std::string_view text, std::size_t &bad_line) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size();) {
    auto c = static_cast<unsigned char>(text[i]);
    if (c == '\n')
      ++line;
    if (c == 0) {
      bad_line = line;
      return false;
    }
    std::size_t extra = 0;
    if (c < 0x80)
      extra = 0;
    else if ((c & 0xE0) == 0xC0 && c >= 0xC2)
      extra = 1;
    else if ((c & 0xF0) == 0xE0)
      extra = 2;
    else if ((c & 0xF8) == 0xF0 && c <= 0xF4)
      extra = 3;
    else {
      bad_line = line;
      return false;
    }
    for (std::size_t k = 1; k <= extra; ++k) {
      if (i + k >= text.size() || (static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
        bad_line = line;
        return false;
      }
    }
    i += extra + 1;
  }
  return true;
}

bool has_fixed_form_extension(std::string_view path) {
  auto dot = path.rfind('.');
  if (dot == std::string_view::npos)
    return false;
  auto slash = path.find_last_of("/\\");
  if (slash != std::string_view::npos && slash > dot)
    return false;
  auto ext = lex::to_lower(path.substr(dot + 1));
  return ext == "f" || ext == "for" || ext == "ftn" || ext == "f77";
}

} // namespace

SourceFile load_source(std::string_view text, std::string path) {
  if (has_fixed_form_extension(path))
    throw InputError("fixed-form Fortran is not supported: " + path);
  std::size_t bad_line = 0;
  if (!valid_utf8(text, bad_line))
    throw InputError("input is not UTF-8 text", bad_line);

  std::string normalized;
  normalized.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n')
      continue;
    normalized.push_back(text[i]);
  }

  std::vector<std::string> lines;
  bool trailing = false;
  if (!normalized.empty()) {
    if (normalized.back() == '\n') {
      trailing = true;
      normalized.pop_back();
    }
    std::size_t start = 0;
    while (true) {
      auto nl = normalized.find('\n', start);
      if (nl == std::string::npos) {
        lines.push_back(normalized.substr(start));
        break;
      }
      lines.push_back(normalized.substr(start, nl - start));
      start = nl + 1;
    }
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    // Fixed-form comment marker in column 1; never valid free-form.
    if (!lines[i].empty() && lines[i][0] == '*')
      throw InputError("fixed-form comment in column 1; fixed-form Fortran is not supported",
                       i + 1);
  }
  return SourceFile(std::move(path), std::move(lines), trailing);
}

SourceFile read_source_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot read file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_source(buffer.str(), path);
}

std::string_view leading_whitespace(std::string_view line) {
  auto pos = line.find_first_not_of(" \t");
  return pos == std::string_view::npos ? line : line.substr(0, pos);
}

bool starts_with_acc_sentinel(std::string_view line) {
  auto rest = line.substr(leading_whitespace(line).size());
  if (rest.size() < 5 || !lex::iequals(rest.substr(0, 5), "!$acc"))
    return false;
  if (rest.size() == 5)
    return true;
  char next = rest[5];
  return next == ' ' || next == '\t' || next == '&';
}

namespace {

/// Content after the sentinel, trimmed.
std::string_view after_sentinel(std::string_view line) {
  auto rest = line.substr(leading_whitespace(line).size());
  return lex::trim(rest.substr(5));
}

LineKind physical_kind(std::string_view line) {
  auto rest = lex::trim(line);
  if (rest.empty())
    return LineKind::Blank;
  if (starts_with_acc_sentinel(line))
    return LineKind::AccDirective;
  if (rest.front() == '!')
    return LineKind::Comment;
  return LineKind::Code;
}

bool ends_with_ampersand(std::string_view s) {
  s = lex::trim(s);
  return !s.empty() && s.back() == '&';
}

std::string_view drop_trailing_ampersand(std::string_view s) {
  s = lex::trim(s);
  if (!s.empty() && s.back() == '&')
    s.remove_suffix(1);
  return s;
}

} // namespace

std::vector<LogicalLine> assemble_logical_lines(const SourceFile &src) {
  const auto &physical = src.physical_lines();
  std::vector<LogicalLine> out;
  out.reserve(physical.size());

  for (std::size_t i = 0; i < physical.size();) {
    const std::string &line = physical[i];
    LogicalLine logical;
    logical.kind = physical_kind(line);
    logical.first_physical_index = i;
    logical.indent = std::string(leading_whitespace(line));

    switch (logical.kind) {
    case LineKind::Blank:
    case LineKind::Comment:
      logical.text = std::string(lex::trim(line));
      ++i;
      break;

    case LineKind::AccDirective: {
      auto content = after_sentinel(line);
      if (!content.empty() && content.front() == '&')
        throw ParseError(ParseErrorKind::OrphanContinuation,
                         "'!$acc&' continuation line without a preceding directive", i + 1);
      std::string text(lex::trim(drop_trailing_ampersand(content)));
      bool pending = ends_with_ampersand(content);
      std::size_t j = i + 1;
      while (j < physical.size()) {
        if (!starts_with_acc_sentinel(physical[j])) {
          if (pending)
            throw ParseError(ParseErrorKind::Malformed,
                             "directive continued with '&' but the next line is not an "
                             "'!$acc' line",
                             j + 1);
          break;
        }
        auto next = after_sentinel(physical[j]);
        bool marked = !next.empty() && next.front() == '&';
        if (!pending && !marked)
          break;
        if (marked)
          next.remove_prefix(1);
        auto piece = lex::trim(drop_trailing_ampersand(next));
        if (!piece.empty()) {
          if (!text.empty())
            text += ' ';
          text += piece;
        }
        pending = ends_with_ampersand(next);
        ++j;
      }
      if (pending && j == physical.size())
        throw ParseError(ParseErrorKind::Malformed,
                         "directive continued with '&' at end of file", j);
      logical.text = std::move(text);
      logical.span = j - i;
      i = j;
      break;
    }

    case LineKind::Code: {
      auto code = lex::strip_comment(line);
      std::string text(lex::trim(code));
      std::size_t j = i + 1;
      bool pending = ends_with_ampersand(code);
      if (pending)
        text = std::string(lex::trim(drop_trailing_ampersand(text)));
      std::size_t last_code = i;
      while (pending && j < physical.size()) {
        auto kind = physical_kind(physical[j]);
        if (kind == LineKind::Blank || kind == LineKind::Comment) {
          ++j;
          continue;
        }
        if (kind == LineKind::AccDirective)
          break;
        auto next = lex::strip_comment(physical[j]);
        auto body = lex::trim(next);
        bool more = ends_with_ampersand(body);
        if (more)
          body = drop_trailing_ampersand(body);
        if (!body.empty() && body.front() == '&') {
          text += body.substr(1);
        } else {
          text += ' ';
          text += lex::trim(body);
        }
        pending = more;
        last_code = j;
        ++j;
      }
      logical.text = std::move(text);
      logical.span = last_code - i + 1;
      i = last_code + 1;
      break;
    }
    }
    out.push_back(std::move(logical));
  }
  return out;
}

std::string emit_source(const SourceFile &src) {
  std::string out;
  const auto &lines = src.physical_lines();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i)
      out += '\n';
    out += lines[i];
  }
  if (src.trailing_newline() && !lines.empty())
    out += '\n';
  return out;
}

SourceFile apply_edits(const SourceFile &src, std::span<const LineEdit> edits) {
  std::vector<const LineEdit *> ordered;
  ordered.reserve(edits.size());
  for (const auto &e : edits)
    ordered.push_back(&e);
  std::stable_sort(ordered.begin(), ordered.end(), [](const LineEdit *a, const LineEdit *b) {
    if (a->first != b->first)
      return a->first < b->first;
    return a->count < b->count; // insertions before replacements at the same line
  });

  const auto &lines = src.physical_lines();
  std::vector<std::string> out;
  out.reserve(lines.size());
  std::size_t cursor = 0;
  for (const LineEdit *e : ordered) {
    if (e->first < cursor || e->first + e->count > lines.size())
      throw Error("overlapping or out-of-range line edit", e->first + 1);
    for (; cursor < e->first; ++cursor)
      out.push_back(lines[cursor]);
    for (const auto &r : e->replacement)
      out.push_back(r);
    cursor = e->first + e->count;
  }
  for (; cursor < lines.size(); ++cursor)
    out.push_back(lines[cursor]);
  bool trailing = src.trailing_newline() || (lines.empty() && !out.empty());
  return SourceFile(src.path(), std::move(out), trailing);
}

} // namespace acc2dc
