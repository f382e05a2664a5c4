#include <regex>

#include "acc2dc/errors.hpp"
#include "acc2dc/lexer.hpp"
#include "acc2dc/loop.hpp"

namespace acc2dc {

namespace {

/// Strips an optional `name:` construct label. Returns the label.
std::string_view split_construct_name(std::string_view &code) {
  static const std::regex re(R"(^\s*([A-Za-z_]\w*)\s*:(?!:))");
  std::cmatch m;
  if (std::regex_search(code.begin(), code.end(), m, re)) {
    auto name = code.substr(static_cast<std::size_t>(m.position(1)),
                            static_cast<std::size_t>(m.length(1)));
    code.remove_prefix(static_cast<std::size_t>(m.length(0)));
    return name;
  }
  return {};
}

} // namespace

DoForm classify_do(std::string_view code) {
  split_construct_name(code);
  auto tokens = lex::tokenize(code);
  if (tokens.empty() || !tokens[0].is(lex::TokenKind::Identifier, "do"))
    return DoForm::NotDo;
  if (tokens.size() == 1)
    return DoForm::Infinite;
  const auto &next = tokens[1];
  if (next.kind == lex::TokenKind::Number)
    return DoForm::Labeled;
  if (next.is(lex::TokenKind::Identifier, "concurrent"))
    return DoForm::Concurrent;
  if (next.is(lex::TokenKind::Identifier, "while"))
    return DoForm::While;
  if (next.kind == lex::TokenKind::Comma && tokens.size() > 2 &&
      tokens[2].is(lex::TokenKind::Identifier, "while"))
    return DoForm::While;
  if (next.is_identifier() && tokens.size() > 2 && tokens[2].text == "=")
    return DoForm::Counted;
  return DoForm::NotDo;
}

bool is_end_do(std::string_view code) {
  static const std::regex re(R"(^\s*end\s*do\b)", std::regex::icase);
  return std::regex_search(code.begin(), code.end(), re);
}

std::optional<LoopBounds> parse_do_header(std::string_view code) {
  split_construct_name(code);
  if (classify_do(code) != DoForm::Counted)
    return std::nullopt;
  auto eq = code.find('=');
  auto head = lex::tokenize(code.substr(0, eq));
  LoopBounds b;
  b.index_var = head.back().text;
  auto parts = lex::split_top_level(code.substr(eq + 1));
  if (parts.size() < 2 || parts.size() > 3)
    return std::nullopt;
  b.lower = parts[0];
  b.upper = parts[1];
  if (parts.size() == 3)
    b.stride = parts[2];
  return b;
}

std::size_t find_end_do(std::span<const LogicalLine> lines, std::size_t at) {
  std::size_t depth = 0;
  for (std::size_t i = at; i < lines.size(); ++i) {
    if (lines[i].kind != LineKind::Code)
      continue;
    auto form = classify_do(lines[i].text);
    if (form == DoForm::Labeled)
      throw ParseError(ParseErrorKind::Malformed,
                       "labeled DO loops are not supported", lines[i].line_number());
    if (form != DoForm::NotDo) {
      ++depth;
    } else if (is_end_do(lines[i].text)) {
      if (depth == 0)
        throw ParseError(ParseErrorKind::UnmatchedEnd, "unmatched 'enddo'",
                         lines[i].line_number());
      if (--depth == 0)
        return i;
    }
  }
  throw ParseError(ParseErrorKind::UnmatchedEnd, "'do' without matching 'enddo'",
                   lines[at].line_number());
}

namespace {

bool is_transparent(const LogicalLine &line) {
  return line.kind == LineKind::Blank || line.kind == LineKind::Comment;
}

/// First logical index in [from, to) that is not blank, comment, or an
/// OpenACC loop directive.
std::size_t next_statement(std::span<const LogicalLine> lines, std::size_t from, std::size_t to) {
  for (std::size_t i = from; i < to; ++i) {
    if (is_transparent(lines[i]))
      continue;
    if (lines[i].kind == LineKind::AccDirective) {
      auto lower = lex::to_lower(lines[i].text);
      if (lower.rfind("loop", 0) == 0)
        continue;
    }
    return i;
  }
  return to;
}

/// Last logical index in [from, to) that is not blank or comment, else `to`.
std::size_t prev_statement(std::span<const LogicalLine> lines, std::size_t from, std::size_t to) {
  for (std::size_t i = to; i > from; --i)
    if (!is_transparent(lines[i - 1]))
      return i - 1;
  return to;
}

LoopHeader make_header(std::span<const LogicalLine> lines, std::size_t at) {
  LoopHeader h;
  std::string_view code = lines[at].text;
  h.construct_name = std::string(split_construct_name(code));
  auto bounds = parse_do_header(lines[at].text);
  if (!bounds)
    throw ParseError(ParseErrorKind::Malformed, "cannot parse DO header", lines[at].line_number());
  h.bounds = *bounds;
  h.header_index = at;
  h.end_index = find_end_do(lines, at);
  auto tokens = lex::tokenize(code);
  h.upper_case = !tokens.empty() && tokens[0].text == "DO";
  return h;
}

} // namespace

LoopNest parse_loop_nest(std::span<const LogicalLine> lines, std::size_t at) {
  if (at >= lines.size() || lines[at].kind != LineKind::Code)
    throw ParseError(ParseErrorKind::Malformed, "expected a DO statement",
                     at < lines.size() ? lines[at].line_number() : 0);
  auto form = classify_do(lines[at].text);
  LoopNest nest;
  switch (form) {
  case DoForm::Counted:
    break;
  case DoForm::Concurrent: {
    LoopHeader h;
    h.header_index = at;
    h.end_index = find_end_do(lines, at);
    nest.loops.push_back(h);
    nest.body_begin = at + 1;
    nest.body_end = h.end_index;
    nest.perfectly_nested_depth = 1;
    nest.concurrent = true;
    return nest;
  }
  case DoForm::While:
    throw ParseError(ParseErrorKind::Malformed, "UnsupportedLoop: 'do while' cannot become DC",
                     lines[at].line_number());
  case DoForm::Infinite:
  case DoForm::Labeled:
    throw ParseError(ParseErrorKind::Malformed,
                     "UnsupportedLoop: only counted DO loops can become DC",
                     lines[at].line_number());
  case DoForm::NotDo:
    throw ParseError(ParseErrorKind::Malformed, "expected a DO statement",
                     lines[at].line_number());
  }

  nest.loops.push_back(make_header(lines, at));
  while (true) {
    const auto &outer = nest.loops.back();
    auto inner = next_statement(lines, outer.header_index + 1, outer.end_index);
    if (inner == outer.end_index || lines[inner].kind != LineKind::Code ||
        classify_do(lines[inner].text) != DoForm::Counted)
      break;
    auto inner_end = find_end_do(lines, inner);
    if (prev_statement(lines, inner_end + 1, outer.end_index) != outer.end_index)
      break;
    nest.loops.push_back(make_header(lines, inner));
  }
  nest.perfectly_nested_depth = nest.loops.size();
  nest.body_begin = nest.loops.back().header_index + 1;
  nest.body_end = nest.loops.back().end_index;
  return nest;
}

LoopNest parse_loop_nest(const SourceFile &src, std::size_t at) {
  auto lines = assemble_logical_lines(src);
  return parse_loop_nest(lines, at);
}

} // namespace acc2dc
