#include <algorithm>
#include <regex>

#include "acc2dc/errors.hpp"
#include "acc2dc/lexer.hpp"
#include "acc2dc/loop.hpp"

namespace acc2dc {

using lex::Token;
using lex::TokenKind;

bool SymbolInfo::shape_known() const {
  return std::none_of(extents.begin(), extents.end(), [](const std::string &e) {
    auto t = lex::trim(e);
    return t.empty() || t == ":" || t == "*" || t.back() == ':' || t.back() == '*';
  });
}

void SymbolTable::add(SymbolInfo info) {
  info.name = lex::to_lower(info.name);
  auto name = info.name;
  symbols_.insert_or_assign(std::move(name), std::move(info));
}

const SymbolInfo *SymbolTable::find(std::string_view name) const {
  auto it = symbols_.find(lex::to_lower(name));
  return it == symbols_.end() ? nullptr : &it->second;
}

const SymbolInfo &SymbolTable::lookup(std::string_view name) const {
  if (const auto *s = find(name))
    return *s;
  throw SymbolError("undeclared name '" + std::string(name) + "'");
}

bool SymbolTable::is_array(std::string_view name) const {
  const auto *s = find(name);
  return s && s->rank() > 0;
}

namespace {

const std::regex &type_keyword_re() {
  static const std::regex re(
      R"(^\s*(real|integer|logical|complex|character|double\s*precision|type\s*\(|class\s*\())",
      std::regex::icase);
  return re;
}

/// Length of the type-spec prefix of a declaration (keyword plus kind
/// selector), or 0 when `code` is not a type declaration.
std::size_t type_spec_length(std::string_view code) {
  std::cmatch m;
  if (!std::regex_search(code.begin(), code.end(), m, type_keyword_re()))
    return 0;
  std::size_t pos = static_cast<std::size_t>(m.length(0));
  if (code[pos - 1] == '(') {
    auto close = lex::match_paren(code, pos - 1);
    return close == std::string_view::npos ? 0 : close;
  }
  while (pos < code.size() && (code[pos] == ' ' || code[pos] == '\t'))
    ++pos;
  if (pos < code.size() && code[pos] == '(') {
    auto close = lex::match_paren(code, pos);
    return close == std::string_view::npos ? 0 : close;
  }
  if (pos < code.size() && code[pos] == '*') {
    ++pos;
    while (pos < code.size() && (std::isdigit(static_cast<unsigned char>(code[pos])) ||
                                 code[pos] == ' '))
      ++pos;
  }
  return pos;
}

bool is_procedure_header_text(std::string_view code) {
  auto ids = lex::identifiers(code);
  return std::find(ids.begin(), ids.end(), "function") != ids.end() ||
         std::find(ids.begin(), ids.end(), "subroutine") != ids.end();
}

void harvest_declaration(std::string_view code, std::size_t index, SymbolTable &table) {
  auto spec_len = type_spec_length(code);
  if (spec_len == 0 || is_procedure_header_text(code))
    return;
  std::string type_spec(lex::trim(code.substr(0, spec_len)));
  auto rest = code.substr(spec_len);

  std::vector<std::string> default_dims;
  std::string_view entities;
  auto colons = rest.find("::");
  if (colons != std::string_view::npos) {
    auto attrs = lex::split_top_level(rest.substr(0, colons));
    for (const auto &attr : attrs) {
      auto lower = lex::to_lower(attr);
      if (lower == "external")
        return; // procedure names, not variables
      if (lower.rfind("dimension", 0) == 0) {
        auto open = attr.find('(');
        if (open != std::string::npos) {
          auto close = lex::match_paren(attr, open);
          if (close != std::string::npos)
            default_dims = lex::split_top_level(attr.substr(open + 1, close - open - 2));
        }
      }
    }
    entities = rest.substr(colons + 2);
  } else {
    entities = rest;
    if (!entities.empty() && entities.front() == ',')
      return;
  }

  for (const auto &entity : lex::split_top_level(entities)) {
    std::string_view e = entity;
    auto eq = lex::assignment_equals(e);
    if (eq != std::string_view::npos)
      e = lex::trim(e.substr(0, eq));
    if (auto arrow = e.find("=>"); arrow != std::string_view::npos)
      e = lex::trim(e.substr(0, arrow));
    auto tokens = lex::tokenize(e);
    if (tokens.empty() || !tokens[0].is_identifier())
      continue;
    SymbolInfo info;
    info.name = tokens[0].text;
    info.type_spec = type_spec;
    info.decl_index = index;
    info.extents = default_dims;
    if (tokens.size() > 1 && tokens[1].kind == TokenKind::LParen) {
      auto open = tokens[1].offset;
      auto close = lex::match_paren(e, open);
      if (close != std::string_view::npos)
        info.extents = lex::split_top_level(e.substr(open + 1, close - open - 2));
    }
    table.add(std::move(info));
  }
}

} // namespace

bool is_specification_statement(std::string_view code) {
  auto tokens = lex::tokenize(code);
  if (tokens.empty() || !tokens[0].is_identifier())
    return false;
  bool has_double_colon = std::any_of(tokens.begin(), tokens.end(),
                                      [](const Token &t) { return t.text == "::"; });
  if (!has_double_colon && lex::assignment_equals(code) != std::string_view::npos)
    return false;
  if (type_spec_length(code) > 0)
    return !is_procedure_header_text(code);
  static constexpr std::string_view keywords[] = {
      "use",      "implicit", "import",   "parameter", "dimension", "save",
      "intent",   "external", "intrinsic", "data",     "allocatable", "pointer",
      "target",   "optional", "public",   "private",   "common",    "equivalence",
      "namelist", "contiguous", "protected", "volatile", "asynchronous", "value",
  };
  auto first = lex::to_lower(tokens[0].text);
  return std::find(std::begin(keywords), std::end(keywords), first) != std::end(keywords);
}

SymbolTable harvest_symbols(std::span<const LogicalLine> lines, const AnalysisConfig &config) {
  SymbolTable table;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].kind == LineKind::Code)
      harvest_declaration(lines[i].text, i, table);
  }
  for (const auto &[name, extents] : config.array_shapes) {
    SymbolInfo info;
    info.name = name;
    info.extents = extents;
    if (const auto *existing = table.find(name)) {
      info.type_spec = existing->type_spec;
      info.decl_index = existing->decl_index;
    }
    table.add(std::move(info));
  }
  return table;
}

// -- purity -------------------------------------------------------------------

std::string_view to_string(Purity purity) {
  switch (purity) {
  case Purity::Pure:
    return "pure";
  case Purity::NotPure:
    return "not_pure";
  case Purity::Unknown:
    return "unknown";
  }
  return "?";
}

namespace {

const std::regex &procedure_header_re() {
  static const std::regex re(
      R"(^((?:(?:pure|elemental|impure|recursive|non_recursive|module)\s+|)"
      R"((?:real|integer|logical|complex|character|double\s*precision)(?:\s*\([^)]*\)|\s*\*\s*\d+)?\s+|)"
      R"((?:type|class)\s*\([^)]*\)\s+)*)(subroutine|function|program)\s+(\w+))",
      std::regex::icase);
  return re;
}

} // namespace

PurityTable::PurityTable(std::span<const LogicalLine> lines, const AnalysisConfig &config)
    : whitelist_(config.purity_whitelist) {
  int interface_depth = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].kind != LineKind::Code)
      continue;
    static const std::regex interface_re(R"(^(abstract\s+)?interface\b)");
    static const std::regex end_interface_re(R"(^end\s*interface\b)");
    static const std::regex impure_re(R"(\bimpure\b)");
    static const std::regex pure_re(R"(\b(pure|elemental)\b)");
    auto lower = lex::to_lower(lines[i].text);
    if (std::regex_search(lower, interface_re)) {
      ++interface_depth;
      continue;
    }
    if (std::regex_search(lower, end_interface_re)) {
      interface_depth = std::max(0, interface_depth - 1);
      continue;
    }
    std::smatch m;
    if (!std::regex_search(lower, m, procedure_header_re()))
      continue;
    Procedure p;
    p.name = m[3].str();
    auto prefixes = m[1].str();
    p.pure = !std::regex_search(prefixes, impure_re) && std::regex_search(prefixes, pure_re);
    p.header_index = i;
    p.end_index = interface_depth > 0 ? 1 : 0; // marks interface bodies
    procedures_.push_back(std::move(p));
  }
}

bool PurityTable::defines(std::string_view name) const {
  auto lower = lex::to_lower(name);
  return std::any_of(procedures_.begin(), procedures_.end(),
                     [&](const Procedure &p) { return p.name == lower; });
}

Purity PurityTable::resolve(std::string_view name) const {
  auto lower = lex::to_lower(name);
  bool defined = false;
  for (const auto &p : procedures_) {
    if (p.name != lower)
      continue;
    if (p.pure)
      return Purity::Pure;
    defined = true;
  }
  if (whitelist_.count(lower))
    return Purity::Pure;
  return defined ? Purity::NotPure : Purity::Unknown;
}

std::optional<std::size_t> PurityTable::enclosing_header(std::size_t logical_index) const {
  std::optional<std::size_t> best;
  for (const auto &p : procedures_) {
    if (p.end_index == 1) // interface body
      continue;
    if (p.header_index <= logical_index)
      best = p.header_index;
  }
  return best;
}

std::optional<std::string> PurityTable::enclosing_procedure(std::size_t logical_index) const {
  std::optional<std::string> best;
  for (const auto &p : procedures_) {
    if (p.end_index == 1)
      continue;
    if (p.header_index <= logical_index)
      best = p.name;
  }
  return best;
}

// -- calls --------------------------------------------------------------------

bool is_intrinsic_function(std::string_view name) {
  static constexpr std::string_view intrinsics[] = {
      "abs",       "achar",    "acos",       "acosh",   "adjustl", "adjustr", "aimag",
      "aint",      "all",      "allocated",  "anint",   "any",     "asin",    "asinh",
      "associated", "atan",    "atan2",      "atanh",   "bessel_j0", "bessel_j1", "btest",
      "ceiling",   "char",     "cmplx",      "conjg",   "cos",     "cosh",    "count",
      "cshift",    "dble",     "digits",     "dim",     "dot_product", "dprod", "eoshift",
      "epsilon",   "erf",      "erfc",       "exp",     "exponent", "float",  "floor",
      "fraction",  "gamma",    "huge",       "hypot",   "iachar",  "iand",    "ibclr",
      "ibits",     "ibset",    "ichar",      "ieor",    "index",   "int",     "ior",
      "ishft",     "kind",     "lbound",     "len",     "len_trim", "log",    "log10",
      "log_gamma", "logical",  "matmul",     "max",     "maxloc",  "maxval",  "merge",
      "min",       "minloc",   "minval",     "mod",     "modulo",  "nearest", "nint",
      "norm2",     "not",      "pack",       "precision", "present", "product", "real",
      "repeat",    "reshape",  "rrspacing",  "scale",   "scan",    "selected_int_kind",
      "selected_real_kind", "shape", "sign", "sin",     "sinh",    "size",    "sngl",
      "spacing",   "spread",   "sqrt",       "storage_size", "sum", "tan",    "tanh",
      "tiny",      "transpose", "trim",      "ubound",  "unpack",  "verify",
  };
  return std::find(std::begin(intrinsics), std::end(intrinsics), name) != std::end(intrinsics);
}

namespace {

bool is_statement_keyword(std::string_view name) {
  static constexpr std::string_view keywords[] = {
      "if",      "elseif",  "while",      "where",  "elsewhere", "forall",  "case",
      "select",  "allocate", "deallocate", "write", "read",      "print",   "open",
      "close",   "inquire", "nullify",    "return", "stop",      "concurrent", "reduce",
      "call",    "do",      "result",     "format", "rewind",    "backspace", "flush",
      "wait",    "block",   "associate",  "then",   "else",      "go",      "goto",
      "exit",    "cycle",   "error",      "rank",   "type",      "class",   "local",
      "local_init", "shared", "default",
  };
  return std::find(std::begin(keywords), std::end(keywords), name) != std::end(keywords);
}

/// True when every argument is an affine-looking expression over loop
/// indices and at least one index is referenced.
bool index_like_arguments(const std::vector<Token> &tokens, std::size_t open, std::size_t close,
                          std::span<const std::string> loop_indices) {
  bool references_index = false;
  for (std::size_t i = open + 1; i < close; ++i) {
    const auto &t = tokens[i];
    switch (t.kind) {
    case TokenKind::Identifier: {
      auto lower = lex::to_lower(t.text);
      if (std::find(loop_indices.begin(), loop_indices.end(), lower) == loop_indices.end())
        return false;
      references_index = true;
      break;
    }
    case TokenKind::Number:
    case TokenKind::Comma:
    case TokenKind::LParen:
    case TokenKind::RParen:
      break;
    case TokenKind::Operator:
      if (t.text != "+" && t.text != "-" && t.text != "*" && t.text != ":")
        return false;
      break;
    default:
      return false;
    }
  }
  return references_index;
}

} // namespace

std::vector<CallSite> detect_calls(std::span<const LogicalLine> body, const SymbolTable &symbols,
                                   const PurityTable &purity,
                                   std::span<const std::string> loop_indices) {
  std::set<std::string> subscripted_targets;
  for (const auto &line : body) {
    if (line.kind != LineKind::Code)
      continue;
    auto eq = lex::assignment_equals(line.text);
    if (eq == std::string_view::npos)
      continue;
    auto lhs = lex::tokenize(std::string_view(line.text).substr(0, eq));
    if (lhs.size() >= 2 && lhs[0].is_identifier() && lhs[1].kind == TokenKind::LParen)
      subscripted_targets.insert(lex::to_lower(lhs[0].text));
  }

  std::vector<CallSite> calls;
  for (const auto &line : body) {
    if (line.kind != LineKind::Code)
      continue;
    auto tokens = lex::tokenize(line.text);
    std::size_t start = 0;
    // `if (cond) call foo(x)` puts the call after the condition.
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      if (tokens[i].is(TokenKind::Identifier, "call") && tokens[i + 1].is_identifier() &&
          (i == 0 || tokens[i - 1].kind == TokenKind::RParen)) {
        auto callee = lex::to_lower(tokens[i + 1].text);
        calls.push_back({callee, purity.resolve(callee), line.line_number()});
        start = i + 2;
      }
    }
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      if (!tokens[i].is_identifier() || tokens[i + 1].kind != TokenKind::LParen)
        continue;
      if (i + 1 == start) // callee of a call statement, already reported
        continue;
      if (i > 0 && tokens[i - 1].text == "%")
        continue;
      auto name = lex::to_lower(tokens[i].text);
      // A function result declared inside the function also lands in the
      // symbol table; a defined procedure name wins.
      bool variable = symbols.find(name) && !purity.defines(name);
      if (is_statement_keyword(name) || is_intrinsic_function(name) || variable ||
          subscripted_targets.count(name))
        continue;
      auto close = lex::match_paren(tokens, i + 1);
      if (close == std::string_view::npos)
        continue;
      if (index_like_arguments(tokens, i + 1, close, loop_indices))
        continue;
      calls.push_back({name, purity.resolve(name), line.line_number()});
    }
  }
  return calls;
}

} // namespace acc2dc
