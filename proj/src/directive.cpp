#include "acc2dc/directive.hpp"

#include <algorithm>
#include <cctype>

#include "acc2dc/errors.hpp"
#include "acc2dc/lexer.hpp"

namespace acc2dc {

std::string_view to_string(DirectiveKind kind) {
  switch (kind) {
  case DirectiveKind::Parallel:
    return "parallel";
  case DirectiveKind::EndParallel:
    return "end parallel";
  case DirectiveKind::Loop:
    return "loop";
  case DirectiveKind::ParallelLoop:
    return "parallel loop";
  case DirectiveKind::Kernels:
    return "kernels";
  case DirectiveKind::EndKernels:
    return "end kernels";
  case DirectiveKind::EnterData:
    return "enter data";
  case DirectiveKind::ExitData:
    return "exit data";
  case DirectiveKind::Update:
    return "update";
  case DirectiveKind::HostData:
    return "host_data";
  case DirectiveKind::EndHostData:
    return "end host_data";
  case DirectiveKind::Declare:
    return "declare";
  case DirectiveKind::Atomic:
    return "atomic";
  case DirectiveKind::Routine:
    return "routine";
  case DirectiveKind::Wait:
    return "wait";
  case DirectiveKind::SetDeviceNum:
    return "set";
  }
  return "?";
}

bool is_data_management(DirectiveKind kind) {
  switch (kind) {
  case DirectiveKind::EnterData:
  case DirectiveKind::ExitData:
  case DirectiveKind::Update:
  case DirectiveKind::HostData:
  case DirectiveKind::EndHostData:
  case DirectiveKind::Declare:
    return true;
  default:
    return false;
  }
}

std::string_view to_string(AtomicKind kind) {
  switch (kind) {
  case AtomicKind::Update:
    return "update";
  case AtomicKind::Read:
    return "read";
  case AtomicKind::Write:
    return "write";
  case AtomicKind::Capture:
    return "capture";
  }
  return "?";
}

std::string_view to_string(ReductionOp op) {
  switch (op) {
  case ReductionOp::Add:
    return "+";
  case ReductionOp::Multiply:
    return "*";
  case ReductionOp::Max:
    return "max";
  case ReductionOp::Min:
    return "min";
  case ReductionOp::Iand:
    return "iand";
  case ReductionOp::Ior:
    return "ior";
  case ReductionOp::Ieor:
    return "ieor";
  case ReductionOp::And:
    return ".and.";
  case ReductionOp::Or:
    return ".or.";
  }
  return "?";
}

std::optional<ReductionOp> parse_reduction_op(std::string_view text) {
  auto op = lex::to_lower(lex::trim(text));
  if (op == "+")
    return ReductionOp::Add;
  if (op == "*")
    return ReductionOp::Multiply;
  if (op == "max")
    return ReductionOp::Max;
  if (op == "min")
    return ReductionOp::Min;
  if (op == "iand")
    return ReductionOp::Iand;
  if (op == "ior")
    return ReductionOp::Ior;
  if (op == "ieor")
    return ReductionOp::Ieor;
  if (op == ".and.")
    return ReductionOp::And;
  if (op == ".or.")
    return ReductionOp::Or;
  return std::nullopt;
}

bool is_known_clause(std::string_view name) {
  static constexpr std::string_view known[] = {
      "async",       "wait",          "num_gangs",     "num_workers",  "vector_length",
      "device_type", "dtype",         "if",            "self",         "reduction",
      "copy",        "copyin",        "copyout",       "create",       "no_create",
      "present",     "deviceptr",     "attach",        "detach",       "private",
      "firstprivate", "default",      "collapse",      "gang",         "worker",
      "vector",      "seq",           "independent",   "auto",         "tile",
      "finalize",    "delete",        "host",          "device",       "if_present",
      "use_device",  "device_resident", "link",        "bind",         "nohost",
      "device_num",  "default_async", "pcopy",         "pcopyin",      "pcopyout",
      "pcreate",     "present_or_copy", "present_or_copyin", "present_or_copyout",
      "present_or_create",
  };
  return std::find(std::begin(known), std::end(known), name) != std::end(known);
}

const Clause *Directive::find_clause(std::string_view name) const {
  for (const auto &c : clauses)
    if (c.name == name)
      return &c;
  return nullptr;
}

bool Directive::same_content(const Directive &other) const {
  return kind == other.kind && args == other.args && clauses == other.clauses &&
         atomic_kind == other.atomic_kind && unknown_clauses == other.unknown_clauses;
}

namespace {

class DirectiveScanner {
public:
  DirectiveScanner(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
      ++pos_;
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  /// Next bare word (lowercased) without consuming it.
  std::string peek_word() {
    skip_space();
    std::size_t j = pos_;
    while (j < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
      ++j;
    return lex::to_lower(text_.substr(pos_, j - pos_));
  }

  std::string word() {
    auto w = peek_word();
    pos_ += w.size();
    return w;
  }

  bool peek_paren() {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == '(';
  }

  /// Consumes a balanced parenthesized group and returns its inside.
  std::string paren_group() {
    skip_space();
    auto close = lex::match_paren(text_, pos_);
    if (close == std::string_view::npos)
      throw ParseError(ParseErrorKind::Malformed, "unbalanced parentheses in directive", line_);
    auto inside = text_.substr(pos_ + 1, close - pos_ - 2);
    pos_ = close;
    return std::string(lex::trim(inside));
  }

  void skip_separator() {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ',')
      ++pos_;
  }

  char peek_char() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  std::size_t line() const { return line_; }

private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

[[noreturn]] void unknown(std::string_view what, std::size_t line) {
  throw ParseError(ParseErrorKind::UnknownDirective,
                   "unknown OpenACC directive '" + std::string(what) + "'", line);
}

Clause parse_clause(DirectiveScanner &s) {
  Clause clause;
  clause.name = s.word();
  if (clause.name.empty())
    throw ParseError(ParseErrorKind::Malformed,
                     std::string("unexpected character '") + s.peek_char() + "' in directive",
                     s.line());
  if (s.peek_paren()) {
    clause.has_parens = true;
    auto inside = s.paren_group();
    if (clause.name == "reduction") {
      auto colon = inside.find(':');
      if (colon == std::string::npos)
        throw ParseError(ParseErrorKind::Malformed,
                         "reduction clause without 'operator:' prefix", s.line());
      auto op = parse_reduction_op(inside.substr(0, colon));
      if (!op)
        throw ParseError(ParseErrorKind::Malformed,
                         "unsupported reduction operator '" +
                             std::string(lex::trim(inside.substr(0, colon))) + "'",
                         s.line());
      clause.reduction_op = op;
      clause.args = lex::split_top_level(inside.substr(colon + 1));
      if (clause.args.empty() ||
          std::any_of(clause.args.begin(), clause.args.end(),
                      [](const std::string &a) { return a.empty(); }))
        throw ParseError(ParseErrorKind::Malformed, "reduction clause without variables",
                         s.line());
    } else {
      clause.args = lex::split_top_level(inside);
    }
  } else if (clause.name == "reduction") {
    throw ParseError(ParseErrorKind::Malformed, "reduction clause without arguments", s.line());
  }
  return clause;
}

} // namespace

Directive parse_directive_text(std::string_view text, std::size_t line_number) {
  DirectiveScanner s(text, line_number);
  Directive d;
  d.line = line_number;

  auto first = s.word();
  if (first.empty())
    unknown(lex::trim(text), line_number);

  if (first == "parallel") {
    if (s.peek_word() == "loop") {
      s.word();
      d.kind = DirectiveKind::ParallelLoop;
    } else {
      d.kind = DirectiveKind::Parallel;
    }
  } else if (first == "end" || first == "endparallel" || first == "endkernels" ||
             first == "endhost_data") {
    auto second = first == "end" ? s.word() : first.substr(3);
    if (second == "parallel" && s.peek_word() != "loop")
      d.kind = DirectiveKind::EndParallel;
    else if (second == "kernels" && s.peek_word() != "loop")
      d.kind = DirectiveKind::EndKernels;
    else if (second == "host_data")
      d.kind = DirectiveKind::EndHostData;
    else
      unknown("end " + second + (s.peek_word().empty() ? "" : " " + s.peek_word()), line_number);
  } else if (first == "loop") {
    d.kind = DirectiveKind::Loop;
  } else if (first == "kernels") {
    if (s.peek_word() == "loop")
      unknown("kernels loop", line_number);
    d.kind = DirectiveKind::Kernels;
  } else if (first == "enter" || first == "exit") {
    if (s.word() != "data")
      unknown(first, line_number);
    d.kind = first == "enter" ? DirectiveKind::EnterData : DirectiveKind::ExitData;
  } else if (first == "update") {
    d.kind = DirectiveKind::Update;
  } else if (first == "host_data") {
    d.kind = DirectiveKind::HostData;
  } else if (first == "declare") {
    d.kind = DirectiveKind::Declare;
  } else if (first == "atomic") {
    d.kind = DirectiveKind::Atomic;
    d.atomic_kind = AtomicKind::Update;
    auto sub = s.peek_word();
    if (sub == "update" || sub == "read" || sub == "write" || sub == "capture") {
      s.word();
      d.atomic_kind = sub == "update" ? AtomicKind::Update
                      : sub == "read" ? AtomicKind::Read
                      : sub == "write" ? AtomicKind::Write
                                       : AtomicKind::Capture;
    }
  } else if (first == "routine") {
    d.kind = DirectiveKind::Routine;
    if (s.peek_paren())
      d.args = {s.paren_group()};
  } else if (first == "wait") {
    d.kind = DirectiveKind::Wait;
    if (s.peek_paren())
      d.args = lex::split_top_level(s.paren_group());
  } else if (first == "set") {
    d.kind = DirectiveKind::SetDeviceNum;
  } else {
    unknown(first, line_number);
  }

  while (!s.at_end()) {
    auto clause = parse_clause(s);
    if (d.kind == DirectiveKind::SetDeviceNum && clause.name == "device_num") {
      if (clause.args.size() != 1 || !d.args.empty())
        throw ParseError(ParseErrorKind::Malformed, "set device_num takes one expression",
                         line_number);
      d.args = clause.args;
    } else {
      if (!is_known_clause(clause.name))
        d.unknown_clauses.push_back(clause.name);
      d.clauses.push_back(std::move(clause));
    }
    s.skip_separator();
  }
  if (d.kind == DirectiveKind::SetDeviceNum && d.args.empty())
    unknown("set", line_number);
  return d;
}

Directive parse_directive(const LogicalLine &line, std::size_t logical_index) {
  if (line.kind != LineKind::AccDirective)
    throw ParseError(ParseErrorKind::Malformed, "not an OpenACC directive line",
                     line.line_number());
  auto d = parse_directive_text(line.text, line.line_number());
  d.logical_index = logical_index;
  return d;
}

std::string render_directive(const Directive &d) {
  std::string out = "!$acc ";
  out += to_string(d.kind);
  if (d.kind == DirectiveKind::Atomic && d.atomic_kind) {
    out += ' ';
    out += to_string(*d.atomic_kind);
  }
  auto join = [](const std::vector<std::string> &args) {
    std::string s;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i)
        s += ',';
      s += args[i];
    }
    return s;
  };
  if (d.kind == DirectiveKind::SetDeviceNum)
    out += " device_num(" + join(d.args) + ")";
  else if (!d.args.empty())
    out += "(" + join(d.args) + ")";
  for (const auto &c : d.clauses) {
    out += ' ';
    out += c.name;
    if (c.reduction_op) {
      out += "(";
      out += to_string(*c.reduction_op);
      out += ":" + join(c.args) + ")";
    } else if (c.has_parens) {
      out += "(" + join(c.args) + ")";
    }
  }
  return out;
}

} // namespace acc2dc
