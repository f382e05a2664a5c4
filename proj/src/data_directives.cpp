#include "acc2dc/lexer.hpp"
#include "rewrite_internal.hpp"

namespace acc2dc {

namespace detail {

namespace {

std::vector<std::string> variables(const Directive &d) {
  std::vector<std::string> out;
  for (const auto &c : d.clauses) {
    if (c.name == "async" || c.name == "wait" || c.name == "if" || c.name == "device_type")
      continue;
    for (const auto &arg : c.args) {
      auto ids = lex::identifiers(arg);
      if (!ids.empty())
        out.push_back(ids.front());
    }
  }
  return out;
}

bool mentions(const Directive &d, const std::set<std::string> &names) {
  for (const auto &v : variables(d))
    if (names.count(v))
      return true;
  return false;
}

/// True when a clause argument is exactly one of `names`, not a component
/// or element of it.
bool names_whole(const Directive &d, const std::set<std::string> &names) {
  for (const auto &c : d.clauses)
    for (const auto &arg : c.args)
      if (names.count(lex::to_lower(lex::remove_spaces(arg))))
        return true;
  return false;
}

} // namespace

std::set<std::string> declared_names(const std::map<std::size_t, Directive> &directives) {
  std::set<std::string> out;
  for (const auto &[index, d] : directives)
    if (d.kind == DirectiveKind::Declare)
      for (const auto &v : variables(d))
        out.insert(v);
  return out;
}

std::optional<DataDecision> decide_data_directive(const Directive &d, Mode mode,
                                                  const std::set<std::string> &declared,
                                                  const AnalysisConfig &config) {
  if (!uses_unified_memory(mode) || !is_data_management(d.kind))
    return std::nullopt;
  std::string what(to_string(d.kind));
  DataDecision removed{true, Severity::Info, "data-removed",
                       what + " directive removed; unified memory pages the data"};
  switch (d.kind) {
  case DirectiveKind::Declare:
    if (mode == Mode::D2XU)
      return DataDecision{true, Severity::Info, "declare-removed",
                          "declare directive removed; its data is used only by inlined routines"};
    return DataDecision{false, Severity::Info, "data-kept-declare",
                        "declare directive kept; unified memory does not cover it"};
  case DirectiveKind::Update:
    if (mentions(d, declared) && mode != Mode::D2XU)
      return DataDecision{false, Severity::Info, "update-kept-declare",
                          "update of a declared variable kept alongside its declare directive"};
    return removed;
  case DirectiveKind::EnterData:
  case DirectiveKind::ExitData:
    if (names_whole(d, config.derived_type_registry)) {
      if (mode == Mode::ADU)
        return DataDecision{false, Severity::Info, "data-kept-derived-type",
                            what + " directive kept; derived-type structures are not paged"};
      return DataDecision{true, Severity::Info, "data-removed-derived-type",
                          what + " directive for a derived type removed"};
    }
    return removed;
  default:
    return removed;
  }
}

} // namespace detail

std::pair<SourceFile, std::vector<Diagnostic>>
strip_data_directives(const SourceFile &src, Mode mode, const AnalysisConfig &config) {
  std::vector<Diagnostic> diagnostics;
  if (!uses_unified_memory(mode))
    return {src, diagnostics};
  auto lines = assemble_logical_lines(src);
  std::map<std::size_t, Directive> directives;
  for (std::size_t i = 0; i < lines.size(); ++i)
    if (lines[i].kind == LineKind::AccDirective)
      directives.emplace(i, parse_directive(lines[i], i));
  auto declared = detail::declared_names(directives);
  std::vector<LineEdit> edits;
  for (const auto &[index, d] : directives) {
    auto decision = detail::decide_data_directive(d, mode, declared, config);
    if (!decision)
      continue;
    if (decision->remove)
      edits.push_back({lines[index].first_physical_index, lines[index].span, {}});
    diagnostics.push_back({decision->severity, decision->code, decision->message, src.path(),
                           lines[index].line_number(), mode});
  }
  return {apply_edits(src, edits), diagnostics};
}

} // namespace acc2dc
