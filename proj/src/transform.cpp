#include <algorithm>

#include "acc2dc/lexer.hpp"
#include "rewrite_internal.hpp"

namespace acc2dc {

std::string_view to_string(Mode mode) {
  switch (mode) {
  case Mode::A:
    return "A";
  case Mode::AD:
    return "AD";
  case Mode::ADU:
    return "ADU";
  case Mode::AD2XU:
    return "AD2XU";
  case Mode::D2XU:
    return "D2XU";
  case Mode::D2XAd:
    return "D2XAd";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view text) {
  for (auto m : kAllModes)
    if (lex::iequals(text, to_string(m)))
      return m;
  return std::nullopt;
}

bool uses_unified_memory(Mode mode) {
  return mode == Mode::ADU || mode == Mode::AD2XU || mode == Mode::D2XU;
}

RewriteLevel rewrite_level(Mode mode) {
  switch (mode) {
  case Mode::A:
    return RewriteLevel::Retain;
  case Mode::AD:
  case Mode::ADU:
    return RewriteLevel::Dc;
  case Mode::AD2XU:
    return RewriteLevel::Dc2x;
  case Mode::D2XU:
  case Mode::D2XAd:
    return RewriteLevel::Full;
  }
  return RewriteLevel::Retain;
}

std::string_view to_string(Severity severity) {
  switch (severity) {
  case Severity::Info:
    return "info";
  case Severity::Warning:
    return "warning";
  case Severity::ActionRequired:
    return "action_required";
  }
  return "?";
}

std::optional<Severity> parse_severity(std::string_view text) {
  for (auto s : {Severity::Info, Severity::Warning, Severity::ActionRequired})
    if (text == to_string(s))
      return s;
  return std::nullopt;
}

std::string InlinePlan::fragment() const {
  if (callees.empty())
    return {};
  std::string out = "-Minline=";
  if (reshape)
    out += "reshape,";
  out += "name:";
  for (std::size_t i = 0; i < callees.size(); ++i)
    out += (i ? "," : "") + callees[i];
  return out;
}

std::size_t TransformResult::count(Severity severity) const {
  return static_cast<std::size_t>(
      std::count_if(diagnostics.begin(), diagnostics.end(),
                    [&](const Diagnostic &d) { return d.severity == severity; }));
}

InlinePlan plan_inlining(std::span<const CallSite> calls, const AnalysisConfig &config,
                         std::vector<Diagnostic> *diagnostics, Mode mode,
                         const std::string &file) {
  InlinePlan plan;
  std::vector<std::string> unknown;
  std::size_t unknown_line = 0;
  for (const auto &call : calls) {
    auto &list = call.declared_pure == Purity::Pure ? plan.callees : unknown;
    if (call.declared_pure == Purity::NotPure)
      continue;
    if (std::find(list.begin(), list.end(), call.callee) != list.end())
      continue;
    list.push_back(call.callee);
    if (call.declared_pure == Purity::Pure && config.reshape_inline.count(call.callee))
      plan.reshape = true;
    if (call.declared_pure == Purity::Unknown && unknown_line == 0)
      unknown_line = call.line;
  }
  if (diagnostics && !unknown.empty()) {
    std::string names;
    for (const auto &n : unknown)
      names += (names.empty() ? "" : ", ") + n;
    diagnostics->push_back({Severity::ActionRequired, "unknown-purity",
                            "not inlined, purity unknown: " + names + "; inline manually", file,
                            unknown_line, mode});
  }
  return plan;
}

RewriteContext::RewriteContext(const FileAnalysis &file_, const SourceFile &src_,
                               const AnalysisConfig &config_, Mode mode_,
                               std::vector<Diagnostic> &diagnostics_)
    : file(file_), src(src_), config(config_), mode(mode_), level(rewrite_level(mode_)),
      diagnostics(diagnostics_) {}

void RewriteContext::diag(Severity severity, std::string code, std::string message,
                          std::size_t line) {
  diagnostics.push_back({severity, std::move(code), std::move(message), src.path(), line, mode});
}

std::string RewriteContext::fresh_tmp() const {
  for (std::size_t n = 1;; ++n) {
    auto name = n == 1 ? std::string("tmp") : "tmp" + std::to_string(n);
    bool taken = reserved.count(name) ||
                 std::any_of(temps.begin(), temps.end(),
                             [&](const Temp &t) { return t.name == name; });
    if (!taken)
      return name;
  }
}

std::string RewriteContext::index_name(std::size_t d) const {
  static constexpr std::string_view letters = "ijklmno";
  char letter = letters[d % letters.size()];
  for (std::size_t n = d / letters.size();; ++n) {
    auto name = std::string(1, letter) + std::to_string(n);
    if (!reserved.count(name))
      return name;
  }
}

namespace {

using detail::attempt_region;

struct Run {
  RewriteLevel achieved = RewriteLevel::Retain;
  std::optional<std::vector<std::string>> lines;
  std::vector<Diagnostic> diagnostics;
  std::vector<RewriteContext::Temp> temps;
  std::vector<CallSite> calls;
};

bool kept_after_refusal(const Diagnostic &d) {
  return d.severity == Severity::ActionRequired ||
         (d.code.size() > 9 && d.code.ends_with("-retained"));
}

/// Tries `region` at `top` and each lower level until a rewrite succeeds.
/// The run's diagnostics, temporaries and calls are moved out of `ctx`.
Run run_chain(const AccRegion &region, RewriteLevel top, RewriteContext &ctx) {
  Run run;
  auto diag_base = ctx.diagnostics.size();
  auto temp_base = ctx.temps.size();
  auto call_base = ctx.converted_calls.size();
  for (auto level = top; level > RewriteLevel::Retain;
       level = static_cast<RewriteLevel>(static_cast<int>(level) - 1)) {
    auto before = ctx.diagnostics.size();
    ctx.level = level;
    auto out = attempt_region(region, ctx);
    if (out) {
      run.achieved = level;
      run.lines = std::move(out);
      break;
    }
    ctx.temps.resize(temp_base);
    ctx.converted_calls.resize(call_base);
    auto it = std::stable_partition(ctx.diagnostics.begin() + static_cast<std::ptrdiff_t>(before),
                                    ctx.diagnostics.end(), kept_after_refusal);
    ctx.diagnostics.erase(it, ctx.diagnostics.end());
    if (region.category == RegionCategory::Unsupported)
      break;
  }
  ctx.level = rewrite_level(ctx.mode);
  run.diagnostics.assign(ctx.diagnostics.begin() + static_cast<std::ptrdiff_t>(diag_base),
                         ctx.diagnostics.end());
  ctx.diagnostics.resize(diag_base);
  run.temps.assign(ctx.temps.begin() + static_cast<std::ptrdiff_t>(temp_base), ctx.temps.end());
  ctx.temps.resize(temp_base);
  run.calls.assign(ctx.converted_calls.begin() + static_cast<std::ptrdiff_t>(call_base),
                   ctx.converted_calls.end());
  ctx.converted_calls.resize(call_base);
  return run;
}

std::size_t first_phys(const FileAnalysis &file, std::size_t index) {
  return file.lines[index].first_physical_index;
}

/// Converts one parallel group (or a single region) all-or-nothing.
void process_group(std::span<const AccRegion> members, RewriteContext &ctx,
                   std::vector<LineEdit> &edits) {
  const auto &file = ctx.file;
  auto top = rewrite_level(ctx.mode);
  auto temp_base = ctx.temps.size();
  std::vector<Run> runs;
  for (const auto &m : members) {
    runs.push_back(run_chain(m, top, ctx));
    ctx.temps.insert(ctx.temps.end(), runs.back().temps.begin(), runs.back().temps.end());
  }
  auto group_level = top;
  for (const auto &r : runs)
    group_level = std::min(group_level, r.achieved);

  if (std::any_of(runs.begin(), runs.end(),
                  [&](const Run &r) { return r.achieved != group_level; })) {
    ctx.temps.resize(temp_base);
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (runs[i].achieved == group_level) {
        ctx.temps.insert(ctx.temps.end(), runs[i].temps.begin(), runs[i].temps.end());
        continue;
      }
      auto line = file.lines[members[i].begin].line_number();
      runs[i] = group_level == RewriteLevel::Retain ? Run{} : run_chain(members[i], group_level, ctx);
      ctx.temps.insert(ctx.temps.end(), runs[i].temps.begin(), runs[i].temps.end());
      runs[i].diagnostics.push_back({Severity::Info, "fused-sibling-held",
                                     "loop held back to match a loop sharing its parallel region",
                                     ctx.src.path(), line, ctx.mode});
    }
  }
  for (auto &r : runs) {
    ctx.diagnostics.insert(ctx.diagnostics.end(), r.diagnostics.begin(), r.diagnostics.end());
    ctx.converted_calls.insert(ctx.converted_calls.end(), r.calls.begin(), r.calls.end());
  }
  if (group_level == RewriteLevel::Retain)
    return;

  const auto &head = members.front();
  auto group_line = file.lines[head.group_begin].line_number();
  if (head.fused_sibling() || head.group_begin != head.begin) {
    ctx.level = group_level;
    if (const auto *parallel = file.directive_at(head.group_begin)) {
      detail::report_dropped_clauses(*parallel, ctx);
      if (parallel->has_clause("async") || parallel->has_clause("wait"))
        ctx.diag(Severity::Warning, "async-dropped",
                 "asynchronous launch dropped; DC kernels run synchronously", group_line);
    }
    ctx.level = rewrite_level(ctx.mode);
  }
  if (head.fused_sibling())
    ctx.diag(Severity::Info, "kernel-fission",
             std::to_string(members.size()) +
                 " loops fused in one parallel region become separate DC kernels",
             group_line);

  std::vector<std::string> replacement;
  auto cursor = head.group_begin;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (auto k = cursor; k < members[i].begin; ++k)
      if (k != head.group_begin || head.group_begin == members[i].begin)
        detail::copy_lines(ctx, k, 0, replacement);
    replacement.insert(replacement.end(), runs[i].lines->begin(), runs[i].lines->end());
    cursor = members[i].end + 1;
  }
  for (auto k = cursor; k < head.group_end; ++k)
    detail::copy_lines(ctx, k, 0, replacement);
  auto first = first_phys(file, head.group_begin);
  auto last = file.lines[head.group_end].last_physical_index();
  edits.push_back({first, last - first + 1, std::move(replacement)});
}

/// Declarations for generated names, one line per type after the last
/// specification statement of each procedure.
void declare_temps(RewriteContext &ctx, std::vector<LineEdit> &edits) {
  const auto &file = ctx.file;
  struct Point {
    std::size_t insert_at = 0;
    std::string indent;
    std::vector<std::pair<std::string, std::vector<std::string>>> groups;
  };
  std::map<std::size_t, Point> points;
  for (const auto &t : ctx.temps) {
    if (t.type_spec.empty())
      continue;
    auto header = file.purity.enclosing_header(t.near);
    if (!header) {
      ctx.diag(Severity::Warning, "temp-declaration-needed",
               "declare '" + t.name + "' as " + t.type_spec, file.lines[t.near].line_number());
      continue;
    }
    auto &p = points[*header];
    if (p.groups.empty()) {
      std::optional<std::size_t> last_spec;
      for (auto i = *header + 1; i < file.lines.size(); ++i) {
        const auto &line = file.lines[i];
        if (line.kind == LineKind::Blank || line.kind == LineKind::Comment)
          continue;
        if (line.kind == LineKind::AccDirective) {
          const auto *d = file.directive_at(i);
          if (d->kind == DirectiveKind::Declare || d->kind == DirectiveKind::Routine)
            continue;
          break;
        }
        if (!is_specification_statement(line.text))
          break;
        last_spec = i;
      }
      auto anchor = last_spec.value_or(*header);
      p.insert_at = file.lines[anchor].last_physical_index() + 1;
      auto anchor_text = detail::physical(ctx, anchor);
      p.indent = std::string(leading_whitespace(anchor_text));
      if (!last_spec)
        p.indent += "  ";
    }
    auto it = std::find_if(p.groups.begin(), p.groups.end(),
                           [&](const auto &g) { return g.first == t.type_spec; });
    if (it == p.groups.end()) {
      p.groups.push_back({t.type_spec, {}});
      it = std::prev(p.groups.end());
    }
    if (std::find(it->second.begin(), it->second.end(), t.name) == it->second.end())
      it->second.push_back(t.name);
  }
  for (auto &[header, p] : points) {
    LineEdit edit{p.insert_at, 0, {}};
    for (const auto &[type, names] : p.groups) {
      std::string line = p.indent + type + " :: ";
      for (std::size_t i = 0; i < names.size(); ++i)
        line += (i ? ", " : "") + names[i];
      edit.replacement.push_back(line);
      ctx.diag(Severity::Info, "temp-declared", "declared generated " + line.substr(p.indent.size()),
               file.lines[header].line_number());
    }
    edits.push_back(std::move(edit));
  }
}

Directive without_async(Directive d) {
  std::erase_if(d.clauses, [](const Clause &c) { return c.name == "async" || c.name == "wait"; });
  return d;
}

void process_directives(RewriteContext &ctx, const std::vector<bool> &owned,
                        std::vector<LineEdit> &edits) {
  const auto &file = ctx.file;
  auto full = rewrite_level(ctx.mode) == RewriteLevel::Full;
  auto declared = detail::declared_names(file.directives);
  bool wrapper_noted = false;
  for (const auto &[index, d] : file.directives) {
    const auto &line = file.lines[index];
    auto remove = [&] { edits.push_back({line.first_physical_index, line.span, {}}); };
    if (!d.unknown_clauses.empty()) {
      std::string names;
      for (const auto &n : d.unknown_clauses)
        names += (names.empty() ? "" : ", ") + n;
      ctx.diag(Severity::Warning, "unknown-clause", "unrecognized clause " + names + " kept",
               d.line);
    }
    if (owned[index])
      continue;
    if (is_data_management(d.kind)) {
      if (ctx.mode == Mode::D2XAd) {
        if (d.kind == DirectiveKind::EnterData && !wrapper_noted) {
          wrapper_noted = true;
          ctx.diag(Severity::ActionRequired, "wrapper-refactor",
                   "consider wrapper routines that create and initialize device arrays to cut "
                   "data directives",
                   d.line);
        }
        if (d.has_clause("async") || d.has_clause("wait")) {
          auto indent = std::string(leading_whitespace(detail::physical(ctx, index)));
          edits.push_back({line.first_physical_index, line.span,
                           {indent + render_directive(without_async(d))}});
          ctx.diag(Severity::Warning, "async-dropped",
                   "async clause dropped from retained data directive", d.line);
        }
        continue;
      }
      if (auto decision = detail::decide_data_directive(d, ctx.mode, declared, ctx.config)) {
        if (decision->remove)
          remove();
        ctx.diag(decision->severity, decision->code, decision->message, d.line);
      }
      continue;
    }
    if (!full)
      continue;
    switch (d.kind) {
    case DirectiveKind::Routine: {
      auto owner = d.args.empty() ? file.purity.enclosing_procedure(index)
                                  : std::optional<std::string>(lex::to_lower(d.args.front()));
      auto purity = owner ? file.purity.resolve(*owner) : Purity::Unknown;
      if (purity == Purity::Pure) {
        remove();
        ctx.diag(Severity::Info, "routine-removed",
                 "routine directive for pure '" + *owner + "' removed; inline it instead",
                 d.line);
      } else {
        ctx.diag(Severity::ActionRequired, "routine-manual",
                 "routine directive kept: '" + owner.value_or("?") + "' is not known to be pure",
                 d.line);
      }
      break;
    }
    case DirectiveKind::Wait:
      remove();
      ctx.diag(Severity::Warning, "wait-removed",
               "wait directive removed; DC kernels run synchronously", d.line);
      break;
    case DirectiveKind::SetDeviceNum:
      remove();
      ctx.diag(Severity::Info, "set-device-num-removed",
               "set device_num removed; bind ranks to devices with the launch script", d.line);
      break;
    default:
      break;
    }
  }
}

std::set<std::string> file_identifiers(const FileAnalysis &file) {
  std::set<std::string> out;
  for (const auto &line : file.lines)
    if (line.kind == LineKind::Code)
      for (auto &id : lex::identifiers(line.text))
        out.insert(std::move(id));
  return out;
}

} // namespace

TransformResult transform_file(const SourceFile &src, Mode mode, const AnalysisConfig &config) {
  TransformResult result;
  if (mode == Mode::A) {
    result.output = src;
    result.counts_before = directive_census(src);
    result.counts_after = result.counts_before;
    return result;
  }
  auto file = analyze_file(src, config);
  result.counts_before = directive_census(file.lines);

  RewriteContext ctx(file, src, config, mode, result.diagnostics);
  ctx.reserved = file_identifiers(file);
  std::vector<LineEdit> edits;
  std::vector<bool> owned(file.lines.size(), false);

  const auto &regions = file.regions;
  for (std::size_t i = 0; i < regions.size();) {
    auto j = i + 1;
    while (j < regions.size() && regions[j].group_begin == regions[i].group_begin)
      ++j;
    for (auto k = regions[i].group_begin; k <= regions[i].group_end; ++k)
      owned[k] = true;
    process_group(std::span(regions).subspan(i, j - i), ctx, edits);
    i = j;
  }
  process_directives(ctx, owned, edits);
  declare_temps(ctx, edits);
  if (rewrite_level(mode) == RewriteLevel::Full)
    result.inline_plan = plan_inlining(ctx.converted_calls, config);

  result.output = apply_edits(src, edits);
  auto out_lines = assemble_logical_lines(result.output);
  result.counts_after = directive_census(out_lines);

  if (mode == Mode::D2XU && result.count(Severity::ActionRequired) == 0)
    for (const auto &line : out_lines)
      if (line.kind == LineKind::AccDirective)
        result.diagnostics.push_back({Severity::ActionRequired, "directive-remaining",
                                      "OpenACC directive remains at output line " +
                                          std::to_string(line.line_number()),
                                      src.path(), line.line_number(), mode});

  std::stable_sort(result.diagnostics.begin(), result.diagnostics.end(),
                   [](const Diagnostic &a, const Diagnostic &b) { return a.line < b.line; });
  return result;
}

} // namespace acc2dc
