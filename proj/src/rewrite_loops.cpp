#include <algorithm>

#include "acc2dc/errors.hpp"
#include "acc2dc/lexer.hpp"
#include "rewrite_internal.hpp"

namespace acc2dc {

namespace detail {

std::size_t indent_width(std::string_view line) { return leading_whitespace(line).size(); }

std::string shift_left(std::string_view line, std::size_t shift) {
  std::size_t n = 0;
  while (n < shift && n < line.size() && (line[n] == ' ' || line[n] == '\t'))
    ++n;
  return std::string(line.substr(n));
}

std::string physical(const RewriteContext &ctx, std::size_t logical_index) {
  return ctx.src.physical_lines()[ctx.file.lines[logical_index].first_physical_index];
}

void copy_lines(const RewriteContext &ctx, std::size_t index, std::size_t shift,
                std::vector<std::string> &out) {
  const auto &line = ctx.file.lines[index];
  const auto &phys = ctx.src.physical_lines();
  for (std::size_t p = line.first_physical_index; p <= line.last_physical_index(); ++p)
    out.push_back(shift == 0 ? phys[p] : shift_left(phys[p], shift));
}

std::string triplet(const LoopBounds &b) {
  std::string out = b.index_var + "=" + std::string(lex::trim(b.lower)) + ":" +
                    std::string(lex::trim(b.upper));
  if (b.stride)
    out += ":" + std::string(lex::trim(*b.stride));
  return out;
}

std::string render_reduce(const ReductionUse &r) {
  std::string out = "reduce(" + std::string(to_string(r.op)) + ":";
  for (std::size_t i = 0; i < r.variables.size(); ++i)
    out += (i ? "," : "") + r.variables[i];
  return out + ")";
}

void merge_reduction(std::vector<ReductionUse> &into, const ReductionUse &r) {
  for (auto &existing : into) {
    if (existing.op != r.op)
      continue;
    for (const auto &v : r.variables)
      if (std::find(existing.variables.begin(), existing.variables.end(), v) ==
          existing.variables.end())
        existing.variables.push_back(v);
    return;
  }
  into.push_back(r);
}

bool is_data_clause(std::string_view name) {
  static const std::set<std::string, std::less<>> data = {
      "copy",          "copyin",          "copyout",          "create",
      "present",       "no_create",       "deviceptr",        "attach",
      "pcopy",         "pcopyin",         "pcopyout",         "pcreate",
      "present_or_copy", "present_or_copyin", "present_or_copyout", "present_or_create"};
  return data.count(name) > 0;
}

// -- assignment helpers ---------------------------------------------------------

std::optional<Assignment> parse_assignment(std::string_view statement) {
  auto stmt = lex::trim(statement);
  auto eq = lex::assignment_equals(stmt);
  if (eq == std::string_view::npos)
    return std::nullopt;
  Assignment a;
  a.lhs = std::string(lex::trim(stmt.substr(0, eq)));
  a.rhs = std::string(lex::trim(stmt.substr(eq + 1)));
  if (eq > 0 && stmt[eq - 1] == ' ')
    a.equals = " = ";
  auto tokens = lex::tokenize(a.lhs);
  if (tokens.empty() || !tokens[0].is_identifier())
    return std::nullopt;
  a.name = lex::to_lower(tokens[0].text);
  if (tokens.size() == 1)
    return a;
  if (tokens[1].kind != lex::TokenKind::LParen)
    return std::nullopt;
  auto close = lex::match_paren(a.lhs, tokens[1].offset);
  if (close != a.lhs.size())
    return std::nullopt;
  a.subscripted = true;
  auto inner = std::string_view(a.lhs).substr(tokens[1].offset + 1, close - tokens[1].offset - 2);
  a.subscripts = lex::split_top_level(inner);
  return a;
}

namespace {

std::string normalized(std::string_view s) { return lex::to_lower(lex::remove_spaces(s)); }

/// Byte ranges of references to the assignment target in `text`. `exact`
/// is false when some reference to the same name differs from the target.
struct TargetRefs {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  bool exact = true;
};

TargetRefs find_target_refs(std::string_view text, const Assignment &a) {
  TargetRefs refs;
  auto tokens = lex::tokenize(text);
  std::string subs;
  if (a.subscripted) {
    for (std::size_t i = 0; i < a.subscripts.size(); ++i)
      subs += (i ? "," : "") + normalized(a.subscripts[i]);
  }
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (!tokens[t].is_identifier() || lex::to_lower(tokens[t].text) != a.name)
      continue;
    if (t > 0 && tokens[t - 1].text == "%")
      continue;
    bool has_paren = t + 1 < tokens.size() && tokens[t + 1].kind == lex::TokenKind::LParen;
    if (t + 1 < tokens.size() && tokens[t + 1].text == "%") {
      refs.exact = false;
      continue;
    }
    if (a.subscripted != has_paren) {
      refs.exact = false;
      continue;
    }
    std::size_t end = tokens[t].end();
    if (has_paren) {
      auto close = lex::match_paren(text, tokens[t + 1].offset);
      if (close == std::string_view::npos) {
        refs.exact = false;
        continue;
      }
      auto inner = text.substr(tokens[t + 1].offset + 1, close - tokens[t + 1].offset - 2);
      std::string got;
      auto parts = lex::split_top_level(inner);
      for (std::size_t i = 0; i < parts.size(); ++i)
        got += (i ? "," : "") + normalized(parts[i]);
      if (got != subs) {
        refs.exact = false;
        continue;
      }
      end = close;
    }
    refs.spans.emplace_back(tokens[t].offset, end);
  }
  return refs;
}

bool top_level_has(const std::vector<lex::Token> &tokens, std::size_t from,
                   const std::set<std::string> &ops) {
  int depth = 0;
  for (std::size_t i = from; i < tokens.size(); ++i) {
    if (tokens[i].kind == lex::TokenKind::LParen)
      ++depth;
    else if (tokens[i].kind == lex::TokenKind::RParen)
      --depth;
    else if (depth == 0 && tokens[i].kind == lex::TokenKind::Operator &&
             ops.count(lex::to_lower(tokens[i].text)))
      return true;
  }
  return false;
}

} // namespace

std::optional<ReductionOp> update_operator(std::string_view statement, const Assignment &a) {
  auto refs = find_target_refs(statement, a);
  if (!refs.exact || refs.spans.size() != 2)
    return std::nullopt;
  auto tokens = lex::tokenize(a.rhs);
  if (tokens.empty() || !tokens[0].is_identifier())
    return std::nullopt;

  auto head = lex::to_lower(tokens[0].text);
  if ((head == "max" || head == "min") && tokens.size() > 2 &&
      tokens[1].kind == lex::TokenKind::LParen &&
      lex::match_paren(tokens, 1) == tokens.size() - 1) {
    auto close = lex::match_paren(a.rhs, tokens[1].offset);
    auto args = lex::split_top_level(
        std::string_view(a.rhs).substr(tokens[1].offset + 1, close - tokens[1].offset - 2));
    if (args.size() < 2)
      return std::nullopt;
    auto lhs = normalized(a.lhs);
    bool found = std::any_of(args.begin(), args.end(),
                             [&](const std::string &arg) { return normalized(arg) == lhs; });
    if (!found)
      return std::nullopt;
    return head == "max" ? ReductionOp::Max : ReductionOp::Min;
  }

  if (head != a.name)
    return std::nullopt;
  std::size_t next = 1;
  if (a.subscripted) {
    if (tokens.size() < 2 || tokens[1].kind != lex::TokenKind::LParen)
      return std::nullopt;
    next = lex::match_paren(tokens, 1);
    if (next == std::string_view::npos)
      return std::nullopt;
    ++next;
  }
  if (next + 1 >= tokens.size() || tokens[next].kind != lex::TokenKind::Operator)
    return std::nullopt;
  static const std::set<std::string> relational = {"==", "/=", "<", ">", "<=", ">=", "//",
                                                   ".eq.", ".ne.", ".lt.", ".gt.", ".le.",
                                                   ".ge.", ".and.", ".or.", ".not.",
                                                   ".eqv.", ".neqv."};
  if (top_level_has(tokens, next + 1, relational))
    return std::nullopt;
  const auto &op = tokens[next].text;
  if (op == "+" || op == "-")
    return ReductionOp::Add;
  if (op == "*" && !top_level_has(tokens, next + 1, {"+", "-"}))
    return ReductionOp::Multiply;
  return std::nullopt;
}

std::string replace_target(std::string_view statement, const Assignment &a,
                           std::string_view replacement) {
  auto refs = find_target_refs(statement, a);
  std::string out;
  std::size_t pos = 0;
  for (auto [b, e] : refs.spans) {
    out.append(statement.substr(pos, b - pos));
    out.append(replacement);
    pos = e;
  }
  out.append(statement.substr(pos));
  return out;
}

// -- shared loop emission ---------------------------------------------------------

void report_dropped_clauses(const Directive &d, RewriteContext &ctx) {
  std::vector<std::string> privates, data, other;
  for (const auto &c : d.clauses) {
    if (c.name == "collapse" || c.name == "reduction" || c.name == "default" ||
        c.name == "async" || c.name == "wait")
      continue;
    if (c.name == "private" || c.name == "firstprivate")
      privates.push_back(c.name);
    else if (is_data_clause(c.name))
      data.push_back(c.name);
    else
      other.push_back(c.name);
  }
  auto join = [](const std::vector<std::string> &v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
      s += (i ? ", " : "") + v[i];
    return s;
  };
  if (!privates.empty())
    ctx.diag(Severity::Info, "private-dropped",
             "clause " + join(privates) +
                 " dropped; scalars assigned before use are localized by the compiler",
             d.line);
  if (!data.empty()) {
    bool um = uses_unified_memory(ctx.mode);
    ctx.diag(um ? Severity::Info : Severity::Warning, "data-clause-dropped",
             "data clause " + join(data) + " on a converted construct dropped" +
                 (um ? "; unified memory pages the data" : "; data must already be present"),
             d.line);
  }
  if (!other.empty())
    ctx.diag(Severity::Info, "loop-clause-dropped",
             "clause " + join(other) + " has no DC equivalent and was dropped", d.line);
}

bool collapsible(const LoopNest &nest, std::size_t collapse, std::size_t line,
                 RewriteContext &ctx) {
  if (collapse == 0 || collapse > nest.perfectly_nested_depth) {
    ctx.diag(Severity::ActionRequired, "collapse-exceeds-nest",
             "collapse(" + std::to_string(collapse) + ") exceeds the perfectly nested depth " +
                 std::to_string(nest.perfectly_nested_depth) + "; manual intervention required",
             line);
    return false;
  }
  for (std::size_t m = 1; m < collapse; ++m) {
    const auto &b = nest.loops[m].bounds;
    auto ids = lex::identifiers(b.lower + " " + b.upper + " " + b.stride.value_or(""));
    for (std::size_t o = 0; o < m; ++o) {
      if (std::find(ids.begin(), ids.end(), lex::to_lower(nest.loops[o].bounds.index_var)) !=
          ids.end()) {
        ctx.diag(Severity::ActionRequired, "unsupported-region",
                 "bounds of loop '" + b.index_var + "' depend on an outer index", line);
        return false;
      }
    }
  }
  return true;
}

namespace {

std::string dc_keyword(const LoopHeader &h) { return h.upper_case ? "DO CONCURRENT" : "do concurrent"; }

std::string dc_header(const std::string &indent, const LoopNest &nest, std::size_t collapse,
                      const std::vector<ReductionUse> &reductions) {
  const auto &outer = nest.loops.front();
  std::string out = indent;
  if (!outer.construct_name.empty())
    out += outer.construct_name + ": ";
  out += dc_keyword(outer) + " (";
  for (std::size_t m = 0; m < collapse; ++m)
    out += (m ? "," : "") + triplet(nest.loops[m].bounds);
  out += ")";
  for (const auto &r : reductions)
    out += " " + render_reduce(r);
  return out;
}

bool emit_body(std::size_t begin, std::size_t end, std::size_t shift, const DcLoopSpec &spec,
               RewriteContext &ctx, std::vector<std::string> &out) {
  const auto &lines = ctx.file.lines;
  for (std::size_t i = begin; i < end; ++i) {
    const auto &line = lines[i];
    if (line.kind != LineKind::AccDirective) {
      copy_lines(ctx, i, shift, out);
      continue;
    }
    const auto *d = ctx.file.directive_at(i);
    if (d->kind == DirectiveKind::Atomic) {
      if (!spec.dropped_atomics.count(i))
        copy_lines(ctx, i, shift, out);
      continue;
    }
    if (d->kind != DirectiveKind::Loop) {
      copy_lines(ctx, i, shift, out);
      continue;
    }
    auto k = i + 1;
    while (k < end && (lines[k].kind == LineKind::Blank || lines[k].kind == LineKind::Comment))
      ++k;
    auto form = k < end && lines[k].kind == LineKind::Code ? classify_do(lines[k].text)
                                                          : DoForm::NotDo;
    if (d->has_clause("seq") || form == DoForm::Concurrent) {
      ctx.diag(Severity::Info, "loop-clause-dropped",
               d->has_clause("seq") ? "seq loop directive removed; the loop stays sequential"
                                    : "loop directive on a DC loop removed",
               d->line);
      continue;
    }
    if (form != DoForm::Counted) {
      ctx.diag(Severity::ActionRequired, "unsupported-region",
               "loop directive does not govern a counted DO loop", d->line);
      return false;
    }
    LoopNest nested;
    try {
      nested = parse_loop_nest(lines, k);
    } catch (const ParseError &e) {
      ctx.diag(Severity::ActionRequired, "unsupported-region", e.what(), d->line);
      return false;
    }
    auto c = collapse_count(*d).value_or(1);
    if (!collapsible(nested, c, d->line, ctx))
      return false;
    report_dropped_clauses(*d, ctx);
    DcLoopSpec inner;
    inner.nest = &nested;
    inner.collapse = c;
    for (const auto &cl : d->clauses)
      if (cl.reduction_op)
        merge_reduction(inner.reductions, {*cl.reduction_op, cl.args});
    inner.lead_begin = i + 1;
    inner.dropped_atomics = spec.dropped_atomics;
    auto emitted = emit_dc_loop(inner, ctx, shift);
    if (!emitted)
      return false;
    out.insert(out.end(), emitted->begin(), emitted->end());
    i = nested.end();
  }
  return true;
}

} // namespace

std::optional<std::vector<std::string>> emit_dc_loop(const DcLoopSpec &spec,
                                                     RewriteContext &ctx,
                                                     std::size_t outer_shift) {
  const auto &nest = *spec.nest;
  const auto &lines = ctx.file.lines;
  std::vector<std::string> out;
  for (std::size_t i = spec.lead_begin; i < nest.begin(); ++i)
    if (lines[i].kind != LineKind::AccDirective)
      copy_lines(ctx, i, outer_shift, out);

  const auto &outer = nest.loops.front();
  const auto &inner = nest.loops[spec.collapse - 1];
  auto header_text = physical(ctx, outer.header_index);
  auto indent = shift_left(leading_whitespace(header_text), outer_shift);
  out.push_back(dc_header(indent, nest, spec.collapse, spec.reductions));

  auto outer_indent = indent_width(header_text);
  auto inner_indent = indent_width(physical(ctx, inner.header_index));
  auto shift = outer_shift + (inner_indent > outer_indent ? inner_indent - outer_indent : 0);

  for (std::size_t m = 1; m < spec.collapse; ++m)
    for (std::size_t i = nest.loops[m - 1].header_index + 1; i < nest.loops[m].header_index; ++i)
      if (lines[i].kind == LineKind::Comment)
        copy_lines(ctx, i, shift, out);

  if (!emit_body(inner.header_index + 1, inner.end_index, shift, spec, ctx, out))
    return std::nullopt;

  for (std::size_t m = spec.collapse - 1; m > 0; --m)
    for (std::size_t i = nest.loops[m].end_index + 1; i < nest.loops[m - 1].end_index; ++i)
      if (lines[i].kind == LineKind::Comment)
        copy_lines(ctx, i, shift, out);
  copy_lines(ctx, outer.end_index, outer_shift, out);
  return out;
}

// -- atomics ------------------------------------------------------------------

std::optional<AtomicPlan> plan_atomic_removal(std::span<const AtomicSite> sites,
                                              const std::vector<std::string> &parallel_indices,
                                              RewriteContext &ctx) {
  AtomicPlan plan;
  for (const auto &site : sites) {
    auto line = ctx.file.lines[site.directive_index].line_number();
    if (site.kind != AtomicKind::Update) {
      ctx.diag(Severity::ActionRequired, "atomic-manual",
               "atomic " + std::string(to_string(site.kind)) +
                   " has no DC equivalent; manual intervention required",
               line);
      return std::nullopt;
    }
    const auto &stmt = ctx.file.lines[site.statement_index].text;
    auto a = parse_assignment(stmt);
    if (!a) {
      ctx.diag(Severity::ActionRequired, "atomic-manual",
               "atomic statement is not an assignment; manual intervention required", line);
      return std::nullopt;
    }
    if (!a->subscripted) {
      auto op = update_operator(stmt, *a);
      if (!op) {
        ctx.diag(Severity::ActionRequired, "atomic-manual",
                 "atomic update of '" + a->name + "' is not a reduction form", line);
        return std::nullopt;
      }
      merge_reduction(plan.reductions, {*op, {a->lhs}});
      plan.dropped.insert(site.directive_index);
      continue;
    }
    std::set<std::string> subs;
    bool plain = true;
    for (const auto &s : a->subscripts) {
      auto ids = lex::identifiers(s);
      if (ids.size() != 1 || normalized(s) != ids[0])
        plain = false;
      else
        subs.insert(ids[0]);
    }
    bool covers = plain && std::all_of(parallel_indices.begin(), parallel_indices.end(),
                                       [&](const std::string &i) { return subs.count(i) > 0; });
    if (!covers) {
      ctx.diag(Severity::ActionRequired, "atomic-manual",
               "atomic update of '" + a->lhs +
                   "' may touch the same element from different iterations",
               line);
      return std::nullopt;
    }
    plan.dropped.insert(site.directive_index);
  }
  return plan;
}

// -- region rewrites -------------------------------------------------------------

namespace {

std::vector<ReductionUse> chain_reductions(const AccRegion &region) {
  std::vector<ReductionUse> out;
  for (const auto &d : region.directives)
    for (const auto &c : d.clauses)
      if (c.reduction_op)
        merge_reduction(out, {*c.reduction_op, c.args});
  return out;
}

void report_region_clauses(const AccRegion &region, RewriteContext &ctx) {
  for (const auto &d : region.directives)
    if (d.kind == DirectiveKind::Loop || d.kind == DirectiveKind::ParallelLoop)
      report_dropped_clauses(d, ctx);
}

std::string index_list(const AccRegion &region) {
  std::string s;
  for (const auto &i : collapsed_indices(region))
    s += (s.empty() ? "" : ",") + i;
  return s;
}

std::optional<std::vector<std::string>> convert_loop(const AccRegion &region, RewriteContext &ctx,
                                                     std::vector<ReductionUse> reductions,
                                                     std::set<std::size_t> dropped = {}) {
  const auto *nest = region.nest();
  auto line = ctx.file.lines[region.begin].line_number();
  if (!collapsible(*nest, region.collapse, line, ctx))
    return std::nullopt;
  report_region_clauses(region, ctx);
  DcLoopSpec spec;
  spec.nest = nest;
  spec.collapse = region.collapse;
  spec.reductions = std::move(reductions);
  spec.lead_begin = region.begin + 1;
  spec.dropped_atomics = std::move(dropped);
  return emit_dc_loop(spec, ctx);
}

std::optional<std::vector<std::string>> convert_already_dc(const AccRegion &region,
                                                           RewriteContext &ctx) {
  const auto *nest = region.nest();
  auto reductions = chain_reductions(region);
  auto line = ctx.file.lines[region.begin].line_number();
  const auto &header = ctx.file.lines[nest->begin()];
  if (!reductions.empty() && ctx.level < RewriteLevel::Dc2x) {
    ctx.diag(Severity::Info, "reduction-retained",
             "reduction on an existing DC loop kept as OpenACC until the reduce clause is used",
             line);
    return std::nullopt;
  }
  bool has_reduce = lex::to_lower(header.text).find("reduce") != std::string::npos;
  if (!reductions.empty() && !has_reduce && header.span > 1) {
    ctx.diag(Severity::ActionRequired, "reduction-manual",
             "cannot append a reduce clause to a continued DC header", line);
    return std::nullopt;
  }
  report_region_clauses(region, ctx);
  std::vector<std::string> out;
  for (std::size_t i = region.begin + 1; i < nest->begin(); ++i)
    if (ctx.file.lines[i].kind != LineKind::AccDirective)
      copy_lines(ctx, i, 0, out);
  auto text = physical(ctx, nest->begin());
  if (!has_reduce) {
    auto stripped = lex::strip_comment(text);
    auto comment = text.substr(stripped.size());
    text = std::string(stripped);
    for (const auto &r : reductions)
      text += " " + render_reduce(r);
    text += comment;
  }
  out.push_back(text);
  const auto &hl = ctx.file.lines[nest->begin()];
  for (auto p = hl.first_physical_index + 1; p <= hl.last_physical_index(); ++p)
    out.push_back(ctx.src.physical_lines()[p]);
  for (std::size_t i = nest->begin() + 1; i <= nest->end(); ++i)
    copy_lines(ctx, i, 0, out);
  ctx.diag(Severity::Info, "collapse-to-dc", "directives around an existing DC loop removed", line);
  return out;
}

/// Interchanged form: outer DC over the target's indices, inner DC reducing
/// into a scalar temporary.
std::optional<std::vector<std::string>> interchange(const AccRegion &region, RewriteContext &ctx) {
  const auto &lines = ctx.file.lines;
  const auto *nest = region.nest();
  auto line = lines[region.begin].line_number();
  auto refuse = [&](const std::string &why) -> std::optional<std::vector<std::string>> {
    ctx.diag(Severity::ActionRequired, "array-reduction-manual",
             "array reduction not interchanged: " + why + "; manual intervention required", line);
    return std::nullopt;
  };
  if (!chain_reductions(region).empty())
    return refuse("region also carries scalar reductions");
  if (region.features.atomics.size() != 1)
    return refuse("more than one atomic statement");
  if (!collapsible(*nest, region.collapse, line, ctx))
    return std::nullopt;
  const auto &site = region.features.atomics.front();
  const auto &inner_loop = nest->loops[region.collapse - 1];
  for (std::size_t i = inner_loop.header_index + 1; i < inner_loop.end_index; ++i) {
    if (i == site.directive_index || i == site.statement_index ||
        lines[i].kind == LineKind::Blank)
      continue;
    return refuse("loop body holds more than the atomic update");
  }
  const auto &stmt_line = lines[site.statement_index];
  if (stmt_line.span != 1)
    return refuse("continued atomic statement");
  auto a = parse_assignment(stmt_line.text);
  if (!a || !a->subscripted)
    return refuse("atomic statement is not an array update");
  auto op = update_operator(stmt_line.text, *a);
  if (!op || (*op != ReductionOp::Add && *op != ReductionOp::Multiply &&
              *op != ReductionOp::Max && *op != ReductionOp::Min))
    return refuse("atomic statement is not in update form");

  auto parallel = collapsed_indices(region);
  std::set<std::string> target;
  for (const auto &s : a->subscripts) {
    auto n = normalized(s);
    if (std::find(parallel.begin(), parallel.end(), n) == parallel.end() || target.count(n))
      return refuse("target subscripts are not distinct loop indices");
    target.insert(n);
  }
  if (target.size() == parallel.size())
    return refuse("target is indexed by every loop index");

  std::vector<const LoopHeader *> outer_loops, inner_loops;
  for (std::size_t m = 0; m < region.collapse; ++m)
    (target.count(parallel[m]) ? outer_loops : inner_loops).push_back(&nest->loops[m]);

  const auto *sym = ctx.file.symbols.find(a->name);
  std::string type = sym ? sym->type_spec : "";
  bool integer = lex::to_lower(type).rfind("integer", 0) == 0;
  auto tmp = ctx.fresh_tmp();
  std::string init;
  switch (*op) {
  case ReductionOp::Add:
    init = integer ? "0" : "0.";
    break;
  case ReductionOp::Multiply:
    init = integer ? "1" : "1.";
    break;
  case ReductionOp::Max:
    init = "-huge(" + tmp + ")";
    break;
  default:
    init = "huge(" + tmp + ")";
    break;
  }

  auto header_text = physical(ctx, nest->begin());
  std::string base(leading_whitespace(header_text));
  auto outer_indent = indent_width(header_text);
  auto second = region.collapse > 1 ? indent_width(physical(ctx, nest->loops[1].header_index)) : 0;
  std::string step(second > outer_indent ? second - outer_indent : 2, ' ');
  auto kw = dc_keyword(nest->loops.front());
  auto join = [](const std::vector<const LoopHeader *> &loops) {
    std::string s;
    for (const auto *h : loops)
      s += (s.empty() ? "" : ",") + triplet(h->bounds);
    return s;
  };

  std::string label = nest->loops.front().construct_name.empty()
                          ? ""
                          : nest->loops.front().construct_name + ": ";
  std::vector<std::string> out;
  for (std::size_t i = region.begin + 1; i < nest->begin(); ++i)
    if (lines[i].kind != LineKind::AccDirective)
      copy_lines(ctx, i, 0, out);
  out.push_back(base + label + kw + " (" + join(outer_loops) + ")");
  out.push_back(base + step + tmp + a->equals + init);
  out.push_back(base + step + kw + " (" + join(inner_loops) + ") reduce(" +
                std::string(to_string(*op)) + ":" + tmp + ")");
  out.push_back(base + step + step +
                std::string(lex::trim(replace_target(stmt_line.text, *a, tmp))));
  out.push_back(base + step + std::string(lex::trim(physical(ctx, inner_loop.end_index))));
  out.push_back(base + step + a->lhs + a->equals + tmp);
  copy_lines(ctx, nest->end(), 0, out);

  report_region_clauses(region, ctx);
  if (type.empty())
    ctx.diag(Severity::Warning, "temp-declaration-needed",
             "declare '" + tmp + "' with the type of '" + a->name + "'", line);
  ctx.temps.push_back({region.begin, tmp, type});
  ctx.diag(Severity::Info, "array-reduction-interchanged",
           "array reduction into '" + a->name + "' interchanged; atomic removed", line);
  ctx.diag(Severity::Warning, "array-reduction-overwrites-target",
           "'" + a->lhs + "' is assigned, not accumulated; exact when it holds the reduction "
           "identity on entry",
           line);
  return out;
}

} // namespace

std::optional<std::vector<std::string>> attempt_region(const AccRegion &region,
                                                       RewriteContext &ctx) {
  auto line = ctx.file.lines[region.begin].line_number();
  if (region.category == RegionCategory::Unsupported) {
    std::string why;
    for (const auto &r : region.unsupported_reasons)
      why += (why.empty() ? "" : "; ") + r;
    ctx.diag(Severity::ActionRequired, "unsupported-region",
             "region kept as OpenACC: " + why, line);
    return std::nullopt;
  }
  if (ctx.level == RewriteLevel::Retain)
    return std::nullopt;
  if (region.features.async && ctx.level < RewriteLevel::Full) {
    ctx.diag(Severity::Info, "async-retained",
             "asynchronous region kept as OpenACC; DC has no asynchronous launch", line);
    return std::nullopt;
  }

  std::optional<std::vector<std::string>> out;
  switch (region.category) {
  case RegionCategory::SimpleCollapse:
  case RegionCategory::RoutineBearingLoop:
  case RegionCategory::AlreadyDC:
    out = rewrite_collapse_to_dc(region, ctx);
    break;
  case RegionCategory::ScalarReduction:
    out = rewrite_scalar_reduction(region, ctx);
    break;
  case RegionCategory::ArrayReductionAtomic:
    out = rewrite_array_reduction(region, ctx);
    break;
  case RegionCategory::AtomicNonReduction:
    if (ctx.level == RewriteLevel::Dc) {
      ctx.diag(Severity::Info, "atomic-retained", "loop with atomic kept as OpenACC", line);
      break;
    }
    if (ctx.level == RewriteLevel::Dc2x) {
      out = convert_loop(region, ctx, chain_reductions(region));
      if (out)
        ctx.diag(Severity::Info, "collapse-to-dc",
                 "loop converted to DC over (" + index_list(region) + ") with the atomic kept",
                 line);
    } else if (auto plan =
                   plan_atomic_removal(region.features.atomics, collapsed_indices(region), ctx)) {
      auto reductions = chain_reductions(region);
      for (const auto &r : plan->reductions)
        merge_reduction(reductions, r);
      out = convert_loop(region, ctx, reductions, plan->dropped);
      if (out)
        ctx.diag(Severity::Info, "atomic-dropped",
                 "loop converted to DC over (" + index_list(region) + "); atomic removed", line);
    }
    break;
  case RegionCategory::KernelsLoops:
  case RegionCategory::KernelsArraySyntax:
  case RegionCategory::KernelsIntrinsic:
    out = expand_kernels(region, ctx);
    break;
  case RegionCategory::Unsupported:
    break;
  }
  if (!out)
    return out;

  if (region.features.async)
    ctx.diag(Severity::Warning, "async-dropped",
             "asynchronous launch dropped; DC kernels run synchronously", line);
  for (const auto &call : region.features.calls) {
    if (call.declared_pure == Purity::Unknown)
      ctx.diag(ctx.level == RewriteLevel::Full ? Severity::ActionRequired : Severity::Warning,
               "unknown-purity",
               "purity of '" + call.callee + "' is unknown; DC requires a pure procedure",
               call.line);
    ctx.converted_calls.push_back(call);
  }
  return out;
}

} // namespace detail

using namespace detail;

std::optional<std::vector<std::string>> rewrite_collapse_to_dc(const AccRegion &region,
                                                               RewriteContext &ctx) {
  const auto *nest = region.nest();
  auto line = ctx.file.lines[region.begin].line_number();
  if (!nest || region.category == RegionCategory::Unsupported || ctx.level < RewriteLevel::Dc)
    return std::nullopt;
  if (nest->concurrent)
    return convert_already_dc(region, ctx);
  auto out = convert_loop(region, ctx, {});
  if (out)
    ctx.diag(Severity::Info, "collapse-to-dc",
             "collapse(" + std::to_string(region.collapse) + ") nest converted to DC over (" +
                 index_list(region) + ")",
             line);
  return out;
}

std::optional<std::vector<std::string>> rewrite_scalar_reduction(const AccRegion &region,
                                                                 RewriteContext &ctx) {
  const auto *nest = region.nest();
  auto line = ctx.file.lines[region.begin].line_number();
  if (!nest || region.category == RegionCategory::Unsupported)
    return std::nullopt;
  if (ctx.level < RewriteLevel::Dc2x) {
    ctx.diag(Severity::Info, "reduction-retained",
             "reduction loop kept as OpenACC until the reduce clause is used", line);
    return std::nullopt;
  }
  if (nest->concurrent)
    return convert_already_dc(region, ctx);
  auto reductions = chain_reductions(region);
  std::set<std::size_t> dropped;
  if (ctx.level == RewriteLevel::Full && !region.features.atomics.empty()) {
    auto plan = plan_atomic_removal(region.features.atomics, collapsed_indices(region), ctx);
    if (!plan)
      return std::nullopt;
    for (const auto &r : plan->reductions)
      merge_reduction(reductions, r);
    dropped = plan->dropped;
  }
  auto out = convert_loop(region, ctx, reductions, dropped);
  if (out)
    ctx.diag(Severity::Info, "reduction-to-dc",
             "reduction loop converted to DC with a reduce clause", line);
  return out;
}

std::optional<std::vector<std::string>> rewrite_array_reduction(const AccRegion &region,
                                                                RewriteContext &ctx) {
  const auto *nest = region.nest();
  auto line = ctx.file.lines[region.begin].line_number();
  if (!nest || region.category == RegionCategory::Unsupported)
    return std::nullopt;
  if (ctx.level < RewriteLevel::Dc2x) {
    ctx.diag(Severity::Info, "array-reduction-retained", "array reduction retained as OpenACC",
             line);
    return std::nullopt;
  }
  if (ctx.level == RewriteLevel::Full)
    return interchange(region, ctx);
  auto out = convert_loop(region, ctx, chain_reductions(region));
  if (out)
    ctx.diag(Severity::Info, "array-reduction-atomic-dc",
             "array reduction converted to DC with the atomic update kept", line);
  return out;
}

} // namespace acc2dc
