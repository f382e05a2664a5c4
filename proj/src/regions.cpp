#include <algorithm>
#include <charconv>

#include "acc2dc/errors.hpp"
#include "acc2dc/lexer.hpp"
#include "acc2dc/loop.hpp"

namespace acc2dc {

std::string_view to_string(RegionCategory category) {
  switch (category) {
  case RegionCategory::SimpleCollapse:
    return "SimpleCollapse";
  case RegionCategory::ScalarReduction:
    return "ScalarReduction";
  case RegionCategory::ArrayReductionAtomic:
    return "ArrayReductionAtomic";
  case RegionCategory::AtomicNonReduction:
    return "AtomicNonReduction";
  case RegionCategory::KernelsLoops:
    return "KernelsLoops";
  case RegionCategory::KernelsArraySyntax:
    return "KernelsArraySyntax";
  case RegionCategory::KernelsIntrinsic:
    return "KernelsIntrinsic";
  case RegionCategory::RoutineBearingLoop:
    return "RoutineBearingLoop";
  case RegionCategory::AlreadyDC:
    return "AlreadyDC";
  case RegionCategory::Unsupported:
    return "Unsupported";
  }
  return "?";
}

const Directive *FileAnalysis::directive_at(std::size_t logical_index) const {
  auto it = directives.find(logical_index);
  return it == directives.end() ? nullptr : &it->second;
}

namespace {

bool transparent(const LogicalLine &line) {
  return line.kind == LineKind::Blank || line.kind == LineKind::Comment;
}

std::size_t skip_transparent(std::span<const LogicalLine> lines, std::size_t from,
                             std::size_t to) {
  while (from < to && transparent(lines[from]))
    ++from;
  return from;
}

const Directive &directive_for(const std::map<std::size_t, Directive> &directives,
                               std::size_t index) {
  return directives.at(index);
}

bool is_kind(const std::map<std::size_t, Directive> &directives, std::size_t index,
             DirectiveKind kind) {
  auto it = directives.find(index);
  return it != directives.end() && it->second.kind == kind;
}

} // namespace

std::optional<std::size_t> collapse_count(const Directive &d) {
  const auto *c = d.find_clause("collapse");
  if (!c)
    return std::nullopt;
  if (c->args.size() != 1)
    return 0;
  std::string_view arg = c->args[0];
  if (auto colon = arg.find(':'); colon != std::string_view::npos) // collapse(force:n)
    arg = lex::trim(arg.substr(colon + 1));
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), value);
  if (ec != std::errc() || ptr != arg.data() + arg.size())
    return 0;
  return value;
}

namespace {

/// Directive lines between `from` and `to` that are Loop directives.
std::vector<std::size_t> loop_directives_between(const std::map<std::size_t, Directive> &dirs,
                                                 std::size_t from, std::size_t to) {
  std::vector<std::size_t> out;
  for (auto it = dirs.lower_bound(from); it != dirs.end() && it->first < to; ++it)
    if (it->second.kind == DirectiveKind::Loop)
      out.push_back(it->first);
  return out;
}

/// Builds a loop region for the directive at `dir_index` governing the DO at
/// `do_index`. `outer` holds directives above the loop directive (the
/// enclosing `parallel`).
AccRegion make_loop_region(std::span<const LogicalLine> lines,
                           const std::map<std::size_t, Directive> &dirs,
                           std::vector<Directive> outer, std::size_t dir_index,
                           std::size_t do_index) {
  AccRegion region;
  region.directives = std::move(outer);
  region.directives.push_back(directive_for(dirs, dir_index));
  region.begin = dir_index;
  region.group_begin = dir_index;

  LoopNest nest;
  try {
    nest = parse_loop_nest(lines, do_index);
  } catch (const ParseError &e) {
    if (e.kind() == ParseErrorKind::UnmatchedEnd)
      throw;
    auto end = find_end_do(lines, do_index);
    region.payload = StatementBlock{do_index, end + 1};
    region.end = end;
    region.group_end = end;
    region.unsupported_reasons.push_back(e.what());
    return region;
  }
  region.end = nest.end();
  region.group_end = nest.end();

  if (!nest.concurrent) {
    std::size_t n = 1;
    for (const auto &d : region.directives) {
      if (auto c = collapse_count(d)) {
        if (*c == 0)
          region.unsupported_reasons.push_back("collapse argument is not an integer literal");
        n = std::max<std::size_t>(*c, 1);
      }
    }
    // Loop directives sitting between collapsed headers extend the chain.
    while (n < nest.loops.size()) {
      auto between = loop_directives_between(dirs, nest.loops[n - 1].header_index + 1,
                                             nest.loops[n].header_index);
      if (between.empty())
        break;
      const auto &inner = directive_for(dirs, between.back());
      if (inner.has_clause("seq"))
        break;
      region.directives.push_back(inner);
      auto c = collapse_count(inner).value_or(1);
      n += std::max<std::size_t>(c, 1);
    }
    region.collapse = n;
    if (n > nest.perfectly_nested_depth) {
      region.unsupported_reasons.push_back(
          "collapse(" + std::to_string(n) + ") exceeds the perfectly nested depth " +
          std::to_string(nest.perfectly_nested_depth) + "; manual intervention required");
    } else {
      for (std::size_t m = 1; m < n; ++m) {
        const auto &b = nest.loops[m].bounds;
        auto ids = lex::identifiers(b.lower + " " + b.upper + " " + b.stride.value_or(""));
        for (std::size_t o = 0; o < m; ++o) {
          auto outer_index = lex::to_lower(nest.loops[o].bounds.index_var);
          if (std::find(ids.begin(), ids.end(), outer_index) != ids.end())
            region.unsupported_reasons.push_back(
                "bounds of loop '" + b.index_var + "' depend on index '" +
                nest.loops[o].bounds.index_var + "'; a DC header cannot express this");
        }
      }
    }
  }
  region.payload = std::move(nest);
  return region;
}

AccRegion unsupported_block(std::vector<Directive> dirs, std::size_t begin, std::size_t end,
                            std::string reason) {
  AccRegion r;
  r.directives = std::move(dirs);
  r.payload = StatementBlock{begin + 1, end};
  r.begin = r.group_begin = begin;
  r.end = r.group_end = end;
  r.unsupported_reasons.push_back(std::move(reason));
  return r;
}

std::size_t find_closing(std::span<const LogicalLine> lines,
                         const std::map<std::size_t, Directive> &dirs, std::size_t open,
                         DirectiveKind close_kind) {
  for (auto it = dirs.upper_bound(open); it != dirs.end(); ++it) {
    auto kind = it->second.kind;
    if (kind == close_kind)
      return it->first;
    if (kind == DirectiveKind::Parallel || kind == DirectiveKind::ParallelLoop ||
        kind == DirectiveKind::Kernels || kind == DirectiveKind::EndParallel ||
        kind == DirectiveKind::EndKernels)
      throw StructureError("'" + std::string(to_string(dirs.at(open).kind)) +
                               "' at line " + std::to_string(lines[open].line_number()) +
                               " is not closed before '" + std::string(to_string(kind)) +
                               "' at line " + std::to_string(lines[it->first].line_number()),
                           lines[open].line_number(), lines[it->first].line_number());
  }
  auto eof = lines.empty() ? 1 : lines.back().last_physical_index() + 2;
  throw StructureError("'" + std::string(to_string(dirs.at(open).kind)) + "' at line " +
                           std::to_string(lines[open].line_number()) +
                           " has no matching end directive",
                       lines[open].line_number(), eof);
}

void build_parallel_siblings(std::span<const LogicalLine> lines,
                             const std::map<std::size_t, Directive> &dirs, std::size_t p,
                             std::size_t e, std::vector<AccRegion> &out) {
  const Directive &parallel = dirs.at(p);
  std::vector<AccRegion> members;
  std::string stray;
  std::size_t j = p + 1;
  while (j < e) {
    if (transparent(lines[j])) {
      ++j;
      continue;
    }
    if (lines[j].kind == LineKind::AccDirective && is_kind(dirs, j, DirectiveKind::Loop)) {
      auto k = skip_transparent(lines, j + 1, e);
      if (k >= e || lines[k].kind != LineKind::Code ||
          classify_do(lines[k].text) == DoForm::NotDo) {
        stray = "loop directive at line " + std::to_string(lines[j].line_number()) +
                " is not followed by a DO loop";
        break;
      }
      members.push_back(make_loop_region(lines, dirs, {parallel}, j, k));
      j = members.back().end + 1;
      continue;
    }
    if (lines[j].kind == LineKind::Code && classify_do(lines[j].text) == DoForm::Concurrent) {
      AccRegion r;
      r.directives = {parallel};
      r.payload = parse_loop_nest(lines, j);
      r.begin = r.group_begin = j;
      r.end = r.group_end = r.nest()->end();
      members.push_back(std::move(r));
      j = members.back().end + 1;
      continue;
    }
    stray = "statement at line " + std::to_string(lines[j].line_number()) +
            " in the parallel region is outside any annotated loop";
    break;
  }

  if (members.empty() || !stray.empty()) {
    out.push_back(unsupported_block({parallel, dirs.at(e)}, p, e,
                                    stray.empty() ? "parallel region without loops" : stray));
    return;
  }
  for (auto &m : members) {
    m.group_begin = p;
    m.group_end = e;
    m.sibling_count = members.size();
    m.directives.push_back(dirs.at(e));
    out.push_back(std::move(m));
  }
}

} // namespace

std::vector<AccRegion> build_regions(std::span<const LogicalLine> lines,
                                     const std::map<std::size_t, Directive> &dirs) {
  std::vector<AccRegion> regions;
  std::size_t i = 0;
  while (i < lines.size()) {
    auto it = dirs.find(i);
    if (it == dirs.end()) {
      ++i;
      continue;
    }
    const Directive &d = it->second;
    switch (d.kind) {
    case DirectiveKind::Parallel: {
      auto e = find_closing(lines, dirs, i, DirectiveKind::EndParallel);
      build_parallel_siblings(lines, dirs, i, e, regions);
      i = e + 1;
      break;
    }
    case DirectiveKind::ParallelLoop:
    case DirectiveKind::Loop: {
      auto k = skip_transparent(lines, i + 1, lines.size());
      if (k >= lines.size() || lines[k].kind != LineKind::Code ||
          classify_do(lines[k].text) == DoForm::NotDo) {
        regions.push_back(unsupported_block({d}, i, i,
                                            std::string(to_string(d.kind)) +
                                                " directive is not followed by a DO loop"));
        ++i;
        break;
      }
      auto r = make_loop_region(lines, dirs, {}, i, k);
      if (d.kind == DirectiveKind::Loop)
        r.unsupported_reasons.push_back("orphaned loop directive outside a compute construct");
      i = r.end + 1;
      regions.push_back(std::move(r));
      break;
    }
    case DirectiveKind::Kernels: {
      auto e = find_closing(lines, dirs, i, DirectiveKind::EndKernels);
      AccRegion r;
      r.directives = {d, dirs.at(e)};
      r.payload = StatementBlock{i + 1, e};
      r.begin = r.group_begin = i;
      r.end = r.group_end = e;
      regions.push_back(std::move(r));
      i = e + 1;
      break;
    }
    case DirectiveKind::EndParallel:
    case DirectiveKind::EndKernels:
      throw StructureError("'" + std::string(to_string(d.kind)) + "' at line " +
                               std::to_string(lines[i].line_number()) +
                               " has no matching begin directive",
                           lines[i].line_number(), lines[i].line_number());
    default:
      ++i;
      break;
    }
  }
  return regions;
}

std::vector<AccRegion> build_regions(const SourceFile &src) {
  auto lines = assemble_logical_lines(src);
  std::map<std::size_t, Directive> dirs;
  for (std::size_t i = 0; i < lines.size(); ++i)
    if (lines[i].kind == LineKind::AccDirective)
      dirs.emplace(i, parse_directive(lines[i], i));
  return build_regions(lines, dirs);
}

std::vector<std::string> collapsed_indices(const AccRegion &region) {
  std::vector<std::string> out;
  if (const auto *nest = region.nest(); nest && !nest->concurrent)
    for (std::size_t m = 0; m < region.collapse && m < nest->loops.size(); ++m)
      out.push_back(lex::to_lower(nest->loops[m].bounds.index_var));
  return out;
}

// -- classification -----------------------------------------------------------

namespace {

/// Range of logical lines scanned for body features.
std::pair<std::size_t, std::size_t> payload_range(const AccRegion &r) {
  if (const auto *nest = r.nest())
    return {nest->begin() + 1, nest->end()};
  const auto &b = std::get<StatementBlock>(r.payload);
  return {b.begin, b.end};
}

/// Array reference `name(sub, ...)` on the left of an assignment.
struct AssignTarget {
  std::string name;
  std::vector<std::string> subscripts;
  bool subscripted = false;
};

std::optional<AssignTarget> assignment_target(std::string_view code) {
  auto eq = lex::assignment_equals(code);
  if (eq == std::string_view::npos)
    return std::nullopt;
  auto lhs = lex::trim(code.substr(0, eq));
  auto tokens = lex::tokenize(lhs);
  if (tokens.empty() || !tokens[0].is_identifier())
    return std::nullopt;
  AssignTarget t;
  t.name = lex::to_lower(tokens[0].text);
  if (tokens.size() == 1)
    return t;
  if (tokens[1].kind != lex::TokenKind::LParen)
    return std::nullopt;
  auto close = lex::match_paren(lhs, tokens[1].offset);
  if (close != lhs.size())
    return std::nullopt;
  t.subscripted = true;
  t.subscripts = lex::split_top_level(lhs.substr(tokens[1].offset + 1,
                                                 close - tokens[1].offset - 2));
  return t;
}

bool is_whole_reduction_intrinsic(std::string_view rhs, std::string &name) {
  auto tokens = lex::tokenize(rhs);
  if (tokens.size() < 3 || !tokens[0].is_identifier() ||
      tokens[1].kind != lex::TokenKind::LParen)
    return false;
  auto lower = lex::to_lower(tokens[0].text);
  if (lower != "sum" && lower != "minval" && lower != "maxval")
    return false;
  if (lex::match_paren(tokens, 1) != tokens.size() - 1)
    return false;
  name = lower;
  return true;
}

void scan_kernels_block(const AccRegion &r, const FileAnalysis &file, BodyFeatures &f,
                        std::vector<std::string> &reasons) {
  const auto &block = std::get<StatementBlock>(r.payload);
  const auto &lines = file.lines;
  for (std::size_t i = block.begin; i < block.end; ++i) {
    const auto &line = lines[i];
    if (transparent(line))
      continue;
    if (line.kind == LineKind::AccDirective) {
      const auto *d = file.directive_at(i);
      if (d && d->kind == DirectiveKind::Loop)
        continue;
      if (d && d->kind == DirectiveKind::Atomic) {
        f.atomics.push_back({i, skip_transparent(lines, i + 1, block.end),
                             d->atomic_kind.value_or(AtomicKind::Update)});
        continue;
      }
      reasons.push_back("directive at line " + std::to_string(line.line_number()) +
                        " is not supported inside kernels");
      continue;
    }
    auto form = classify_do(line.text);
    if (form == DoForm::Counted || form == DoForm::Concurrent) {
      auto end = find_end_do(lines, i);
      // Nested loop directives and atomics are handled when the loop is rewritten.
      for (std::size_t k = i; k < end; ++k) {
        if (const auto *d = file.directive_at(k); d && d->kind == DirectiveKind::Atomic)
          f.atomics.push_back(
              {k, skip_transparent(lines, k + 1, end), d->atomic_kind.value_or(AtomicKind::Update)});
        if (const auto *d = file.directive_at(k); d && d->kind == DirectiveKind::Loop)
          for (const auto &c : d->clauses)
            if (c.reduction_op)
              f.reductions.push_back({*c.reduction_op, c.args});
      }
      i = end;
      continue;
    }
    if (form != DoForm::NotDo) {
      reasons.push_back("loop at line " + std::to_string(line.line_number()) +
                        " cannot become DC");
      continue;
    }
    auto target = assignment_target(line.text);
    if (!target) {
      reasons.push_back("statement at line " + std::to_string(line.line_number()) +
                        " in kernels region is not an assignment or loop");
      continue;
    }
    auto eq = lex::assignment_equals(line.text);
    auto rhs = lex::trim(std::string_view(line.text).substr(eq + 1));
    std::string intrinsic;
    if (is_whole_reduction_intrinsic(rhs, intrinsic)) {
      f.reduction_intrinsics.push_back({intrinsic, target->name, i});
      continue;
    }
    const auto *sym = file.symbols.find(target->name);
    bool whole = !target->subscripted ||
                 std::all_of(target->subscripts.begin(), target->subscripts.end(),
                             [](const std::string &s) { return s == ":"; });
    if (whole && (!sym || sym->rank() > 0))
      f.array_syntax_statements.push_back(i);
  }
}

} // namespace

AccRegion classify_region(AccRegion region, const FileAnalysis &file,
                          const AnalysisConfig &config) {
  (void)config;
  BodyFeatures f;
  auto &reasons = region.unsupported_reasons;
  const auto &lines = file.lines;

  for (const auto &d : region.directives) {
    if (d.has_clause("async") || d.has_clause("wait"))
      f.async = true;
    for (const auto &c : d.clauses)
      if (c.reduction_op)
        f.reductions.push_back({*c.reduction_op, c.args});
  }

  auto [begin, end] = payload_range(region);
  std::vector<std::string> indices;
  for (std::size_t i = begin; i < end && i < lines.size(); ++i)
    if (lines[i].kind == LineKind::Code)
      if (auto b = parse_do_header(lines[i].text))
        indices.push_back(lex::to_lower(b->index_var));
  if (const auto *nest = region.nest(); nest && !nest->concurrent)
    indices.push_back(lex::to_lower(nest->loops.front().bounds.index_var));

  if (region.is_kernels()) {
    scan_kernels_block(region, file, f, reasons);
  } else if (region.nest()) {
    std::vector<std::size_t> chain;
    for (const auto &d : region.directives)
      chain.push_back(d.logical_index);
    for (std::size_t i = begin; i < end; ++i) {
      if (lines[i].kind != LineKind::AccDirective)
        continue;
      if (std::find(chain.begin(), chain.end(), i) != chain.end())
        continue;
      const auto *d = file.directive_at(i);
      if (d && d->kind == DirectiveKind::Atomic) {
        auto stmt = skip_transparent(lines, i + 1, end);
        if (stmt >= end || lines[stmt].kind != LineKind::Code) {
          reasons.push_back("atomic directive at line " + std::to_string(lines[i].line_number()) +
                            " does not govern a statement");
          continue;
        }
        f.atomics.push_back({i, stmt, d->atomic_kind.value_or(AtomicKind::Update)});
      } else if (d && d->kind == DirectiveKind::Loop) {
        auto k = skip_transparent(lines, i + 1, end);
        auto form = k < end && lines[k].kind == LineKind::Code ? classify_do(lines[k].text)
                                                               : DoForm::NotDo;
        if (form != DoForm::Counted && form != DoForm::Concurrent)
          reasons.push_back("loop directive at line " + std::to_string(lines[i].line_number()) +
                            " does not govern a counted DO loop");
        for (const auto &c : d->clauses)
          if (c.reduction_op)
            f.reductions.push_back({*c.reduction_op, c.args});
        if (d->has_clause("async"))
          f.async = true;
      } else {
        reasons.push_back("directive at line " + std::to_string(lines[i].line_number()) +
                          " is not supported inside a loop region");
      }
    }
  }

  if (begin < end && end <= lines.size())
    f.calls = detect_calls(std::span(lines).subspan(begin, end - begin), file.symbols,
                           file.purity, indices);
  for (const auto &call : f.calls)
    if (call.declared_pure == Purity::NotPure)
      reasons.push_back("call to non-pure procedure '" + call.callee + "' at line " +
                        std::to_string(call.line) + "; DC requires pure procedures");

  region.features = std::move(f);
  const auto &feat = region.features;

  if (!reasons.empty()) {
    region.category = RegionCategory::Unsupported;
  } else if (region.is_kernels()) {
    if (!feat.reduction_intrinsics.empty())
      region.category = RegionCategory::KernelsIntrinsic;
    else if (!feat.array_syntax_statements.empty())
      region.category = RegionCategory::KernelsArraySyntax;
    else
      region.category = RegionCategory::KernelsLoops;
  } else if (region.nest()->concurrent) {
    region.category = RegionCategory::AlreadyDC;
  } else {
    auto parallel = collapsed_indices(region);
    bool array_reduction = false;
    for (const auto &site : feat.atomics) {
      if (site.kind != AtomicKind::Update)
        continue;
      auto target = assignment_target(lines[site.statement_index].text);
      if (!target || !target->subscripted)
        continue;
      std::vector<std::string> used;
      for (const auto &s : target->subscripts)
        for (auto &id : lex::identifiers(s))
          used.push_back(id);
      for (const auto &idx : parallel)
        if (std::find(used.begin(), used.end(), idx) == used.end())
          array_reduction = true;
    }
    if (array_reduction)
      region.category = RegionCategory::ArrayReductionAtomic;
    else if (!feat.reductions.empty())
      region.category = RegionCategory::ScalarReduction;
    else if (!feat.atomics.empty())
      region.category = RegionCategory::AtomicNonReduction;
    else if (!feat.calls.empty())
      region.category = RegionCategory::RoutineBearingLoop;
    else
      region.category = RegionCategory::SimpleCollapse;
  }
  return region;
}

FileAnalysis analyze_file(const SourceFile &src, const AnalysisConfig &config) {
  FileAnalysis file;
  file.lines = assemble_logical_lines(src);
  for (std::size_t i = 0; i < file.lines.size(); ++i)
    if (file.lines[i].kind == LineKind::AccDirective)
      file.directives.emplace(i, parse_directive(file.lines[i], i));
  file.symbols = harvest_symbols(file.lines, config);
  file.purity = PurityTable(file.lines, config);
  auto regions = build_regions(file.lines, file.directives);
  file.regions.reserve(regions.size());
  for (auto &r : regions)
    file.regions.push_back(classify_region(std::move(r), file, config));
  return file;
}

} // namespace acc2dc
