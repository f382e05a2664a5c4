#include <algorithm>

#include "acc2dc/errors.hpp"
#include "acc2dc/lexer.hpp"
#include "rewrite_internal.hpp"

namespace acc2dc {

namespace {

using namespace detail;

struct Refusal {
  std::string reason;
  std::size_t line;
};

std::string normalized(std::string_view s) { return lex::to_lower(lex::remove_spaces(s)); }

std::pair<std::string, std::string> extent_bounds(const std::string &extent) {
  auto parts = lex::split_top_level(extent, ':');
  if (parts.size() == 2)
    return {parts[0], parts[1]};
  return {"1", std::string(lex::trim(extent))};
}

/// Rewrites whole-array references in `expr` to element references with the
/// given index names. All arrays must share `shape` (taken from the first
/// array when empty).
std::optional<std::string> subscript_expression(std::string_view expr, const SymbolTable &symbols,
                                                std::vector<std::string> &shape,
                                                const std::vector<std::string> &indices,
                                                std::string &why, std::size_t &array_count) {
  auto tokens = lex::tokenize(expr);
  std::string out;
  std::size_t pos = 0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const auto &tok = tokens[t];
    if (tok.text == "%") {
      why = "derived-type component in array expression";
      return std::nullopt;
    }
    if (!tok.is_identifier())
      continue;
    auto name = lex::to_lower(tok.text);
    const auto *sym = symbols.find(name);
    bool call = t + 1 < tokens.size() && tokens[t + 1].kind == lex::TokenKind::LParen;
    bool keyword = t + 1 < tokens.size() && tokens[t + 1].text == "=";
    if (keyword || !sym || sym->rank() == 0)
      continue;
    if (call) {
      why = "array section or element reference '" + tok.text + "(...)'";
      return std::nullopt;
    }
    if (!sym->shape_known()) {
      why = "shape of '" + tok.text + "' is unknown";
      return std::nullopt;
    }
    if (shape.empty())
      shape = sym->extents;
    if (sym->extents.size() != shape.size()) {
      why = "arrays are not conformable";
      return std::nullopt;
    }
    for (std::size_t d = 0; d < shape.size(); ++d)
      if (normalized(sym->extents[d]) != normalized(shape[d])) {
        why = "arrays are not conformable";
        return std::nullopt;
      }
    out.append(expr.substr(pos, tok.end() - pos));
    out += "(";
    for (std::size_t d = 0; d < shape.size(); ++d)
      out += (d ? "," : "") + indices[d];
    out += ")";
    pos = tok.end();
    ++array_count;
  }
  out.append(expr.substr(pos));
  return out;
}

std::string dc_header(const std::string &indent, const std::vector<std::string> &shape,
                      const std::vector<std::string> &indices) {
  std::string out = indent + "do concurrent (";
  for (std::size_t d = 0; d < shape.size(); ++d) {
    auto [lo, hi] = extent_bounds(shape[d]);
    out += (d ? "," : "") + indices[d] + "=" + lo + ":" + hi;
  }
  return out + ")";
}

class KernelsExpander {
public:
  KernelsExpander(const AccRegion &region, RewriteContext &ctx)
      : region_(region), ctx_(ctx), lines_(ctx.file.lines) {}

  std::optional<std::vector<std::string>> run() {
    const auto &block = std::get<StatementBlock>(region_.payload);
    for (std::size_t i = block.begin; i < block.end; ++i) {
      const auto &line = lines_[i];
      if (line.kind == LineKind::Blank || line.kind == LineKind::Comment) {
        copy_lines(ctx_, i, 0, out_);
        continue;
      }
      if (line.kind == LineKind::AccDirective) {
        const auto *d = ctx_.file.directive_at(i);
        if (d->kind != DirectiveKind::Loop)
          return refuse("directive inside kernels", line.line_number());
        auto k = i + 1;
        while (k < block.end && lines_[k].kind != LineKind::Code)
          ++k;
        if (k >= block.end)
          return refuse("loop directive without a loop", line.line_number());
        if (!loop(k, d, i + 1))
          return std::nullopt;
        i = find_end_do(lines_, k);
        continue;
      }
      auto form = classify_do(line.text);
      if (form == DoForm::Concurrent) {
        auto end = find_end_do(lines_, i);
        for (auto k = i; k <= end; ++k)
          copy_lines(ctx_, k, 0, out_);
        i = end;
        continue;
      }
      if (form == DoForm::Counted) {
        if (!loop(i, nullptr, i))
          return std::nullopt;
        i = find_end_do(lines_, i);
        continue;
      }
      if (!statement(i))
        return std::nullopt;
    }
    return out_;
  }

private:
  std::optional<std::vector<std::string>> refuse(const std::string &why, std::size_t line) {
    ctx_.diag(Severity::ActionRequired, "kernels-manual",
              "kernels region not expanded: " + why + "; manual intervention required", line);
    return std::nullopt;
  }

  bool fail(const std::string &why, std::size_t line) {
    refuse(why, line);
    return false;
  }

  /// Scalars updated only through `x = x op ...` statements in the loop body.
  std::vector<ReductionUse> implicit_reductions(const LoopNest &nest,
                                                const std::vector<std::string> &indices) {
    std::map<std::string, std::pair<ReductionOp, std::size_t>> candidates;
    std::map<std::string, std::size_t> mentions;
    std::set<std::string> rejected;
    for (std::size_t i = nest.begin() + 1; i < nest.end(); ++i) {
      if (lines_[i].kind != LineKind::Code)
        continue;
      for (const auto &id : lex::identifiers(lines_[i].text))
        ++mentions[id];
      auto a = parse_assignment(lines_[i].text);
      if (!a || a->subscripted || ctx_.file.symbols.is_array(a->name) ||
          std::find(indices.begin(), indices.end(), a->name) != indices.end())
        continue;
      auto op = update_operator(lines_[i].text, *a);
      if (!op) {
        rejected.insert(a->name);
        continue;
      }
      auto &c = candidates[a->name];
      if (c.second > 0 && c.first != *op)
        rejected.insert(a->name);
      c.first = *op;
      c.second += 1;
    }
    std::vector<ReductionUse> out;
    for (const auto &[name, c] : candidates)
      if (!rejected.count(name) && mentions[name] == 2 * c.second)
        merge_reduction(out, {c.first, {name}});
    return out;
  }

  bool loop(std::size_t at, const Directive *d, std::size_t lead_begin) {
    auto line = lines_[at].line_number();
    LoopNest nest;
    try {
      nest = parse_loop_nest(lines_, at);
    } catch (const ParseError &e) {
      return fail(e.what(), line);
    }
    std::size_t collapse = d ? collapse_count(*d).value_or(1) : 1;
    if (!collapsible(nest, collapse, line, ctx_))
      return fail("loop nest cannot be collapsed", line);
    std::vector<std::string> indices, parallel;
    for (std::size_t i = nest.begin(); i < nest.end(); ++i)
      if (lines_[i].kind == LineKind::Code)
        if (auto b = parse_do_header(lines_[i].text))
          indices.push_back(lex::to_lower(b->index_var));
    for (std::size_t m = 0; m < collapse; ++m)
      parallel.push_back(lex::to_lower(nest.loops[m].bounds.index_var));

    DcLoopSpec spec;
    spec.nest = &nest;
    spec.collapse = collapse;
    spec.lead_begin = lead_begin;
    if (d) {
      report_dropped_clauses(*d, ctx_);
      for (const auto &c : d->clauses)
        if (c.reduction_op)
          merge_reduction(spec.reductions, {*c.reduction_op, c.args});
    }
    for (const auto &r : implicit_reductions(nest, indices))
      if (std::none_of(spec.reductions.begin(), spec.reductions.end(), [&](const ReductionUse &u) {
            return std::find(u.variables.begin(), u.variables.end(), r.variables[0]) !=
                   u.variables.end();
          }))
        merge_reduction(spec.reductions, r);

    std::vector<AtomicSite> sites;
    for (const auto &site : region_.features.atomics)
      if (site.directive_index > nest.begin() && site.directive_index < nest.end())
        sites.push_back(site);
    if (!sites.empty()) {
      auto plan = plan_atomic_removal(sites, parallel, ctx_);
      if (!plan)
        return fail("atomic update cannot be removed", line);
      spec.dropped_atomics = plan->dropped;
      for (const auto &r : plan->reductions)
        merge_reduction(spec.reductions, r);
    }
    auto emitted = emit_dc_loop(spec, ctx_);
    if (!emitted)
      return fail("nested loop cannot be converted", line);
    out_.insert(out_.end(), emitted->begin(), emitted->end());
    return true;
  }

  std::vector<std::string> index_names(std::size_t rank) {
    std::vector<std::string> names;
    auto near = region_.begin;
    for (std::size_t d = 0; d < rank; ++d) {
      names.push_back(ctx_.index_name(d));
      bool known = std::any_of(ctx_.temps.begin(), ctx_.temps.end(), [&](const auto &t) {
        return t.name == names.back() && t.near == near;
      });
      if (!known)
        ctx_.temps.push_back({near, names.back(), "integer"});
    }
    return names;
  }

  bool statement(std::size_t i) {
    const auto &line = lines_[i];
    auto a = parse_assignment(line.text);
    if (!a) {
      copy_lines(ctx_, i, 0, out_);
      return true;
    }
    auto indent = std::string(leading_whitespace(physical(ctx_, i)));
    auto rhs_tokens = lex::tokenize(a->rhs);
    std::string intrinsic;
    if (rhs_tokens.size() > 2 && rhs_tokens[0].is_identifier() &&
        rhs_tokens[1].kind == lex::TokenKind::LParen &&
        lex::match_paren(rhs_tokens, 1) == rhs_tokens.size() - 1) {
      auto head = lex::to_lower(rhs_tokens[0].text);
      if (head == "sum" || head == "minval" || head == "maxval")
        intrinsic = head;
    }
    if (!intrinsic.empty())
      return reduction_intrinsic(i, *a, intrinsic, indent);

    const auto *sym = ctx_.file.symbols.find(a->name);
    bool whole = !a->subscripted ||
                 std::all_of(a->subscripts.begin(), a->subscripts.end(),
                             [](const std::string &s) { return lex::trim(s) == ":"; });
    if (!whole || (sym && sym->rank() == 0)) {
      copy_lines(ctx_, i, 0, out_);
      return true;
    }
    if (!sym)
      return fail("shape of '" + a->name + "' is unknown", line.line_number());
    if (!sym->shape_known())
      return fail("shape of '" + a->name + "' is unknown", line.line_number());
    if (line.span != 1)
      return fail("continued array assignment", line.line_number());

    std::vector<std::string> shape = sym->extents;
    auto indices = index_names(shape.size());
    std::string why;
    std::size_t arrays = 0;
    auto rhs = subscript_expression(a->rhs, ctx_.file.symbols, shape, indices, why, arrays);
    if (!rhs)
      return fail(why, line.line_number());
    std::string lhs = a->lhs.substr(0, a->lhs.find('('));
    lhs = std::string(lex::trim(lhs)) + "(";
    for (std::size_t d = 0; d < indices.size(); ++d)
      lhs += (d ? "," : "") + indices[d];
    lhs += ")";
    out_.push_back(dc_header(indent, shape, indices));
    out_.push_back(indent + "  " + lhs + a->equals + *rhs);
    out_.push_back(indent + "enddo");
    ctx_.diag(Severity::Info, "kernels-expanded",
              "array assignment to '" + a->name + "' expanded into a DC loop", line.line_number());
    return true;
  }

  bool reduction_intrinsic(std::size_t i, const Assignment &a, const std::string &name,
                           const std::string &indent) {
    const auto &line = lines_[i];
    if (a.subscripted)
      return fail("reduction result is not a scalar", line.line_number());
    auto open = a.rhs.find('(');
    auto arg = std::string_view(a.rhs).substr(open + 1, a.rhs.size() - open - 2);
    if (lex::split_top_level(arg).size() != 1)
      return fail("masked or dim forms of " + name + " are not expanded", line.line_number());
    std::vector<std::string> shape;
    std::string why;
    std::size_t arrays = 0;
    // Index names depend on the rank, which is only known after a first pass.
    std::vector<std::string> probe(8, "_");
    if (!subscript_expression(arg, ctx_.file.symbols, shape, probe, why, arrays))
      return fail(why, line.line_number());
    if (arrays == 0)
      return fail("argument of " + name + " has no array of known shape", line.line_number());
    auto indices = index_names(shape.size());
    auto expr = subscript_expression(arg, ctx_.file.symbols, shape, indices, why, arrays);
    std::string s = a.lhs;
    std::string init, op, body;
    if (name == "sum") {
      init = "0";
      op = "+";
      body = s + " = " + s + " + " + *expr;
    } else if (name == "minval") {
      init = "HUGE(" + s + ")";
      op = "min";
      body = s + " = min(" + s + ", " + *expr + ")";
    } else {
      init = "-HUGE(" + s + ")";
      op = "max";
      body = s + " = max(" + s + ", " + *expr + ")";
    }
    out_.push_back(indent + s + " = " + init);
    out_.push_back(dc_header(indent, shape, indices) + " reduce(" + op + ":" + s + ")");
    out_.push_back(indent + "  " + body);
    out_.push_back(indent + "enddo");
    ctx_.diag(Severity::Info, "kernels-expanded",
              "intrinsic " + name + " expanded into a DC reduction loop", line.line_number());
    return true;
  }

  const AccRegion &region_;
  RewriteContext &ctx_;
  const std::vector<LogicalLine> &lines_;
  std::vector<std::string> out_;
};

} // namespace

std::optional<std::vector<std::string>> expand_kernels(const AccRegion &region,
                                                       RewriteContext &ctx) {
  auto line = ctx.file.lines[region.begin].line_number();
  if (!region.is_kernels() || region.category == RegionCategory::Unsupported)
    return std::nullopt;
  if (ctx.level < RewriteLevel::Full) {
    ctx.diag(Severity::Info, "kernels-retained", "kernels region kept as OpenACC", line);
    return std::nullopt;
  }
  for (const auto &d : region.directives)
    if (d.kind == DirectiveKind::Kernels)
      report_dropped_clauses(d, ctx);
  auto temps = ctx.temps.size();
  auto out = KernelsExpander(region, ctx).run();
  if (!out) {
    ctx.temps.resize(temps);
    return out;
  }
  ctx.diag(Severity::Info, "kernels-expanded", "kernels directives removed", line);
  return out;
}

} // namespace acc2dc
