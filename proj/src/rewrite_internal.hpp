#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "acc2dc/transform.hpp"

namespace acc2dc::detail {

std::size_t indent_width(std::string_view line);
/// Removes up to `shift` leading blanks.
std::string shift_left(std::string_view line, std::size_t shift);
/// Copies every physical line of logical line `index`, shifted left.
void copy_lines(const RewriteContext &ctx, std::size_t index, std::size_t shift,
                std::vector<std::string> &out);
std::string physical(const RewriteContext &ctx, std::size_t logical_index);

std::string triplet(const LoopBounds &b);
std::string render_reduce(const ReductionUse &r);
void merge_reduction(std::vector<ReductionUse> &into, const ReductionUse &r);

/// Assignment-level view of a statement.
struct Assignment {
  std::string lhs;   ///< as written, trimmed
  std::string name;  ///< lowercase base name of the target
  std::vector<std::string> subscripts;
  bool subscripted = false;
  std::string rhs;   ///< as written, trimmed
  std::string equals = "="; ///< "=" or " = " following the statement's spacing
};

std::optional<Assignment> parse_assignment(std::string_view statement);

/// Operator of a `T = T op expr` or `T = max|min(T, expr)` update of the
/// given target. The target must appear exactly twice in the statement.
std::optional<ReductionOp> update_operator(std::string_view statement, const Assignment &a);

/// Statement text with every occurrence of the target reference replaced.
std::string replace_target(std::string_view statement, const Assignment &a,
                           std::string_view replacement);

/// Atomic sites that can be dropped at full level and the reductions that
/// replace scalar ones. Nullopt when some atomic must stay (a diagnostic is
/// emitted).
struct AtomicPlan {
  std::set<std::size_t> dropped;
  std::vector<ReductionUse> reductions;
};

std::optional<AtomicPlan> plan_atomic_removal(std::span<const AtomicSite> sites,
                                              const std::vector<std::string> &parallel_indices,
                                              RewriteContext &ctx);

struct DcLoopSpec {
  const LoopNest *nest = nullptr;
  std::size_t collapse = 1;
  std::vector<ReductionUse> reductions;
  /// First logical line after the governing directive; comments between it
  /// and the DO line are kept.
  std::size_t lead_begin = 0;
  std::set<std::size_t> dropped_atomics;
};

/// Emits a DC loop for the collapsed chain of `spec.nest`, rewriting nested
/// annotated loops recursively. Nullopt when a nested loop cannot convert.
std::optional<std::vector<std::string>> emit_dc_loop(const DcLoopSpec &spec,
                                                     RewriteContext &ctx,
                                                     std::size_t outer_shift = 0);

/// Emits diagnostics for clauses a conversion drops.
void report_dropped_clauses(const Directive &d, RewriteContext &ctx);

/// Checks triangular bounds and collapse depth of a nest governed by a
/// directive with the given collapse count. Emits ActionRequired on failure.
bool collapsible(const LoopNest &nest, std::size_t collapse, std::size_t line,
                 RewriteContext &ctx);

/// Rewrites one region at `ctx.level`. Nullopt when the region stays as is at
/// that level.
std::optional<std::vector<std::string>> attempt_region(const AccRegion &region,
                                                       RewriteContext &ctx);

bool is_data_clause(std::string_view name);

struct DataDecision {
  bool remove = false;
  Severity severity = Severity::Info;
  std::string code;
  std::string message;
};

/// Names listed in `declare` directives of the file.
std::set<std::string> declared_names(const std::map<std::size_t, Directive> &directives);

/// Unified-memory treatment of one data-management directive; nullopt when
/// the mode keeps data directives untouched.
std::optional<DataDecision> decide_data_directive(const Directive &d, Mode mode,
                                                  const std::set<std::string> &declared,
                                                  const AnalysisConfig &config);

} // namespace acc2dc::detail
