#pragma once

#include <array>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "acc2dc/directive.hpp"
#include "acc2dc/loop.hpp"
#include "acc2dc/source.hpp"

namespace acc2dc {

/// The six code versions, ordered by how far the migration goes.
enum class Mode { A, AD, ADU, AD2XU, D2XU, D2XAd };

inline constexpr std::array kAllModes = {Mode::A,     Mode::AD,   Mode::ADU,
                                         Mode::AD2XU, Mode::D2XU, Mode::D2XAd};

std::string_view to_string(Mode mode);
/// Case-insensitive; nullopt for unknown names.
std::optional<Mode> parse_mode(std::string_view text);
/// Modes that rely on unified managed memory.
bool uses_unified_memory(Mode mode);

enum class Severity { Info, Warning, ActionRequired };

std::string_view to_string(Severity severity);
std::optional<Severity> parse_severity(std::string_view text);

struct Diagnostic {
  Severity severity = Severity::Info;
  std::string code; ///< stable kebab-case identifier
  std::string message;
  std::string file;
  std::size_t line = 0; ///< 1-based physical line of the input
  Mode mode = Mode::A;

  friend bool operator==(const Diagnostic &, const Diagnostic &) = default;
};

/// Callees that should be inlined once `routine` directives are gone.
struct InlinePlan {
  std::vector<std::string> callees; ///< first-appearance order
  bool reshape = false;

  bool empty() const { return callees.empty(); }
  /// "-Minline=reshape,name:a,b" or "-Minline=name:a,b"; empty for no callees.
  std::string fragment() const;

  friend bool operator==(const InlinePlan &, const InlinePlan &) = default;
};

struct TransformResult {
  SourceFile output;
  std::vector<Diagnostic> diagnostics;
  CensusReport counts_before;
  CensusReport counts_after;
  InlinePlan inline_plan;

  std::size_t count(Severity severity) const;
};

/// Rewrites one file for `mode`. Mode A returns the input unchanged.
/// Propagates ParseError and StructureError.
TransformResult transform_file(const SourceFile &src, Mode mode, const AnalysisConfig &config);

// -- individual rewrites --------------------------------------------------------
//
// These operate on a FileAnalysis of the source and return replacement
// physical lines for the region's lines, or nullopt when the rewrite is
// refused (a diagnostic explaining the refusal is appended).

/// How far a region is rewritten. Derived from the mode and lowered step by
/// step when a rewrite is refused.
enum class RewriteLevel { Retain, Dc, Dc2x, Full };

RewriteLevel rewrite_level(Mode mode);

struct RewriteContext {
  RewriteContext(const FileAnalysis &file, const SourceFile &src, const AnalysisConfig &config,
                 Mode mode, std::vector<Diagnostic> &diagnostics);

  const FileAnalysis &file;
  const SourceFile &src;
  const AnalysisConfig &config;
  Mode mode;
  RewriteLevel level;
  std::vector<Diagnostic> &diagnostics;
  /// Calls inside regions that were converted.
  std::vector<CallSite> converted_calls;
  /// Identifiers already used in the file; generated names avoid them.
  std::set<std::string> reserved;
  /// Generated names. `near` is a logical line inside the procedure that
  /// needs the declaration; an empty type means it cannot be declared.
  struct Temp {
    std::size_t near = 0;
    std::string name;
    std::string type_spec;
  };
  std::vector<Temp> temps;

  void diag(Severity severity, std::string code, std::string message, std::size_t line);
  /// tmp, tmp2, ... avoiding reserved names and earlier temporaries.
  std::string fresh_tmp() const;
  /// Index name for dimension `d` (i0, j0, k0, ...), avoiding reserved names.
  std::string index_name(std::size_t d) const;
};

std::optional<std::vector<std::string>> rewrite_collapse_to_dc(const AccRegion &region,
                                                               RewriteContext &ctx);
std::optional<std::vector<std::string>> rewrite_scalar_reduction(const AccRegion &region,
                                                                 RewriteContext &ctx);
std::optional<std::vector<std::string>> rewrite_array_reduction(const AccRegion &region,
                                                                RewriteContext &ctx);
std::optional<std::vector<std::string>> expand_kernels(const AccRegion &region,
                                                       RewriteContext &ctx);

/// Removes data-management directives according to the unified-memory rules
/// of `mode`. Modes without unified memory return the input unchanged.
std::pair<SourceFile, std::vector<Diagnostic>>
strip_data_directives(const SourceFile &src, Mode mode, const AnalysisConfig &config);

/// Pure callees in `calls` (deduplicated, first-appearance order). Unknown
/// purity callees are left out and reported as one ActionRequired diagnostic.
InlinePlan plan_inlining(std::span<const CallSite> calls, const AnalysisConfig &config,
                         std::vector<Diagnostic> *diagnostics = nullptr, Mode mode = Mode::D2XU,
                         const std::string &file = {});

} // namespace acc2dc
