#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "acc2dc/directive.hpp"
#include "acc2dc/source.hpp"

namespace acc2dc {

/// Per-run analysis settings. Names are stored lowercase.
struct AnalysisConfig {
  std::set<std::string> purity_whitelist;
  std::set<std::string> derived_type_registry;
  std::map<std::string, std::vector<std::string>> array_shapes;
  /// Callees that need the `reshape` inline option.
  std::set<std::string> reshape_inline;
};

// -- symbols -----------------------------------------------------------------

struct SymbolInfo {
  std::string name;                 ///< lowercase
  std::string type_spec;            ///< e.g. "real(r_typ)"; empty when config-supplied
  std::vector<std::string> extents; ///< one per dimension; ":" or "*" when unknown
  std::size_t decl_index = 0;       ///< logical line of the declaration

  std::size_t rank() const { return extents.size(); }
  bool shape_known() const;
};

/// Declarations harvested from a file, merged with configuration shapes.
/// Names are file-scoped.
class SymbolTable {
public:
  void add(SymbolInfo info);
  const SymbolInfo *find(std::string_view name) const;
  /// Throws SymbolError when `name` was never declared.
  const SymbolInfo &lookup(std::string_view name) const;
  bool is_array(std::string_view name) const;
  std::size_t size() const { return symbols_.size(); }

private:
  std::map<std::string, SymbolInfo, std::less<>> symbols_;
};

SymbolTable harvest_symbols(std::span<const LogicalLine> lines, const AnalysisConfig &config);

/// True for a type-declaration or other specification statement.
bool is_specification_statement(std::string_view code);

// -- purity & calls -----------------------------------------------------------

enum class Purity { Pure, NotPure, Unknown };

std::string_view to_string(Purity purity);

struct CallSite {
  std::string callee; ///< lowercase
  Purity declared_pure = Purity::Unknown;
  std::size_t line = 0; ///< 1-based physical line

  friend bool operator==(const CallSite &, const CallSite &) = default;
};

/// Procedures defined in a file and whether they carry a `pure` (or
/// non-impure `elemental`) prefix.
class PurityTable {
public:
  PurityTable() = default;
  PurityTable(std::span<const LogicalLine> lines, const AnalysisConfig &config);

  Purity resolve(std::string_view name) const;
  /// True when the file defines a procedure of that name.
  bool defines(std::string_view name) const;
  /// Name of the procedure whose header is the nearest one at or before
  /// `logical_index`, if any.
  std::optional<std::string> enclosing_procedure(std::size_t logical_index) const;
  /// Logical index of that header.
  std::optional<std::size_t> enclosing_header(std::size_t logical_index) const;

private:
  struct Procedure {
    std::string name;
    bool pure = false;
    std::size_t header_index = 0;
    std::size_t end_index = 0;
  };
  std::vector<Procedure> procedures_;
  std::set<std::string> whitelist_;
};

bool is_intrinsic_function(std::string_view lowercase_name);

/// Calls in the given statement lines: every `call name` statement and every
/// `name(` reference that is not a declared variable, an intrinsic, or a
/// keyword. An undeclared name applied only to index expressions over
/// `loop_indices` (or assigned through subscripts in `lines`) is treated as
/// an array reference.
std::vector<CallSite> detect_calls(std::span<const LogicalLine> body,
                                   const SymbolTable &symbols, const PurityTable &purity,
                                   std::span<const std::string> loop_indices = {});

// -- loop nests ---------------------------------------------------------------

struct LoopBounds {
  std::string index_var;
  std::string lower;
  std::string upper;
  std::optional<std::string> stride;

  friend bool operator==(const LoopBounds &, const LoopBounds &) = default;
};

struct LoopHeader {
  LoopBounds bounds;
  std::size_t header_index = 0; ///< logical index of the `do` line
  std::size_t end_index = 0;    ///< logical index of the matching `enddo`
  std::string construct_name;
  bool upper_case = false; ///< `DO` keyword written in capitals
};

struct LoopNest {
  /// Outermost first. Only the perfectly nested chain is recorded, so
  /// `perfectly_nested_depth == loops.size()` except for `do concurrent`
  /// payloads, which carry a single header with empty bounds.
  std::vector<LoopHeader> loops;
  std::size_t body_begin = 0; ///< logical index, inclusive
  std::size_t body_end = 0;   ///< logical index, exclusive
  std::size_t perfectly_nested_depth = 0;
  bool concurrent = false;

  std::size_t begin() const { return loops.front().header_index; }
  std::size_t end() const { return loops.front().end_index; }
};

enum class DoForm { NotDo, Counted, Concurrent, While, Infinite, Labeled };

DoForm classify_do(std::string_view code);
bool is_end_do(std::string_view code);

/// Parses `do i=lo,hi[,st]`. Returns nullopt when `code` is not that form.
std::optional<LoopBounds> parse_do_header(std::string_view code);

/// Logical index of the `enddo` matching the `do` at `at`. Throws ParseError.
std::size_t find_end_do(std::span<const LogicalLine> lines, std::size_t at);

/// Throws ParseError for an unmatched `enddo` and for `do while`, labeled or
/// infinite loops (UnsupportedLoop message).
LoopNest parse_loop_nest(std::span<const LogicalLine> lines, std::size_t at);
LoopNest parse_loop_nest(const SourceFile &src, std::size_t at);

// -- regions ------------------------------------------------------------------

enum class RegionCategory {
  SimpleCollapse,
  ScalarReduction,
  ArrayReductionAtomic,
  AtomicNonReduction,
  KernelsLoops,
  KernelsArraySyntax,
  KernelsIntrinsic,
  RoutineBearingLoop,
  AlreadyDC,
  Unsupported,
};

inline constexpr std::size_t kRegionCategoryCount = 10;

std::string_view to_string(RegionCategory category);

struct StatementBlock {
  std::size_t begin = 0; ///< logical index, inclusive
  std::size_t end = 0;   ///< logical index, exclusive
};

struct AtomicSite {
  std::size_t directive_index = 0; ///< logical index of `!$acc atomic`
  std::size_t statement_index = 0; ///< logical index of the governed statement
  AtomicKind kind = AtomicKind::Update;
};

struct ReductionUse {
  ReductionOp op = ReductionOp::Add;
  std::vector<std::string> variables;
};

struct IntrinsicUse {
  std::string name;   ///< "sum", "minval" or "maxval"
  std::string target; ///< assigned variable
  std::size_t statement_index = 0;
};

struct BodyFeatures {
  std::vector<AtomicSite> atomics;
  std::vector<CallSite> calls;
  std::vector<std::size_t> array_syntax_statements;
  std::vector<IntrinsicUse> reduction_intrinsics;
  std::vector<ReductionUse> reductions;
  bool async = false;
};

struct AccRegion {
  /// Governing directives, outermost first (parallel, loop, inner loop
  /// directives along the collapsed chain).
  std::vector<Directive> directives;
  std::variant<LoopNest, StatementBlock> payload;
  RegionCategory category = RegionCategory::Unsupported;
  BodyFeatures features;
  std::vector<std::string> unsupported_reasons;

  std::size_t begin = 0; ///< first logical line owned by this region
  std::size_t end = 0;   ///< last logical line owned (inclusive)
  std::size_t group_begin = 0;
  std::size_t group_end = 0;
  /// Number of regions sharing the enclosing parallel pair.
  std::size_t sibling_count = 1;
  std::size_t collapse = 1;

  bool is_kernels() const { return std::holds_alternative<StatementBlock>(payload); }
  const LoopNest *nest() const { return std::get_if<LoopNest>(&payload); }
  bool fused_sibling() const { return sibling_count > 1; }
};

/// Everything the analyzer knows about one file.
struct FileAnalysis {
  std::vector<LogicalLine> lines;
  std::map<std::size_t, Directive> directives; ///< by logical index
  SymbolTable symbols;
  PurityTable purity;
  std::vector<AccRegion> regions;

  const Directive *directive_at(std::size_t logical_index) const;
};

/// Builds regions from compute constructs. Throws StructureError for
/// unmatched begin/end pairs.
std::vector<AccRegion> build_regions(std::span<const LogicalLine> lines,
                                     const std::map<std::size_t, Directive> &directives);
std::vector<AccRegion> build_regions(const SourceFile &src);

/// Scans body features and returns the category, filling `features` and
/// `unsupported_reasons` of a copy. Deterministic.
AccRegion classify_region(AccRegion region, const FileAnalysis &file,
                          const AnalysisConfig &config);

/// Parses every directive, harvests symbols and purity, builds and classifies
/// regions.
FileAnalysis analyze_file(const SourceFile &src, const AnalysisConfig &config);

/// Value of a `collapse(n)` clause: nullopt when absent, 0 when the argument
/// is not an integer literal.
std::optional<std::size_t> collapse_count(const Directive &directive);

/// Loop index variables of the collapsed (parallel) loops of a loop region.
std::vector<std::string> collapsed_indices(const AccRegion &region);

} // namespace acc2dc
