#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acc2dc/source.hpp"

namespace acc2dc {

enum class DirectiveKind {
  Parallel,
  EndParallel,
  Loop,
  ParallelLoop,
  Kernels,
  EndKernels,
  EnterData,
  ExitData,
  Update,
  HostData,
  EndHostData,
  Declare,
  Atomic,
  Routine,
  Wait,
  SetDeviceNum,
};

inline constexpr std::array kAllDirectiveKinds = {
    DirectiveKind::Parallel,  DirectiveKind::EndParallel, DirectiveKind::Loop,
    DirectiveKind::ParallelLoop, DirectiveKind::Kernels, DirectiveKind::EndKernels,
    DirectiveKind::EnterData, DirectiveKind::ExitData,    DirectiveKind::Update,
    DirectiveKind::HostData,  DirectiveKind::EndHostData, DirectiveKind::Declare,
    DirectiveKind::Atomic,    DirectiveKind::Routine,     DirectiveKind::Wait,
    DirectiveKind::SetDeviceNum,
};

std::string_view to_string(DirectiveKind kind);
bool is_data_management(DirectiveKind kind);

enum class AtomicKind { Update, Read, Write, Capture };

std::string_view to_string(AtomicKind kind);

/// Reduction operators accepted on `reduction(op:vars)`.
enum class ReductionOp { Add, Multiply, Max, Min, Iand, Ior, Ieor, And, Or };

std::string_view to_string(ReductionOp op);
std::optional<ReductionOp> parse_reduction_op(std::string_view text);

struct Clause {
  std::string name;              ///< lowercase
  std::vector<std::string> args; ///< opaque expression texts; reduction: variables
  std::optional<ReductionOp> reduction_op;
  bool has_parens = false;

  friend bool operator==(const Clause &, const Clause &) = default;
};

struct Directive {
  DirectiveKind kind = DirectiveKind::Parallel;
  /// Parenthesized arguments on the directive word itself: `routine(name)`,
  /// `wait(1,2)`. For SetDeviceNum, the single device expression.
  std::vector<std::string> args;
  std::vector<Clause> clauses;
  std::optional<AtomicKind> atomic_kind;
  /// Clause names not in the OpenACC clause vocabulary; parsing keeps them.
  std::vector<std::string> unknown_clauses;
  std::size_t logical_index = 0; ///< index of the source logical line
  std::size_t line = 0;          ///< 1-based physical line number

  const Clause *find_clause(std::string_view name) const;
  bool has_clause(std::string_view name) const { return find_clause(name) != nullptr; }

  /// Content equality, ignoring source position.
  bool same_content(const Directive &other) const;
};

/// Parses an AccDirective logical line. Throws ParseError
/// (UnknownDirective or Malformed) with the line number.
Directive parse_directive(const LogicalLine &line, std::size_t logical_index = 0);

/// Parses directive text without the sentinel, e.g. "loop collapse(3)".
Directive parse_directive_text(std::string_view text, std::size_t line_number = 0);

/// Canonical single-line form, including the `!$acc` sentinel.
std::string render_directive(const Directive &directive);

/// Clause names of the OpenACC vocabulary the parser recognizes.
bool is_known_clause(std::string_view name);

// -- census -----------------------------------------------------------------

/// One row of the directive census table.
enum class CensusCategory {
  ParallelLoop,
  DataManagement,
  Atomic,
  Routine,
  Kernels,
  Wait,
  SetDeviceNum,
  Continuation,
};

inline constexpr std::array kAllCensusCategories = {
    CensusCategory::ParallelLoop, CensusCategory::DataManagement, CensusCategory::Atomic,
    CensusCategory::Routine,      CensusCategory::Kernels,        CensusCategory::Wait,
    CensusCategory::SetDeviceNum, CensusCategory::Continuation,
};

/// JSON key of a census row ("parallel_loop", "data_management", ...).
std::string_view to_string(CensusCategory category);
CensusCategory census_category(DirectiveKind kind);

/// Sub-rows of the data-management group.
enum class DataSubtype { Enter, Exit, Update, HostData, Declare };

inline constexpr std::array kAllDataSubtypes = {DataSubtype::Enter, DataSubtype::Exit,
                                                DataSubtype::Update, DataSubtype::HostData,
                                                DataSubtype::Declare};

std::string_view to_string(DataSubtype subtype);

struct CensusReport {
  std::array<std::size_t, kAllCensusCategories.size()> counts{};
  std::array<std::size_t, kAllDataSubtypes.size()> data_detail{};
  std::size_t total = 0;

  std::size_t operator[](CensusCategory c) const { return counts[static_cast<std::size_t>(c)]; }
  std::size_t detail(DataSubtype s) const { return data_detail[static_cast<std::size_t>(s)]; }

  CensusReport &operator+=(const CensusReport &other);
  friend bool operator==(const CensusReport &, const CensusReport &) = default;
};

/// Counts directive lines per category. The first physical line of each
/// directive counts in its category; each further `!$acc` line of the same
/// directive counts as a continuation. Propagates ParseError.
CensusReport directive_census(const SourceFile &src);
CensusReport directive_census(std::span<const LogicalLine> lines);

} // namespace acc2dc
