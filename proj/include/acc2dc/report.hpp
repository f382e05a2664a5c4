#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "acc2dc/directive.hpp"
#include "acc2dc/transform.hpp"

namespace acc2dc {

struct FileSummary {
  std::string path;
  std::size_t total_lines = 0;
  std::size_t acc_lines = 0;
  std::size_t action_required = 0;

  friend bool operator==(const FileSummary &, const FileSummary &) = default;
};

/// One row of the code-version table.
struct VersionSummary {
  Mode mode = Mode::A;
  std::size_t total_lines = 0;
  std::size_t acc_lines = 0;
  std::string recommended_flags;
  std::size_t action_required = 0;
  std::vector<FileSummary> files; ///< sorted by path

  friend bool operator==(const VersionSummary &, const VersionSummary &) = default;
};

struct MigrationReport {
  CensusReport census; ///< directive census of the unmodified input
  std::vector<VersionSummary> summaries;
  std::vector<Diagnostic> diagnostics; ///< canonical order, see sort_diagnostics

  friend bool operator==(const MigrationReport &, const MigrationReport &) = default;
};

using ModeResults = std::map<Mode, std::vector<TransformResult>>;

/// Throws ReportError when the modes were not run over the same files.
std::vector<VersionSummary> version_summary(const ModeResults &results);

MigrationReport build_report(const ModeResults &results);

/// Orders by mode, file, line, severity, code and message.
void sort_diagnostics(std::vector<Diagnostic> &diagnostics);

struct OrderingCheck {
  bool pass = true;
  std::optional<std::pair<Mode, Mode>> violation; ///< (earlier, later) whose count grew
};

/// Checks A >= AD >= ADU >= AD2XU >= D2XU and D2XAd >= D2XU over the modes
/// present in the report.
OrderingCheck compare_modes(const MigrationReport &report);

std::string census_to_json(const CensusReport &census);
std::string serialize_report(const MigrationReport &report);
/// Throws ReportError for malformed documents.
MigrationReport parse_report(std::string_view json);

/// Plain-text table with one row per code version.
std::string render_table(const MigrationReport &report);

} // namespace acc2dc
