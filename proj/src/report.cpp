#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "acc2dc/config.hpp"
#include "acc2dc/errors.hpp"
#include "acc2dc/report.hpp"

namespace acc2dc {

using nlohmann::json;

std::vector<VersionSummary> version_summary(const ModeResults &results) {
  std::vector<VersionSummary> out;
  std::optional<std::multiset<std::string>> reference;
  for (const auto &[mode, files] : results) {
    std::multiset<std::string> paths;
    for (const auto &r : files)
      paths.insert(r.output.path());
    if (!reference)
      reference = paths;
    else if (paths != *reference)
      throw ReportError("mode " + std::string(to_string(mode)) +
                        " was run over a different file set");

    VersionSummary s;
    s.mode = mode;
    InlinePlan plan;
    for (const auto &r : files) {
      FileSummary f;
      f.path = r.output.path();
      f.total_lines = r.output.line_count();
      f.acc_lines = r.counts_after.total;
      f.action_required = r.count(Severity::ActionRequired);
      s.total_lines += f.total_lines;
      s.acc_lines += f.acc_lines;
      s.action_required += f.action_required;
      s.files.push_back(std::move(f));
      for (const auto &c : r.inline_plan.callees)
        if (std::find(plan.callees.begin(), plan.callees.end(), c) == plan.callees.end())
          plan.callees.push_back(c);
      plan.reshape = plan.reshape || r.inline_plan.reshape;
    }
    std::sort(s.files.begin(), s.files.end(),
              [](const FileSummary &a, const FileSummary &b) { return a.path < b.path; });
    s.recommended_flags = recommend_flags(mode, plan);
    out.push_back(std::move(s));
  }
  return out;
}

void sort_diagnostics(std::vector<Diagnostic> &diagnostics) {
  std::stable_sort(diagnostics.begin(), diagnostics.end(),
                   [](const Diagnostic &a, const Diagnostic &b) {
                     return std::tie(a.mode, a.file, a.line, a.severity, a.code, a.message) <
                            std::tie(b.mode, b.file, b.line, b.severity, b.code, b.message);
                   });
}

MigrationReport build_report(const ModeResults &results) {
  MigrationReport report;
  report.summaries = version_summary(results);
  if (!results.empty())
    for (const auto &r : results.begin()->second)
      report.census += r.counts_before;
  for (const auto &[mode, files] : results)
    for (const auto &r : files)
      report.diagnostics.insert(report.diagnostics.end(), r.diagnostics.begin(),
                                r.diagnostics.end());
  sort_diagnostics(report.diagnostics);
  return report;
}

OrderingCheck compare_modes(const MigrationReport &report) {
  std::map<Mode, std::size_t> counts;
  for (const auto &s : report.summaries)
    counts[s.mode] = s.acc_lines;
  OrderingCheck check;
  std::optional<Mode> previous;
  for (auto mode : {Mode::A, Mode::AD, Mode::ADU, Mode::AD2XU, Mode::D2XU}) {
    if (!counts.count(mode))
      continue;
    if (previous && counts[mode] > counts[*previous]) {
      check.pass = false;
      check.violation = std::make_pair(*previous, mode);
      return check;
    }
    previous = mode;
  }
  if (counts.count(Mode::D2XAd) && counts.count(Mode::D2XU) &&
      counts[Mode::D2XAd] < counts[Mode::D2XU]) {
    check.pass = false;
    check.violation = std::make_pair(Mode::D2XAd, Mode::D2XU);
  }
  return check;
}

namespace {

json census_json(const CensusReport &census) {
  json j = json::object();
  for (auto c : kAllCensusCategories)
    j[std::string(to_string(c))] = census[c];
  j["total"] = census.total;
  json detail = json::object();
  for (auto s : kAllDataSubtypes)
    detail[std::string(to_string(s))] = census.detail(s);
  j["data_management_detail"] = detail;
  return j;
}

CensusReport census_from_json(const json &j) {
  CensusReport census;
  for (auto c : kAllCensusCategories)
    census.counts[static_cast<std::size_t>(c)] = j.at(std::string(to_string(c))).get<std::size_t>();
  census.total = j.at("total").get<std::size_t>();
  if (j.contains("data_management_detail"))
    for (auto s : kAllDataSubtypes)
      census.data_detail[static_cast<std::size_t>(s)] =
          j.at("data_management_detail").at(std::string(to_string(s))).get<std::size_t>();
  return census;
}

Mode mode_from_json(const json &j) {
  auto mode = parse_mode(j.get<std::string>());
  if (!mode)
    throw ReportError("unknown mode '" + j.get<std::string>() + "'");
  return *mode;
}

json report_json(const MigrationReport &report) {
  json j;
  j["census"] = census_json(report.census);
  json summaries = json::array();
  for (const auto &s : report.summaries) {
    json files = json::array();
    for (const auto &f : s.files)
      files.push_back({{"path", f.path},
                       {"total_lines", f.total_lines},
                       {"acc_lines", f.acc_lines},
                       {"action_required", f.action_required}});
    summaries.push_back({{"mode", std::string(to_string(s.mode))},
                         {"total_lines", s.total_lines},
                         {"acc_lines", s.acc_lines},
                         {"recommended_flags", s.recommended_flags},
                         {"action_required", s.action_required},
                         {"files", files}});
  }
  j["summaries"] = summaries;

  auto sorted = report.diagnostics;
  sort_diagnostics(sorted);
  json diagnostics = json::object();
  for (auto severity : {Severity::Info, Severity::Warning, Severity::ActionRequired})
    diagnostics[std::string(to_string(severity))] = json::object();
  for (const auto &d : sorted)
    diagnostics[std::string(to_string(d.severity))][d.code].push_back(
        {{"mode", std::string(to_string(d.mode))},
         {"file", d.file},
         {"line", d.line},
         {"message", d.message}});
  j["diagnostics"] = diagnostics;
  return j;
}

} // namespace

std::string census_to_json(const CensusReport &census) { return census_json(census).dump(2); }

std::string serialize_report(const MigrationReport &report) {
  return report_json(report).dump(2) + "\n";
}

MigrationReport parse_report(std::string_view text) {
  try {
    auto j = json::parse(text);
    MigrationReport report;
    report.census = census_from_json(j.at("census"));
    for (const auto &s : j.at("summaries")) {
      VersionSummary v;
      v.mode = mode_from_json(s.at("mode"));
      v.total_lines = s.at("total_lines").get<std::size_t>();
      v.acc_lines = s.at("acc_lines").get<std::size_t>();
      v.recommended_flags = s.at("recommended_flags").get<std::string>();
      v.action_required = s.at("action_required").get<std::size_t>();
      for (const auto &f : s.at("files"))
        v.files.push_back({f.at("path").get<std::string>(), f.at("total_lines").get<std::size_t>(),
                           f.at("acc_lines").get<std::size_t>(),
                           f.at("action_required").get<std::size_t>()});
      report.summaries.push_back(std::move(v));
    }
    for (const auto &[severity_name, codes] : j.at("diagnostics").items()) {
      auto severity = parse_severity(severity_name);
      if (!severity)
        throw ReportError("unknown severity '" + severity_name + "'");
      for (const auto &[code, entries] : codes.items())
        for (const auto &e : entries)
          report.diagnostics.push_back({*severity, code, e.at("message").get<std::string>(),
                                        e.at("file").get<std::string>(),
                                        e.at("line").get<std::size_t>(),
                                        mode_from_json(e.at("mode"))});
    }
    sort_diagnostics(report.diagnostics);
    return report;
  } catch (const json::exception &e) {
    throw ReportError(std::string("malformed report: ") + e.what());
  }
}

std::string render_table(const MigrationReport &report) {
  std::ostringstream out;
  auto row = [&](std::string_view version, const std::string &total, const std::string &acc,
                 const std::string &action, std::string_view flags) {
    out << std::left << std::setw(14) << version << std::right << std::setw(12) << total
        << std::setw(12) << acc << std::setw(12) << action << "  " << flags << "\n";
  };
  if (!report.summaries.empty()) {
    row("Code Version", "Total Lines", "$acc Lines", "Action Req.", "Compiler Flags");
    for (const auto &s : report.summaries) {
      auto version = std::to_string(static_cast<int>(s.mode) + 1) + ": " +
                     std::string(to_string(s.mode));
      row(version, std::to_string(s.total_lines), std::to_string(s.acc_lines),
          std::to_string(s.action_required), s.recommended_flags);
    }
    out << "\n";
  }
  out << "Directive census of the input\n";
  for (auto c : kAllCensusCategories)
    out << "  " << std::left << std::setw(18) << to_string(c) << std::right << std::setw(8)
        << report.census[c] << "\n";
  out << "  " << std::left << std::setw(18) << "total" << std::right << std::setw(8)
      << report.census.total << "\n";
  return out.str();
}

} // namespace acc2dc
