#include "acc2dc/directive.hpp"

namespace acc2dc {

std::string_view to_string(CensusCategory category) {
  switch (category) {
  case CensusCategory::ParallelLoop:
    return "parallel_loop";
  case CensusCategory::DataManagement:
    return "data_management";
  case CensusCategory::Atomic:
    return "atomic";
  case CensusCategory::Routine:
    return "routine";
  case CensusCategory::Kernels:
    return "kernels";
  case CensusCategory::Wait:
    return "wait";
  case CensusCategory::SetDeviceNum:
    return "set_device_num";
  case CensusCategory::Continuation:
    return "continuation";
  }
  return "?";
}

std::string_view to_string(DataSubtype subtype) {
  switch (subtype) {
  case DataSubtype::Enter:
    return "enter";
  case DataSubtype::Exit:
    return "exit";
  case DataSubtype::Update:
    return "update";
  case DataSubtype::HostData:
    return "host_data";
  case DataSubtype::Declare:
    return "declare";
  }
  return "?";
}

CensusCategory census_category(DirectiveKind kind) {
  switch (kind) {
  case DirectiveKind::Parallel:
  case DirectiveKind::EndParallel:
  case DirectiveKind::Loop:
  case DirectiveKind::ParallelLoop:
    return CensusCategory::ParallelLoop;
  case DirectiveKind::Kernels:
  case DirectiveKind::EndKernels:
    return CensusCategory::Kernels;
  case DirectiveKind::EnterData:
  case DirectiveKind::ExitData:
  case DirectiveKind::Update:
  case DirectiveKind::HostData:
  case DirectiveKind::EndHostData:
  case DirectiveKind::Declare:
    return CensusCategory::DataManagement;
  case DirectiveKind::Atomic:
    return CensusCategory::Atomic;
  case DirectiveKind::Routine:
    return CensusCategory::Routine;
  case DirectiveKind::Wait:
    return CensusCategory::Wait;
  case DirectiveKind::SetDeviceNum:
    return CensusCategory::SetDeviceNum;
  }
  return CensusCategory::ParallelLoop;
}

namespace {

std::optional<DataSubtype> data_subtype(DirectiveKind kind) {
  switch (kind) {
  case DirectiveKind::EnterData:
    return DataSubtype::Enter;
  case DirectiveKind::ExitData:
    return DataSubtype::Exit;
  case DirectiveKind::Update:
    return DataSubtype::Update;
  case DirectiveKind::HostData:
  case DirectiveKind::EndHostData:
    return DataSubtype::HostData;
  case DirectiveKind::Declare:
    return DataSubtype::Declare;
  default:
    return std::nullopt;
  }
}

} // namespace

CensusReport &CensusReport::operator+=(const CensusReport &other) {
  for (std::size_t i = 0; i < counts.size(); ++i)
    counts[i] += other.counts[i];
  for (std::size_t i = 0; i < data_detail.size(); ++i)
    data_detail[i] += other.data_detail[i];
  total += other.total;
  return *this;
}

CensusReport directive_census(std::span<const LogicalLine> lines) {
  CensusReport report;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto &line = lines[i];
    if (line.kind != LineKind::AccDirective)
      continue;
    auto directive = parse_directive(line, i);
    report.counts[static_cast<std::size_t>(census_category(directive.kind))] += 1;
    if (auto sub = data_subtype(directive.kind))
      report.data_detail[static_cast<std::size_t>(*sub)] += 1;
    report.counts[static_cast<std::size_t>(CensusCategory::Continuation)] += line.span - 1;
    report.total += line.span;
  }
  return report;
}

CensusReport directive_census(const SourceFile &src) {
  auto lines = assemble_logical_lines(src);
  return directive_census(lines);
}

} // namespace acc2dc
