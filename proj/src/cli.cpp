#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "acc2dc/cli.hpp"
#include "acc2dc/config.hpp"
#include "acc2dc/errors.hpp"
#include "acc2dc/lexer.hpp"
#include "acc2dc/report.hpp"
#include "acc2dc/transform.hpp"

namespace acc2dc {

namespace fs = std::filesystem;

namespace {

/// A source file and the path it is reported and written under.
struct Input {
  fs::path path;
  std::string relative;
};

bool free_form_extension(const fs::path &p) {
  auto ext = lex::to_lower(p.extension().string());
  return ext == ".f90" || ext == ".f95" || ext == ".f03" || ext == ".f08";
}

std::vector<Input> collect_inputs(const std::vector<std::string> &paths) {
  std::vector<Input> inputs;
  for (const auto &arg : paths) {
    fs::path p(arg);
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<Input> found;
      for (const auto &entry : fs::recursive_directory_iterator(p))
        if (entry.is_regular_file() && free_form_extension(entry.path()))
          found.push_back({entry.path(), fs::relative(entry.path(), p).generic_string()});
      std::sort(found.begin(), found.end(),
                [](const Input &a, const Input &b) { return a.relative < b.relative; });
      inputs.insert(inputs.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p, ec)) {
      inputs.push_back({p, p.filename().generic_string()});
    } else {
      throw InputError("no such file or directory: " + arg);
    }
  }
  return inputs;
}

class FileError : public Error {
public:
  FileError(const std::string &path, const Error &e)
      : Error(path + ":" + std::to_string(e.line()) + ": " + e.what(), e.line()) {}
};

SourceFile load(const Input &in) {
  try {
    return read_source_file(in.path.string());
  } catch (const Error &e) {
    throw FileError(in.path.string(), e);
  }
}

template <typename F> auto per_file(const Input &in, F &&f) {
  try {
    return f();
  } catch (const FileError &) {
    throw;
  } catch (const Error &e) {
    throw FileError(in.path.string(), e);
  }
}

void write_file(const fs::path &path, const std::string &content) {
  std::error_code ec;
  if (path.has_parent_path())
    fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << content) || !out.flush())
    throw InputError("cannot write '" + path.string() + "'");
}

struct Options {
  std::vector<std::string> paths;
  std::string mode;
  std::string config;
  std::string out;
  std::string format = "json";
  std::string mpi;
  bool strict = false;
};

ToolConfig load_config(const Options &o) {
  return o.config.empty() ? ToolConfig{} : read_config_file(o.config);
}

int analyze(const Options &o, std::ostream &out) {
  auto config = load_config(o);
  CensusReport total;
  std::map<std::string, std::size_t> categories;
  nlohmann::json files = nlohmann::json::object();
  for (const auto &in : collect_inputs(o.paths)) {
    auto src = load(in);
    auto census = per_file(in, [&] { return directive_census(src); });
    auto analysis = per_file(in, [&] { return analyze_file(src, config.analysis); });
    total += census;
    nlohmann::json regions = nlohmann::json::array();
    for (const auto &r : analysis.regions) {
      auto category = std::string(to_string(r.category));
      ++categories[category];
      nlohmann::json entry{{"line", analysis.lines[r.begin].line_number()},
                           {"category", category}};
      if (!r.unsupported_reasons.empty())
        entry["reasons"] = r.unsupported_reasons;
      regions.push_back(std::move(entry));
    }
    files[in.relative] = nlohmann::json::parse(census_to_json(census));
    files[in.relative]["regions"] = std::move(regions);
  }
  std::string text;
  if (o.format == "table") {
    MigrationReport r;
    r.census = total;
    std::ostringstream ss;
    ss << render_table(r) << "\nRegions\n";
    for (const auto &[category, n] : categories)
      ss << "  " << std::left << std::setw(24) << category << std::right << std::setw(4) << n
         << "\n";
    text = ss.str();
  } else {
    nlohmann::json j;
    j["census"] = nlohmann::json::parse(census_to_json(total));
    j["files"] = files;
    text = j.dump(2) + "\n";
  }
  if (o.out.empty())
    out << text;
  else
    write_file(o.out, text);
  return 0;
}

std::vector<Mode> modes_from(const std::string &list) {
  std::vector<Mode> modes;
  for (const auto &name : lex::split_top_level(list)) {
    auto m = parse_mode(name);
    if (!m)
      throw ConfigError("unknown mode '" + name + "'");
    modes.push_back(*m);
  }
  return modes;
}

int transform(const Options &o, std::ostream &out) {
  auto config = load_config(o);
  auto mode = o.mode.empty() ? config.mode : parse_mode(o.mode);
  if (!o.mode.empty() && !mode)
    throw ConfigError("unknown mode '" + o.mode + "'");
  if (!mode)
    throw ConfigError("no mode given; use --mode or the config key 'mode'");
  auto out_dir = o.out.empty() ? config.output_dir : o.out;
  if (out_dir.empty())
    throw ConfigError("no output directory given; use --out or the config key 'output_dir'");
  bool strict = o.strict || config.strict;

  ModeResults results;
  auto &list = results[*mode];
  for (const auto &in : collect_inputs(o.paths)) {
    auto src = load(in);
    auto result = per_file(in, [&] { return transform_file(src, *mode, config.analysis); });
    auto target = fs::path(out_dir) / in.relative;
    std::error_code ec;
    if (fs::exists(target, ec) && fs::equivalent(target, in.path, ec))
      throw InputError("refusing to overwrite input file '" + in.path.string() + "'");
    write_file(target, emit_source(result.output));
    result.output = SourceFile(in.relative, result.output.physical_lines(),
                               result.output.trailing_newline());
    for (auto &d : result.diagnostics)
      d.file = in.relative;
    list.push_back(std::move(result));
  }
  auto report = build_report(results);
  write_file(fs::path(out_dir) / "acc2dc_report.json", serialize_report(report));
  out << (o.format == "table" ? render_table(report) : serialize_report(report));
  bool action = std::any_of(report.diagnostics.begin(), report.diagnostics.end(),
                            [](const Diagnostic &d) { return d.severity == Severity::ActionRequired; });
  return strict && action ? 1 : 0;
}

int report(const Options &o, std::ostream &out) {
  auto config = load_config(o);
  std::vector<Mode> modes(kAllModes.begin(), kAllModes.end());
  if (!o.mode.empty())
    modes = modes_from(o.mode);
  bool strict = o.strict || config.strict;
  ModeResults results;
  for (const auto &in : collect_inputs(o.paths)) {
    auto src = load(in);
    for (auto mode : modes) {
      auto result = per_file(in, [&] { return transform_file(src, mode, config.analysis); });
      result.output = SourceFile(in.relative, result.output.physical_lines(),
                                 result.output.trailing_newline());
      for (auto &d : result.diagnostics)
        d.file = in.relative;
      results[mode].push_back(std::move(result));
    }
  }
  for (auto mode : modes)
    results[mode];
  auto report = build_report(results);
  auto check = compare_modes(report);
  std::string text;
  if (o.format == "table") {
    text = render_table(report);
    text += "\nOrdering check: ";
    text += check.pass ? "pass\n"
                       : "FAIL (" + std::string(to_string(check.violation->first)) + " < " +
                             std::string(to_string(check.violation->second)) + ")\n";
  } else {
    text = serialize_report(report);
  }
  if (o.out.empty())
    out << text;
  else
    write_file(o.out, text);
  bool action = std::any_of(report.diagnostics.begin(), report.diagnostics.end(),
                            [](const Diagnostic &d) { return d.severity == Severity::ActionRequired; });
  return strict && action ? 1 : 0;
}

int launch_script(const Options &o, std::ostream &out) {
  auto config = load_config(o);
  auto flavor = o.mpi.empty() ? config.mpi_flavor : parse_mpi_flavor(o.mpi);
  auto script = generate_launch_script(flavor);
  if (o.out.empty()) {
    out << script;
    return 0;
  }
  write_file(o.out, script);
  fs::permissions(o.out,
                  fs::perms::owner_all | fs::perms::group_read | fs::perms::group_exec |
                      fs::perms::others_read | fs::perms::others_exec,
                  fs::perm_options::replace);
  return 0;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Migrate OpenACC Fortran to do concurrent", "acc2dc"};
  app.require_subcommand(1);
  Options o;

  auto *analyze_cmd = app.add_subcommand("analyze", "Directive census of the input files");
  auto *transform_cmd = app.add_subcommand("transform", "Rewrite files for one code version");
  auto *report_cmd = app.add_subcommand("report", "Compare code versions over the input files");
  auto *script_cmd = app.add_subcommand("launch-script", "Print the MPI rank-to-GPU launch script");

  for (auto *cmd : {analyze_cmd, transform_cmd, report_cmd}) {
    cmd->add_option("paths", o.paths, "Fortran files or directories")->required();
    cmd->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"json", "table"}));
  }
  for (auto *cmd : {analyze_cmd, transform_cmd, report_cmd, script_cmd}) {
    cmd->add_option("--config", o.config, "Configuration file");
    cmd->add_option("--out", o.out, "Output file or directory");
  }
  transform_cmd->add_option("--mode", o.mode, "Code version: a, ad, adu, ad2xu, d2xu, d2xad");
  report_cmd->add_option("--mode", o.mode, "Comma-separated code versions (default: all)");
  for (auto *cmd : {transform_cmd, report_cmd})
    cmd->add_flag("--strict", o.strict, "Exit with 1 when manual work remains");
  script_cmd->add_option("--mpi", o.mpi, "MPI flavor: openmpi, mpich, slurm-srun");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (analyze_cmd->parsed())
      return analyze(o, out);
    if (transform_cmd->parsed())
      return transform(o, out);
    if (report_cmd->parsed())
      return report(o, out);
    return launch_script(o, out);
  } catch (const FileError &e) {
    err << e.what() << "\n";
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
  }
  return 2;
}

} // namespace acc2dc
