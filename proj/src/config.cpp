#include <fstream>
#include <sstream>

#include "acc2dc/config.hpp"
#include "acc2dc/errors.hpp"
#include "acc2dc/lexer.hpp"

namespace acc2dc {

std::string_view to_string(MpiFlavor flavor) {
  switch (flavor) {
  case MpiFlavor::OpenMPI:
    return "openmpi";
  case MpiFlavor::MPICH:
    return "mpich";
  case MpiFlavor::SlurmSrun:
    return "slurm-srun";
  }
  return "?";
}

MpiFlavor parse_mpi_flavor(std::string_view text) {
  for (auto f : {MpiFlavor::OpenMPI, MpiFlavor::MPICH, MpiFlavor::SlurmSrun})
    if (lex::iequals(lex::trim(text), to_string(f)))
      return f;
  throw ConfigError("unknown MPI flavor '" + std::string(text) +
                    "' (expected openmpi, mpich or slurm-srun)");
}

namespace {

std::vector<std::string> list_value(std::string_view value) {
  std::vector<std::string> out;
  for (auto &item : lex::split_top_level(value))
    if (!item.empty())
      out.push_back(lex::to_lower(item));
  return out;
}

bool bool_value(std::string_view value, std::size_t line) {
  auto v = lex::to_lower(value);
  if (v == "true" || v == "yes" || v == "1")
    return true;
  if (v == "false" || v == "no" || v == "0")
    return false;
  throw ConfigError("line " + std::to_string(line) + ": expected true or false, got '" + std::string(value) + "'", line);
}

} // namespace

ToolConfig parse_config(std::string_view text) {
  ToolConfig config;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = lex::trim(line);
    if (line.empty())
      continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'", number);
    auto key = lex::to_lower(lex::trim(line.substr(0, eq)));
    auto value = lex::trim(line.substr(eq + 1));
    auto &a = config.analysis;
    if (key == "purity_whitelist") {
      for (auto &v : list_value(value))
        a.purity_whitelist.insert(v);
    } else if (key == "derived_types") {
      for (auto &v : list_value(value))
        a.derived_type_registry.insert(v);
    } else if (key == "inline_reshape") {
      for (auto &v : list_value(value))
        a.reshape_inline.insert(v);
    } else if (key.rfind("array_shape.", 0) == 0 && key.size() > 12) {
      auto extents = lex::split_top_level(value);
      if (extents.empty())
        throw ConfigError("line " + std::to_string(number) + ": empty array shape", number);
      a.array_shapes[key.substr(12)] = extents;
    } else if (key == "mpi_flavor") {
      try {
        config.mpi_flavor = parse_mpi_flavor(value);
      } catch (const ConfigError &e) {
        throw ConfigError("line " + std::to_string(number) + ": " + e.what(), number);
      }
    } else if (key == "mode") {
      config.mode = parse_mode(value);
      if (!config.mode)
        throw ConfigError("line " + std::to_string(number) + ": unknown mode '" +
                              std::string(value) + "'",
                          number);
    } else if (key == "output_dir") {
      config.output_dir = std::string(value);
    } else if (key == "strict") {
      config.strict = bool_value(value, number);
    } else {
      throw ConfigError("line " + std::to_string(number) + ": unknown key '" + key + "'", number);
    }
  }
  return config;
}

ToolConfig read_config_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError &e) {
    throw ConfigError(path + ": " + e.what(), e.line());
  }
}

std::string generate_launch_script(MpiFlavor flavor) {
  std::string_view rank_variable;
  switch (flavor) {
  case MpiFlavor::OpenMPI:
    rank_variable = "OMPI_COMM_WORLD_LOCAL_RANK";
    break;
  case MpiFlavor::MPICH:
    rank_variable = "MPI_LOCALRANKID";
    break;
  case MpiFlavor::SlurmSrun:
    rank_variable = "SLURM_LOCALID";
    break;
  }
  return "#!/bin/bash\n"
         "# Assume 1 GPU per MPI local rank\n"
         "# Set device for this MPI rank:\n"
         "export CUDA_VISIBLE_DEVICES=\"$" +
         std::string(rank_variable) +
         "\"\n"
         "# Execute code:\n"
         "exec $*\n";
}

std::string generate_launch_script(std::string_view flavor) {
  return generate_launch_script(parse_mpi_flavor(flavor));
}

std::string recommend_flags(Mode mode, const InlinePlan &plan) {
  std::string flags;
  switch (mode) {
  case Mode::A:
    return "-acc=gpu -gpu=cc80";
  case Mode::AD:
    return "-acc=gpu -stdpar=gpu -gpu=cc80,nomanaged";
  case Mode::ADU:
  case Mode::AD2XU:
    return "-acc=gpu -stdpar=gpu -gpu=cc80,managed";
  case Mode::D2XU:
    flags = "-stdpar=gpu -gpu=cc80";
    break;
  case Mode::D2XAd:
    flags = "-acc=gpu -stdpar=gpu -gpu=cc80,nomanaged";
    break;
  }
  if (!plan.empty())
    flags += " " + plan.fragment();
  return flags;
}

} // namespace acc2dc
