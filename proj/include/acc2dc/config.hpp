#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "acc2dc/loop.hpp"
#include "acc2dc/transform.hpp"

namespace acc2dc {

enum class MpiFlavor { OpenMPI, MPICH, SlurmSrun };

std::string_view to_string(MpiFlavor flavor);
/// Accepts "openmpi", "mpich" and "slurm-srun" in any case; throws ConfigError.
MpiFlavor parse_mpi_flavor(std::string_view text);

/// Settings read from a configuration file.
///
/// The file is a flat list of `key = value` lines. `#` starts a comment.
/// List values are comma separated. Keys:
///
///   mode              a | ad | adu | ad2xu | d2xu | d2xad
///   purity_whitelist  procedures trusted to be pure
///   derived_types     variables that are derived-type instances
///   inline_reshape    callees needing the reshape inline option
///   array_shape.NAME  extents of array NAME, e.g. `n1, n2` or `0:n, m`
///   mpi_flavor        openmpi | mpich | slurm-srun (default openmpi)
///   output_dir        directory for transformed files
///   strict            true | false (default false)
struct ToolConfig {
  AnalysisConfig analysis;
  MpiFlavor mpi_flavor = MpiFlavor::OpenMPI;
  std::optional<Mode> mode;
  std::string output_dir;
  bool strict = false;
};

/// Throws ConfigError with the offending line for unknown keys or bad values.
ToolConfig parse_config(std::string_view text);
ToolConfig read_config_file(const std::string &path);

/// Bash script binding each MPI local rank to one GPU.
std::string generate_launch_script(MpiFlavor flavor);
/// Same, from a flavor name; throws ConfigError for unknown flavors.
std::string generate_launch_script(std::string_view flavor);

/// Compiler flags for building `mode`, with the inline fragment appended in
/// the modes that drop `routine` directives.
std::string recommend_flags(Mode mode, const InlinePlan &plan = {});

} // namespace acc2dc
