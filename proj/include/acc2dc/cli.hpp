#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace acc2dc {

/// Command-line entry point. `args` excludes the program name. Returns 0 on
/// success, 1 when strict mode is on and ActionRequired diagnostics were
/// produced, and 2 on errors.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace acc2dc
