#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "acc2dc/config.hpp"
#include "acc2dc/source.hpp"

namespace acc2dc::testing {

/// Absolute path of a file under the tests directory.
std::string data_path(std::string_view relative);
std::string read_text(const std::string &path);
SourceFile load_fixture(std::string_view relative);

/// Sorted paths of the corpus sources.
std::vector<std::string> corpus_files();
ToolConfig corpus_config();

/// Path of the built command-line tool.
std::string cli_path();

} // namespace acc2dc::testing
