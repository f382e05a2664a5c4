#include "fixtures.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace acc2dc::testing {

namespace fs = std::filesystem;

std::string data_path(std::string_view relative) {
  return (fs::path(ACC2DC_TEST_DATA) / relative).string();
}

std::string read_text(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SourceFile load_fixture(std::string_view relative) {
  auto path = data_path(relative);
  return load_source(read_text(path), path);
}

std::vector<std::string> corpus_files() {
  std::vector<std::string> out;
  for (const auto &entry : fs::directory_iterator(data_path("corpus")))
    if (entry.path().extension() == ".f90")
      out.push_back(entry.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

ToolConfig corpus_config() { return read_config_file(data_path("corpus/acc2dc.cfg")); }

std::string cli_path() { return ACC2DC_CLI_PATH; }

} // namespace acc2dc::testing
