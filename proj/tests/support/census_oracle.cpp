#include "census_oracle.hpp"

#include <regex>
#include <sstream>
#include <utility>
#include <vector>

namespace acc2dc::testing {

namespace {

const std::regex kSentinel(R"(^\s*!\$acc(\s|&|$))", std::regex::icase);
const std::regex kAmpLead(R"(^\s*!\$acc&)", std::regex::icase);
const std::regex kTrailingAmp(R"(&\s*$)");

struct Rule {
  std::regex pattern;
  const char *category;
  const char *detail;
};

const std::vector<Rule> &rules() {
  static const std::vector<Rule> r = [] {
    auto icase = std::regex::icase;
    std::vector<Rule> v;
    auto add = [&](const char *re, const char *cat, const char *det = nullptr) {
      v.push_back({std::regex(std::string(R"(^\s*!\$acc\s+)") + re, icase), cat, det});
    };
    add(R"(end\s*parallel\b)", "parallel_loop");
    add(R"(end\s*kernels\b)", "kernels");
    add(R"(end\s*host_data\b)", "data_management", "host_data");
    add(R"(parallel\b)", "parallel_loop");
    add(R"(loop\b)", "parallel_loop");
    add(R"(kernels\b)", "kernels");
    add(R"(enter\s+data\b)", "data_management", "enter");
    add(R"(exit\s+data\b)", "data_management", "exit");
    add(R"(update\b)", "data_management", "update");
    add(R"(host_data\b)", "data_management", "host_data");
    add(R"(declare\b)", "data_management", "declare");
    add(R"(atomic\b)", "atomic");
    add(R"(routine\b)", "routine");
    add(R"(wait\b)", "wait");
    add(R"(set\b)", "set_device_num");
    return v;
  }();
  return r;
}

} // namespace

std::map<std::string, std::size_t> oracle_census(std::string_view source) {
  std::map<std::string, std::size_t> counts;
  for (const char *k : {"parallel_loop", "data_management", "atomic", "routine", "kernels", "wait",
                        "set_device_num", "continuation", "total"})
    counts[k] = 0;
  for (const char *k : {"enter", "exit", "update", "host_data", "declare"})
    counts[std::string("data_management.") + k] = 0;

  std::istringstream in{std::string(source)};
  std::string line;
  bool continuing = false;
  while (std::getline(in, line)) {
    if (!std::regex_search(line, kSentinel)) {
      continuing = false;
      continue;
    }
    ++counts["total"];
    if (continuing || std::regex_search(line, kAmpLead)) {
      ++counts["continuation"];
    } else {
      for (const auto &rule : rules()) {
        if (std::regex_search(line, rule.pattern)) {
          ++counts[rule.category];
          if (rule.detail)
            ++counts[std::string("data_management.") + rule.detail];
          break;
        }
      }
    }
    continuing = std::regex_search(line, kTrailingAmp);
  }
  return counts;
}

std::size_t oracle_acc_lines(std::string_view source) { return oracle_census(source)["total"]; }

} // namespace acc2dc::testing
