#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcap/cantor.hpp"

namespace qcap::cli {

// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "QCAP_OUT_DIR";

struct ScheduleConfig {
  double K = 1.0;
  int depth = 0;
  std::uint64_t seed = 0;
  double max_ratio = 0.01;
  std::vector<LevelSchedule> levels;
};

// Validates against the schedule schema; errors carry a JSON pointer.
ScheduleConfig parse_schedule(const nlohmann::json& j);
ScheduleConfig load_schedule(const std::string& path);

// Exit codes: 0 success or passing verdict, 1 failing verdict, 2 config error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace qcap::cli
