#include "handover/output.hpp"

#include <chrono>
#include <ctime>

namespace handover {

std::string OutputMeta::csv_preamble() const {
  std::string line = "# schema_version=" + std::to_string(schema_version) +
                     " seed=" + std::to_string(seed);
  if (timestamp) line += " generated_at=" + *timestamp;
  return line + "\n";
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace handover
