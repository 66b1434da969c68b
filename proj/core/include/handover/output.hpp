#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace handover {

inline constexpr int kSchemaVersion = 1;

/// Provenance stamped into every file the toolkit writes.
struct OutputMeta {
  std::uint64_t seed = 42;
  int schema_version = kSchemaVersion;
  std::optional<std::string> timestamp;  // ISO-8601 UTC; omitted for byte-stable output

  /// "# schema_version=1 seed=42[ generated_at=...]" preamble line for CSV files.
  std::string csv_preamble() const;
};

/// Current UTC time as ISO-8601.
std::string utc_timestamp();

}  // namespace handover
