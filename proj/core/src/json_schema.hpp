#pragma once

#include <string>

#include <json.hpp>

namespace handover::detail {

/// Validates `doc` against the JSON-Schema subset used by the shipped schemas:
/// $ref (local), type, required, properties, additionalProperties (bool), items, minItems,
/// maxItems, enum, minimum, exclusiveMinimum, minLength.
/// Throws ValidationError naming the first offending path.
void validate_against_schema(const nlohmann::json& doc, const nlohmann::json& schema,
                             const std::string& root_path = "");

}  // namespace handover::detail
