#include "json_schema.hpp"

#include "handover/errors.hpp"

namespace handover::detail {
namespace {

using nlohmann::json;

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

bool matches_type(const json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  if (type == "null") return v.is_null();
  return false;
}

void validate(const json& v, const json& schema, const std::string& path, const json& root) {
  if (auto ref = schema.find("$ref"); ref != schema.end()) {
    // Only local JSON pointers ("#/definitions/pose") are supported.
    const std::string target = ref->get<std::string>();
    if (target.rfind("#", 0) != 0) throw ValidationError(path, "unsupported $ref " + target);
    validate(v, root.at(json::json_pointer(target.substr(1))), path, root);
    return;
  }
  const std::string where = path.empty() ? "<root>" : path;

  if (auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    if (it->is_array()) {
      for (const auto& t : *it) ok = ok || matches_type(v, t.get<std::string>());
    } else {
      ok = matches_type(v, it->get<std::string>());
    }
    if (!ok) throw ValidationError(where, "expected type " + it->dump());
  }

  if (auto it = schema.find("enum"); it != schema.end()) {
    bool found = false;
    for (const auto& option : *it) found = found || option == v;
    if (!found) throw ValidationError(where, "value " + v.dump() + " not in " + it->dump());
  }

  if (v.is_number()) {
    const double x = v.get<double>();
    if (auto it = schema.find("minimum"); it != schema.end() && x < it->get<double>()) {
      throw ValidationError(where, "must be >= " + it->dump());
    }
    if (auto it = schema.find("exclusiveMinimum");
        it != schema.end() && !(x > it->get<double>())) {
      throw ValidationError(where, "must be > " + it->dump());
    }
  }

  if (v.is_string()) {
    if (auto it = schema.find("minLength");
        it != schema.end() && v.get<std::string>().size() < it->get<std::size_t>()) {
      throw ValidationError(where, "string shorter than " + it->dump());
    }
  }

  if (v.is_array()) {
    if (auto it = schema.find("minItems"); it != schema.end() && v.size() < it->get<std::size_t>()) {
      throw ValidationError(where, "expected at least " + it->dump() + " items");
    }
    if (auto it = schema.find("maxItems"); it != schema.end() && v.size() > it->get<std::size_t>()) {
      throw ValidationError(where, "expected at most " + it->dump() + " items");
    }
    if (auto it = schema.find("items"); it != schema.end()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        validate(v[i], *it, path + "[" + std::to_string(i) + "]", root);
      }
    }
  }

  if (v.is_object()) {
    if (auto it = schema.find("required"); it != schema.end()) {
      for (const auto& key : *it) {
        if (!v.contains(key.get<std::string>())) {
          throw ValidationError(join(path, key.get<std::string>()), "required field missing");
        }
      }
    }
    const auto props = schema.find("properties");
    if (props != schema.end()) {
      for (const auto& [key, sub] : props->items()) {
        if (auto field = v.find(key); field != v.end()) validate(*field, sub, join(path, key), root);
      }
    }
    if (auto it = schema.find("additionalProperties");
        it != schema.end() && it->is_boolean() && !it->get<bool>()) {
      for (const auto& [key, _] : v.items()) {
        if (props == schema.end() || !props->contains(key)) {
          throw ValidationError(join(path, key), "unexpected field");
        }
      }
    }
  }
}

}  // namespace

void validate_against_schema(const json& doc, const json& schema, const std::string& root_path) {
  validate(doc, schema, root_path, schema);
}

}  // namespace handover::detail
