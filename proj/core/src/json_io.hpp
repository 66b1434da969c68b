#pragma once

// JSON helpers shared by the serialisers. Internal to the core library.

#include <string>

#include <json.hpp>

#include "handover/errors.hpp"
#include "handover/geometry.hpp"

namespace handover::detail {

inline nlohmann::json to_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

inline nlohmann::json to_json(const Quat& q) {
  return nlohmann::json::array({q.w(), q.x(), q.y(), q.z()});
}

inline nlohmann::json to_json(const Pose& p) {
  return {{"position", to_json(p.position)}, {"orientation", to_json(p.orientation)}};
}

inline Vec3 vec3_from_json(const nlohmann::json& j) {
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

inline Quat quat_from_json(const nlohmann::json& j) {
  return Quat(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
              j.at(3).get<double>());
}

inline Pose pose_from_json(const nlohmann::json& j) {
  Pose p;
  p.position = vec3_from_json(j.at("position"));
  if (j.contains("orientation")) p.orientation = quat_from_json(j.at("orientation"));
  return p;
}

inline nlohmann::json parse_json_or_throw(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace handover::detail
