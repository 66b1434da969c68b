#include <sstream>

#include "csv.hpp"
#include "handover/dataset.hpp"
#include "handover/errors.hpp"
#include "json_io.hpp"

namespace handover::dataset {

using detail::format_double;
using nlohmann::json;

namespace {

std::vector<std::string> string_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) throw ValidationError(path + "[" + std::to_string(i) + "]", "expected a string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

}  // namespace

ObjectLibrary parse_library(std::string_view json_text) {
  const json doc = detail::parse_json_or_throw(std::string(json_text), "objects");
  if (!doc.is_object()) throw ValidationError("", "expected an object");
  if (!doc.contains("objects")) throw ValidationError("objects", "missing");
  ObjectLibrary lib;
  const json& objs = doc.at("objects");
  if (!objs.is_array()) throw ValidationError("objects", "expected an array");
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const std::string path = "objects[" + std::to_string(i) + "]";
    const json& o = objs[i];
    if (!o.is_object()) throw ValidationError(path, "expected an object");
    for (const char* key : {"id", "shape", "task"}) {
      if (!o.contains(key) || !o.at(key).is_string()) throw ValidationError(path + "." + key, "missing string");
    }
    ObjectEntry e;
    e.id = o.at("id").get<std::string>();
    e.task = o.at("task").get<std::string>();
    if (e.id.empty()) throw ValidationError(path + ".id", "must not be empty");
    if (e.task.empty()) throw ValidationError(path + ".task", "must not be empty");
    try {
      e.shape = parse_shape(o.at("shape").get<std::string>());
    } catch (const ParseError& err) {
      throw ValidationError(path + ".shape", err.what());
    }
    if (o.contains("semantic_features")) {
      for (const auto& [k, v] : o.at("semantic_features").items()) {
        if (!v.is_string()) throw ValidationError(path + ".semantic_features." + k, "expected a string");
        e.semantic_features[k] = v.get<std::string>();
      }
    }
    for (const auto& prev : lib.objects) {
      if (prev.id == e.id) throw ValidationError(path + ".id", "duplicate id '" + e.id + "'");
    }
    lib.objects.push_back(std::move(e));
  }
  if (doc.contains("study_objects")) lib.study_ids = string_list(doc.at("study_objects"), "study_objects");
  if (doc.contains("default_test_objects")) {
    lib.default_test_ids = string_list(doc.at("default_test_objects"), "default_test_objects");
  }
  for (const auto& id : lib.study_ids) (void)lib.find(id);
  for (const auto& id : lib.default_test_ids) (void)lib.find(id);
  return lib;
}

ObjectLibrary load_library(const std::filesystem::path& path) {
  return parse_library(detail::read_text_file(path.string()));
}

std::string corpus_to_csv(const std::vector<HandoverInstance>& corpus, const OutputMeta& meta) {
  std::ostringstream out;
  out << meta.csv_preamble();
  out << "object_id,shape,mobility,task,method,px,py,pz,qw,qx,qy,qz,grasp_id\n";
  for (const auto& inst : corpus) {
    const auto& p = inst.target_pose.position;
    const auto& q = inst.target_pose.orientation;
    out << inst.object_id << ',' << to_string(inst.shape) << ',' << to_string(inst.mobility) << ','
        << inst.task << ',' << to_string(inst.method);
    for (double v : {p.x(), p.y(), p.z(), q.w(), q.x(), q.y(), q.z()}) out << ',' << format_double(v);
    out << ',' << inst.grasp_id << '\n';
  }
  return out.str();
}

std::vector<HandoverInstance> parse_corpus_csv(std::string_view text) {
  const auto t = detail::parse_csv(text);
  const auto c_obj = t.column("object_id"), c_shape = t.column("shape"), c_mob = t.column("mobility");
  const auto c_task = t.column("task"), c_method = t.column("method"), c_grasp = t.column("grasp_id");
  const std::array<std::size_t, 7> c_num{t.column("px"), t.column("py"), t.column("pz"), t.column("qw"),
                                         t.column("qx"), t.column("qy"), t.column("qz")};
  std::vector<HandoverInstance> out;
  for (const auto& row : t.rows) {
    HandoverInstance inst;
    inst.object_id = row[c_obj];
    inst.shape = parse_shape(row[c_shape]);
    inst.mobility = parse_mobility(row[c_mob]);
    inst.task = row[c_task];
    try {
      inst.method = parse_method(row[c_method]);
    } catch (const std::exception& e) {
      throw ParseError(std::string("corpus: ") + e.what());
    }
    std::array<double, 7> v{};
    for (std::size_t i = 0; i < 7; ++i) v[i] = detail::parse_double(row[c_num[i]], t.header[c_num[i]]);
    inst.target_pose = Pose(Vec3(v[0], v[1], v[2]), Quat(v[3], v[4], v[5], v[6]));
    inst.grasp_id = row[c_grasp];
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<HandoverInstance> load_corpus(const std::filesystem::path& path) {
  return parse_corpus_csv(detail::read_text_file(path.string()));
}

std::string split_to_json(const SplitSpec& spec, const OutputMeta& meta) {
  json j;
  j["schema_version"] = meta.schema_version;
  j["seed"] = meta.seed;
  if (meta.timestamp) j["generated_at"] = *meta.timestamp;
  j["split_seed"] = spec.seed;
  j["train_objects"] = spec.train_object_ids;
  j["test_objects"] = spec.test_object_ids;
  return j.dump(2) + "\n";
}

SplitSpec parse_split_json(std::string_view text) {
  const json j = detail::parse_json_or_throw(std::string(text), "split");
  if (!j.is_object()) throw ValidationError("", "expected an object");
  for (const char* key : {"train_objects", "test_objects"}) {
    if (!j.contains(key)) throw ValidationError(key, "missing");
  }
  SplitSpec spec;
  spec.train_object_ids = string_list(j.at("train_objects"), "train_objects");
  spec.test_object_ids = string_list(j.at("test_objects"), "test_objects");
  if (j.contains("split_seed")) spec.seed = j.at("split_seed").get<std::uint64_t>();
  spec.validate();
  return spec;
}

std::string study_records_to_csv(const std::vector<PreferenceRecord>& records, const OutputMeta& meta) {
  std::ostringstream out;
  out << meta.csv_preamble();
  out << "subject,mobility,object_id,method,safety,comfort,appropriateness,preferred\n";
  for (const auto& r : records) {
    for (std::size_t m = 0; m < kMethods.size(); ++m) {
      const auto& rt = r.ratings[m];
      out << r.participant_id << ',' << to_string(r.mobility) << ',' << r.object_id << ','
          << to_string(kMethods[m]) << ',' << rt.safety << ',' << rt.comfort << ','
          << rt.appropriateness << ',' << (kMethods[m] == r.preferred_method ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

}  // namespace handover::dataset
