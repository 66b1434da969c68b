#include <sstream>

#include "csv.hpp"
#include "handover/errors.hpp"
#include "handover/srl.hpp"
#include "json_io.hpp"

namespace handover::srl {

using detail::format_double;
using nlohmann::json;

namespace {

json meta_header(const OutputMeta& meta) {
  json j;
  j["schema_version"] = meta.schema_version;
  j["seed"] = meta.seed;
  if (meta.timestamp) j["generated_at"] = *meta.timestamp;
  return j;
}

}  // namespace

std::string trained_model_to_json(const TrainedModel& model, const OutputMeta& meta) {
  json j = meta_header(meta);
  j["seed"] = model.seed;
  j["mln"] = json::parse(mln::model_to_json(model.mln));
  json protos = json::array();
  for (const auto& [key, p] : model.prototypes.entries) {
    protos.push_back({{"shape", to_string(std::get<0>(key))},
                      {"mobility", to_string(std::get<1>(key))},
                      {"method", to_string(std::get<2>(key))},
                      {"config_class", config_class(key)},
                      {"pose", detail::to_json(p.pose)},
                      {"grasp", p.grasp},
                      {"support", p.support}});
  }
  j["prototypes"] = protos;
  j["split"] = {{"train_objects", model.split.train_object_ids},
                {"test_objects", model.split.test_object_ids},
                {"split_seed", model.split.seed}};
  j["train_meta"] = {{"iterations", model.train_meta.iterations},
                     {"initial_pll", model.train_meta.initial_pll},
                     {"final_pll", model.train_meta.final_pll},
                     {"converged", model.train_meta.converged},
                     {"train_instances", model.train_meta.train_instances}};
  return j.dump(2) + "\n";
}

TrainedModel parse_trained_model(std::string_view json_text) {
  const json j = detail::parse_json_or_throw(std::string(json_text), "trained model");
  TrainedModel m;
  try {
    for (const char* key : {"mln", "prototypes", "split"}) {
      if (!j.contains(key)) throw ValidationError(key, "missing");
    }
    if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
    m.mln = mln::parse_model(j.at("mln").dump());
    for (const auto& p : j.at("prototypes")) {
      const PrototypeKey key{parse_shape(p.at("shape").get<std::string>()),
                             parse_mobility(p.at("mobility").get<std::string>()),
                             parse_method(p.at("method").get<std::string>())};
      Prototype proto;
      proto.pose = detail::pose_from_json(p.at("pose"));
      proto.grasp = p.at("grasp").get<std::string>();
      proto.support = p.value("support", std::size_t{0});
      m.prototypes.entries[key] = std::move(proto);
    }
    m.split = dataset::parse_split_json(j.at("split").dump());
    if (j.contains("train_meta")) {
      const auto& t = j.at("train_meta");
      m.train_meta.iterations = t.value("iterations", 0);
      m.train_meta.initial_pll = t.value("initial_pll", 0.0);
      m.train_meta.final_pll = t.value("final_pll", 0.0);
      m.train_meta.converged = t.value("converged", false);
      m.train_meta.train_instances = t.value("train_instances", std::size_t{0});
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("trained model: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("trained model: ") + e.what());
  }
  for (const auto& q : m.mln.query_predicates) {
    if (q != "graspRegion" && q != "objectConfiguration") {
      throw ValidationError("mln.query_predicates", "unexpected query predicate '" + q + "'");
    }
  }
  return m;
}

TrainedModel load_trained_model(const std::filesystem::path& path) {
  return parse_trained_model(detail::read_text_file(path.string()));
}

std::string inference_to_json(const InferenceResult& result, const OutputMeta& meta) {
  json j = meta_header(meta);
  j["config_class"] = config_class(result.key);
  j["method"] = to_string(std::get<2>(result.key));
  j["object_pose_hand_relative"] = detail::to_json(result.object_pose);
  j["robot_grasp"] = result.robot_grasp;
  return j.dump(2) + "\n";
}

std::string end_to_end_to_json(const EndToEndResult& r, const OutputMeta& meta) {
  json j = meta_header(meta);
  j["config_class"] = config_class(r.inference.key);
  j["robot_grasp"] = r.robot_grasp;
  j["object_pose"] = detail::to_json(r.object_pose);
  j["ee_pose"] = detail::to_json(r.ee_pose);
  j["advised_human_grasp"] = r.advised_human_grasp;
  j["advised_grasp_world"] = detail::to_json(r.advised_grasp_world);
  j["component_distances"] = {{"obj_to_hand", r.distances.obj_to_hand},
                              {"obj_to_face", r.distances.obj_to_face},
                              {"ee_to_hand", r.distances.ee_to_hand}};
  j["reach_distance"] = r.reach_distance;
  json trace = json::array();
  for (const auto& g : r.trace) {
    trace.push_back({{"step", g.step}, {"gate", g.gate}, {"distance", g.distance},
                     {"threshold", g.threshold}, {"passed", g.passed}});
  }
  j["trace"] = trace;
  return j.dump(2) + "\n";
}

std::string accuracy_to_csv(const AccuracyReport& report, const OutputMeta& meta) {
  std::ostringstream out;
  out << meta.csv_preamble() << "shape,objects,pose_acc,grasp_acc,average\n";
  auto row = [&](const AccuracyRow& r) {
    std::string objs;
    for (std::size_t i = 0; i < r.objects.size(); ++i) objs += (i ? ";" : "") + r.objects[i];
    out << r.shape << ',' << objs << ',' << format_double(r.pose_accuracy, "%.2f") << ','
        << format_double(r.grasp_accuracy, "%.2f") << ',' << format_double(r.average, "%.2f") << '\n';
  };
  for (const auto& r : report.rows) row(r);
  row(report.overall);
  return out.str();
}

std::string grasp_samples_to_csv(const std::vector<GraspDistanceRow>& rows, const OutputMeta& meta) {
  std::ostringstream out;
  out << meta.csv_preamble() << "shape,mode,distance_cm\n";
  for (const auto& r : rows) {
    for (double d : r.manipulation_cm) out << to_string(r.shape) << ",manipulation," << format_double(d, "%.6f") << '\n';
    for (double d : r.handover_cm) out << to_string(r.shape) << ",handover," << format_double(d, "%.6f") << '\n';
  }
  return out.str();
}

std::string grasp_summary_to_csv(const std::vector<GraspDistanceRow>& rows, const OutputMeta& meta) {
  std::ostringstream out;
  out << meta.csv_preamble() << "shape,manipulation_mean_cm,handover_mean_cm,U,p_value,method\n";
  for (const auto& r : rows) {
    out << to_string(r.shape) << ',' << format_double(r.manipulation_mean_cm, "%.6f") << ','
        << format_double(r.handover_mean_cm, "%.6f") << ',' << format_double(r.test.statistic) << ','
        << format_double(r.test.p_value) << ',' << stats::to_string(r.test.method) << '\n';
  }
  return out.str();
}

}  // namespace handover::srl
