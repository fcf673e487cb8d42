#include <asq/scene.hpp>

#include <set>

namespace asq {

namespace {

const std::set<std::string> kCommands = {"eval",  "theta", "pair",  "expand",
                                         "push",  "check", "oracle"};

const std::set<std::string> kTopFields = {"dim", "definitions", "jobs"};
const std::set<std::string> kDefFields = {"type", "value"};
const std::set<std::string> kJobFields = {"command", "m",       "pi",  "phi", "window",
                                          "k",       "lambda",  "N",   "chambers",
                                          "suite",   "ks",      "out"};

struct ErrorSink {
  std::vector<SceneError>* errors;
  void add(const std::string& path, const std::string& message) {
    errors->push_back({path, message});
  }
};

void check_unknown_fields(const Json& obj, const std::set<std::string>& allowed,
                          const std::string& path, ErrorSink& sink) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) sink.add(path + "/" + key, "unknown field");
}

}  // namespace

SceneParse parse_scene(const std::string& text) {
  SceneParse out;
  ErrorSink sink{&out.errors};

  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    sink.add("/", "not well-formed JSON");
    return out;
  }
  if (!doc.is_object()) {
    sink.add("/", "scene must be a JSON object");
    return out;
  }
  check_unknown_fields(doc, kTopFields, "", sink);

  Scene scene;
  if (!doc.contains("dim") || !doc["dim"].is_number_integer() || doc["dim"].get<long>() < 0)
    sink.add("/dim", "missing or invalid dimension");
  else
    scene.dim = doc["dim"].get<size_t>();

  if (doc.contains("definitions")) {
    if (!doc["definitions"].is_object()) {
      sink.add("/definitions", "definitions must be an object of named entries");
    } else {
      for (const auto& [name, def] : doc["definitions"].items()) {
        std::string path = "/definitions/" + name;
        if (!def.is_object() || !def.contains("type") || !def.contains("value")) {
          sink.add(path, "expected {type, value}");
          continue;
        }
        check_unknown_fields(def, kDefFields, path, sink);
        std::string type = def["type"].is_string() ? def["type"].get<std::string>() : "";
        try {
          if (type == "family")
            scene.families.emplace(name, pqp_from_json(def["value"]));
          else if (type == "map")
            scene.maps.emplace(name, quotient_map_from_json(def["value"]));
          else if (type == "polynomial")
            scene.polynomials.emplace(name, multipoly_from_json(def["value"]));
          else if (type == "window")
            scene.windows.emplace(name, window_from_json(def["value"]));
          else
            sink.add(path + "/type", "unknown definition type \"" + type + "\"");
        } catch (const std::exception& e) {
          sink.add(path + "/value", e.what());
        }
      }
    }
  }

  if (doc.contains("jobs")) {
    if (!doc["jobs"].is_array()) {
      sink.add("/jobs", "jobs must be an array");
    } else {
      size_t idx = 0;
      for (const Json& job : doc["jobs"]) {
        std::string path = "/jobs/" + std::to_string(idx++);
        if (!job.is_object() || !job.contains("command") || !job["command"].is_string()) {
          sink.add(path, "expected an object with a \"command\" string");
          continue;
        }
        check_unknown_fields(job, kJobFields, path, sink);
        std::string command = job["command"].get<std::string>();
        if (!kCommands.count(command)) {
          sink.add(path + "/command", "unknown command \"" + command + "\"");
          continue;
        }
        // References must resolve against the definitions.
        auto ref = [&](const char* key, const auto& table) {
          if (!job.contains(key)) return;
          if (!job[key].is_string() || !table.count(job[key].template get<std::string>()))
            sink.add(path + "/" + key, "unresolved reference");
        };
        ref("m", scene.families);
        ref("pi", scene.maps);
        ref("phi", scene.polynomials);
        // Windows may be referenced by name, given inline as an object, or
        // given inline as an interval string like "[-1,2]x[0,1]".
        if (job.contains("window") && job["window"].is_string() &&
            job["window"].get<std::string>().rfind("[", 0) != 0 &&
            !scene.windows.count(job["window"].get<std::string>()))
          sink.add(path + "/window", "unresolved reference");
        Json params = job;
        params.erase("command");
        scene.jobs.push_back({command, params});
      }
    }
  }

  if (!out.errors.empty()) return out;
  out.scene = std::move(scene);
  return out;
}

Json scene_to_json(const Scene& scene) {
  Json out;
  out["dim"] = scene.dim;
  Json defs = Json::object();
  for (const auto& [name, m] : scene.families)
    defs[name] = Json{{"type", "family"}, {"value", pqp_to_json(m)}};
  for (const auto& [name, q] : scene.maps)
    defs[name] = Json{{"type", "map"}, {"value", quotient_map_to_json(q)}};
  for (const auto& [name, p] : scene.polynomials)
    defs[name] = Json{{"type", "polynomial"}, {"value", multipoly_to_json(p)}};
  for (const auto& [name, w] : scene.windows)
    defs[name] = Json{{"type", "window"}, {"value", window_to_json(w)}};
  out["definitions"] = defs;
  Json jobs = Json::array();
  for (const Job& job : scene.jobs) {
    Json j = job.params;
    j["command"] = job.command;
    jobs.push_back(j);
  }
  out["jobs"] = jobs;
  return out;
}

}  // namespace asq
