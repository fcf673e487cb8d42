#pragma once

// JSON scene documents: named definitions (families, quotient maps,
// polynomials, windows) plus a list of jobs referencing them.  Parsing is
// total: malformed input yields location-tagged errors, never an exception.

#include <asq/serialize.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace asq {

struct Job {
  std::string command;  // eval | theta | pair | expand | push | check | oracle
  Json params;          // remaining validated fields of the job object
};

struct Scene {
  size_t dim = 0;
  std::map<std::string, PiecewiseQP> families;
  std::map<std::string, QuotientMap> maps;
  std::map<std::string, MultiPoly> polynomials;
  std::map<std::string, WindowBox> windows;
  std::vector<Job> jobs;
};

struct SceneError {
  std::string path;  // JSON-pointer-style location
  std::string message;
};

struct SceneParse {
  std::optional<Scene> scene;
  std::vector<SceneError> errors;
  bool ok() const { return scene.has_value(); }
};

SceneParse parse_scene(const std::string& text);

// Canonical serialization of a scene's definitions and jobs.
Json scene_to_json(const Scene& scene);

}  // namespace asq
