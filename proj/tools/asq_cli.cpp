// Command-line front end: loads a JSON scene, runs one command either from
// explicit flags or from the scene's job list, and emits CSV (point-mass
// samples) or JSON (values, series, reports).  Exit codes: 0 success,
// 1 domain/input errors, 2 verification failures.

#include <CLI11.hpp>

#include <asq/expansion.hpp>
#include <asq/oracle.hpp>
#include <asq/pushforward.hpp>
#include <asq/scene.hpp>

#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

using namespace asq;

namespace {

struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Int int_param(const Json& params, const std::string& key) {
  if (!params.contains(key)) throw std::invalid_argument("missing parameter \"" + key + "\"");
  const Json& v = params[key];
  if (v.is_number_integer()) return Int(v.get<long long>());
  if (v.is_string()) return Int(v.get<std::string>());
  throw std::invalid_argument("parameter \"" + key + "\" must be an integer");
}

QVec lambda_param(const Json& params) {
  if (!params.contains("lambda")) throw std::invalid_argument("missing parameter \"lambda\"");
  const Json& v = params["lambda"];
  if (v.is_array()) return qvec_from_json(v);
  if (v.is_string()) {
    QVec out;
    std::stringstream ss(v.get<std::string>());
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(parse_rat(part));
    return out;
  }
  throw std::invalid_argument("parameter \"lambda\" must be an array or \"a,b,...\" string");
}

// "[lo,hi]x[lo,hi]x..." with rational bounds.
WindowBox parse_window_string(const std::string& text) {
  QVec lo, hi;
  size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] != '[') throw std::invalid_argument("malformed window \"" + text + "\"");
    size_t close = text.find(']', pos);
    if (close == std::string::npos)
      throw std::invalid_argument("malformed window \"" + text + "\"");
    std::string body = text.substr(pos + 1, close - pos - 1);
    size_t comma = body.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("malformed window \"" + text + "\"");
    lo.push_back(parse_rat(body.substr(0, comma)));
    hi.push_back(parse_rat(body.substr(comma + 1)));
    pos = close + 1;
    if (pos < text.size()) {
      if (text[pos] != 'x') throw std::invalid_argument("malformed window \"" + text + "\"");
      ++pos;
    }
  }
  if (lo.empty()) throw std::invalid_argument("empty window \"" + text + "\"");
  return WindowBox::closed(lo, hi);
}

const PiecewiseQP& family_param(const Scene& scene, const Json& params) {
  if (!params.contains("m")) {
    if (scene.families.size() == 1) return scene.families.begin()->second;
    throw std::invalid_argument("missing parameter \"m\"");
  }
  auto it = scene.families.find(params["m"].get<std::string>());
  if (it == scene.families.end()) throw std::invalid_argument("unresolved family reference");
  return it->second;
}

const QuotientMap& map_param(const Scene& scene, const Json& params) {
  if (!params.contains("pi")) {
    if (scene.maps.size() == 1) return scene.maps.begin()->second;
    throw std::invalid_argument("missing parameter \"pi\"");
  }
  auto it = scene.maps.find(params["pi"].get<std::string>());
  if (it == scene.maps.end()) throw std::invalid_argument("unresolved map reference");
  return it->second;
}

const MultiPoly& poly_param(const Scene& scene, const Json& params) {
  if (!params.contains("phi")) throw std::invalid_argument("missing parameter \"phi\"");
  auto it = scene.polynomials.find(params["phi"].get<std::string>());
  if (it == scene.polynomials.end())
    throw std::invalid_argument("unresolved polynomial reference");
  return it->second;
}

WindowBox window_param(const Scene& scene, const Json& params) {
  if (!params.contains("window")) throw std::invalid_argument("missing parameter \"window\"");
  const Json& v = params["window"];
  if (v.is_object()) return window_from_json(v);
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    auto it = scene.windows.find(s);
    if (it != scene.windows.end()) return it->second;
    return parse_window_string(s);
  }
  throw std::invalid_argument("parameter \"window\" must be a name, object or \"[a,b]x...\"");
}

bool all_bases_bounded(const PiecewiseQP& m) {
  for (const QPPiece& piece : m.pieces())
    if (!piece.cone.base.is_bounded()) return false;
  return true;
}

std::string run_check_suite(const Scene& scene, const Json& params) {
  std::string suite = params.contains("suite") ? params["suite"].get<std::string>() : "exactness";
  if (suite != "exactness" && suite != "roundtrip")
    throw std::invalid_argument("unknown suite \"" + suite + "\"");
  Json failures = Json::array();
  long checks = 0;

  // Round-trip: serialize, parse, serialize again; strings must agree.
  Json doc = scene_to_json(scene);
  SceneParse again = parse_scene(doc.dump());
  ++checks;
  if (!again.ok() || scene_to_json(*again.scene).dump() != doc.dump())
    failures.push_back("scene serialization does not round-trip");

  if (suite == "exactness") {
    for (const auto& [name, m] : scene.families) {
      std::vector<MultiPoly> phis;
      phis.push_back(MultiPoly::constant(m.dim(), Rat(1)));
      for (size_t i = 0; i < m.dim(); ++i) phis.push_back(MultiPoly::variable(m.dim(), i));
      WindowBox w = WindowBox::closed(QVec(m.dim(), Rat(-2)), QVec(m.dim(), Rat(2)));
      for (Int k = 1; k <= 4; ++k)
        for (const MultiPoly& phi : phis) {
          ++checks;
          Cyclotomic oracle = oracle_theta_pair(m, k, phi, w);
          Cyclotomic lib = theta_pair_poly(m, k, phi, w);
          if (!(oracle - lib).is_zero())
            failures.push_back("pairing oracle mismatch for \"" + name + "\" at k=" + k.str());
        }
      if (all_bases_bounded(m)) {
        AsymptoticSeries a = expand(m, 4);
        for (Int k = 2; k <= 4; ++k)
          for (const MultiPoly& phi : phis) {
            ++checks;
            Cyclotomic exact = theta_pair_poly(m, k, phi);
            Cyclotomic trunc = series_pair_poly(a, k, phi);
            if (!(exact - trunc).is_zero())
              failures.push_back("expansion pairing mismatch for \"" + name +
                                 "\" at k=" + k.str());
          }
      }
    }
  }

  Json report;
  report["suite"] = suite;
  report["checks"] = checks;
  report["failures"] = failures;
  std::string text = report.dump(2) + "\n";
  if (!failures.empty()) throw VerificationFailure(text);
  return text;
}

std::string run_job(const Scene& scene, const std::string& command, const Json& params) {
  if (command == "eval") {
    Cyclotomic v = pqp_evaluate(family_param(scene, params), int_param(params, "k"),
                                lambda_param(params));
    return Json{{"value", cyclotomic_to_json(v)}}.dump(2) + "\n";
  }
  if (command == "theta") {
    return theta_sample(family_param(scene, params), int_param(params, "k"),
                        window_param(scene, params))
        .to_csv();
  }
  if (command == "pair") {
    const PiecewiseQP& m = family_param(scene, params);
    Int k = int_param(params, "k");
    const MultiPoly& phi = poly_param(scene, params);
    Cyclotomic v = params.contains("window")
                       ? theta_pair_poly(m, k, phi, window_param(scene, params))
                       : theta_pair_poly(m, k, phi);
    return Json{{"value", cyclotomic_to_json(v)}}.dump(2) + "\n";
  }
  if (command == "expand") {
    Expansion e = expand_with_diagnostics(family_param(scene, params),
                                          static_cast<long>(int_param(params, "N")));
    Json out = series_to_json(e.series);
    out["warnings"] = e.warnings;
    return out.dump(2) + "\n";
  }
  if (command == "push") {
    const PiecewiseQP& m = family_param(scene, params);
    const QuotientMap& pi = map_param(scene, params);
    if (params.contains("lambda")) {
      Cyclotomic v = push_eval(m, pi, int_param(params, "k"), lambda_param(params));
      return Json{{"value", cyclotomic_to_json(v)}}.dump(2) + "\n";
    }
    if (params.contains("window")) {
      return push_theta(m, pi, int_param(params, "k"), window_param(scene, params)).to_csv();
    }
    std::vector<Polyhedron> chambers;
    if (params.contains("chambers") && params["chambers"].is_array())
      for (const Json& c : params["chambers"]) chambers.push_back(polyhedron_from_json(c));
    else
      chambers = chambers_1d(m, pi);
    try {
      return pqp_to_json(push_reconstruct(m, pi, chambers)).dump(2) + "\n";
    } catch (const std::runtime_error& e) {
      throw VerificationFailure(e.what());
    }
  }
  if (command == "check") return run_check_suite(scene, params);
  if (command == "oracle") {
    const PiecewiseQP& m = family_param(scene, params);
    Int k = int_param(params, "k");
    const MultiPoly& phi = poly_param(scene, params);
    WindowBox w = window_param(scene, params);
    Cyclotomic oracle = oracle_theta_pair(m, k, phi, w);
    Cyclotomic lib = theta_pair_poly(m, k, phi, w);
    Json out;
    out["oracle"] = cyclotomic_to_json(oracle);
    out["library"] = cyclotomic_to_json(lib);
    out["agree"] = (oracle - lib).is_zero();
    std::string text = out.dump(2) + "\n";
    if (!(oracle - lib).is_zero()) throw VerificationFailure(text);
    return text;
  }
  throw std::invalid_argument("unknown command \"" + command + "\"");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact lattice point-mass families: sampling, pairing, expansion, pushforward"};
  app.require_subcommand(1);

  std::string scene_path, out_path;
  std::string m_name, pi_name, phi_name, window_text, lambda_text, suite, chambers_text;
  long long k_value = 0;
  long long n_value = -1;
  bool parallel = false;

  std::vector<CLI::App*> subs;
  for (const char* name : {"eval", "theta", "pair", "expand", "push", "check", "oracle"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--scene", scene_path, "scene JSON file")->required();
    sub->add_option("--out", out_path, "output file (default: stdout)");
    sub->add_option("--m", m_name, "family name");
    sub->add_option("--pi", pi_name, "quotient map name");
    sub->add_option("--phi", phi_name, "polynomial name");
    sub->add_option("--window", window_text, "window name or \"[a,b]x[c,d]\"");
    sub->add_option("--lambda", lambda_text, "lattice point \"a,b,...\"");
    sub->add_option("--k", k_value, "scale parameter k");
    sub->add_option("--N", n_value, "truncation order");
    sub->add_option("--suite", suite, "check suite name");
    sub->add_flag("--parallel", parallel, "run scene jobs concurrently");
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);
  std::string command = app.get_subcommands()[0]->get_name();

  std::ifstream in(scene_path);
  if (!in) {
    std::cerr << "error: cannot open scene file \"" << scene_path << "\"\n";
    return 1;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  SceneParse parsed = parse_scene(buffer.str());
  if (!parsed.ok()) {
    for (const SceneError& e : parsed.errors)
      std::cerr << "error at " << e.path << ": " << e.message << "\n";
    return 1;
  }
  const Scene& scene = *parsed.scene;

  // Flags override scene-job parameters; with explicit flags a single
  // implicit job is run, otherwise all scene jobs of this command.
  Json flags = Json::object();
  if (!m_name.empty()) flags["m"] = m_name;
  if (!pi_name.empty()) flags["pi"] = pi_name;
  if (!phi_name.empty()) flags["phi"] = phi_name;
  if (!window_text.empty()) flags["window"] = window_text;
  if (!lambda_text.empty()) flags["lambda"] = lambda_text;
  if (k_value != 0) flags["k"] = k_value;
  if (n_value >= 0) flags["N"] = n_value;
  if (!suite.empty()) flags["suite"] = suite;

  std::vector<Json> job_params;
  for (const Job& job : scene.jobs) {
    if (job.command != command) continue;
    Json merged = job.params;
    merged.update(flags);
    job_params.push_back(merged);
  }
  if (job_params.empty()) job_params.push_back(flags);

  int exit_code = 0;
  std::ostringstream collected;
  try {
    if (parallel && job_params.size() > 1) {
      std::vector<std::future<std::string>> futures;
      for (const Json& params : job_params)
        futures.push_back(std::async(std::launch::async, [&scene, command, params] {
          return run_job(scene, command, params);
        }));
      for (auto& f : futures) collected << f.get();
    } else {
      for (const Json& params : job_params) collected << run_job(scene, command, params);
    }
  } catch (const VerificationFailure& e) {
    std::cerr << e.what();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  if (out_path.empty()) {
    std::cout << collected.str();
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot write \"" << out_path << "\"\n";
      return 1;
    }
    out << collected.str();
  }
  return exit_code;
}
