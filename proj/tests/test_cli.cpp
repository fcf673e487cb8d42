#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <asq/scene.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <limits.h>
#include <sys/wait.h>
#include <unistd.h>

using namespace asq;

namespace {

PiecewiseQP m_unit() { return PiecewiseQP::indicator(Polyhedron::box({Rat(0)}, {Rat(1)})); }

PiecewiseQP fancy_family() {
  // Characters, twists and a fractional shift, to exercise serialization.
  QuasiPolynomial q(2);
  MultiPoly p(3);
  p.add_term({1, 0, 2}, Cyclotomic(Rat(3, 7)));
  p.add_term({0, 1, 0}, Cyclotomic::from_turn(Rat(1, 3)));
  q.add_term(Rat(1, 2), Character({Rat(1, 2), Rat(2, 3)}), p);
  PiecewiseQP m(2);
  m.add_piece(q, Polyhedron::box({Rat(-1), Rat(0)}, {Rat(1), Rat(2)}), {Rat(1, 2), Rat(0)});
  return m;
}

std::string simplex_scene_text() {
  PiecewiseQP m = PiecewiseQP::indicator(
      Polyhedron::from_points(2, {{Rat(0), Rat(0)}, {Rat(1), Rat(0)}, {Rat(0), Rat(1)}}));
  QuotientMap pi = QuotientMap::from_matrix({{Rat(1), Rat(1)}});
  Json doc;
  doc["dim"] = 2;
  doc["definitions"]["m"] = Json{{"type", "family"}, {"value", pqp_to_json(m)}};
  doc["definitions"]["pi"] = Json{{"type", "map"}, {"value", quotient_map_to_json(pi)}};
  Json phi = multipoly_to_json(MultiPoly::variable(2, 0));
  doc["definitions"]["phi"] = Json{{"type", "polynomial"}, {"value", phi}};
  doc["jobs"] = Json::array();
  for (int k : {3, 6, 12})
    doc["jobs"].push_back(Json{{"command", "theta"}, {"k", k}, {"window", "[-1,2]x[-1,2]"}});
  return doc.dump();
}

std::string interval_scene_text() {
  Json doc;
  doc["dim"] = 1;
  doc["definitions"]["m1"] = Json{{"type", "family"}, {"value", pqp_to_json(m_unit())}};
  Json phi = multipoly_to_json(MultiPoly::variable(1, 0) * MultiPoly::variable(1, 0));
  doc["definitions"]["x2"] = Json{{"type", "polynomial"}, {"value", phi}};
  doc["jobs"] = Json::array({Json{{"command", "expand"}, {"m", "m1"}, {"N", 3}}});
  return doc.dump();
}

std::string write_temp(const std::string& text, const std::string& name) {
  std::string path = "/tmp/" + name;
  std::ofstream f(path);
  f << text;
  return path;
}

std::string cli_path() {
  char buf[PATH_MAX];
  ssize_t n = readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  REQUIRE(n > 0);
  buf[n] = 0;
  std::string path(buf);
  return path.substr(0, path.find_last_of('/')) + "/asq";
}

struct CliResult {
  int code;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  std::string out_file = "/tmp/asq_cli_out.txt";
  std::string cmd = cli_path() + " " + args + " > " + out_file + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  std::ifstream f(out_file);
  std::stringstream ss;
  ss << f.rdbuf();
  return {WEXITSTATUS(status), ss.str()};
}

}  // namespace

TEST_CASE("serialization round-trips") {
  PiecewiseQP m = fancy_family();
  Json j1 = pqp_to_json(m);
  PiecewiseQP back = pqp_from_json(j1);
  CHECK(pqp_to_json(back).dump() == j1.dump());
  CHECK(pqp_is_zero(back - m));

  QuotientMap pi = QuotientMap::from_matrix({{Rat(1, 2), Rat(1)}});
  Json j2 = quotient_map_to_json(pi);
  CHECK(quotient_map_to_json(quotient_map_from_json(j2)).dump() == j2.dump());

  Cyclotomic c = Cyclotomic::from_turn(Rat(1, 5)) + Cyclotomic(Rat(2, 3));
  Json j3 = cyclotomic_to_json(c);
  CHECK((cyclotomic_from_json(j3) - c).is_zero());
  CHECK(cyclotomic_to_json(cyclotomic_from_json(j3)).dump() == j3.dump());

  WindowBox w = WindowBox::closed({Rat(-1, 2)}, {Rat(3)});
  w.hi_open[0] = true;
  Json j4 = window_to_json(w);
  CHECK(window_to_json(window_from_json(j4)).dump() == j4.dump());

  // Mismatched declared image basis is rejected.
  Json bad = j2;
  bad["image_basis"][0][0] = "7";
  CHECK_THROWS_AS(quotient_map_from_json(bad), std::invalid_argument);
}

TEST_CASE("scene parsing is total with located errors") {
  SceneParse ok = parse_scene(interval_scene_text());
  REQUIRE(ok.ok());
  CHECK(ok.scene->dim == 1);
  CHECK(ok.scene->families.count("m1") == 1);
  CHECK(ok.scene->jobs.size() == 1);
  CHECK(ok.scene->jobs[0].command == "expand");

  SceneParse fig = parse_scene(simplex_scene_text());
  REQUIRE(fig.ok());
  CHECK(fig.scene->jobs.size() == 3);

  SceneParse bad_json = parse_scene("{nope");
  CHECK(!bad_json.ok());
  REQUIRE(!bad_json.errors.empty());
  CHECK(bad_json.errors[0].path == "/");

  // Malformed rational inside a definition, with a located error.
  Json doc = Json::parse(interval_scene_text());
  doc["definitions"]["m1"]["value"]["pieces"][0]["shift"][0] = "1/0";
  SceneParse bad_rat = parse_scene(doc.dump());
  CHECK(!bad_rat.ok());
  REQUIRE(!bad_rat.errors.empty());
  CHECK(bad_rat.errors[0].path == "/definitions/m1/value");
  CHECK(bad_rat.errors[0].message.find("malformed rational") != std::string::npos);

  Json unknown = Json::parse(interval_scene_text());
  unknown["extra"] = 1;
  SceneParse bad_field = parse_scene(unknown.dump());
  CHECK(!bad_field.ok());
  CHECK(bad_field.errors[0].path == "/extra");
  CHECK(bad_field.errors[0].message == "unknown field");

  Json dangling = Json::parse(interval_scene_text());
  dangling["jobs"][0]["m"] = "nope";
  SceneParse bad_ref = parse_scene(dangling.dump());
  CHECK(!bad_ref.ok());
  CHECK(bad_ref.errors[0].path == "/jobs/0/m");
  CHECK(bad_ref.errors[0].message == "unresolved reference");
}

TEST_CASE("command line runs end to end") {
  std::string simplex = write_temp(simplex_scene_text(), "asq_scene_simplex.json");
  std::string interval = write_temp(interval_scene_text(), "asq_scene_interval.json");

  // Point-mass CSV: the k=3 simplex grid has 10 atoms (plus a header line).
  // The --k flag overrides all three theta jobs in the scene, so the same
  // 11-line block is emitted three times.
  CliResult theta = run_cli("theta --scene " + simplex + " --m m --k 3 --window [-1,2]x[-1,2]");
  CHECK(theta.code == 0);
  CHECK(std::count(theta.out.begin(), theta.out.end(), '\n') == 33);
  CHECK(theta.out.find("x0,x1,weight") == 0);
  // Without flag overrides the scene's own jobs run at k = 3, 6, 12, whose
  // dilated grids carry 10, 28 and 91 atoms.
  CliResult theta_all = run_cli("theta --scene " + simplex);
  CHECK(theta_all.code == 0);
  CHECK(std::count(theta_all.out.begin(), theta_all.out.end(), '\n') == 11 + 29 + 92);

  // Series JSON for the unit interval family.
  CliResult ex = run_cli("expand --scene " + interval + " --N 3");
  CHECK(ex.code == 0);
  Json series = Json::parse(ex.out, nullptr, false);
  REQUIRE(!series.is_discarded());
  CHECK(series["s"] == 1);
  CHECK(series["theta"].size() == 4);
  CHECK(series["warnings"].empty());

  CliResult ev = run_cli("eval --scene " + interval + " --m m1 --k 5 --lambda 3");
  CHECK(ev.code == 0);
  CHECK(Json::parse(ev.out)["value"] == "1");

  CliResult pr = run_cli("pair --scene " + interval + " --m m1 --k 7 --phi x2");
  CHECK(pr.code == 0);
  CHECK(Json::parse(pr.out)["value"] == "20/7");

  CliResult orc = run_cli("oracle --scene " + interval +
                          " --m m1 --k 7 --phi x2 --window [-1,2]");
  CHECK(orc.code == 0);
  CHECK(Json::parse(orc.out)["agree"] == true);

  CliResult chk = run_cli("check --scene " + interval);
  CHECK(chk.code == 0);
  CHECK(Json::parse(chk.out)["failures"].empty());

  // Pushforward reconstruction emits the pushed family as JSON.
  CliResult push = run_cli("push --scene " + simplex + " --m m --pi pi");
  CHECK(push.code == 0);
  PiecewiseQP pushed = pqp_from_json(Json::parse(push.out));
  CHECK(pqp_evaluate(pushed, 5, QVec{Rat(2)}).rational_value() == Rat(3));
  CHECK(pqp_evaluate(pushed, 5, QVec{Rat(7)}).is_zero());

  // Exit code 1: missing file, unparseable scene, domain errors.
  CHECK(run_cli("theta --scene /tmp/asq_no_such_scene.json --k 3 --window [-1,1]").code == 1);
  std::string broken = write_temp("{broken", "asq_scene_broken.json");
  CHECK(run_cli("check --scene " + broken).code == 1);
  CHECK(run_cli("eval --scene " + interval + " --m m1 --k 5").code == 1);

  // Exit code 2: verification failure (chambers missing part of the support).
  Json bad = Json::parse(simplex_scene_text());
  Json chamber;
  chamber["dim"] = 1;
  chamber["ineqs"] = Json::array({Json{{"a", Json::array({"1"})}, {"c", "0"}},
                                  Json{{"a", Json::array({"-1"})}, {"c", "-1/2"}}});
  bad["jobs"] = Json::array({Json{{"command", "push"},
                                  {"m", "m"},
                                  {"pi", "pi"},
                                  {"chambers", Json::array({chamber})}}});
  std::string bad_path = write_temp(bad.dump(), "asq_scene_badpush.json");
  CHECK(run_cli("push --scene " + bad_path).code == 2);
}
