#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "loopagree/cli.hpp"

using namespace loopagree;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path tmp_dir() {
  fs::path p = fs::temp_directory_path() / "loopagree_tests";
  fs::create_directories(p);
  return p;
}

std::string tmp_file(const std::string& name) { return (tmp_dir() / name).string(); }

}  // namespace

TEST_CASE("complex JSON stores maximal simplexes and loads the closure", "[io]") {
  Complex c = build({{"0", "1", "2"}});
  io::ojson j = io::complex_to_json(c);
  REQUIRE(j.at("simplexes").size() == 1);  // just the triangle
  REQUIRE(io::complex_from_json(j) == c);

  Complex weird = build({{"a|b", "x,y{z}"}, {"a|b", "back\\slash"}});
  REQUIRE(io::complex_from_json(io::complex_to_json(weird)) == weird);

  std::string path = tmp_file("roundtrip_complex.json");
  io::save_complex(path, weird);
  REQUIRE(io::load_complex(path) == weird);
}

TEST_CASE("complex JSON parse errors", "[io]") {
  REQUIRE_THROWS_AS(io::complex_from_json(io::parse_text("[]", "t")), Error);
  REQUIRE_THROWS_AS(io::complex_from_json(io::parse_text("{}", "t")), Error);
  REQUIRE_THROWS_AS(io::complex_from_json(io::parse_text("{\"simplexes\": 3}", "t")), Error);
  REQUIRE_THROWS_AS(io::complex_from_json(io::parse_text("{\"simplexes\": [[1]]}", "t")), Error);
  try {
    io::parse_text("{nope", "somewhere");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    REQUIRE(e.code() == Errc::parse_error);
    REQUIRE(std::string(e.what()).find("somewhere") != std::string::npos);
  }
  REQUIRE_THROWS_AS(io::read_file(tmp_file("does_not_exist.json")), Error);
}

TEST_CASE("task JSON round trip", "[io]") {
  LoopTask torus = catalog("torus");
  io::ojson j = io::task_to_json(torus);
  REQUIRE(j.at("name") == "torus");
  REQUIRE(j.at("abelian_certified") == true);
  LoopTask back = io::task_from_json(j);
  REQUIRE(back == torus);
  REQUIRE(back.abelian_certified);
  REQUIRE(back.name == torus.name);

  LoopTask anon = torus;
  anon.name.reset();
  anon.abelian_certified = false;
  io::ojson j2 = io::task_to_json(anon);
  REQUIRE_FALSE(j2.contains("name"));
  REQUIRE_FALSE(j2.contains("abelian_certified"));
  REQUIRE_FALSE(io::task_from_json(j2).abelian_certified);

  std::string path = tmp_file("roundtrip_task.json");
  io::save_task(path, torus);
  REQUIRE(io::load_task(path) == torus);
}

TEST_CASE("loop JSON validation", "[io]") {
  Complex h = catalog("set-agreement").output;
  io::ojson good = io::loop_to_json(catalog("set-agreement").loop);
  REQUIRE(io::loop_from_json(h, good) == catalog("set-agreement").loop);

  io::ojson bad = good;
  bad["v"] = io::ojson::array({"0", "1"});
  REQUIRE_THROWS_AS(io::loop_from_json(h, bad), Error);
  bad = good;
  bad.erase("p12");
  REQUIRE_THROWS_AS(io::loop_from_json(h, bad), Error);
  bad = good;
  bad["p01"] = io::ojson::array({"0", 1});
  REQUIRE_THROWS_AS(io::loop_from_json(h, bad), Error);
  bad = good;
  bad["p01"] = io::ojson::array({"0", "2"});  // wrong endpoint
  REQUIRE_THROWS_AS(io::loop_from_json(h, bad), Error);
}

TEST_CASE("decision map JSON", "[io]") {
  io::ojson j = io::parse_text(R"({"N": 1, "assignment": {"{0}": "0"}})", "t");
  io::ParsedDecisionMap p = io::decision_map_from_json(j);
  REQUIRE(p.N == 1);
  REQUIRE(p.assignment.at("{0}") == "0");

  REQUIRE_THROWS_AS(io::decision_map_from_json(io::parse_text(R"({"assignment": {}})", "t")),
                    Error);
  REQUIRE_THROWS_AS(
      io::decision_map_from_json(io::parse_text(R"({"N": -1, "assignment": {}})", "t")), Error);
  REQUIRE_THROWS_AS(io::decision_map_from_json(io::parse_text(R"({"N": 0, "assignment": 3})", "t")),
                    Error);
  REQUIRE_THROWS_AS(
      io::decision_map_from_json(io::parse_text(R"({"N": 0, "assignment": {"a": 3}})", "t")),
      Error);

  DecisionMap d = make_decision_map(0, identity_map(catalog("point").output));
  io::ojson out = io::decision_map_to_json(d);
  REQUIRE(out.at("N") == 0);
  REQUIRE(out.at("assignment").at("0") == "0");
}

TEST_CASE("realize_decision_map", "[io]") {
  Complex h = catalog("set-agreement").output;
  io::ParsedDecisionMap identity{0, {{"0", "0"}, {"1", "1"}, {"2", "2"}}};
  DecisionMap d = io::realize_decision_map(identity, h, h);
  REQUIRE(d.map.source == h);

  io::ParsedDecisionMap stray{0, {{"0", "0"}, {"1", "1"}, {"2", "2"}, {"9", "0"}}};
  try {
    io::realize_decision_map(stray, h, h);
    FAIL("expected SourceMismatch");
  } catch (const Error& e) {
    REQUIRE(e.code() == Errc::source_mismatch);
  }

  io::ParsedDecisionMap partial{0, {{"0", "0"}}};
  try {
    io::realize_decision_map(partial, h, h);
    FAIL("expected PartialAssignment");
  } catch (const Error& e) {
    REQUIRE(e.code() == Errc::partial_assignment);
  }

  io::ParsedDecisionMap off{0, {{"0", "0"}, {"1", "1"}, {"2", "x"}}};
  try {
    io::realize_decision_map(off, h, h);
    FAIL("expected NotSimplicial");
  } catch (const Error& e) {
    REQUIRE(e.code() == Errc::not_simplicial);
  }
}

TEST_CASE("cli signature text output is frozen", "[cli]") {
  CliResult r = run({"signature", "@set-agreement"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out == "factors: [] free_rank: 1 element: [1]\nelement-reversed: [-1]\n");
  REQUIRE(r.err.empty());

  REQUIRE(run({"signature", "@torus"}).out ==
          "factors: [] free_rank: 2 element: [0,1]\nelement-reversed: [0,-1]\n");
  REQUIRE(run({"signature", "@projective-plane"}).out ==
          "factors: [2] free_rank: 0 element: [1]\nelement-reversed: [1]\n");
  REQUIRE(run({"signature", "@point"}).out ==
          "factors: [] free_rank: 0 element: []\nelement-reversed: []\n");
  REQUIRE(run({"signature", "@simplex-agreement"}).out ==
          "factors: [] free_rank: 0 element: []\nelement-reversed: []\n");

  // Byte-for-byte deterministic across runs.
  REQUIRE(run({"signature", "@torus"}).out == run({"signature", "@torus"}).out);
}

TEST_CASE("cli signature json output", "[cli]") {
  CliResult r = run({"--format", "json", "signature", "@projective-plane"});
  REQUIRE(r.code == 0);
  io::ojson j = io::parse_text(r.out, "cli");
  REQUIRE(j.at("command") == "signature");
  REQUIRE(j.at("name") == "projective-plane");
  REQUIRE(j.at("factors") == io::ojson::array({2}));
  REQUIRE(j.at("free_rank") == 0);
  REQUIRE(j.at("element") == io::ojson::array({1}));
  REQUIRE(j.at("element_reversed") == io::ojson::array({1}));
  // Insertion order is preserved in the document.
  REQUIRE(r.out.find("\"command\"") < r.out.find("\"name\""));
  REQUIRE(r.out.find("\"name\"") < r.out.find("\"factors\""));

  // --format may come after the subcommand as well.
  CliResult r2 = run({"signature", "@projective-plane", "--format", "json"});
  REQUIRE(r2.out == r.out);
}

TEST_CASE("cli catalog", "[cli]") {
  CliResult r = run({"catalog"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out == "set-agreement\nsimplex-agreement\ntorus\nprojective-plane\npoint\n");

  CliResult e = run({"catalog", "torus"});
  REQUIRE(e.code == 0);
  LoopTask back = io::task_from_json(io::parse_text(e.out, "cli"));
  REQUIRE(back == catalog("torus"));
  REQUIRE(back.abelian_certified);

  io::ojson names = io::parse_text(run({"--format", "json", "catalog"}).out, "cli");
  REQUIRE(names.at("names").size() == 5);

  REQUIRE(run({"catalog", "klein-bottle"}).code == 3);
}

TEST_CASE("cli compose writes a loadable task", "[cli]") {
  std::string path = tmp_file("compose_set_set.json");
  CliResult r = run({"compose", "@set-agreement", "@set-agreement", path});
  REQUIRE(r.code == 0);
  REQUIRE(r.out == "vertices: 9 simplexes: 81 loop-length: 12\nwrote: " + path + "\n");

  LoopTask loaded = io::load_task(path);
  LoopTask direct = compose(catalog("set-agreement"), catalog("set-agreement"));
  REQUIRE(loaded == direct);
  REQUIRE(loaded.name == "set-agreement*set-agreement");
  REQUIRE(loaded.abelian_certified);

  CliResult j = run({"--format", "json", "compose", "@torus", "@point", path});
  io::ojson jj = io::parse_text(j.out, "cli");
  REQUIRE(jj.at("vertices") == 7);
  REQUIRE(jj.at("simplexes") == 42);
  REQUIRE(jj.at("out") == path);
}

TEST_CASE("cli check verdicts and exit codes", "[cli]") {
  CliResult yes = run({"check", "@set-agreement", "--target", "@torus"});
  REQUIRE(yes.code == 0);
  REQUIRE(yes.out == "IMPLEMENTS\nwitness: [[0],[1]]\n");

  CliResult joint = run({"check", "@set-agreement", "@set-agreement", "-t", "@set-agreement"});
  REQUIRE(joint.code == 0);
  REQUIRE(joint.out == "IMPLEMENTS\nwitness: [[0,1]]\n");

  CliResult no = run({"check", "@simplex-agreement", "--target", "@set-agreement"});
  REQUIRE(no.code == 1);
  REQUIRE(no.out.find("NOT_IMPLEMENTS\nobstruction: ") == 0);

  // Stripping the certification flag downgrades the verdict to UNKNOWN.
  LoopTask plain = catalog("set-agreement");
  plain.abelian_certified = false;
  std::string path = tmp_file("uncertified_set.json");
  io::save_task(path, plain);
  CliResult unk = run({"check", path, "--target", "@set-agreement"});
  REQUIRE(unk.code == 2);
  REQUIRE(unk.out.find("UNKNOWN\ndetail: ") == 0);

  io::ojson j = io::parse_text(run({"--format", "json", "check", "@set-agreement", "-t", "@torus"}).out,
                               "cli");
  REQUIRE(j.at("verdict") == "IMPLEMENTS");
  REQUIRE(j.at("witness") == io::ojson::array({io::ojson::array({0}), io::ojson::array({1})}));
  io::ojson jn = io::parse_text(
      run({"--format", "json", "check", "@simplex-agreement", "-t", "@set-agreement"}).out, "cli");
  REQUIRE(jn.at("verdict") == "NOT_IMPLEMENTS");
  REQUIRE(jn.at("witness").is_null());
}

TEST_CASE("cli verify", "[cli]") {
  std::string id_map = tmp_file("verify_identity.json");
  io::write_file(id_map, io::dump(io::decision_map_to_json(
                             make_decision_map(0, identity_map(catalog("set-agreement").output)))));
  CliResult pass = run({"verify", "@set-agreement", "@set-agreement", id_map});
  REQUIRE(pass.code == 0);
  REQUIRE(pass.out == "PASS\n");

  std::string const_map = tmp_file("verify_constant.json");
  io::write_file(const_map,
                 R"({"N": 0, "assignment": {"0": "0", "1": "0", "2": "0"}})" "\n");
  CliResult fail = run({"verify", "@set-agreement", "@set-agreement", const_map});
  REQUIRE(fail.code == 1);
  REQUIRE(fail.out == "FAIL\nviolation: sigma={1} simplex=[\"1\"]\n");

  io::ojson j = io::parse_text(
      run({"--format", "json", "verify", "@set-agreement", "@set-agreement", const_map}).out, "cli");
  REQUIRE(j.at("result") == "FAIL");
  REQUIRE(j.at("sigma") == "{1}");
  REQUIRE(j.at("simplex") == io::ojson::array({"1"}));
}

TEST_CASE("cli verify --joint", "[cli]") {
  std::string composed = tmp_file("joint_composed.json");
  REQUIRE(run({"compose", "@set-agreement", "@set-agreement", composed}).code == 0);

  LoopTask c = compose(catalog("set-agreement"), catalog("set-agreement"));
  std::string proj = tmp_file("joint_projection.json");
  io::write_file(proj, io::dump(io::decision_map_to_json(projection_map(c, 1))));

  CliResult pass = run({"verify", composed, "@set-agreement", proj, "--joint", "@set-agreement",
                        "@set-agreement"});
  REQUIRE(pass.code == 0);
  REQUIRE(pass.out == "PASS\n");

  // Source output must match the declared joint product.
  CliResult bad = run({"verify", "@set-agreement", "@set-agreement", proj, "--joint",
                       "@set-agreement", "@set-agreement"});
  REQUIRE(bad.code == 3);
  REQUIRE(bad.err.find("SourceMismatch") != std::string::npos);
}

TEST_CASE("cli bary", "[cli]") {
  std::string out_path = tmp_file("bary_simplex.json");
  CliResult r = run({"bary", "@simplex-agreement", "-n", "1", "-o", out_path});
  REQUIRE(r.code == 0);
  REQUIRE(r.out == "vertices: 7 simplexes: 25\nwrote: " + out_path + "\n");
  REQUIRE(io::load_complex(out_path) == barycentric(catalog("simplex-agreement").output));

  CliResult piped = run({"bary", "@simplex-agreement", "-n", "1"});
  REQUIRE(piped.code == 0);
  REQUIRE(io::complex_from_json(io::parse_text(piped.out, "cli")) ==
          barycentric(catalog("simplex-agreement").output));
  REQUIRE(piped.err == "vertices: 7 simplexes: 25\n");

  CliResult twice = run({"bary", "@simplex-agreement", "-n", "2", "-o", out_path});
  REQUIRE(twice.out == "vertices: 25 simplexes: 121\nwrote: " + out_path + "\n");

  io::ojson j = io::parse_text(run({"--format", "json", "bary", "@simplex-agreement", "-n", "1"}).out,
                               "cli");
  REQUIRE(j.at("vertices") == 7);
  REQUIRE(j.at("complex").is_object());

  // A plain complex file is also accepted.
  std::string cpath = tmp_file("bary_input_complex.json");
  io::save_complex(cpath, build({{"a", "b"}}));
  CliResult file = run({"bary", cpath, "-n", "1"});
  REQUIRE(io::complex_from_json(io::parse_text(file.out, "cli")) ==
          barycentric(build({{"a", "b"}})));
}

TEST_CASE("cli usage errors exit with 3", "[cli]") {
  REQUIRE(run({}).code == 3);
  REQUIRE(run({"frobnicate"}).code == 3);
  REQUIRE(run({"signature"}).code == 3);                      // missing task
  REQUIRE(run({"signature", "@no-such-task"}).code == 3);
  REQUIRE(run({"signature", tmp_file("missing.json")}).code == 3);
  REQUIRE(run({"--format", "yaml", "signature", "@point"}).code == 3);
  REQUIRE(run({"bary", "@point", "-n", "0"}).code == 3);      // n must be positive
  REQUIRE(run({"check", "@point"}).code == 3);                // target is required
  CliResult r = run({"signature", "@no-such-task"});
  REQUIRE(r.err.find("error: ") == 0);
  REQUIRE(r.out.empty());
}

TEST_CASE("cli help", "[cli]") {
  CliResult r = run({"--help"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("signature") != std::string::npos);
  REQUIRE(r.out.find("compose") != std::string::npos);
  REQUIRE(run({"signature", "--help"}).code == 0);
}
