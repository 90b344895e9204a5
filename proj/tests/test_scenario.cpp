#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "photonsteer/cli.hpp"
#include "photonsteer/scenario.hpp"

using namespace photonsteer;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fs::path> scn_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".scn") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

// First line of a negative file: "# expect: parse L:C" or "# expect: semantic L".
struct Expectation {
  std::string kind;
  std::size_t line = 0;
  std::size_t column = 0;
};

Expectation read_expectation(const std::string& text) {
  std::istringstream in(text.substr(0, text.find('\n')));
  std::string hash, tag;
  Expectation e;
  in >> hash >> tag >> e.kind;
  std::string pos;
  in >> pos;
  const auto colon = pos.find(':');
  e.line = std::stoul(pos.substr(0, colon));
  if (colon != std::string::npos) e.column = std::stoul(pos.substr(colon + 1));
  return e;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("the minimal steering text parses to the source circuit") {
  const Scenario s =
      parse_scenario("source heralded H\nelement hwp theta=22.5\nelement pbs\nmeasure alice basis=HV\ntrials 100000\nseed 42");
  REQUIRE(s.source.has_value());
  CHECK(s.source->pol == "H");
  CHECK(s.source->path == "a");
  REQUIRE(s.elements.size() == 2);
  CHECK(s.elements[0].element.kind == ElementKind::HWP);
  CHECK(s.elements[0].element.angle == 22.5);
  CHECK(s.elements[1].element.kind == ElementKind::PBS);
  CHECK(s.measure_basis == "HV");
  CHECK(s.trials == 100000u);
  CHECK(s.seed == 42u);
  CHECK(s.run.kind == RunKind::Circuit);

  const LabeledState psi = propagate_unitary(scenario_circuit(s));
  CHECK((psi.amps - build_fig2_state().amps).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("a malformed number is reported at the value token") {
  try {
    parse_scenario("element hwp theta=abc");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
    CHECK(e.column == 19);
    CHECK(e.expected == std::vector<std::string>{"number"});
  }
}

TEST_CASE("trials and seed on the run line") {
  const Scenario s = parse_scenario("run ifm variant=absorber trials=100000 seed=7");
  CHECK(s.run.kind == RunKind::Ifm);
  CHECK(s.run.variant == MzVariant::absorber());
  CHECK(s.trials == 100000u);
  CHECK(s.seed == 7u);
  CHECK_FALSE(s.source.has_value());
}

TEST_CASE("comments, blank lines and spacing are ignored") {
  const Scenario a = parse_scenario("# header\n\n  run   ifm variant=empty   # trailing\nseed 3\n");
  const Scenario b = parse_scenario("run ifm variant=empty\nseed 3");
  CHECK(a == b);
}

TEST_CASE("unknown keywords list the accepted set") {
  try {
    parse_scenario("seed 1\nbogus x=1");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.column == 1);
    CHECK(std::find(e.expected.begin(), e.expected.end(), "element") != e.expected.end());
    CHECK(std::find(e.expected.begin(), e.expected.end(), "trials") != e.expected.end());
  }
}

TEST_CASE("defaults and reserved values") {
  CHECK(default_trials(RunKind::Ifm) == 100000);
  CHECK(default_trials(RunKind::Steering) == 100000);
  CHECK(default_trials(RunKind::Circuit) == 1000);
  CHECK(needs_seed(parse_scenario_syntax("run ifm variant=empty")));
  CHECK_FALSE(needs_seed(parse_scenario_syntax("run sg-sweep")));
  CHECK_FALSE(needs_seed(parse_scenario_syntax("source heralded H\nelement pbs")));
  CHECK(needs_seed(parse_scenario_syntax("source heralded H\nmeasure alice basis=HV")));
}

TEST_CASE("LHS lines become an ensemble on Bob's qubit") {
  const Scenario s = parse_scenario(slurp(fs::path(PHOTONSTEER_CORPUS_DIR) / "lhs-adversary.scn"));
  const LhsEnsemble e = scenario_ensemble(s);
  REQUIRE(e.size() == 4);
  CHECK(e[0].weight == 0.25);
  CHECK(e[0].responses == std::vector<std::size_t>{0, 0});
  CHECK(e[3].responses == std::vector<std::size_t>{1, 1});
  CHECK(purity(e[0].bob_state) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("round trip over the corpus") {
  const auto files = scn_files(PHOTONSTEER_CORPUS_DIR);
  CHECK(files.size() >= 20);
  for (const auto& f : files) {
    CAPTURE(f.filename().string());
    const Scenario s = parse_scenario(slurp(f));
    const std::string text = serialize_scenario(s);
    const Scenario back = parse_scenario(text);
    CHECK(back == s);
    CHECK(serialize_scenario(back) == text);
  }
}

TEST_CASE("negative corpus fails where each file says") {
  const auto files = scn_files(fs::path(PHOTONSTEER_CORPUS_DIR) / "negative");
  CHECK(files.size() >= 15);
  for (const auto& f : files) {
    CAPTURE(f.filename().string());
    const std::string text = slurp(f);
    const Expectation want = read_expectation(text);
    if (want.kind == "parse") {
      try {
        parse_scenario(text);
        FAIL("parsed without error");
      } catch (const ParseError& e) {
        CHECK(e.line == want.line);
        CHECK(e.column == want.column);
      }
    } else {
      REQUIRE(want.kind == "semantic");
      CHECK_NOTHROW(parse_scenario_syntax(text));
      try {
        parse_scenario(text);
        FAIL("accepted without error");
      } catch (const SemanticError& e) {
        CHECK(e.line == want.line);
      }
    }
  }
}

TEST_CASE("builtins serialize to their golden canonical form") {
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    const fs::path golden = fs::path(PHOTONSTEER_GOLDEN_DIR) / (name + ".scn");
    REQUIRE(fs::exists(golden));
    CHECK(serialize_scenario(parse_scenario(*builtin_text(name))) == slurp(golden));
  }
}

TEST_CASE("canonical text drops comments and orders lines") {
  const std::string text = serialize_scenario(parse_scenario("seed 5\n# c\nrun ifm variant=empty\nname x"));
  CHECK(text.find('#') == std::string::npos);
  CHECK(text.find("name x") < text.find("run ifm"));
  CHECK(text.find("run ifm") < text.find("seed 5"));
}

}  // TEST_SUITE
