#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "photonsteer/cli.hpp"
#include "photonsteer/report.hpp"

using namespace photonsteer;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "photonsteer");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string scratch(const std::string& name) { return (fs::path(PHOTONSTEER_SCRATCH_DIR) / name).string(); }

std::string write_scratch(const std::string& name, const std::string& text) {
  const std::string p = scratch(name);
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_SUITE("report") {

TEST_CASE("FNV-1a 64 reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("canonical JSON sorts keys and fixes the float format") {
  const json j = {{"zeta", 1}, {"alpha", 0.5}, {"mid", {{"b", true}, {"a", nullptr}}}, {"list", {1.0, -2.25e-7}}};
  CHECK(canonical_json(j) ==
        R"({"alpha":5.000000000000e-01,"list":[1.000000000000e+00,-2.250000000000e-07],"mid":{"a":null,"b":true},"zeta":1})");
  CHECK_THROWS(canonical_json(json{{"x", std::numeric_limits<double>::quiet_NaN()}}));
  CHECK_THROWS(canonical_json(json{{"x", std::numeric_limits<double>::infinity()}}));
}

TEST_CASE("steering report carries the source amplitudes and assemblage") {
  const Scenario s = parse_scenario(*builtin_text("fig2-steering"));
  const Report r = run_scenario(s);
  const json& j = r.json;
  CHECK(j["schema"] == kReportSchema);
  CHECK(j["seed"] == 42);
  CHECK(j["trials"] == 100000);
  CHECK(j["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);

  const auto amps = j["results"]["state"]["amplitudes"];
  const LabeledState direct = build_fig2_state();
  REQUIRE(amps.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(amps[i][0].get<double>() == doctest::Approx(direct.amps[i].real()).epsilon(1e-15));
    CHECK(amps[i][1].get<double>() == doctest::Approx(direct.amps[i].imag()).epsilon(1e-15));
  }
  CHECK(j["results"]["analysis"]["steering"]["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(j["results"]["session"]["violation"] == true);
  CHECK(j["results"]["analysis"]["assemblage"]["settings"].size() == 2);
}

TEST_CASE("IFM report matches the protocol module") {
  const Report r = run_scenario(parse_scenario(*builtin_text("ifm-absorber")));
  const IfmCounts direct = run_ifm(100000, MzVariant::absorber(), 7);
  const json& c = r.json["results"]["counts"];
  CHECK(c["d1"] == direct.d1);
  CHECK(c["d2"] == direct.d2);
  CHECK(c["absorbed"] == direct.absorbed);
}

TEST_CASE("sweep CSV matches sg_chsh_curve") {
  const Scenario s = parse_scenario(*builtin_text("sg-sweep"));
  const Report r = run_scenario(s);
  const std::string csv = report_csv(r);
  CHECK(csv.rfind(std::string(kCurveCsvHeader) + "\n", 0) == 0);
  CHECK(count_lines(csv) == 51);

  std::vector<double> times;
  for (int i = 0; i < 50; ++i) times.push_back(4.0 * i / 49.0);
  const auto direct = sg_chsh_curve(SGParams{}, times);
  REQUIRE(r.curve.size() == direct.size());
  for (std::size_t i = 0; i < direct.size(); ++i) {
    CHECK(r.curve[i].t == doctest::Approx(direct[i].t).epsilon(1e-15));
    CHECK(r.curve[i].s_max == doctest::Approx(direct[i].s_max).epsilon(1e-12));
  }
}

TEST_CASE("every builtin gives byte-identical reports on repeat runs") {
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    const Scenario s = parse_scenario(*builtin_text(name));
    CHECK(report_json(run_scenario(s)) == report_json(run_scenario(s)));
  }
}

TEST_CASE("config hash follows the canonical text, not the formatting") {
  const Scenario a = parse_scenario("run ifm variant=empty\nseed 3  # x");
  const Scenario b = parse_scenario("seed 3\n\nrun   ifm variant=empty");
  CHECK(config_hash(a) == config_hash(b));
  const Scenario c = parse_scenario("run ifm variant=empty\nseed 4");
  CHECK(config_hash(a) != config_hash(c));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(serialize_scenario(a))));
  CHECK(config_hash(a) == std::string("fnv1a64:") + buf);
}

TEST_CASE("run writes files and emits identical bytes twice") {
  const std::string p1 = scratch("rep1.json"), p2 = scratch("rep2.json");
  REQUIRE(cli({"run", "ifm-absorber", "--trials", "2000", "--out", p1}).code == kExitOk);
  REQUIRE(cli({"run", "ifm-absorber", "--trials", "2000", "--out", p2}).code == kExitOk);
  CHECK(slurp(p1) == slurp(p2));
  const json j = json::parse(slurp(p1));
  CHECK(j["trials"] == 2000);

  const CliResult seeded = cli({"run", "ifm-absorber", "--trials", "2000", "--seed", "8"});
  CHECK(seeded.code == kExitOk);
  CHECK(seeded.out != slurp(p1));
}

TEST_CASE("exit code contract") {
  CHECK(cli({"list-builtins"}).code == kExitOk);
  CHECK(cli({"validate", "fig2-steering"}).code == kExitOk);

  const CliResult parse = cli({"validate", write_scratch("bad_parse.scn", "element hwp theta=abc\n")});
  CHECK(parse.code == kExitParse);
  CHECK(parse.err.find("line 1, column 19") != std::string::npos);

  const CliResult sem = cli({"run", write_scratch("bad_sem.scn", "run ifm variant=absorber\n")});
  CHECK(sem.code == kExitSemantic);
  CHECK(sem.err.find("seed") != std::string::npos);

  CHECK(cli({"run", "no-such-scenario-file"}).code == kExitRuntime);
  CHECK(cli({"run", "ifm-absorber", "--trials", "10", "--out", "/nonexistent-dir/x/report.json"}).code == kExitRuntime);
  CHECK(cli({"run", "ifm-absorber", "--format", "xml"}).code == kExitParse);
  CHECK(cli({"frobnicate"}).code == kExitParse);

  const std::string causal = write_scratch("causal.scn",
                                           "source heralded H\nelement hwp theta=22.5 path=a\nelement pbs\n"
                                           "layout fiber_delay=0\nrun steering seed=1 trials=10\n");
  const CliResult rt = cli({"run", causal});
  CHECK(rt.code == kExitRuntime);
  CHECK(rt.err.find("trial 0") != std::string::npos);
}

TEST_CASE("seed can be supplied on the command line") {
  const std::string p = write_scratch("noseed.scn", "run ifm variant=absorber trials=100\n");
  CHECK(cli({"run", p}).code == kExitSemantic);
  CHECK(cli({"run", p, "--seed", "5"}).code == kExitOk);
}

TEST_CASE("event logs hold four events per trial") {
  const std::string ev = scratch("events.jsonl");
  const CliResult r = cli({"run", "fig2-steering", "--trials", "25", "--events", ev});
  REQUIRE(r.code == kExitOk);
  const std::string text = slurp(ev);
  CHECK(count_lines(text) == 100);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  const json first = json::parse(line);
  CHECK(first["kind"] == "trigger_heralded");
  CHECK(first.contains("t"));
  CHECK(first.contains("x"));
  CHECK(first["data"].is_object());
}

TEST_CASE("format flag switches a JSON scenario to CSV") {
  const CliResult r = cli({"run", "ifm-absorber", "--trials", "100", "--format", "csv"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.rfind("key,value\n", 0) == 0);
}

}  // TEST_SUITE
