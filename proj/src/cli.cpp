#include "photonsteer/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "photonsteer/builtin_scenarios.hpp"
#include "photonsteer/report.hpp"
#include "photonsteer/scenario.hpp"

namespace photonsteer {

namespace {

struct Target {
  std::string text;
  std::string label;
};

Target load_target(const std::string& target) {
  if (std::filesystem::is_regular_file(target)) {
    std::ifstream f(target, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    if (!f && !f.eof()) throw IoError("cannot read '" + target + "'");
    return {ss.str(), target};
  }
  if (auto text = builtin_text(target)) return {*text, "builtin " + target};
  throw IoError("no scenario file or builtin named '" + target + "'");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("failed writing '" + path + "'");
}

template <class Body>
int guarded(std::ostream& err, Body body) {
  try {
    body();
    return kExitOk;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const SemanticError& e) {
    err << "semantic error: " << e.what() << '\n';
    return kExitSemantic;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : builtin::kScenarios) out.emplace_back(name);
  return out;
}

std::optional<std::string> builtin_text(const std::string& name) {
  for (const auto& [n, text] : builtin::kScenarios)
    if (name == n) return std::string(text);
  return std::nullopt;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-photon steering, interaction-free measurement and Stern-Gerlach simulator", "photonsteer"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario file or builtin and emit its report");
  std::string run_target;
  std::optional<std::uint64_t> seed, trials;
  std::string out_path, format, events_path;
  run->add_option("scenario", run_target, "Scenario file or builtin name")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--trials", trials, "Override the number of trials");
  run->add_option("--out", out_path, "Write the report here instead of standard output");
  run->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--events", events_path, "Write per-trial events as JSON lines (steering runs)");

  auto* validate = app.add_subcommand("validate", "Parse and check a scenario without running it");
  std::string validate_target;
  validate->add_option("scenario", validate_target, "Scenario file or builtin name")->required();

  auto* list = app.add_subcommand("list-builtins", "Print the names of the builtin scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  if (list->parsed()) {
    for (const auto& n : builtin_names()) out << n << '\n';
    return kExitOk;
  }

  if (validate->parsed()) {
    return guarded(err, [&] {
      const Target t = load_target(validate_target);
      const Scenario s = parse_scenario(t.text);
      out << "ok " << t.label << '\n';
    });
  }

  return guarded(err, [&] {
    const Target t = load_target(run_target);
    Scenario s = parse_scenario_syntax(t.text);
    if (seed) s.seed = *seed;
    if (trials) s.trials = *trials;
    if (!format.empty()) s.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
    check_semantics(s);
    const Report r = run_scenario(s, {!events_path.empty()});
    if (out_path.empty()) {
      out << (s.format == OutputFormat::Csv ? report_csv(r) : report_json(r));
    } else {
      emit_report(r, s.format, out_path);
    }
    if (!events_path.empty()) write_file(events_path, events_jsonl(r));
  });
}

}  // namespace photonsteer
