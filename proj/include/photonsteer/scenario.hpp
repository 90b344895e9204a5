#pragma once

// Line-oriented scenario files.
//
//   # comment
//   name fig2-steering
//   registers paths=a,b oam=off
//   source heralded H path=a
//   element hwp theta=22.5 path=a
//   element pbs
//   measure alice basis=HV
//   lhs weight=0.25 blue=H yellow=+ bx=0.707 by=0 bz=0.707
//   layout x_alice=-1 x_bob=1 fiber_delay=2 c=1
//   run steering strategy=quantum workers=1
//   trials 100000
//   seed 42
//   output format=json
//
// `trials=` and `seed=` on the run line are the same fields as the `trials`
// and `seed` lines. serialize_scenario writes the canonical form, which
// parses back to an equal Scenario.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "photonsteer/optics.hpp"
#include "photonsteer/protocol.hpp"
#include "photonsteer/sterngerlach.hpp"

namespace photonsteer {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, std::string message, std::vector<std::string> expected = {});

  std::size_t line;
  std::size_t column;
  std::string message;
  std::vector<std::string> expected;
};

class SemanticError : public std::runtime_error {
 public:
  SemanticError(std::size_t line, std::string message);

  std::size_t line;  // 0 when the problem is not tied to one line
  std::string message;
};

enum class RunKind { Circuit, Ifm, Steering, SgSweep, QPlate, Equivalence };
std::string run_kind_name(RunKind k);

enum class OutputFormat { Json, Csv };

struct Registers {
  std::vector<std::string> paths{"a", "b"};
  bool oam = false;
  bool operator==(const Registers&) const = default;
};

struct SourceSpec {
  std::string pol = "H";
  std::string path = "a";
  std::size_t line = 0;
  bool operator==(const SourceSpec& o) const { return pol == o.pol && path == o.path; }
};

struct ElementSpec {
  OpticalElement element;
  std::size_t line = 0;
  bool operator==(const ElementSpec& o) const { return element == o.element; }
};

struct LhsSpec {
  double weight = 0.0;
  std::string blue;    // H or V
  std::string yellow;  // + or -
  double bx = 0.0, by = 0.0, bz = 0.0;
  std::size_t line = 0;
  bool operator==(const LhsSpec& o) const {
    return weight == o.weight && blue == o.blue && yellow == o.yellow && bx == o.bx && by == o.by && bz == o.bz;
  }
};

enum class StrategyKind { Quantum, Lhs, RandomLhs };

struct RunSpec {
  RunKind kind = RunKind::Circuit;
  // ifm
  MzVariant variant;
  // steering
  StrategyKind strategy = StrategyKind::Quantum;
  std::uint64_t adversaries = 20;
  std::uint64_t components = 4;
  unsigned workers = 1;
  // sg-sweep
  SGParams sg;
  double t_min = 0.0;
  double t_max = 4.0;
  std::uint64_t points = 50;
  std::uint64_t grid_n = 4096;
  std::size_t line = 0;

  bool operator==(const RunSpec& o) const {
    return kind == o.kind && variant == o.variant && strategy == o.strategy && adversaries == o.adversaries &&
           components == o.components && workers == o.workers && sg == o.sg && t_min == o.t_min &&
           t_max == o.t_max && points == o.points && grid_n == o.grid_n;
  }
};

struct Scenario {
  std::optional<std::string> name;
  Registers registers;
  std::optional<SourceSpec> source;
  std::vector<ElementSpec> elements;
  std::optional<std::string> measure_basis;  // HV, DIAG, CIRC or PATH
  std::vector<LhsSpec> lhs;
  std::optional<SpacetimeLayout> layout;
  RunSpec run;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  OutputFormat format = OutputFormat::Json;

  bool operator==(const Scenario&) const = default;
};

/// Grammar only; throws ParseError.
Scenario parse_scenario_syntax(const std::string& text);
/// Reference and completeness checks; throws SemanticError.
void check_semantics(const Scenario& s);
/// parse_scenario_syntax followed by check_semantics.
Scenario parse_scenario(const std::string& text);

std::string serialize_scenario(const Scenario& s);

/// Whether the run draws random numbers (and therefore needs a seed).
bool needs_seed(const Scenario& s);
/// Trials used when the scenario names none.
std::uint64_t default_trials(RunKind k);

/// Photon space and input state described by the registers and source.
Circuit scenario_circuit(const Scenario& s);
/// LHS ensemble described by the `lhs` lines.
LhsEnsemble scenario_ensemble(const Scenario& s);

}  // namespace photonsteer
