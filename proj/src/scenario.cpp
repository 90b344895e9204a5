#include "photonsteer/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace photonsteer {

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

std::string parse_error_text(std::size_t line, std::size_t column, const std::string& message,
                             const std::vector<std::string>& expected) {
  std::string s = "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
  if (!expected.empty()) s += " (expected " + join(expected, " | ") + ")";
  return s;
}

std::string semantic_error_text(std::size_t line, const std::string& message) {
  return line ? "line " + std::to_string(line) + ": " + message : message;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

struct Token {
  std::string text;
  std::size_t column;  // 1-based
};

struct KeyValue {
  std::string key;
  std::string value;
  std::size_t key_column;
  std::size_t value_column;
};

// One line being parsed.
class Line {
 public:
  Line(std::size_t number, std::vector<Token> tokens, std::size_t end_column)
      : number_(number), tokens_(std::move(tokens)), end_column_(end_column) {}

  std::size_t number() const { return number_; }
  const Token& keyword() const { return tokens_[0]; }

  // Next bare word from the given set.
  std::string word(const std::vector<std::string>& allowed, const std::string& what) {
    if (pos_ >= tokens_.size()) throw ParseError(number_, end_column_, "missing " + what, allowed);
    const Token& t = tokens_[pos_];
    if (std::find(allowed.begin(), allowed.end(), t.text) == allowed.end()) {
      throw ParseError(number_, t.column, "unexpected '" + t.text + "'", allowed);
    }
    ++pos_;
    return t.text;
  }

  // Next bare token, free-form.
  Token any(const std::string& what) {
    if (pos_ >= tokens_.size()) throw ParseError(number_, end_column_, "missing " + what, {what});
    return tokens_[pos_++];
  }

  // Remaining tokens as key=value pairs restricted to `allowed`.
  std::map<std::string, KeyValue> pairs(const std::vector<std::string>& allowed) {
    std::map<std::string, KeyValue> out;
    for (; pos_ < tokens_.size(); ++pos_) {
      const Token& t = tokens_[pos_];
      const auto eq = t.text.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw ParseError(number_, t.column, "expected key=value, found '" + t.text + "'", allowed);
      }
      KeyValue kv{t.text.substr(0, eq), t.text.substr(eq + 1), t.column, t.column + eq + 1};
      if (std::find(allowed.begin(), allowed.end(), kv.key) == allowed.end()) {
        throw ParseError(number_, t.column, "unknown key '" + kv.key + "'", allowed);
      }
      if (out.count(kv.key)) throw ParseError(number_, t.column, "duplicate key '" + kv.key + "'");
      if (kv.value.empty()) throw ParseError(number_, kv.value_column, "empty value for '" + kv.key + "'", {"value"});
      out.emplace(kv.key, std::move(kv));
    }
    return out;
  }

  void end() {
    if (pos_ < tokens_.size()) {
      throw ParseError(number_, tokens_[pos_].column, "unexpected '" + tokens_[pos_].text + "'", {"end of line"});
    }
  }

  const KeyValue& require(const std::map<std::string, KeyValue>& kv, const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(number_, end_column_, "missing key '" + key + "'", {key + "=..."});
    return it->second;
  }

  double number(const KeyValue& kv) const { return number(kv.value, kv.value_column); }

  double number(const std::string& text, std::size_t column) const {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
      throw ParseError(number_, column, "invalid number '" + text + "'", {"number"});
    }
    return v;
  }

  std::uint64_t count(const KeyValue& kv) const { return count(kv.value, kv.value_column); }

  std::uint64_t count(const std::string& text, std::size_t column) const {
    std::uint64_t v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      throw ParseError(number_, column, "invalid integer '" + text + "'", {"nonnegative integer"});
    }
    return v;
  }

  std::string choice(const KeyValue& kv, const std::vector<std::string>& allowed) const {
    if (std::find(allowed.begin(), allowed.end(), kv.value) == allowed.end()) {
      throw ParseError(number_, kv.value_column, "invalid value '" + kv.value + "' for '" + kv.key + "'", allowed);
    }
    return kv.value;
  }

 private:
  std::size_t number_;
  std::vector<Token> tokens_;
  std::size_t end_column_;
  std::size_t pos_ = 1;
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

const std::vector<std::string> kKeywords = {"element", "layout", "lhs",   "measure", "name", "output",
                                            "registers", "run",  "seed", "source",  "trials"};
const std::vector<std::string> kElementKinds = {"absorber", "bs", "hwp", "mirror", "pbs", "phase", "polarizer", "qplate"};
const std::vector<std::string> kRunKinds = {"circuit", "equivalence", "ifm", "qplate", "sg-sweep", "steering"};

RunKind run_kind_from(const std::string& s) {
  if (s == "circuit") return RunKind::Circuit;
  if (s == "ifm") return RunKind::Ifm;
  if (s == "steering") return RunKind::Steering;
  if (s == "sg-sweep") return RunKind::SgSweep;
  if (s == "qplate") return RunKind::QPlate;
  return RunKind::Equivalence;
}

std::string strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::Quantum: return "quantum";
    case StrategyKind::Lhs: return "lhs";
    case StrategyKind::RandomLhs: return "random-lhs";
  }
  return "quantum";
}

void parse_element(Line& ln, Scenario& s) {
  const std::string kind = ln.word(kElementKinds, "element kind");
  ElementSpec spec;
  spec.line = ln.number();
  auto path_of = [&](const std::map<std::string, KeyValue>& kv) {
    auto it = kv.find("path");
    return it == kv.end() ? std::string() : it->second.value;
  };
  if (kind == "bs" || kind == "pbs") {
    ln.pairs({});
    spec.element = kind == "bs" ? OpticalElement::bs50() : OpticalElement::pbs();
  } else if (kind == "hwp") {
    auto kv = ln.pairs({"path", "theta"});
    spec.element = OpticalElement::hwp(ln.number(ln.require(kv, "theta")), path_of(kv));
  } else if (kind == "polarizer") {
    auto kv = ln.pairs({"alpha", "path"});
    spec.element = OpticalElement::polarizer(ln.number(ln.require(kv, "alpha")), path_of(kv));
  } else if (kind == "qplate") {
    auto kv = ln.pairs({"path"});
    spec.element = OpticalElement::qplate(path_of(kv));
  } else if (kind == "absorber") {
    auto kv = ln.pairs({"path"});
    spec.element = OpticalElement::absorber(ln.require(kv, "path").value);
  } else if (kind == "phase") {
    auto kv = ln.pairs({"path", "phi"});
    spec.element = OpticalElement::phase(ln.require(kv, "path").value, ln.number(ln.require(kv, "phi")));
  } else {
    auto kv = ln.pairs({"path"});
    spec.element = OpticalElement::mirror(path_of(kv));
  }
  s.elements.push_back(std::move(spec));
}

void parse_run(Line& ln, Scenario& s) {
  const std::string kind = ln.word(kRunKinds, "run kind");
  RunSpec& r = s.run;
  r.kind = run_kind_from(kind);
  r.line = ln.number();
  std::vector<std::string> allowed{"seed", "trials"};
  switch (r.kind) {
    case RunKind::Ifm: allowed.insert(allowed.end(), {"alpha", "variant"}); break;
    case RunKind::Steering: allowed.insert(allowed.end(), {"adversaries", "components", "strategy", "workers"}); break;
    case RunKind::SgSweep:
      allowed.insert(allowed.end(), {"B0", "b", "grid_n", "hbar", "m", "mu_c", "points", "sigma0", "t_max", "t_min"});
      break;
    default: break;
  }
  std::sort(allowed.begin(), allowed.end());
  const auto kv = ln.pairs(allowed);
  for (const auto& [key, item] : kv) {
    if (key == "trials") {
      if (s.trials) throw ParseError(ln.number(), item.key_column, "trials given twice");
      s.trials = ln.count(item);
    } else if (key == "seed") {
      if (s.seed) throw ParseError(ln.number(), item.key_column, "seed given twice");
      s.seed = ln.count(item);
    } else if (key == "variant") {
      const std::string v = ln.choice(item, {"absorber", "empty", "polarizer"});
      const double alpha = r.variant.alpha_deg;
      r.variant = v == "empty" ? MzVariant::empty() : v == "absorber" ? MzVariant::absorber() : MzVariant::polarizer();
      r.variant.alpha_deg = alpha;
    } else if (key == "alpha") {
      r.variant.alpha_deg = ln.number(item);
    } else if (key == "strategy") {
      const std::string v = ln.choice(item, {"lhs", "quantum", "random-lhs"});
      r.strategy = v == "quantum" ? StrategyKind::Quantum : v == "lhs" ? StrategyKind::Lhs : StrategyKind::RandomLhs;
    } else if (key == "adversaries") {
      r.adversaries = ln.count(item);
    } else if (key == "components") {
      r.components = ln.count(item);
    } else if (key == "workers") {
      r.workers = static_cast<unsigned>(ln.count(item));
    } else if (key == "t_min") {
      r.t_min = ln.number(item);
    } else if (key == "t_max") {
      r.t_max = ln.number(item);
    } else if (key == "points") {
      r.points = ln.count(item);
    } else if (key == "grid_n") {
      r.grid_n = ln.count(item);
    } else if (key == "sigma0") {
      r.sg.sigma0 = ln.number(item);
    } else if (key == "mu_c") {
      r.sg.mu_c = ln.number(item);
    } else if (key == "b") {
      r.sg.b = ln.number(item);
    } else if (key == "B0") {
      r.sg.B0 = ln.number(item);
    } else if (key == "m") {
      r.sg.m = ln.number(item);
    } else if (key == "hbar") {
      r.sg.hbar = ln.number(item);
    }
  }
  if (r.kind == RunKind::Ifm && !kv.count("variant")) ln.require(kv, "variant");
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, std::string message, std::vector<std::string> expected)
    : std::runtime_error(parse_error_text(line, column, message, expected)),
      line(line),
      column(column),
      message(std::move(message)),
      expected(std::move(expected)) {}

SemanticError::SemanticError(std::size_t line, std::string message)
    : std::runtime_error(semantic_error_text(line, message)), line(line), message(std::move(message)) {}

std::string run_kind_name(RunKind k) {
  switch (k) {
    case RunKind::Circuit: return "circuit";
    case RunKind::Ifm: return "ifm";
    case RunKind::Steering: return "steering";
    case RunKind::SgSweep: return "sg-sweep";
    case RunKind::QPlate: return "qplate";
    case RunKind::Equivalence: return "equivalence";
  }
  return "circuit";
}

Scenario parse_scenario_syntax(const std::string& text) {
  Scenario s;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto tokens = tokenize(raw);
    if (tokens.empty()) continue;
    Line ln(number, tokens, raw.size() + 1);
    const std::string kw = ln.keyword().text;
    if (std::find(kKeywords.begin(), kKeywords.end(), kw) == kKeywords.end()) {
      throw ParseError(number, ln.keyword().column, "unknown keyword '" + kw + "'", kKeywords);
    }
    const bool repeatable = kw == "element" || kw == "lhs";
    if (!repeatable && !seen.insert(kw).second) {
      throw ParseError(number, ln.keyword().column, "duplicate '" + kw + "' line");
    }

    if (kw == "name") {
      const Token t = ln.any("identifier");
      if (!is_identifier(t.text)) throw ParseError(number, t.column, "invalid name '" + t.text + "'", {"identifier"});
      ln.end();
      s.name = t.text;
    } else if (kw == "registers") {
      const auto kv = ln.pairs({"oam", "paths"});
      if (auto it = kv.find("paths"); it != kv.end()) {
        std::vector<std::string> paths;
        std::size_t col = it->second.value_column;
        std::stringstream list(it->second.value);
        std::string item;
        while (std::getline(list, item, ',')) {
          if (!is_identifier(item)) throw ParseError(number, col, "invalid path label '" + item + "'", {"identifier"});
          paths.push_back(item);
          col += item.size() + 1;
        }
        if (paths.empty() || it->second.value.back() == ',') {
          throw ParseError(number, col, "empty path label", {"identifier"});
        }
        s.registers.paths = std::move(paths);
      }
      if (auto it = kv.find("oam"); it != kv.end()) s.registers.oam = ln.choice(it->second, {"off", "on"}) == "on";
    } else if (kw == "source") {
      ln.word({"heralded"}, "source kind");
      SourceSpec src;
      src.line = number;
      src.pol = ln.word({"H", "V"}, "polarization");
      const auto kv = ln.pairs({"path"});
      if (auto it = kv.find("path"); it != kv.end()) src.path = it->second.value;
      s.source = src;
    } else if (kw == "element") {
      parse_element(ln, s);
    } else if (kw == "measure") {
      ln.word({"alice"}, "party");
      const auto kv = ln.pairs({"basis"});
      s.measure_basis = ln.choice(ln.require(kv, "basis"), {"CIRC", "DIAG", "HV", "PATH"});
    } else if (kw == "lhs") {
      const auto kv = ln.pairs({"blue", "bx", "by", "bz", "weight", "yellow"});
      LhsSpec l;
      l.line = number;
      l.weight = ln.number(ln.require(kv, "weight"));
      l.blue = ln.choice(ln.require(kv, "blue"), {"H", "V"});
      l.yellow = ln.choice(ln.require(kv, "yellow"), {"+", "-"});
      if (auto it = kv.find("bx"); it != kv.end()) l.bx = ln.number(it->second);
      if (auto it = kv.find("by"); it != kv.end()) l.by = ln.number(it->second);
      if (auto it = kv.find("bz"); it != kv.end()) l.bz = ln.number(it->second);
      s.lhs.push_back(l);
    } else if (kw == "layout") {
      const auto kv = ln.pairs({"c", "fiber_delay", "x_alice", "x_bob"});
      SpacetimeLayout l;
      if (auto it = kv.find("x_alice"); it != kv.end()) l.x_alice = ln.number(it->second);
      if (auto it = kv.find("x_bob"); it != kv.end()) l.x_bob = ln.number(it->second);
      if (auto it = kv.find("fiber_delay"); it != kv.end()) l.fiber_delay = ln.number(it->second);
      if (auto it = kv.find("c"); it != kv.end()) l.c = ln.number(it->second);
      s.layout = l;
    } else if (kw == "run") {
      parse_run(ln, s);
    } else if (kw == "trials" || kw == "seed") {
      const Token t = ln.any("nonnegative integer");
      ln.end();
      auto& field = kw == "trials" ? s.trials : s.seed;
      if (field) throw ParseError(number, ln.keyword().column, kw + " given twice");
      field = ln.count(t.text, t.column);
    } else if (kw == "output") {
      const auto kv = ln.pairs({"format"});
      s.format = ln.choice(ln.require(kv, "format"), {"csv", "json"}) == "csv" ? OutputFormat::Csv : OutputFormat::Json;
    }
  }
  return s;
}

bool needs_seed(const Scenario& s) {
  switch (s.run.kind) {
    case RunKind::Circuit: return s.measure_basis.has_value();
    case RunKind::Ifm:
    case RunKind::Steering:
    case RunKind::Equivalence: return true;
    case RunKind::SgSweep:
    case RunKind::QPlate: return false;
  }
  return true;
}

std::uint64_t default_trials(RunKind k) {
  switch (k) {
    case RunKind::Ifm:
    case RunKind::Steering: return 100000;
    default: return 1000;
  }
}

void check_semantics(const Scenario& s) {
  const RunSpec& r = s.run;
  std::set<std::string> declared;
  for (const auto& p : s.registers.paths) {
    if (p != "a" && p != "b") throw SemanticError(0, "unsupported path label '" + p + "' (paths are a and b)");
    if (!declared.insert(p).second) throw SemanticError(0, "path '" + p + "' declared twice");
  }
  if (s.source && !declared.count(s.source->path)) {
    throw SemanticError(s.source->line, "undeclared path '" + s.source->path + "'");
  }
  for (const auto& e : s.elements) {
    if (!e.element.path.empty() && !declared.count(e.element.path)) {
      throw SemanticError(e.line, "undeclared path '" + e.element.path + "'");
    }
    if (e.element.kind == ElementKind::QPlate && !s.registers.oam) {
      throw SemanticError(e.line, "qplate needs the OAM register (registers oam=on)");
    }
  }

  const bool uses_circuit = r.kind == RunKind::Circuit || r.kind == RunKind::Steering || r.kind == RunKind::QPlate;
  if (uses_circuit && !s.source) throw SemanticError(r.line, "missing source for run " + run_kind_name(r.kind));
  if (r.kind == RunKind::QPlate && !s.registers.oam) {
    throw SemanticError(r.line, "run qplate needs the OAM register (registers oam=on)");
  }
  if (r.kind == RunKind::Steering) {
    if (s.registers.oam) throw SemanticError(r.line, "run steering needs a path x pol source (registers oam=off)");
    for (const auto& e : s.elements) {
      if (!e.element.is_unitary()) throw SemanticError(e.line, "run steering needs a lossless preparation circuit");
    }
    if (r.strategy == StrategyKind::Lhs) {
      if (s.lhs.empty()) throw SemanticError(r.line, "strategy=lhs needs lhs lines");
      double total = 0.0;
      for (const auto& l : s.lhs) {
        if (l.weight < 0.0) throw SemanticError(l.line, "negative LHS weight");
        if (std::sqrt(l.bx * l.bx + l.by * l.by + l.bz * l.bz) > 1.0 + 1e-9) {
          throw SemanticError(l.line, "Bloch vector longer than 1");
        }
        total += l.weight;
      }
      if (std::abs(total - 1.0) > 1e-9) throw SemanticError(s.lhs.front().line, "LHS weights must sum to 1");
    }
    if (r.strategy == StrategyKind::RandomLhs && (r.adversaries == 0 || r.components == 0)) {
      throw SemanticError(r.line, "random-lhs needs adversaries >= 1 and components >= 1");
    }
    if (r.workers == 0) throw SemanticError(r.line, "workers must be at least 1");
  }
  if (s.layout) {
    try {
      s.layout->validate();
    } catch (const ProtocolError& e) {
      throw SemanticError(0, e.what());
    }
  }
  if (r.kind == RunKind::SgSweep) {
    try {
      r.sg.validate();
    } catch (const std::invalid_argument& e) {
      throw SemanticError(r.line, e.what());
    }
    if (r.t_min < 0.0 || r.t_max < r.t_min) throw SemanticError(r.line, "need 0 <= t_min <= t_max");
    if (r.points == 0) throw SemanticError(r.line, "points must be at least 1");
    if (r.grid_n < 3) throw SemanticError(r.line, "grid_n must be at least 3");
  }
  if (s.trials && *s.trials == 0) throw SemanticError(0, "trials must be at least 1");
  if (needs_seed(s) && !s.seed) throw SemanticError(r.line, "missing seed for run " + run_kind_name(r.kind));
}

Scenario parse_scenario(const std::string& text) {
  Scenario s = parse_scenario_syntax(text);
  check_semantics(s);
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  if (s.name) out << "name " << *s.name << '\n';
  out << "registers paths=" << join(s.registers.paths, ",") << " oam=" << (s.registers.oam ? "on" : "off") << '\n';
  if (s.source) out << "source heralded " << s.source->pol << " path=" << s.source->path << '\n';
  for (const auto& spec : s.elements) {
    const OpticalElement& e = spec.element;
    const std::string path = e.path.empty() ? "" : " path=" + e.path;
    out << "element ";
    switch (e.kind) {
      case ElementKind::BS50: out << "bs"; break;
      case ElementKind::PBS: out << "pbs"; break;
      case ElementKind::HWP: out << "hwp theta=" << format_double(e.angle) << path; break;
      case ElementKind::Polarizer: out << "polarizer alpha=" << format_double(e.angle) << path; break;
      case ElementKind::QPlate: out << "qplate" << path; break;
      case ElementKind::Absorber: out << "absorber" << path; break;
      case ElementKind::PhaseShift: out << "phase" << path << " phi=" << format_double(e.angle); break;
      case ElementKind::Mirror: out << "mirror" << path; break;
    }
    out << '\n';
  }
  if (s.measure_basis) out << "measure alice basis=" << *s.measure_basis << '\n';
  for (const auto& l : s.lhs) {
    out << "lhs weight=" << format_double(l.weight) << " blue=" << l.blue << " yellow=" << l.yellow
        << " bx=" << format_double(l.bx) << " by=" << format_double(l.by) << " bz=" << format_double(l.bz) << '\n';
  }
  if (s.layout) {
    out << "layout x_alice=" << format_double(s.layout->x_alice) << " x_bob=" << format_double(s.layout->x_bob)
        << " fiber_delay=" << format_double(s.layout->fiber_delay) << " c=" << format_double(s.layout->c) << '\n';
  }
  const RunSpec& r = s.run;
  out << "run " << run_kind_name(r.kind);
  switch (r.kind) {
    case RunKind::Ifm:
      out << " variant=" << r.variant.name() << " alpha=" << format_double(r.variant.alpha_deg);
      break;
    case RunKind::Steering:
      out << " strategy=" << strategy_name(r.strategy) << " adversaries=" << r.adversaries
          << " components=" << r.components << " workers=" << r.workers;
      break;
    case RunKind::SgSweep:
      out << " t_min=" << format_double(r.t_min) << " t_max=" << format_double(r.t_max) << " points=" << r.points
          << " grid_n=" << r.grid_n << " sigma0=" << format_double(r.sg.sigma0) << " mu_c=" << format_double(r.sg.mu_c)
          << " b=" << format_double(r.sg.b) << " B0=" << format_double(r.sg.B0) << " m=" << format_double(r.sg.m)
          << " hbar=" << format_double(r.sg.hbar);
      break;
    default: break;
  }
  out << '\n';
  if (s.trials) out << "trials " << *s.trials << '\n';
  if (s.seed) out << "seed " << *s.seed << '\n';
  out << "output format=" << (s.format == OutputFormat::Csv ? "csv" : "json") << '\n';
  return out.str();
}

Circuit scenario_circuit(const Scenario& s) {
  if (!s.source) throw SemanticError(0, "missing source");
  bool lossy = false;
  for (const auto& e : s.elements) lossy = lossy || !e.element.is_unitary();
  const Space space = photon_space(s.registers.oam, lossy);
  std::vector<std::string> labels{s.source->path, s.source->pol};
  if (s.registers.oam) labels.push_back("0");
  Circuit c{space, ket(space, labels), {}};
  for (const auto& e : s.elements) c.elements.push_back(e.element);
  return c;
}

LhsEnsemble scenario_ensemble(const Scenario& s) {
  LhsEnsemble e;
  const Space bob({path_factor()});
  for (const auto& l : s.lhs) {
    Mat m = Mat::Identity(2, 2) + l.bx * pauli_x() + l.by * pauli_y() + l.bz * pauli_z();
    e.push_back({l.weight, {l.blue == "H" ? 0u : 1u, l.yellow == "+" ? 0u : 1u}, DensityOp(bob, 0.5 * m)});
  }
  return e;
}

}  // namespace photonsteer
