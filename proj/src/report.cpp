#include "photonsteer/report.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "photonsteer/measure.hpp"
#include "photonsteer/optics.hpp"
#include "photonsteer/steering.hpp"

namespace photonsteer {

using nlohmann::json;

namespace {

std::string format_float(double v) {
  if (!std::isfinite(v)) throw ScenarioRunError("report contains a non-finite number");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

void write_canonical(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::null: out += "null"; break;
    case json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
    case json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); break;
    case json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); break;
    case json::value_t::number_float: out += format_float(j.get<double>()); break;
    case json::value_t::string: out += j.dump(); break;
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        write_canonical(v, out);
      }
      out += ']';
      break;
    }
    case json::value_t::object: {
      // nlohmann::json keeps object members in a std::map, so iteration is sorted.
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        write_canonical(it.value(), out);
      }
      out += '}';
      break;
    }
    default: throw ScenarioRunError("unsupported JSON value in report");
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", rows);
  } else {
    std::string v;
    if (j.is_string()) {
      v = j.get<std::string>();
    } else {
      write_canonical(j, v);
    }
    rows.emplace_back(prefix, v);
  }
}

json labels_json(const Space& space) {
  json out = json::array();
  for (const auto& l : space.labels()) out.push_back(l);
  return out;
}

json counts_json(const PauliCounts& c) {
  json out = json::object();
  const char* names[3] = {"Z", "X", "Y"};
  for (int i = 0; i < 3; ++i) out[names[i]] = {c.plus[i], c.minus[i]};
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json steering_analysis(const LabeledState& state) {
  const auto settings = blue_yellow_settings();
  const Assemblage a = assemblage(state, settings);
  const Space bob({path_factor()});
  const std::vector<Observable> obs{Observable(bob, pauli_z()), Observable(bob, pauli_x())};
  const SteeringValue sv = linear_steering_value(a, obs);
  const NoSignalling ns = no_signalling_check(a);
  const DensityOp rho = to_density(state);
  const ChshResult chsh = chsh_max(rho);
  return {
      {"assemblage", to_json(a)},
      {"no_signalling", {{"ok", ns.ok}, {"max_deviation", ns.max_deviation}}},
      {"steering", {{"value", sv.value}, {"lhs_bound", sv.lhs_bound}, {"violation", sv.violation}}},
      {"chsh", {{"s_max", chsh.s_max}, {"violation", chsh.violation}, {"lhv_bound", lhv_chsh_bound().max_abs}}},
      {"concurrence", concurrence(rho)},
  };
}

json session_json(const SessionStats& st) {
  json conds = json::array();
  for (const auto& c : st.conditionals) {
    conds.push_back({{"setting", c.setting},
                     {"outcome", c.outcome},
                     {"count", c.count},
                     {"pauli_counts", counts_json(c.pauli)},
                     {"tomography", c.tomography ? to_json(*c.tomography) : json(nullptr)},
                     {"fidelity", optional_number(c.fidelity)}});
  }
  json pooled = json::array();
  for (const auto& p : st.pooled_tomography) pooled.push_back(p ? to_json(*p) : json(nullptr));
  return {{"n_trials", st.n_trials},
          {"steering_value", st.steering_value},
          {"steering_stderr", optional_number(st.steering_stderr)},
          {"lhs_bound", st.lhs_bound},
          {"z_score", st.z_score},
          {"violation", st.violation},
          {"functional_sum", st.functional_sum},
          {"functional_sum_sq", st.functional_sum_sq},
          {"conditionals", conds},
          {"pooled_tomography", pooled},
          {"pooled_trace_distance", optional_number(st.pooled_trace_distance)},
          {"causality_violations", st.causality_violations},
          {"spacelike_trials", st.spacelike_trials}};
}

std::size_t sample_outcome(const std::vector<double>& probs, double u) {
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

json measurement_json(const std::vector<OutcomeRecord>& dist, const std::string& basis, std::uint64_t trials,
                      std::uint64_t seed) {
  json outcomes = json::array();
  std::vector<double> probs;
  for (const auto& rec : dist) {
    json post = std::holds_alternative<LabeledState>(rec.post_state) ? to_json(std::get<LabeledState>(rec.post_state))
                                                                      : to_json(std::get<DensityOp>(rec.post_state));
    outcomes.push_back({{"outcome", rec.outcome}, {"probability", rec.probability}, {"post_state", post}});
    probs.push_back(rec.probability);
  }
  std::vector<std::uint64_t> hits(dist.size(), 0);
  for (std::uint64_t i = 0; i < trials && !dist.empty(); ++i) {
    SplitMix64 r = trial_stream(seed, i, 0);
    ++hits[sample_outcome(probs, r.uniform())];
  }
  json samples = json::object();
  for (std::size_t k = 0; k < dist.size(); ++k) samples[dist[k].outcome] = hits[k];
  return {{"basis", basis}, {"outcomes", outcomes}, {"samples", samples}, {"trials", trials}};
}

json run_circuit(const Scenario& s, std::uint64_t trials) {
  Circuit c = scenario_circuit(s);
  c.validate();
  json out;
  out["prep_events"] = json::array(
      {{{"kind", "trigger_heralded"}, {"detail", s.source->pol + " photon on path " + s.source->path}}});
  const bool lossless = std::all_of(c.elements.begin(), c.elements.end(), [](const auto& e) { return e.is_unitary(); });
  const std::string basis_tag = s.measure_basis.value_or("");
  if (lossless) {
    const LabeledState state = propagate_unitary(c);
    out["state"] = to_json(state);
    if (s.measure_basis) {
      out["measurement"] = measurement_json(outcome_distribution(state, basis_from_tag(basis_tag)), basis_tag,
                                            trials, *s.seed);
    }
    if (!s.registers.oam) out["analysis"] = steering_analysis(state);
  } else {
    json hist = json::array();
    const auto histories = propagate_all(c);
    DensityOp mix;
    for (const auto& h : histories) {
      hist.push_back({{"labels", h.labels}, {"probability", h.probability}, {"state", to_json(h.state)}});
      const DensityOp part(h.state.space, h.probability * to_density(h.state).matrix);
      mix = mix.matrix.size() == 0 ? part : DensityOp(mix.space, mix.matrix + part.matrix);
    }
    out["histories"] = hist;
    out["density"] = to_json(mix);
    if (s.measure_basis) {
      out["measurement"] =
          measurement_json(outcome_distribution(mix, basis_from_tag(basis_tag)), basis_tag, trials, *s.seed);
    }
  }
  return out;
}

json run_steering(const Scenario& s, std::uint64_t trials, const RunOptions& options, Report& report) {
  const RunSpec& r = s.run;
  const LabeledState state = propagate_unitary(scenario_circuit(s));
  const SpacetimeLayout layout = s.layout.value_or(SpacetimeLayout{});
  SessionOptions so;
  so.workers = r.workers;
  so.keep_logs = options.keep_events;
  so.source = state;

  json out;
  out["state"] = to_json(state);
  out["analysis"] = steering_analysis(state);
  out["layout"] = {{"x_alice", layout.x_alice}, {"x_bob", layout.x_bob}, {"c", layout.c}, {"fiber_delay", layout.fiber_delay}};
  const CausalCheck check = verify_causal_order(schedule_trial(layout), layout);
  out["causal_schedule"] = {{"ok", check.ok}, {"spacelike", check.spacelike}, {"violations", check.violations}};

  const auto settings = blue_yellow_settings();
  const Space bob({path_factor()});
  const std::vector<Observable> obs{Observable(bob, pauli_z()), Observable(bob, pauli_x())};
  auto lhs_analytic = [&](const LhsEnsemble& e) {
    const SteeringValue v = linear_steering_value(lhs_assemblage(e, settings), obs);
    return json{{"value", v.value}, {"lhs_bound", v.lhs_bound}, {"violation", v.violation}};
  };

  switch (r.strategy) {
    case StrategyKind::Quantum: {
      out["strategy"] = "quantum";
      SessionStats st = run_steering_session(trials, AliceStrategy::quantum(), layout, *s.seed, so);
      out["session"] = session_json(st);
      report.events = std::move(st.logs);
      break;
    }
    case StrategyKind::Lhs: {
      out["strategy"] = "lhs";
      const LhsEnsemble e = scenario_ensemble(s);
      out["lhs_analytic"] = lhs_analytic(e);
      SessionStats st = run_steering_session(trials, AliceStrategy::lhs(e), layout, *s.seed, so);
      out["session"] = session_json(st);
      report.events = std::move(st.logs);
      break;
    }
    case StrategyKind::RandomLhs: {
      out["strategy"] = "random-lhs";
      json advs = json::array();
      double worst = -1e300;
      bool all_within = true;
      so.keep_logs = false;
      for (std::uint64_t k = 0; k < r.adversaries; ++k) {
        SplitMix64 gen = trial_stream(*s.seed, k, 4);
        const LhsEnsemble e = random_lhs_ensemble(r.components, settings.size(), gen);
        const std::uint64_t session_seed = trial_stream(*s.seed, k, 5)();
        const SessionStats st = run_steering_session(trials, AliceStrategy::lhs(e), layout, session_seed, so);
        const double margin = st.steering_stderr ? 3.0 * *st.steering_stderr : 0.0;
        const bool within = st.steering_value <= st.lhs_bound + margin;
        all_within = all_within && within;
        worst = std::max(worst, st.steering_value);
        advs.push_back({{"index", k},
                        {"analytic", lhs_analytic(e)},
                        {"steering_value", st.steering_value},
                        {"steering_stderr", optional_number(st.steering_stderr)},
                        {"within_bound_3sigma", within}});
      }
      out["adversaries"] = advs;
      out["max_steering_value"] = worst;
      out["all_within_bound_3sigma"] = all_within;
      break;
    }
  }
  return out;
}

json run_ifm_scenario(const Scenario& s, std::uint64_t trials) {
  const IfmCounts c = run_ifm(trials, s.run.variant, *s.seed);
  const double n = static_cast<double>(c.n);
  return {{"variant", c.variant},
          {"alpha_deg", s.run.variant.alpha_deg},
          {"n", c.n},
          {"counts", {{"d1", c.d1}, {"d2", c.d2}, {"absorbed", c.absorbed}}},
          {"fractions", {{"d1", c.d1 / n}, {"d2", c.d2 / n}, {"absorbed", c.absorbed / n}}},
          {"probabilities", {{"d1", c.p_d1}, {"d2", c.p_d2}, {"absorbed", c.p_absorbed}}},
          {"polarization_counts", {{"d1_h", c.d1_h}, {"d1_v", c.d1_v}, {"d2_h", c.d2_h}, {"d2_v", c.d2_v}}},
          {"d2_given_transmitted", optional_number(c.d2_given_transmitted())}};
}

json run_sg(const Scenario& s, Report& report) {
  const RunSpec& r = s.run;
  json curve = json::array();
  std::vector<std::pair<double, double>> by_overlap;
  for (std::uint64_t i = 0; i < r.points; ++i) {
    SGParams p = r.sg;
    p.t = r.points == 1 ? r.t_min : r.t_min + (r.t_max - r.t_min) * static_cast<double>(i) / static_cast<double>(r.points - 1);
    const ZGrid grid = default_grid(p, r.grid_n);
    const EffectiveState eff = effective_two_qubit(p, grid);
    const double s_max = chsh_max(eff.rho).s_max;
    report.curve.push_back({p.t, eff.overlap, s_max});
    by_overlap.emplace_back(std::abs(eff.overlap), s_max);
    curve.push_back({{"t", p.t},
                     {"overlap", to_json(eff.overlap)},
                     {"overlap_abs", std::abs(eff.overlap)},
                     {"overlap_closed_form", to_json(branch_overlap_closed_form(p))},
                     {"norm_plus", eval_branch(p, +1, grid).norm_squared()},
                     {"norm_minus", eval_branch(p, -1, grid).norm_squared()},
                     {"concurrence", concurrence(eff.rho)},
                     {"degenerate", eff.degenerate},
                     {"s_max", s_max},
                     {"grid", {{"z_min", grid.z_min}, {"z_max", grid.z_max}, {"n", grid.n}}}});
  }
  std::sort(by_overlap.begin(), by_overlap.end());
  bool monotone = true;
  for (std::size_t i = 1; i < by_overlap.size(); ++i) monotone = monotone && by_overlap[i].second <= by_overlap[i - 1].second + 1e-9;
  return {{"params",
           {{"sigma0", r.sg.sigma0}, {"mu_c", r.sg.mu_c}, {"b", r.sg.b}, {"B0", r.sg.B0}, {"m", r.sg.m}, {"hbar", r.sg.hbar}}},
          {"curve", curve},
          {"s_max_monotone_in_overlap", monotone}};
}

json run_qplate(const Scenario& s) {
  Circuit c = scenario_circuit(s);
  c.validate();
  std::size_t after = 0;
  for (std::size_t i = 0; i < c.elements.size(); ++i) {
    if (c.elements[i].kind == ElementKind::QPlate) {
      after = i + 1;
      break;
    }
  }
  const LabeledState at_qplate = propagate_unitary(c, after);
  const LabeledState output = propagate_unitary(c);
  const Vec circ = circular_oam_amplitudes(at_qplate, s.source->path);
  json circular = json::array();
  const char* pol[2] = {"L", "R"};
  const char* oam[3] = {"-2", "0", "+2"};
  for (int p = 0; p < 2; ++p)
    for (int l = 0; l < 3; ++l)
      circular.push_back({{"pol", pol[p]}, {"oam", oam[l]}, {"amplitude", to_json(circ[p * 3 + l])}});
  json expansion = json::array();
  for (const char* hv : {"H", "V"})
    for (const char* l : oam)
      expansion.push_back({{"pol", hv}, {"oam", l}, {"amplitude", to_json(at_qplate.amp({s.source->path, hv, l}))}});
  return {{"after_qplate", to_json(at_qplate)},
          {"circular_oam", circular},
          {"hv_oam_expansion", expansion},
          {"output", to_json(output)}};
}

json collapse_json(const NullCollapse& c) {
  return {{"name", c.name},
          {"pre", to_json(c.pre)},
          {"probe", c.probe},
          {"probability", c.result.probability},
          {"post", to_json(c.result.state)},
          {"path_state", to_json(c.path_state)}};
}

json run_equivalence(const Scenario& s, std::uint64_t trials) {
  const EquivalenceReport r = steering_ifm_equivalence_report(*s.seed, trials);
  json selective = json::array();
  for (const auto& d : r.bob_selective) selective.push_back(to_json(d));
  return {{"ifm_absorber", collapse_json(r.ifm_absorber)},
          {"ifm_polarizer", collapse_json(r.ifm_polarizer)},
          {"steering", collapse_json(r.steering)},
          {"fidelity_ifm_steering", r.fidelity_ifm_steering},
          {"fidelity_polarizer_steering", r.fidelity_polarizer_steering},
          {"fidelity_polarizer_steering_full", r.fidelity_polarizer_steering_full},
          {"channel_vs_detector",
           {{"absorber_absorb_probability", r.absorber_absorb_probability},
            {"detect_path_click_probability", r.detect_path_click_probability},
            {"trials", r.sample_trials},
            {"absorber_absorbed", r.absorber_absorbed},
            {"detect_path_clicks", r.detect_path_clicks}}},
          {"empty_d2_amplitude", to_json(r.empty_d2_amplitude)},
          {"bob_nonselective", to_json(r.bob_nonselective)},
          {"bob_selective", selective}};
}

}  // namespace

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const LabeledState& s) {
  json amps = json::array();
  for (Eigen::Index i = 0; i < s.amps.size(); ++i) amps.push_back(to_json(s.amps[i]));
  return {{"labels", labels_json(s.space)}, {"amplitudes", amps}};
}

json to_json(const DensityOp& rho) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < rho.matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < rho.matrix.cols(); ++j) entries.push_back(to_json(rho.matrix(i, j)));
  return {{"labels", labels_json(rho.space)}, {"dim", rho.matrix.rows()}, {"matrix", entries}};
}

json to_json(const Assemblage& a) {
  json settings = json::array();
  for (const auto& s : a.settings) {
    json members = json::array();
    for (const auto& m : s.members) {
      members.push_back({{"outcome", m.outcome}, {"value", m.value}, {"probability", m.sigma.trace()}, {"sigma", to_json(m.sigma)}});
    }
    settings.push_back({{"label", s.label}, {"members", members}});
  }
  return {{"settings", settings}};
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const Scenario& s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(serialize_scenario(s)));
  return std::string("fnv1a64:") + buf;
}

Report run_scenario(const Scenario& s, const RunOptions& options) {
  Report report;
  const std::uint64_t trials = s.trials.value_or(default_trials(s.run.kind));
  json results;
  try {
    switch (s.run.kind) {
      case RunKind::Circuit: results = run_circuit(s, trials); break;
      case RunKind::Steering: results = run_steering(s, trials, options, report); break;
      case RunKind::Ifm: results = run_ifm_scenario(s, trials); break;
      case RunKind::SgSweep: results = run_sg(s, report); break;
      case RunKind::QPlate: results = run_qplate(s); break;
      case RunKind::Equivalence: results = run_equivalence(s, trials); break;
    }
  } catch (const ScenarioRunError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioRunError("run " + run_kind_name(s.run.kind) + (s.name ? " (" + *s.name + ")" : std::string()) +
                           ": " + e.what());
  }
  report.json = {{"schema", kReportSchema},
                 {"config_hash", config_hash(s)},
                 {"seed", s.seed ? json(*s.seed) : json(nullptr)},
                 {"trials", needs_seed(s) ? json(trials) : json(nullptr)},
                 {"scenario",
                  {{"name", s.name ? json(*s.name) : json(nullptr)},
                   {"run", run_kind_name(s.run.kind)},
                   {"text", serialize_scenario(s)}}},
                 {"results", results}};
  return report;
}

std::string canonical_json(const json& j) {
  std::string out;
  write_canonical(j, out);
  return out;
}

std::string report_json(const Report& r) { return canonical_json(r.json) + "\n"; }

std::string report_csv(const Report& r) {
  std::string out;
  if (r.json.contains("scenario") && r.json["scenario"]["run"] == "sg-sweep") {
    out = std::string(kCurveCsvHeader) + "\n";
    for (const auto& p : r.curve) {
      out += format_float(p.t) + "," + format_float(p.overlap.real()) + "," + format_float(p.overlap.imag()) + "," +
             format_float(std::abs(p.overlap)) + "," + format_float(p.s_max) + "\n";
    }
    return out;
  }
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(r.json, "", rows);
  out = "key,value\n";
  for (const auto& [k, v] : rows) out += csv_field(k) + "," + csv_field(v) + "\n";
  return out;
}

std::string events_jsonl(const Report& r) {
  std::string out;
  for (const auto& log : r.events) {
    for (const auto& e : log.events()) {
      json data = json::object();
      for (const auto& [k, v] : e.data) data[k] = v;
      out += canonical_json({{"t", e.t}, {"x", e.x}, {"kind", event_kind_name(e.kind)}, {"data", data}}) + "\n";
    }
  }
  return out;
}

void emit_report(const Report& r, OutputFormat format, const std::string& path) {
  const std::string text = format == OutputFormat::Csv ? report_csv(r) : report_json(r);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("failed writing '" + path + "'");
}

}  // namespace photonsteer
