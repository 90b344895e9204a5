#include "photonsteer/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace photonsteer {

namespace {

constexpr double kTimeTol = 1e-12;
constexpr std::uint64_t kChoiceStream = 0;
constexpr std::uint64_t kAliceStream = 1;
constexpr std::uint64_t kBobStream = 2;
constexpr std::uint64_t kLambdaStream = 3;

const char* kPauliNames[3] = {"Z", "X", "Y"};

const std::array<Mat, 3>& paulis() {
  static const std::array<Mat, 3> p{pauli_z(), pauli_x(), pauli_y()};
  return p;
}

Space bob_space() { return Space({path_factor()}); }

std::array<double, 3> bloch(const DensityOp& rho) {
  std::array<double, 3> r{};
  const double tr = rho.trace();
  for (int i = 0; i < 3; ++i) r[i] = (rho.matrix * paulis()[i]).trace().real() / tr;
  return r;
}

double trace_distance(const DensityOp& a, const DensityOp& b) {
  return 0.5 * hermitian_eigenvalues(a.matrix - b.matrix).cwiseAbs().sum();
}

// Index into a cumulative table, ignoring entries without support.
std::size_t sample_index(const std::vector<double>& probs, double u) {
  double total = 0.0;
  for (double p : probs)
    if (p > kZeroProbability) total += p;
  const double target = u * total;
  double acc = 0.0;
  std::size_t last = probs.size();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= kZeroProbability) continue;
    acc += probs[i];
    last = i;
    if (target < acc) return i;
  }
  if (last == probs.size()) throw ProtocolError("no outcome has nonzero probability");
  return last;
}

// What Alice hands back in one trial: her outcome index and Bob's normalized state.
struct Source {
  // Quantum: per setting, per outcome.
  std::vector<std::vector<double>> probs;
  std::vector<std::vector<std::array<double, 3>>> bob_bloch;
  // LHS: per component.
  std::vector<double> weights;
  std::vector<std::array<double, 3>> lambda_bloch;
};

struct Accumulator {
  std::array<std::array<PauliCounts, 2>, 2> counts{};
  std::int64_t sum = 0;
  std::uint64_t sum_sq = 0;
  std::uint64_t causality = 0;
  std::uint64_t spacelike = 0;
  std::optional<std::uint64_t> first_failure;
  std::string first_failure_message;
};

}  // namespace

void SpacetimeLayout::validate() const {
  if (!(std::abs(x_alice) > 0.0) || !(std::abs(x_bob) > 0.0)) throw ProtocolError("Alice and Bob must sit away from the source");
  if (!(c > 0.0)) throw ProtocolError("signal speed must be positive");
  if (!(fiber_delay >= 0.0)) throw ProtocolError("fiber delay must be nonnegative");
}

std::string event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::TriggerHeralded: return "trigger_heralded";
    case EventKind::BasisRequest: return "basis_request";
    case EventKind::AliceMeasured: return "alice_measured";
    case EventKind::BobDetected: return "bob_detected";
  }
  return "unknown";
}

void EventLog::append(Event e) {
  if (e.t < 0.0) throw ProtocolError("event times must be nonnegative");
  events_.push_back(std::move(e));
}

const Event& EventLog::find(EventKind k) const {
  for (const auto& e : events_)
    if (e.kind == k) return e;
  throw ProtocolError("event log has no " + event_kind_name(k) + " event");
}

EventLog schedule_trial(const SpacetimeLayout& layout) {
  layout.validate();
  EventLog log;
  log.append({EventKind::TriggerHeralded, 0.0, 0.0, {}});
  log.append({EventKind::BasisRequest, std::abs(layout.x_bob) / layout.c, layout.x_bob, {}});
  log.append({EventKind::AliceMeasured, std::abs(layout.x_alice) / layout.c + layout.fiber_delay, layout.x_alice, {}});
  log.append({EventKind::BobDetected, std::abs(layout.x_bob) / layout.c + layout.fiber_delay, layout.x_bob, {}});
  return log;
}

CausalCheck verify_causal_order(const EventLog& log, const SpacetimeLayout& layout) {
  const Event& trigger = log.find(EventKind::TriggerHeralded);
  const Event& request = log.find(EventKind::BasisRequest);
  const Event& alice = log.find(EventKind::AliceMeasured);
  const Event& bob = log.find(EventKind::BobDetected);

  CausalCheck out;
  const double request_arrival = request.t + std::abs(layout.x_bob - layout.x_alice) / layout.c;
  if (request_arrival > alice.t + kTimeTol) {
    out.violations.push_back("basis request reaches Alice at t=" + std::to_string(request_arrival) +
                             " after her measurement at t=" + std::to_string(alice.t));
  }
  const double photon_arrival = trigger.t + std::abs(layout.x_alice - trigger.x) / layout.c + layout.fiber_delay;
  if (photon_arrival + kTimeTol < request_arrival) {
    out.violations.push_back("photon reaches Alice at t=" + std::to_string(photon_arrival) +
                             " before the basis request at t=" + std::to_string(request_arrival));
  }
  if (alice.t + kTimeTol < photon_arrival) {
    out.violations.push_back("Alice measures at t=" + std::to_string(alice.t) + " before the photon arrives at t=" +
                             std::to_string(photon_arrival));
  }
  out.ok = out.violations.empty();
  out.spacelike = std::abs(alice.x - bob.x) > layout.c * std::abs(alice.t - bob.t);
  return out;
}

LhsEnsemble optimal_lhs_ensemble() {
  LhsEnsemble e;
  const double r = std::sqrt(0.5);
  for (int sz : {+1, -1}) {
    for (int sx : {+1, -1}) {
      const Mat m = 0.5 * (Mat::Identity(2, 2) + r * sz * pauli_z() + r * sx * pauli_x());
      e.push_back({0.25, {sz > 0 ? 0u : 1u, sx > 0 ? 0u : 1u}, DensityOp(bob_space(), m)});
    }
  }
  return e;
}

std::uint64_t PauliCounts::total() const {
  std::uint64_t t = 0;
  for (int i = 0; i < 3; ++i) t += plus[i] + minus[i];
  return t;
}

PauliCounts& PauliCounts::operator+=(const PauliCounts& o) {
  for (int i = 0; i < 3; ++i) {
    plus[i] += o.plus[i];
    minus[i] += o.minus[i];
  }
  return *this;
}

DensityOp bob_tomography(const std::array<double, 3>& r) {
  Mat m = Mat::Identity(2, 2);
  for (int i = 0; i < 3; ++i) m += r[i] * paulis()[i];
  m *= 0.5;
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  if (ev.sum() <= 0.0) throw ProtocolError("tomography estimate has no positive part");
  ev /= ev.sum();
  Mat clipped = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  return DensityOp(bob_space(), clipped);
}

DensityOp bob_tomography(const PauliCounts& counts) {
  std::array<double, 3> r{};
  for (int i = 0; i < 3; ++i) {
    const std::uint64_t n = counts.plus[i] + counts.minus[i];
    if (n == 0) throw ProtocolError(std::string("no samples of observable ") + kPauliNames[i]);
    r[i] = (static_cast<double>(counts.plus[i]) - static_cast<double>(counts.minus[i])) / static_cast<double>(n);
  }
  return bob_tomography(r);
}

SessionStats run_steering_session(std::uint64_t n_trials, const AliceStrategy& strategy,
                                  const SpacetimeLayout& layout, std::uint64_t seed, const SessionOptions& options) {
  if (n_trials == 0) throw ProtocolError("a session needs at least one trial");
  layout.validate();
  const auto settings = blue_yellow_settings();
  const LabeledState source_state = options.source ? *options.source : build_fig2_state();
  Assemblage predicted;
  try {
    predicted = assemblage(source_state, settings);
  } catch (const std::invalid_argument& e) {
    throw ProtocolError(std::string("source is not a path x pol state: ") + e.what());
  }

  Source src;
  for (std::size_t x = 0; x < settings.size(); ++x) {
    std::vector<double> probs;
    std::vector<std::array<double, 3>> blochs;
    for (const auto& m : predicted.settings[x].members) {
      probs.push_back(m.sigma.trace());
      blochs.push_back(m.sigma.trace() > kZeroProbability ? bloch(m.sigma) : std::array<double, 3>{});
    }
    src.probs.push_back(std::move(probs));
    src.bob_bloch.push_back(std::move(blochs));
  }
  if (strategy.kind == AliceStrategy::Kind::LHS) {
    validate_ensemble(strategy.ensemble, settings);
    for (const auto& c : strategy.ensemble) {
      if (c.bob_state.space != bob_space()) throw ProtocolError("LHS states must live on Bob's path qubit");
      src.weights.push_back(c.weight);
      src.lambda_bloch.push_back(bloch(c.bob_state));
    }
  }

  const EventLog timing = schedule_trial(layout);
  SessionStats stats;
  stats.n_trials = n_trials;
  if (options.keep_logs) stats.logs.resize(n_trials);

  auto run_range = [&](std::uint64_t begin, std::uint64_t end, Accumulator& acc) {
    for (std::uint64_t i = begin; i < end; ++i) {
      EventLog log = timing;
      const CausalCheck check = verify_causal_order(log, layout);
      if (!check.ok) {
        ++acc.causality;
        if (!acc.first_failure) {
          acc.first_failure = i;
          acc.first_failure_message = check.violations.front();
        }
      }
      if (check.spacelike) ++acc.spacelike;

      // The hidden state is fixed at the herald, before any request exists.
      std::optional<std::size_t> lambda;
      if (strategy.kind == AliceStrategy::Kind::LHS) {
        SplitMix64 r = trial_stream(seed, i, kLambdaStream);
        lambda = sample_index(src.weights, r.uniform());
      }
      SplitMix64 choice = trial_stream(seed, i, kChoiceStream);
      const std::size_t x = static_cast<std::size_t>(choice.below(settings.size()));

      std::size_t a;
      const std::array<double, 3>* bob_r;
      if (lambda) {
        a = strategy.ensemble[*lambda].responses[x];
        bob_r = &src.lambda_bloch[*lambda];
      } else {
        SplitMix64 r = trial_stream(seed, i, kAliceStream);
        a = sample_index(src.probs[x], r.uniform());
        bob_r = &src.bob_bloch[x][a];
      }

      SplitMix64 bob = trial_stream(seed, i, kBobStream);
      const std::size_t o = static_cast<std::size_t>(bob.below(3));
      const bool plus = bob.uniform() < 0.5 * (1.0 + (*bob_r)[o]);
      auto& pc = acc.counts[x][a];
      (plus ? pc.plus : pc.minus)[o] += 1;

      // Bob's observable for setting x is Z (blue) or X (yellow).
      if (o == x) {
        const std::int64_t score = 6 * settings[x].basis.values[a] * (plus ? 1 : -1);
        acc.sum += score;
        acc.sum_sq += static_cast<std::uint64_t>(score * score);
      }

      if (options.keep_logs) {
        auto ev = log.events();
        ev[0].data["trial"] = std::to_string(i);
        if (lambda) ev[0].data["lambda"] = std::to_string(*lambda);
        ev[1].data["setting"] = settings[x].label;
        ev[2].data["setting"] = settings[x].label;
        ev[2].data["outcome"] = settings[x].basis.outcomes[a];
        ev[3].data["observable"] = kPauliNames[o];
        ev[3].data["outcome"] = plus ? "+" : "-";
        EventLog full;
        for (auto& e : ev) full.append(std::move(e));
        stats.logs[i] = std::move(full);
      }
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(std::min<std::uint64_t>(n_trials, 64))));
  std::vector<Accumulator> accs(workers);
  if (workers == 1) {
    run_range(0, n_trials, accs[0]);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = n_trials * w / workers;
      const std::uint64_t end = n_trials * (w + 1) / workers;
      threads.emplace_back(run_range, begin, end, std::ref(accs[w]));
    }
    for (auto& t : threads) t.join();
  }

  Accumulator total;
  for (const auto& acc : accs) {
    for (int x = 0; x < 2; ++x)
      for (int a = 0; a < 2; ++a) total.counts[x][a] += acc.counts[x][a];
    total.sum += acc.sum;
    total.sum_sq += acc.sum_sq;
    total.causality += acc.causality;
    total.spacelike += acc.spacelike;
    if (acc.first_failure && (!total.first_failure || *acc.first_failure < *total.first_failure)) {
      total.first_failure = acc.first_failure;
      total.first_failure_message = acc.first_failure_message;
    }
  }
  if (total.first_failure && options.abort_on_causality) {
    throw CausalityError("trial " + std::to_string(*total.first_failure) + ": " + total.first_failure_message);
  }
  stats.causality_violations = total.causality;
  stats.spacelike_trials = total.spacelike;

  for (std::size_t x = 0; x < settings.size(); ++x) {
    PauliCounts pooled;
    for (std::size_t a = 0; a < settings[x].basis.outcomes.size(); ++a) {
      ConditionalStats cs;
      cs.setting = settings[x].label;
      cs.outcome = settings[x].basis.outcomes[a];
      cs.pauli = total.counts[x][a];
      cs.count = cs.pauli.total();
      pooled += cs.pauli;
      try {
        cs.tomography = bob_tomography(cs.pauli);
        const DensityOp& sigma = predicted.settings[x].members[a].sigma;
        if (sigma.trace() > kZeroProbability) {
          cs.fidelity = fidelity(*cs.tomography, DensityOp(sigma.space, sigma.matrix / sigma.trace()));
        }
      } catch (const ProtocolError&) {
      }
      stats.conditionals.push_back(std::move(cs));
    }
    try {
      stats.pooled_tomography.push_back(bob_tomography(pooled));
    } catch (const ProtocolError&) {
      stats.pooled_tomography.push_back(std::nullopt);
    }
  }
  if (stats.pooled_tomography[0] && stats.pooled_tomography[1]) {
    stats.pooled_trace_distance = trace_distance(*stats.pooled_tomography[0], *stats.pooled_tomography[1]);
  }

  const double n = static_cast<double>(n_trials);
  stats.functional_sum = total.sum;
  stats.functional_sum_sq = total.sum_sq;
  stats.steering_value = static_cast<double>(total.sum) / n;
  stats.lhs_bound = lhs_bound({pauli_z(), pauli_x()});
  if (n_trials > 1) {
    const double mean = stats.steering_value;
    const double var = (static_cast<double>(total.sum_sq) - n * mean * mean) / (n - 1.0);
    stats.steering_stderr = std::sqrt(std::max(0.0, var) / n);
    if (*stats.steering_stderr > 0.0) stats.z_score = (mean - stats.lhs_bound) / *stats.steering_stderr;
  }
  stats.violation = stats.steering_stderr.has_value() && stats.z_score >= 5.0;
  return stats;
}

std::optional<double> IfmCounts::d2_given_transmitted() const {
  if (d1 + d2 == 0) return std::nullopt;
  return static_cast<double>(d2) / static_cast<double>(d1 + d2);
}

IfmCounts run_ifm(std::uint64_t n_trials, const MzVariant& variant, std::uint64_t seed) {
  if (n_trials == 0) throw ProtocolError("an IFM run needs at least one trial");
  const Circuit circuit = build_mach_zehnder(variant);

  // Flat outcome table: absorbed, then (D1,H), (D1,V), (D2,H), (D2,V).
  std::vector<double> probs(5, 0.0);
  for (const auto& h : propagate_all(circuit)) {
    if (std::find(h.labels.begin(), h.labels.end(), "absorb") != h.labels.end()) {
      probs[0] += h.probability;
      continue;
    }
    std::size_t k = 1;
    for (const std::string& port : {kD1Port, kD2Port}) {
      for (const std::string pol : {"H", "V"}) probs[k++] += h.probability * std::norm(h.state.amp({port, pol}));
    }
  }

  IfmCounts out;
  out.variant = variant.name();
  out.n = n_trials;
  out.p_absorbed = probs[0];
  out.p_d1 = probs[1] + probs[2];
  out.p_d2 = probs[3] + probs[4];
  std::array<std::uint64_t, 5> hits{};
  for (std::uint64_t i = 0; i < n_trials; ++i) {
    SplitMix64 r = trial_stream(seed, i, 0);
    ++hits[sample_index(probs, r.uniform())];
  }
  out.absorbed = hits[0];
  out.d1_h = hits[1];
  out.d1_v = hits[2];
  out.d2_h = hits[3];
  out.d2_v = hits[4];
  out.d1 = hits[1] + hits[2];
  out.d2 = hits[3] + hits[4];
  return out;
}

namespace {

Mat mode_projector(const Space& space, const std::vector<std::string>& mode) {
  const Vec hit = ket(space, mode).amps;
  return hit * hit.adjoint();
}

Mat path_projector(const Space& space, const std::string& path) {
  Mat local = Mat::Zero(2, 2);
  const auto k = static_cast<Eigen::Index>(space.label_index("path", path));
  local(k, k) = 1.0;
  return lift(space, "path", local, 0.0);
}

NullCollapse collapse(std::string name, const LabeledState& pre, std::string probe_name, const Mat& projector) {
  NullResult r = null_result_collapse(pre, projector);
  const LabeledState bare = r.state.space.has_vacuum() ? remove_vacuum(r.state) : r.state;
  DensityOp path_state = partial_trace(to_density(bare), "path");
  return {std::move(name), pre, std::move(probe_name), std::move(r), std::move(path_state)};
}

DensityOp full_state_without_vacuum(const LabeledState& s) {
  return to_density(s.space.has_vacuum() ? remove_vacuum(s) : s);
}

}  // namespace

EquivalenceReport steering_ifm_equivalence_report(std::uint64_t seed, std::uint64_t sample_trials) {
  EquivalenceReport rep;

  const Circuit absorber_mz = build_mach_zehnder(MzVariant::absorber());
  const LabeledState absorber_interior = propagate_unitary(absorber_mz, first_splitter_end(absorber_mz));
  rep.ifm_absorber = collapse("ifm-absorber", absorber_interior, "b", path_projector(absorber_interior.space, "b"));

  const Circuit polarizer_mz = build_mach_zehnder(MzVariant::polarizer(0.0));
  const LabeledState polarizer_interior = propagate_unitary(polarizer_mz, first_splitter_end(polarizer_mz));
  rep.ifm_polarizer = collapse("ifm-polarizer", polarizer_interior, "b,V",
                              mode_projector(polarizer_interior.space, {"b", "V"}));

  const LabeledState fig2 = build_fig2_state();
  rep.steering = collapse("steering", fig2, "b,V", mode_projector(fig2.space, {"b", "V"}));

  rep.fidelity_ifm_steering = fidelity(rep.ifm_absorber.path_state, rep.steering.path_state);
  rep.fidelity_polarizer_steering = fidelity(rep.ifm_polarizer.path_state, rep.steering.path_state);
  rep.fidelity_polarizer_steering_full =
      fidelity(full_state_without_vacuum(rep.ifm_polarizer.result.state), full_state_without_vacuum(rep.steering.result.state));

  const auto branches = std::get<std::vector<Branch>>(apply_element(absorber_interior, OpticalElement::absorber("b")));
  for (const auto& b : branches)
    if (b.label == "absorb") rep.absorber_absorb_probability = b.probability;
  rep.detect_path_click_probability = click_probability(absorber_interior, "b");
  rep.sample_trials = sample_trials;
  for (std::uint64_t i = 0; i < sample_trials; ++i) {
    SplitMix64 channel = trial_stream(seed, i, 0);
    if (channel.uniform() < rep.absorber_absorb_probability) ++rep.absorber_absorbed;
    SplitMix64 detector = trial_stream(seed, i, 1);
    if (detect_path(absorber_interior, "b", detector).outcome == "click") ++rep.detect_path_clicks;
  }

  rep.empty_d2_amplitude = propagate_unitary(build_mach_zehnder(MzVariant::empty())).amp({kD2Port, "H"});

  const DensityOp fig2_rho = to_density(fig2);
  rep.bob_nonselective = partial_trace(nonselective_measure(fig2_rho, MeasurementBasis::hv()), "path");
  for (const auto& rec : outcome_distribution(fig2, MeasurementBasis::hv())) {
    rep.bob_selective.push_back(partial_trace(to_density(std::get<LabeledState>(rec.post_state)), "path"));
  }
  return rep;
}

}  // namespace photonsteer
