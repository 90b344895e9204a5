#pragma once

// The operational steering session, Bob's tomography, the IFM runner and the
// steering/IFM comparison.
//
// Every trial draws from its own generator streams (see trial_stream), so a
// session gives bit-identical results for any number of workers:
//   stream 0  Bob's setting choice
//   stream 1  Alice's measurement
//   stream 2  Bob's tomography observable and outcome
//   stream 3  the hidden state of an LHS adversary

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "photonsteer/measure.hpp"
#include "photonsteer/optics.hpp"
#include "photonsteer/qstate.hpp"
#include "photonsteer/steering.hpp"

namespace photonsteer {

class ProtocolError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a trial's event log breaks the causal schedule.
class CausalityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 1D layout with the source at x = 0.
struct SpacetimeLayout {
  double x_alice = -1.0;
  double x_bob = 1.0;
  double c = 1.0;
  double fiber_delay = 2.0;

  /// Throws ProtocolError unless |x_alice|, |x_bob|, c > 0 and fiber_delay >= 0.
  void validate() const;
  bool operator==(const SpacetimeLayout&) const = default;
};

enum class EventKind { TriggerHeralded, BasisRequest, AliceMeasured, BobDetected };
std::string event_kind_name(EventKind k);

struct Event {
  EventKind kind;
  double t;
  double x;
  std::map<std::string, std::string> data;
};

/// Events of one trial in the order they were appended.
class EventLog {
 public:
  void append(Event e);
  const std::vector<Event>& events() const { return events_; }
  /// First event of the given kind; throws ProtocolError if absent.
  const Event& find(EventKind k) const;

 private:
  std::vector<Event> events_;
};

/// Timestamps of the four events for the layout. The herald fires at the
/// source at t = 0; Bob learns of it and issues the request at |x_bob|/c;
/// the photons reach both parties after their flight plus the fiber delay.
EventLog schedule_trial(const SpacetimeLayout& layout);

struct CausalCheck {
  bool ok = true;          // checks (i) and (ii)
  bool spacelike = false;  // (iii)
  std::vector<std::string> violations;
};

/// (i)   request time + |x_bob - x_alice|/c <= Alice's measurement time;
/// (ii)  the photon reaches Alice no earlier than the request and she
///       measures no earlier than the photon arrives;
/// (iii) whether Alice's and Bob's measurements are spacelike separated.
/// Throws ProtocolError when an event is missing.
CausalCheck verify_causal_order(const EventLog& log, const SpacetimeLayout& layout);

struct AliceStrategy {
  enum class Kind { Quantum, LHS };
  Kind kind = Kind::Quantum;
  LhsEnsemble ensemble;  // LHS only

  static AliceStrategy quantum() { return {}; }
  static AliceStrategy lhs(LhsEnsemble e) { return {Kind::LHS, std::move(e)}; }
};

/// Four hidden states with Bloch vectors (+-z +-x)/sqrt2 and responses that
/// follow the signs. It reaches the LHS bound sqrt2 exactly.
LhsEnsemble optimal_lhs_ensemble();

struct SessionOptions {
  unsigned workers = 1;
  /// When false, causal failures are counted instead of aborting the session.
  bool abort_on_causality = true;
  bool keep_logs = false;
  /// Path x pol state Alice and Bob share; build_fig2_state() when absent.
  std::optional<LabeledState> source;
};

/// Bob's Pauli measurement counts on one conditional ensemble.
struct PauliCounts {
  std::array<std::uint64_t, 3> plus{};   // Z, X, Y
  std::array<std::uint64_t, 3> minus{};

  std::uint64_t total() const;
  PauliCounts& operator+=(const PauliCounts& o);
};

struct ConditionalStats {
  std::string setting;
  std::string outcome;
  std::uint64_t count = 0;
  PauliCounts pauli;
  std::optional<DensityOp> tomography;  // absent when some observable was never measured
  std::optional<double> fidelity;       // to the source's conditional state
};

struct SessionStats {
  std::uint64_t n_trials = 0;
  std::vector<ConditionalStats> conditionals;  // setting-major, outcome order of the basis
  double steering_value = 0.0;
  std::optional<double> steering_stderr;  // undefined for a single trial
  double lhs_bound = 0.0;
  double z_score = 0.0;  // (value - bound) / stderr, 0 when stderr is undefined
  bool violation = false;  // z_score >= 5
  std::int64_t functional_sum = 0;      // sum of per-trial integer scores
  std::uint64_t functional_sum_sq = 0;  // sum of their squares
  std::vector<std::optional<DensityOp>> pooled_tomography;  // per setting
  std::optional<double> pooled_trace_distance;              // between the two settings
  std::uint64_t causality_violations = 0;
  std::uint64_t spacelike_trials = 0;
  std::vector<EventLog> logs;  // filled when SessionOptions::keep_logs
};

/// Runs n_trials rounds of the blue/yellow protocol. Throws ProtocolError for
/// an invalid strategy and CausalityError when a trial breaks the schedule
/// (unless counting is requested).
SessionStats run_steering_session(std::uint64_t n_trials, const AliceStrategy& strategy,
                                  const SpacetimeLayout& layout, std::uint64_t seed,
                                  const SessionOptions& options = {});

/// Linear inversion (I + sum_i r_i sigma_i)/2 on the path qubit, with
/// negative eigenvalues clipped and the trace restored. Throws ProtocolError
/// if an observable has no samples.
DensityOp bob_tomography(const PauliCounts& counts);
/// Same inversion from exact expectations <Z>, <X>, <Y>.
DensityOp bob_tomography(const std::array<double, 3>& expectations);

struct IfmCounts {
  std::string variant;
  std::uint64_t n = 0;
  std::uint64_t d1 = 0;
  std::uint64_t d2 = 0;
  std::uint64_t absorbed = 0;
  // Detector clicks split by polarization.
  std::uint64_t d1_h = 0, d1_v = 0, d2_h = 0, d2_v = 0;
  // Exact Born probabilities of the same three outcomes.
  double p_d1 = 0.0, p_d2 = 0.0, p_absorbed = 0.0;

  /// D2 fraction among photons that were not absorbed, if any.
  std::optional<double> d2_given_transmitted() const;
};

IfmCounts run_ifm(std::uint64_t n_trials, const MzVariant& variant, std::uint64_t seed);

struct NullCollapse {
  std::string name;
  LabeledState pre;   // interior state before the probe
  std::string probe;  // projector that found nothing, e.g. "b" or "b,V"
  NullResult result;
  DensityOp path_state;  // path factor of the collapsed state
};

struct EquivalenceReport {
  NullCollapse ifm_absorber;   // absorber in arm b of the MZ, nothing absorbed
  NullCollapse ifm_polarizer;  // polarizer-MZ interior, V on arm b absent
  NullCollapse steering;       // steering source, Alice finds no photon in |b,V>
  double fidelity_ifm_steering = 0.0;        // path states
  double fidelity_polarizer_steering = 0.0;  // path states
  double fidelity_polarizer_steering_full = 0.0;  // whole path x pol states

  // Absorber channel versus destructive detection on path b.
  double absorber_absorb_probability = 0.0;
  double detect_path_click_probability = 0.0;
  std::uint64_t sample_trials = 0;
  std::uint64_t absorber_absorbed = 0;
  std::uint64_t detect_path_clicks = 0;

  cplx empty_d2_amplitude;
  // Bob's path state when Alice's HV outcome is ignored (non-selective reading)
  // next to the selective post-states of the same measurement.
  DensityOp bob_nonselective;
  std::vector<DensityOp> bob_selective;
};

EquivalenceReport steering_ifm_equivalence_report(std::uint64_t seed, std::uint64_t sample_trials = 1000);

}  // namespace photonsteer
