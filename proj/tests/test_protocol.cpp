#include <cmath>
#include <numbers>

#include "doctest.h"
#include "photonsteer/protocol.hpp"

using namespace photonsteer;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("default schedule places the four events") {
  const SpacetimeLayout layout;
  const EventLog log = schedule_trial(layout);
  REQUIRE(log.events().size() == 4);
  CHECK(log.find(EventKind::TriggerHeralded).t == 0.0);
  CHECK(log.find(EventKind::BasisRequest).t == doctest::Approx(1.0));
  CHECK(log.find(EventKind::BasisRequest).x == doctest::Approx(1.0));
  CHECK(log.find(EventKind::AliceMeasured).t == doctest::Approx(3.0));
  CHECK(log.find(EventKind::AliceMeasured).x == doctest::Approx(-1.0));
  CHECK(log.find(EventKind::BobDetected).t == doctest::Approx(3.0));
  CHECK(event_kind_name(EventKind::BobDetected) == "bob_detected");
}

TEST_CASE("causal order holds with enough fiber and fails without it") {
  const SpacetimeLayout layout;
  const CausalCheck ok = verify_causal_order(schedule_trial(layout), layout);
  CHECK(ok.ok);
  CHECK(ok.spacelike);
  CHECK(ok.violations.empty());

  SpacetimeLayout short_fiber;
  short_fiber.fiber_delay = 0.0;
  const CausalCheck bad = verify_causal_order(schedule_trial(short_fiber), short_fiber);
  CHECK_FALSE(bad.ok);
  CHECK(bad.violations.size() == 2);

  // Exactly enough delay for the request to arrive is still causal.
  SpacetimeLayout edge;
  edge.fiber_delay = 2.0;
  edge.x_alice = -1.0;
  edge.x_bob = 1.0;
  CHECK(verify_causal_order(schedule_trial(edge), edge).ok);
}

TEST_CASE("a tampered log is caught") {
  const SpacetimeLayout layout;
  const EventLog good = schedule_trial(layout);
  EventLog early;
  for (Event e : good.events()) {
    if (e.kind == EventKind::AliceMeasured) e.t = 1.5;
    early.append(e);
  }
  CHECK_FALSE(verify_causal_order(early, layout).ok);
  EventLog neg;
  CHECK_THROWS_AS(neg.append({EventKind::TriggerHeralded, -1.0, 0.0, {}}), ProtocolError);
  CHECK_THROWS_AS(neg.find(EventKind::BobDetected), ProtocolError);
}

TEST_CASE("layout validation") {
  SpacetimeLayout l;
  l.c = 0.0;
  CHECK_THROWS_AS(l.validate(), ProtocolError);
  SpacetimeLayout m;
  m.x_alice = 0.0;
  CHECK_THROWS_AS(m.validate(), ProtocolError);
  SpacetimeLayout n;
  n.fiber_delay = -1.0;
  CHECK_THROWS_AS(n.validate(), ProtocolError);
}

TEST_CASE("quantum session reproduces S = 2 and flags a violation") {
  const std::uint64_t n = 100000;
  const SessionStats s = run_steering_session(n, AliceStrategy::quantum(), SpacetimeLayout{}, 42);
  REQUIRE(s.steering_stderr.has_value());
  // Score is 6 with probability 1/3 and 0 otherwise: variance 8 per trial.
  CHECK(*s.steering_stderr == doctest::Approx(std::sqrt(8.0 / n)).epsilon(0.05));
  CHECK(std::abs(s.steering_value - 2.0) < 3.0 * *s.steering_stderr);
  CHECK(s.lhs_bound == doctest::Approx(kSqrt2));
  CHECK(s.z_score >= 5.0);
  CHECK(s.violation);
  CHECK(s.causality_violations == 0);
  CHECK(s.spacelike_trials == n);
  CHECK(s.steering_value == doctest::Approx(static_cast<double>(s.functional_sum) / n));
}

TEST_CASE("the optimal LHS model sits at the bound") {
  const std::uint64_t n = 100000;
  const SessionStats s = run_steering_session(n, AliceStrategy::lhs(optimal_lhs_ensemble()), SpacetimeLayout{}, 42);
  CHECK(std::abs(s.steering_value - kSqrt2) < 3.0 * *s.steering_stderr);
  CHECK_FALSE(s.violation);
}

TEST_CASE("random LHS adversaries never beat the bound") {
  SplitMix64 gen(4);
  const auto settings = blue_yellow_settings();
  for (int k = 0; k < 20; ++k) {
    const LhsEnsemble e = random_lhs_ensemble(4, settings.size(), gen);
    const SessionStats s = run_steering_session(20000, AliceStrategy::lhs(e), SpacetimeLayout{}, 1000 + k);
    CHECK(s.steering_value <= kSqrt2 + 3.0 * *s.steering_stderr);
    CHECK_FALSE(s.violation);
  }
}

TEST_CASE("a single trial has no defined standard error") {
  const SessionStats s = run_steering_session(1, AliceStrategy::quantum(), SpacetimeLayout{}, 3);
  CHECK_FALSE(s.steering_stderr.has_value());
  CHECK(s.z_score == 0.0);
  CHECK_FALSE(s.violation);
  CHECK_THROWS_AS(run_steering_session(0, AliceStrategy::quantum(), SpacetimeLayout{}, 3), ProtocolError);
}

TEST_CASE("worker count does not change the result") {
  SessionOptions one;
  SessionOptions three;
  three.workers = 3;
  const SessionStats a = run_steering_session(30001, AliceStrategy::quantum(), SpacetimeLayout{}, 9, one);
  const SessionStats b = run_steering_session(30001, AliceStrategy::quantum(), SpacetimeLayout{}, 9, three);
  CHECK(a.functional_sum == b.functional_sum);
  CHECK(a.functional_sum_sq == b.functional_sum_sq);
  REQUIRE(a.conditionals.size() == b.conditionals.size());
  for (std::size_t i = 0; i < a.conditionals.size(); ++i) {
    CHECK(a.conditionals[i].pauli.plus == b.conditionals[i].pauli.plus);
    CHECK(a.conditionals[i].pauli.minus == b.conditionals[i].pauli.minus);
  }
}

TEST_CASE("tomography from exact expectations reproduces the state") {
  const Space bob({path_factor()});
  SplitMix64 rng(12);
  for (int i = 0; i < 20; ++i) {
    const DensityOp rho = random_density(bob, rng);
    const std::array<double, 3> e{expectation(rho, Observable(bob, pauli_z())),
                                  expectation(rho, Observable(bob, pauli_x())),
                                  expectation(rho, Observable(bob, pauli_y()))};
    CHECK((bob_tomography(e).matrix - rho.matrix).cwiseAbs().maxCoeff() < 1e-12);
  }
  // Unphysical estimates are clipped back to a valid state.
  CHECK(is_valid_density(bob_tomography(std::array<double, 3>{1.0, 1.0, 0.0})));
  CHECK_THROWS_AS(bob_tomography(PauliCounts{}), ProtocolError);
}

TEST_CASE("conditional states are recovered by tomography") {
  const SessionStats s = run_steering_session(100000, AliceStrategy::quantum(), SpacetimeLayout{}, 42);
  REQUIRE(s.conditionals.size() == 4);
  std::uint64_t total = 0;
  for (const auto& c : s.conditionals) {
    total += c.count;
    REQUIRE(c.tomography.has_value());
    REQUIRE(c.fidelity.has_value());
    CHECK(*c.fidelity > 0.99);
  }
  CHECK(total == 100000);
  // Without Alice's outcome Bob sees the same mixed state for both settings.
  REQUIRE(s.pooled_trace_distance.has_value());
  CHECK(*s.pooled_trace_distance < 0.02);
}

TEST_CASE("LHS conditionals average the hidden states") {
  const LhsEnsemble e = optimal_lhs_ensemble();
  const SessionStats s = run_steering_session(100000, AliceStrategy::lhs(e), SpacetimeLayout{}, 5);
  const Assemblage predicted = lhs_assemblage(e, blue_yellow_settings());
  for (const auto& c : s.conditionals) {
    REQUIRE(c.tomography.has_value());
    DensityOp expected = predicted.at(c.setting, c.outcome);
    expected.matrix /= expected.trace();
    CHECK(fidelity(*c.tomography, expected) > 0.99);
  }
}

TEST_CASE("causality violations abort or are counted") {
  SpacetimeLayout bad;
  bad.fiber_delay = 0.0;
  CHECK_THROWS_AS(run_steering_session(10, AliceStrategy::quantum(), bad, 1), CausalityError);
  SessionOptions count;
  count.abort_on_causality = false;
  const SessionStats s = run_steering_session(10, AliceStrategy::quantum(), bad, 1, count);
  CHECK(s.causality_violations == 10);
}

TEST_CASE("logs carry the trial data when requested") {
  SessionOptions o;
  o.keep_logs = true;
  const SessionStats s = run_steering_session(5, AliceStrategy::quantum(), SpacetimeLayout{}, 2, o);
  REQUIRE(s.logs.size() == 5);
  for (const auto& log : s.logs) {
    REQUIRE(log.events().size() == 4);
    CHECK(log.find(EventKind::AliceMeasured).data.count("outcome") == 1);
    CHECK(log.find(EventKind::BobDetected).data.count("observable") == 1);
  }
}

TEST_CASE("invalid strategies are rejected") {
  const DensityOp mixed(Space({path_factor()}), 0.5 * Mat::Identity(2, 2));
  CHECK_THROWS(run_steering_session(10, AliceStrategy::lhs({{0.5, {0, 0}, mixed}}), SpacetimeLayout{}, 1));
  const DensityOp wrong(Space({pol_factor()}), 0.5 * Mat::Identity(2, 2));
  CHECK_THROWS(run_steering_session(10, AliceStrategy::lhs({{1.0, {0, 0}, wrong}}), SpacetimeLayout{}, 1));
  SessionOptions o;
  o.source = ket(photon_space(true), {"a", "H", "0"});
  CHECK_THROWS_AS(run_steering_session(10, AliceStrategy::quantum(), SpacetimeLayout{}, 1, o), ProtocolError);
}

TEST_CASE("empty interferometer never fires D2") {
  const IfmCounts c = run_ifm(20000, MzVariant::empty(), 7);
  CHECK(c.d2 == 0);
  CHECK(c.absorbed == 0);
  CHECK(c.d1 == 20000);
}

TEST_CASE("absorber interferometer statistics") {
  const std::uint64_t n = 100000;
  const IfmCounts c = run_ifm(n, MzVariant::absorber(), 7);
  CHECK(c.d1 + c.d2 + c.absorbed == n);
  CHECK(std::abs(static_cast<double>(c.d1) / n - 0.25) < 0.005);
  CHECK(std::abs(static_cast<double>(c.d2) / n - 0.25) < 0.005);
  CHECK(std::abs(static_cast<double>(c.absorbed) / n - 0.5) < 0.005);
  CHECK(c.p_d2 == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(*c.d2_given_transmitted() == doctest::Approx(static_cast<double>(c.d2) / (c.d1 + c.d2)));
  // Frozen counts for this seed.
  CHECK(c.d1 == 25003);
  CHECK(c.d2 == 24939);
  CHECK(c.absorbed == 50058);
}

TEST_CASE("polarizer interferometer splits by polarization") {
  const std::uint64_t n = 50000;
  const IfmCounts c = run_ifm(n, MzVariant::polarizer(0.0), 7);
  CHECK(c.d1_h + c.d1_v + c.d2_h + c.d2_v + c.absorbed == n);
  CHECK(c.d1 == c.d1_h + c.d1_v);
  // Arm b carries only V and the polarizer passes H, so all of arm b is absorbed.
  CHECK(c.p_absorbed == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c.p_d2 == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::abs(static_cast<double>(c.absorbed) / n - 0.5) < 0.01);

  // At 90 degrees nothing is absorbed, but the arms stay orthogonally
  // polarized and never interfere, so D2 still fires half the time.
  const IfmCounts open = run_ifm(n, MzVariant::polarizer(90.0), 7);
  CHECK(open.absorbed == 0);
  CHECK(open.p_d2 == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("null results in the interferometer and the steering source collapse alike") {
  const EquivalenceReport r = steering_ifm_equivalence_report(11, 1000);
  CHECK(std::abs(r.fidelity_ifm_steering - 1.0) < 1e-12);
  CHECK(std::abs(r.fidelity_polarizer_steering - 1.0) < 1e-12);
  CHECK(std::abs(r.fidelity_polarizer_steering_full - 1.0) < 1e-12);
  CHECK(r.ifm_absorber.result.probability == doctest::Approx(0.5));
  CHECK(r.steering.result.probability == doctest::Approx(0.5));
  CHECK(std::abs(r.empty_d2_amplitude) == 0.0);
  CHECK(r.absorber_absorb_probability == doctest::Approx(0.5));
  CHECK(r.detect_path_click_probability == doctest::Approx(0.5));
  CHECK(r.sample_trials == 1000);
  CHECK(std::abs(static_cast<double>(r.absorber_absorbed) / 1000.0 - 0.5) < 0.06);
  CHECK(std::abs(static_cast<double>(r.detect_path_clicks) / 1000.0 - 0.5) < 0.06);
  REQUIRE(r.bob_selective.size() == 2);
  CHECK((r.bob_nonselective.matrix - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

}  // TEST_SUITE
