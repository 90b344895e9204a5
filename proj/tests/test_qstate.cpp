#include <cmath>

#include "doctest.h"
#include "photonsteer/qstate.hpp"

using namespace photonsteer;

namespace {

const double r2 = std::sqrt(0.5);

// Pure two-qubit state a|00> + b|01> + c|10> + d|11> has concurrence 2|ad - bc|.
double pure_concurrence_oracle(const Vec& v) { return 2.0 * std::abs(v[0] * v[3] - v[1] * v[2]); }

}  // namespace

TEST_SUITE("qstate") {

TEST_CASE("photon space layout is vacuum first, then path-major product") {
  const Space s = photon_space(false, true);
  CHECK(s.dim() == 5);
  CHECK(s.label(0) == "vac");
  CHECK(s.label(1) == "a,H");
  CHECK(s.label(2) == "a,V");
  CHECK(s.label(3) == "b,H");
  CHECK(s.label(4) == "b,V");
  CHECK(s.index_of({"b", "H"}) == 3);

  const Space o = photon_space(true, false);
  CHECK(o.dim() == 12);
  CHECK(o.index_of({"a", "V", "+2"}) == 5);
  CHECK(o.digits(o.index_of({"b", "H", "0"})) == std::vector<std::size_t>{1, 0, 1});
  CHECK_THROWS_AS(o.index_of({"c", "H", "0"}), StateError);
  CHECK_THROWS_AS(s.role_index("oam"), StateError);
}

TEST_CASE("photon_basis gives structured labels in index order") {
  const auto basis = photon_basis(photon_space(false, true));
  REQUIRE(basis.size() == 5);
  CHECK(basis[0].sector == Sector::Vacuum);
  CHECK(basis[4].sector == Sector::SinglePhoton);
  CHECK(basis[4].path == PathLabel::B);
  CHECK(basis[4].pol == PolLabel::V);
  CHECK_THROWS(photon_basis(Space({qubit_factor("q")})));
}

TEST_CASE("superpose and normalize") {
  const Space s = photon_space();
  const LabeledState psi = superpose({{1.0, ket(s, {"a", "H"})}, {1.0, ket(s, {"b", "V"})}});
  const Normalized n = normalize(psi);
  CHECK(n.norm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(std::abs(n.state.amp({"a", "H"}) - r2) < 1e-15);
  CHECK_THROWS_WITH_AS(normalize(LabeledState(s, Vec::Zero(4))), "impossible branch", StateError);
}

TEST_CASE("tensor product of path and polarization kets matches the photon space") {
  const LabeledState p = ket(Space({path_factor()}), {"b"});
  const LabeledState q = ket(Space({pol_factor()}), {"V"});
  const LabeledState t = tensor(p, q);
  CHECK(t.space == photon_space());
  CHECK(t.amp({"b", "V"}) == cplx(1.0));

  const QuantumValue u = p;
  const QuantumValue v = to_density(q);
  CHECK_THROWS_WITH_AS(tensor(u, v), "kind mismatch", StateError);
}

TEST_CASE("partial trace of the entangled path-polarization state is maximally mixed") {
  const Space s = photon_space();
  const LabeledState psi = normalize(superpose({{1.0, ket(s, {"a", "H"})}, {1.0, ket(s, {"b", "V"})}})).state;
  const DensityOp rho_path = partial_trace(to_density(psi), "path");
  CHECK((rho_path.matrix - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(purity(rho_path) == doctest::Approx(0.5));
  CHECK(entropy_bits(rho_path) == doctest::Approx(1.0));
}

TEST_CASE("partial trace keeps the vacuum population") {
  const Space s = photon_space(false, true);
  const LabeledState psi = normalize(superpose({{1.0, ket(s, {"vac"})}, {1.0, ket(s, {"a", "V"})}})).state;
  const DensityOp r = partial_trace(to_density(psi), "path");
  CHECK(r.space.has_vacuum());
  CHECK(r.at({"vac"}, {"vac"}).real() == doctest::Approx(0.5));
  CHECK(r.at({"a"}, {"a"}).real() == doctest::Approx(0.5));
  CHECK(std::abs(r.at({"vac"}, {"a"})) == 0.0);
}

TEST_CASE("partial trace preserves trace and positivity on random states") {
  SplitMix64 rng(5);
  const Space s = photon_space(true, false);
  for (int i = 0; i < 100; ++i) {
    const DensityOp rho = random_density(s, rng, 1 + i % 4);
    for (const char* keep : {"path", "pol", "oam"}) {
      const DensityOp r = partial_trace(rho, keep);
      CHECK(r.trace() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(is_valid_density(r));
    }
  }
}

TEST_CASE("reorder is a permutation that round-trips") {
  SplitMix64 rng(9);
  const LabeledState psi = random_state(photon_space(true), rng);
  const LabeledState swapped = reorder(psi, {"oam", "path", "pol"});
  CHECK(swapped.space.factors()[0].role == "oam");
  CHECK(swapped.amp({"+2", "b", "H"}) == psi.amp({"b", "H", "+2"}));
  const LabeledState back = reorder(swapped, {"path", "pol", "oam"});
  CHECK((back.amps - psi.amps).norm() == 0.0);
}

TEST_CASE("expectation values") {
  const Space q({qubit_factor("q")});
  const LabeledState plus = normalize(superpose({{1.0, ket(q, {"0"})}, {1.0, ket(q, {"1"})}})).state;
  CHECK(expectation(plus, Observable(q, pauli_x())) == doctest::Approx(1.0));
  CHECK(std::abs(expectation(plus, Observable(q, pauli_z()))) < 1e-15);
  CHECK_THROWS_AS(Observable(q, Mat{{0.0, 1.0}, {0.0, 0.0}}), StateError);
  CHECK_THROWS_AS(expectation(plus, Observable(photon_space(), Mat::Identity(4, 4))), StateError);
}

TEST_CASE("fidelity agrees with the pure-state overlap and is symmetric") {
  SplitMix64 rng(21);
  const Space s = photon_space();
  for (int i = 0; i < 50; ++i) {
    const LabeledState a = random_state(s, rng);
    const LabeledState b = random_state(s, rng);
    const double oracle = std::norm(a.amps.dot(b.amps));
    CHECK(fidelity(to_density(a), to_density(b)) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(fidelity(a, b) == doctest::Approx(oracle).epsilon(1e-12));
    const DensityOp r = random_density(s, rng, 2);
    const DensityOp t = random_density(s, rng, 3);
    const double f = fidelity(r, t);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0 + 1e-12);
    CHECK(f == doctest::Approx(fidelity(t, r)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(fidelity(DensityOp(s, Mat::Identity(4, 4)), DensityOp(s, 0.25 * Mat::Identity(4, 4))), StateError);
}

TEST_CASE("Wootters concurrence matches the pure-state formula") {
  SplitMix64 rng(33);
  const Space s({qubit_factor("x"), qubit_factor("y")});
  for (int i = 0; i < 100; ++i) {
    const LabeledState psi = random_state(s, rng);
    CHECK(concurrence(to_density(psi)) == doctest::Approx(pure_concurrence_oracle(psi.amps)).epsilon(1e-8));
  }
  const LabeledState bell = normalize(superpose({{1.0, ket(s, {"0", "0"})}, {1.0, ket(s, {"1", "1"})}})).state;
  CHECK(concurrence(to_density(bell)) == doctest::Approx(1.0));
  CHECK(concurrence(DensityOp(s, 0.25 * Mat::Identity(4, 4))) == doctest::Approx(0.0));
}

TEST_CASE("lift embeds a local operator and keeps the vacuum value") {
  const Space s = photon_space(false, true);
  const Mat z = lift(s, "pol", pauli_z(), 7.0);
  CHECK(z(0, 0) == cplx(7.0));
  CHECK(z(s.index_of({"b", "V"}), s.index_of({"b", "V"})) == cplx(-1.0));
  CHECK(z(s.index_of({"a", "H"}), s.index_of({"a", "H"})) == cplx(1.0));
}

TEST_CASE("vacuum label can be added and removed") {
  const LabeledState psi = ket(photon_space(), {"a", "V"});
  const LabeledState with = add_vacuum(psi);
  CHECK(with.space.has_vacuum());
  CHECK(with.amps[0] == cplx(0.0));
  CHECK((remove_vacuum(with).amps - psi.amps).norm() == 0.0);
  CHECK_THROWS_AS(remove_vacuum(ket(photon_space(false, true), {"vac"})), StateError);
}

TEST_CASE("random generators produce valid objects") {
  SplitMix64 rng(3);
  for (int i = 0; i < 20; ++i) {
    CHECK(is_unitary(random_unitary(6, rng), 1e-10));
    CHECK(is_valid_density(random_density(photon_space(), rng)));
    CHECK(random_state(photon_space(true), rng).norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("trial streams are deterministic and distinct") {
  SplitMix64 a = trial_stream(42, 7, 1);
  SplitMix64 b = trial_stream(42, 7, 1);
  SplitMix64 c = trial_stream(42, 7, 2);
  SplitMix64 d = trial_stream(42, 8, 1);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
  double lo = 1.0, hi = 0.0;
  SplitMix64 r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
}

}  // TEST_SUITE
