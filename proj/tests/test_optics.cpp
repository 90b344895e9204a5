#include <cmath>

#include "doctest.h"
#include "photonsteer/optics.hpp"

using namespace photonsteer;

namespace {

const double r2 = std::sqrt(0.5);
const cplx I(0.0, 1.0);

// Hand-written 4x4 matrices on (aH, aV, bH, bV), independent of the element code.
Mat hwp_on_a(double theta_deg) {
  const double t = 2.0 * theta_deg * std::numbers::pi / 180.0;
  Mat m = Mat::Identity(4, 4);
  m(0, 0) = std::cos(t);
  m(0, 1) = std::sin(t);
  m(1, 0) = std::sin(t);
  m(1, 1) = -std::cos(t);
  return m;
}

Mat pbs_matrix() {
  // H stays on its path, V swaps a <-> b.
  Mat m = Mat::Zero(4, 4);
  m(0, 0) = 1.0;  // aH -> aH
  m(3, 1) = 1.0;  // aV -> bV
  m(2, 2) = 1.0;  // bH -> bH
  m(1, 3) = 1.0;  // bV -> aV
  return m;
}

}  // namespace

TEST_SUITE("optics") {

TEST_CASE("steering source amplitudes are (1/sqrt2, 0, 0, 1/sqrt2)") {
  std::vector<PrepEvent> log;
  const LabeledState psi = build_fig2_state(22.5, &log);
  Vec expected(4);
  expected << r2, 0.0, 0.0, r2;
  CHECK((psi.amps - expected).cwiseAbs().maxCoeff() < 1e-12);

  Vec in = Vec::Zero(4);
  in[0] = 1.0;
  const Vec oracle = pbs_matrix() * hwp_on_a(22.5) * in;
  CHECK((psi.amps - oracle).cwiseAbs().maxCoeff() < 1e-12);

  REQUIRE(!log.empty());
  CHECK(log.front().kind == "trigger_heralded");
}

TEST_CASE("source chain agrees with the hand-written matrices at other plate angles") {
  for (double theta : {0.0, 10.0, 30.0, 45.0, 67.5}) {
    Vec in = Vec::Zero(4);
    in[0] = 1.0;
    const Vec oracle = pbs_matrix() * hwp_on_a(theta) * in;
    CHECK((build_fig2_state(theta).amps - oracle).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("beam splitter reflection picks up a factor i") {
  const Space s = photon_space();
  const LabeledState out = apply_unitary(ket(s, {"a", "H"}), OpticalElement::bs50());
  CHECK(std::abs(out.amp({"a", "H"}) - r2) < 1e-15);
  CHECK(std::abs(out.amp({"b", "H"}) - I * r2) < 1e-15);
}

TEST_CASE("every unitary element is unitary on every photon space") {
  const std::vector<OpticalElement> elements = {
      OpticalElement::bs50(),       OpticalElement::pbs(),           OpticalElement::hwp(13.0, "a"),
      OpticalElement::hwp(40.0),    OpticalElement::phase("b", 0.3), OpticalElement::mirror("a"),
      OpticalElement::mirror(),     OpticalElement::qplate("a"),
  };
  for (bool oam : {false, true}) {
    for (bool vac : {false, true}) {
      const Space s = photon_space(oam, vac);
      for (const auto& e : elements) {
        if (e.kind == ElementKind::QPlate && !oam) continue;
        CHECK_MESSAGE(is_unitary(element_unitary(e, s)), e.name());
      }
    }
  }
}

TEST_CASE("channel Kraus operators are complete") {
  const Space s = photon_space(false, true);
  for (const auto& e : {OpticalElement::polarizer(30.0, "b"), OpticalElement::absorber("a")}) {
    Mat sum = Mat::Zero(5, 5);
    for (const auto& k : element_kraus(e, s)) sum += k.op.adjoint() * k.op;
    CHECK((sum - Mat::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("polarizer branches follow Malus's law") {
  const Space s = photon_space(false, true);
  for (double alpha : {0.0, 30.0, 60.0, 90.0}) {
    const auto res = apply_element(ket(s, {"b", "V"}), OpticalElement::polarizer(alpha, "b"));
    const auto& branches = std::get<std::vector<Branch>>(res);
    double transmit = 0.0;
    for (const auto& b : branches)
      if (b.label == "transmit") transmit = b.probability;
    const double a = alpha * std::numbers::pi / 180.0;
    CHECK(transmit == doctest::Approx(std::sin(a) * std::sin(a)).epsilon(1e-12));
  }
}

TEST_CASE("density propagation through a channel matches the pure branches") {
  const LabeledState psi = add_vacuum(build_fig2_state());
  const DensityOp rho = apply_element(to_density(psi), OpticalElement::polarizer(0.0, "b"));
  const ElementResult res = apply_element(psi, OpticalElement::polarizer(0.0, "b"));
  const auto& branches = std::get<std::vector<Branch>>(res);
  Mat mix = Mat::Zero(5, 5);
  for (const auto& b : branches) mix += b.probability * to_density(b.state).matrix;
  CHECK((rho.matrix - mix).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(rho.at({"vac"}, {"vac"}).real() == doctest::Approx(0.5));
}

TEST_CASE("q-plate output matches the circular and H/V expansion") {
  const QPlateStages st = qplate_stages();
  const Vec c = circular_oam_amplitudes(st.after_qplate);
  // (L,-2), (L,0), (L,+2), (R,-2), (R,0), (R,+2)
  CHECK(std::abs(c[0] - r2) < 1e-12);
  CHECK(std::abs(c[5] - r2) < 1e-12);
  CHECK(std::abs(c[1]) + std::abs(c[2]) + std::abs(c[3]) + std::abs(c[4]) < 1e-12);

  const LabeledState& s = st.after_qplate;
  CHECK(std::abs(s.amp({"a", "H", "+2"}) - 0.5) < 1e-12);
  CHECK(std::abs(s.amp({"a", "H", "-2"}) - 0.5) < 1e-12);
  CHECK(std::abs(s.amp({"a", "V", "+2"}) - 0.5 * I) < 1e-12);
  CHECK(std::abs(s.amp({"a", "V", "-2"}) + 0.5 * I) < 1e-12);
  CHECK(std::abs(s.amp({"a", "V", "+2"}) / s.amp({"a", "H", "+2"}) - I) < 1e-12);

  // The PBS then sends the V half to path b.
  const LabeledState& out = st.output;
  CHECK(std::abs(out.amp({"b", "V", "+2"}) - 0.5 * I) < 1e-12);
  CHECK(std::abs(out.amp({"a", "H", "-2"}) - 0.5) < 1e-12);
}

TEST_CASE("q-plate flips circular handedness and shifts OAM by 2") {
  const Space s = photon_space(true);
  Vec left = Vec::Zero(12);
  left[s.index_of({"a", "H", "0"})] = r2;
  left[s.index_of({"a", "V", "0"})] = -I * r2;
  const LabeledState out = apply_unitary(LabeledState(s, left), OpticalElement::qplate("a"));
  // |L,0> -> |R,+2> = (|H,+2> + i|V,+2>)/sqrt2
  CHECK(std::abs(out.amp({"a", "H", "+2"}) - r2) < 1e-12);
  CHECK(std::abs(out.amp({"a", "V", "+2"}) - I * r2) < 1e-12);
}

TEST_CASE("empty interferometer sends every photon to D1") {
  const LabeledState out = propagate_unitary(build_mach_zehnder(MzVariant::empty()));
  CHECK(out.amp({kD2Port, "H"}) == cplx(0.0));
  CHECK(out.amp({kD2Port, "V"}) == cplx(0.0));
  CHECK(std::norm(out.amp({kD1Port, "H"})) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("absorber interferometer: half absorbed, a quarter at each detector") {
  // Oracle on the path amplitudes alone: BS = [[1, i], [i, 1]]/sqrt2, the
  // absorber keeps path a, mirrors are a global phase.
  Eigen::Matrix2cd bs;
  bs << r2, I * r2, I * r2, r2;
  const Eigen::Vector2cd interior = bs * Eigen::Vector2cd(1.0, 0.0);
  const Eigen::Vector2cd out = bs * Eigen::Vector2cd(interior[0], 0.0);

  double absorbed = 0.0, d1 = 0.0, d2 = 0.0;
  for (const auto& h : propagate_all(build_mach_zehnder(MzVariant::absorber()))) {
    if (h.labels == std::vector<std::string>{"absorb"}) {
      absorbed += h.probability;
    } else {
      d1 += h.probability * std::norm(h.state.amp({kD1Port, "H"}));
      d2 += h.probability * std::norm(h.state.amp({kD2Port, "H"}));
    }
  }
  CHECK(absorbed == doctest::Approx(std::norm(interior[1])).epsilon(1e-12));
  CHECK(d1 == doctest::Approx(std::norm(out[1])).epsilon(1e-12));
  CHECK(d2 == doctest::Approx(std::norm(out[0])).epsilon(1e-12));
  CHECK(absorbed == doctest::Approx(0.5));
  CHECK(d2 == doctest::Approx(0.25));
}

TEST_CASE("history probabilities sum to one") {
  for (const auto& v : {MzVariant::empty(), MzVariant::absorber(), MzVariant::polarizer(0.0),
                        MzVariant::polarizer(33.0)}) {
    double total = 0.0;
    for (const auto& h : propagate_all(build_mach_zehnder(v))) total += h.probability;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("circuit validation rejects undeclared paths and missing OAM") {
  const Space s = photon_space();
  Circuit bad{s, ket(s, {"a", "H"}), {OpticalElement::absorber("c")}};
  CHECK_THROWS_AS(bad.validate(), OpticsError);
  Circuit no_oam{s, ket(s, {"a", "H"}), {OpticalElement::qplate("a")}};
  CHECK_THROWS_AS(no_oam.validate(), OpticsError);
  Circuit lossy{s, ket(s, {"a", "H"}), {OpticalElement::polarizer(0.0, "a")}};
  CHECK_THROWS_AS(propagate_unitary(lossy), OpticsError);
}

}  // TEST_SUITE
