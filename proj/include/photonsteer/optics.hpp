#pragma once

// Linear-optics elements acting on the photon space (path x pol [x oam]).
//
// Conventions, fixed once for the whole library:
//   BS50      a -> (a + i b)/sqrt2, b -> (i a + b)/sqrt2  (reflection picks up i)
//   PBS       H keeps its path, V switches path, no phase
//   HWP(t)    Jones [[cos 2t, sin 2t], [sin 2t, -cos 2t]]
//   circular  |L> = (|H> - i|V>)/sqrt2, |R> = (|H> + i|V>)/sqrt2
//   QPlate    |L,l> -> |R,l+2>, |R,l> -> |L,l-2>; the three-level OAM register
//             {-2, 0, +2} is closed cyclically so the element stays unitary
//   Mirror    phase i on its path (a reflection)
// Polarizer and Absorber are two-outcome channels whose loss branch lands on
// the vacuum label.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "photonsteer/qstate.hpp"

namespace photonsteer {

class OpticsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ElementKind { BS50, PBS, HWP, Polarizer, QPlate, Absorber, PhaseShift, Mirror };

struct OpticalElement {
  ElementKind kind = ElementKind::BS50;
  /// HWP fast-axis angle or polarizer pass axis, in degrees; phase in radians.
  double angle = 0.0;
  /// Path the element sits on. Empty means every path (free-space elements).
  std::string path;

  static OpticalElement bs50() { return {ElementKind::BS50, 0.0, ""}; }
  static OpticalElement pbs() { return {ElementKind::PBS, 0.0, ""}; }
  static OpticalElement hwp(double theta_deg, std::string path = "") { return {ElementKind::HWP, theta_deg, std::move(path)}; }
  static OpticalElement polarizer(double alpha_deg, std::string path = "") {
    return {ElementKind::Polarizer, alpha_deg, std::move(path)};
  }
  static OpticalElement qplate(std::string path = "") { return {ElementKind::QPlate, 0.0, std::move(path)}; }
  static OpticalElement absorber(std::string path) { return {ElementKind::Absorber, 0.0, std::move(path)}; }
  static OpticalElement phase(std::string path, double phi_rad) { return {ElementKind::PhaseShift, phi_rad, std::move(path)}; }
  static OpticalElement mirror(std::string path = "") { return {ElementKind::Mirror, 0.0, std::move(path)}; }

  bool is_unitary() const { return kind != ElementKind::Polarizer && kind != ElementKind::Absorber; }
  bool is_splitter() const { return kind == ElementKind::BS50 || kind == ElementKind::PBS; }
  std::string name() const;

  bool operator==(const OpticalElement&) const = default;
};

/// One Kraus operator with the label of the branch it produces.
struct KrausOp {
  std::string label;
  Mat op;
};

/// Full-space unitary of a unitary element; the vacuum is left untouched.
Mat element_unitary(const OpticalElement& e, const Space& space);
/// Kraus set of any element on `space` (which must carry the vacuum label for
/// channel kinds). Unitary kinds return a single operator labelled "unitary".
std::vector<KrausOp> element_kraus(const OpticalElement& e, const Space& space);
/// Projector onto the subspace a channel element removes from the beam.
Mat loss_projector(const OpticalElement& e, const Space& space);

struct Branch {
  std::string label;  // "transmit" or "absorb"
  LabeledState state;  // normalized
  double probability;
};

using ElementResult = std::variant<LabeledState, std::vector<Branch>>;

/// Unitary kinds return the transformed state; channel kinds return the
/// possible branches (zero-probability branches omitted). Pure states gain
/// the vacuum label when a channel needs it.
ElementResult apply_element(const LabeledState& s, const OpticalElement& e);
/// Sum_k K rho K^dagger.
DensityOp apply_element(const DensityOp& rho, const OpticalElement& e);
/// Convenience for unitary kinds; throws OpticsError for channels.
LabeledState apply_unitary(const LabeledState& s, const OpticalElement& e);

struct Circuit {
  Space space;
  LabeledState input;
  std::vector<OpticalElement> elements;

  /// Throws OpticsError when an element references an undeclared path or needs
  /// a factor (OAM) the space lacks.
  void validate() const;
};

/// Runs the first `count` elements (all when count exceeds the size); every
/// one of them must be unitary.
LabeledState propagate_unitary(const Circuit& c, std::size_t count = SIZE_MAX);

/// Every history through the circuit's channels, with probabilities summing to 1.
struct History {
  std::vector<std::string> labels;  // one per channel element
  LabeledState state;
  double probability;
};
std::vector<History> propagate_all(const Circuit& c);
/// Index just past the first splitter (BS50 or PBS); the interior of an interferometer.
std::size_t first_splitter_end(const Circuit& c);

/// Heralding and preparation events recorded while building a source state.
struct PrepEvent {
  std::string kind;
  std::string detail;
};

/// Steering source chain: heralded |a,H>, HWP on path a, PBS.
Circuit fig2_circuit(double hwp_theta_deg = 22.5);
/// (|a,H> + |b,V>)/sqrt2 by default. The trigger herald is a classical event
/// appended to `log` when given.
LabeledState build_fig2_state(double hwp_theta_deg = 22.5, std::vector<PrepEvent>* log = nullptr);

struct QPlateStages {
  LabeledState after_qplate;  // on path a, OAM register active
  LabeledState output;        // after the PBS
};
QPlateStages qplate_stages(std::vector<PrepEvent>* log = nullptr);
LabeledState build_qplate_state(std::vector<PrepEvent>* log = nullptr);

/// Amplitudes of a path-a state in the circular x OAM product basis, ordered
/// (L,-2), (L,0), (L,+2), (R,-2), (R,0), (R,+2).
Vec circular_oam_amplitudes(const LabeledState& s, const std::string& path = "a");

struct MzVariant {
  enum class Kind { Empty, Absorber, Polarizer };
  Kind kind = Kind::Empty;
  double alpha_deg = 0.0;  // polarizer pass axis

  static MzVariant empty() { return {Kind::Empty, 0.0}; }
  static MzVariant absorber() { return {Kind::Absorber, 0.0}; }
  static MzVariant polarizer(double alpha_deg = 0.0) { return {Kind::Polarizer, alpha_deg}; }
  std::string name() const;
  bool operator==(const MzVariant&) const = default;
};

/// Mach-Zehnder interferometer. The photon enters on path a; output port b
/// feeds detector D1 (bright port of the empty interferometer) and output
/// port a feeds D2 (dark port). The object sits in arm b.
///   Empty:     BS50, mirrors, BS50
///   Absorber:  BS50, mirrors, absorber(b), BS50
///   Polarizer: HWP(22.5) on a, PBS, mirrors, polarizer(alpha) on b, BS50
Circuit build_mach_zehnder(const MzVariant& variant);

inline const std::string kD1Port = "b";
inline const std::string kD2Port = "a";

}  // namespace photonsteer
