#pragma once

#include <string>
#include <vector>

#include "photonsteer/qstate.hpp"
#include "photonsteer/rng.hpp"

namespace photonsteer {

class MeasurementError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class BasisName { HV, Diag, Circular, PathClick, Custom };

/// Complete projective measurement on one or more factors.
///
/// The named polarization bases follow the photon conventions of the optics
/// module: DIAG has |+> = (|V> + |H>)/sqrt2 and |-> = (|V> - |H>)/sqrt2, CIRC has
/// |L> = (|H> - i|V>)/sqrt2 and |R> = (|H> + i|V>)/sqrt2. Every outcome carries
/// a dichotomic value (+1 for the first, -1 for the second) used by the
/// correlation functionals.
struct MeasurementBasis {
  BasisName name = BasisName::Custom;
  std::vector<std::string> roles;
  std::vector<std::string> outcomes;
  std::vector<Mat> projectors;  // local to `roles`
  std::vector<int> values;

  static MeasurementBasis hv();
  static MeasurementBasis diag();
  static MeasurementBasis circular();
  static MeasurementBasis path();
  /// Eigenbasis of a qubit Pauli operator ('X', 'Y' or 'Z') on `role`;
  /// outcomes "+" and "-".
  static MeasurementBasis pauli(char axis, std::string role);
  /// Validates orthogonality, idempotence and completeness (1e-12).
  static MeasurementBasis custom(std::vector<std::string> roles, std::vector<std::string> outcomes,
                                 std::vector<Mat> projectors, std::vector<int> values = {});

  /// Reserved scenario word: HV, DIAG, CIRC, PATH or CUSTOM.
  std::string tag() const;
  std::size_t outcome_index(const std::string& outcome) const;
  /// Projector of outcome k embedded in `space` (zero on the vacuum).
  Mat lifted(const Space& space, std::size_t k) const;
  /// Dichotomic observable sum_k values[k] P_k on the measured factors.
  Mat local_observable() const;
};

/// Parses HV, DIAG, CIRC or PATH.
MeasurementBasis basis_from_tag(const std::string& tag);

/// Label of the implicit outcome reported when the measured photon is absent.
inline const std::string kNoPhoton = "none";

struct OutcomeRecord {
  std::string basis;
  std::string outcome;
  double probability = 0.0;
  QuantumValue post_state;
  bool destructive = false;
};

/// All outcomes with nonzero Born probability, in basis order, followed by
/// the implicit "none" outcome when the vacuum is populated.
std::vector<OutcomeRecord> outcome_distribution(const LabeledState& s, const MeasurementBasis& basis);
std::vector<OutcomeRecord> outcome_distribution(const DensityOp& rho, const MeasurementBasis& basis);

/// Samples one Born outcome and collapses onto the normalized branch.
OutcomeRecord measure_projective(const LabeledState& s, const MeasurementBasis& basis, SplitMix64& rng);
OutcomeRecord measure_projective(const DensityOp& rho, const MeasurementBasis& basis, SplitMix64& rng);
/// Branch for a given outcome; throws MeasurementError for zero-probability outcomes.
OutcomeRecord measure_outcome(const LabeledState& s, const MeasurementBasis& basis, const std::string& outcome);
OutcomeRecord measure_outcome(const DensityOp& rho, const MeasurementBasis& basis, const std::string& outcome);

struct NullResult {
  LabeledState state;
  double probability;
};

/// State update when a probe represented by projector P finds nothing:
/// (I - P)|s> normalized, with its Born probability.
NullResult null_result_collapse(const LabeledState& s, const Mat& absent_projector);
NullResult null_result_collapse(const LabeledState& s, const MeasurementBasis& basis, const std::string& absent_outcome);

/// Probability that a detector on `path` clicks.
double click_probability(const LabeledState& s, const std::string& path);
/// Destructive path detection: a click leaves the vacuum, no click collapses
/// onto the complementary branch. Outcomes are "click" and "no-click".
OutcomeRecord detect_path(const LabeledState& s, const std::string& path, SplitMix64& rng);

/// Sum_k P_k rho P_k (plus the vacuum block when present).
DensityOp nonselective_measure(const DensityOp& rho, const MeasurementBasis& basis);
DensityOp nonselective_measure(const LabeledState& s, const MeasurementBasis& basis);

}  // namespace photonsteer
