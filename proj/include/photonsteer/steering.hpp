#pragma once

// Assemblages, CHSH and the two-setting linear steering functional.

#include <array>
#include <string>
#include <vector>

#include "photonsteer/measure.hpp"
#include "photonsteer/qstate.hpp"

namespace photonsteer {

class SteeringError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A measurement choice Alice can be asked to make.
struct Setting {
  std::string label;  // e.g. "blue"
  MeasurementBasis basis;
};

/// Blue = HV, yellow = DIAG on the polarization factor.
std::vector<Setting> blue_yellow_settings();

/// Which factors belong to whom. By default Alice holds the
/// polarization, Bob holds the path.
struct Bipartition {
  std::vector<std::string> alice{"pol"};
  std::vector<std::string> bob{"path"};
};

struct AssemblageMember {
  std::string outcome;
  int value;        // dichotomic sign of the outcome
  DensityOp sigma;  // subnormalized; trace = p(a|x)
};

struct AssemblageSetting {
  std::string label;
  std::vector<AssemblageMember> members;
};

/// {sigma_a|x}: Bob's conditional states given setting x and outcome a.
struct Assemblage {
  std::vector<AssemblageSetting> settings;

  const DensityOp& at(const std::string& setting, const std::string& outcome) const;
  /// Sum_a sigma_a|x.
  DensityOp marginal(std::size_t x) const;
};

/// sigma_a|x = Tr_A[(P_a|x (x) I) rho (P_a|x (x) I)]. Throws for inputs that
/// are not split exactly between Alice's and Bob's factors or that carry
/// vacuum weight.
Assemblage assemblage(const DensityOp& rho, const std::vector<Setting>& settings, const Bipartition& parts = {});
Assemblage assemblage(const LabeledState& s, const std::vector<Setting>& settings, const Bipartition& parts = {});

struct NoSignalling {
  bool ok;
  double max_deviation;  // largest entry-wise |difference| between marginals
};
NoSignalling no_signalling_check(const Assemblage& a);

/// Largest sum_x s_x <B_x> any single Bob state can reach, maximized over the
/// sign choices s. Every local-hidden-state assemblage with deterministic
/// responses is a mixture of such terms, so this bounds the functional.
double lhs_bound(const std::vector<Mat>& bob_observables);

struct SteeringValue {
  double value;
  double lhs_bound;
  bool violation;  // value > lhs_bound + 1e-9
};
/// S = sum_x sum_a value(a) tr(B_x sigma_a|x).
SteeringValue linear_steering_value(const Assemblage& a, const std::vector<Observable>& bob_observables);

/// Alice's observables A1, A2 and Bob's B1, B2, each with eigenvalues +-1.
struct DichotomicObservablePair {
  Mat a1, a2, b1, b2;
};

/// Qubit observable n . sigma for a unit Bloch vector.
Mat bloch_observable(const Eigen::Vector3d& n);

/// E(A1,B1) + E(A1,B2) + E(A2,B1) - E(A2,B2) by direct expectation on a
/// two-qubit state (first factor Alice).
double chsh_value(const DensityOp& rho, const DichotomicObservablePair& obs);

/// T_ij = tr(rho sigma_i (x) sigma_j).
Eigen::Matrix3d correlation_matrix(const DensityOp& rho);

struct ChshResult {
  double s_max;
  bool violation;  // s_max > 2 + 1e-9
  DichotomicObservablePair settings;
};
/// Optimal CHSH value 2 sqrt(u1 + u2) from the two largest eigenvalues of
/// T^T T, with settings that attain it. Throws for dimension != 4.
ChshResult chsh_max(const DensityOp& rho);

/// Brute-force CHSH maximum with all four measurement directions restricted
/// to the x-z great circle, sampled every `step_deg` degrees.
double chsh_angle_grid(const DensityOp& rho, double step_deg = 0.5);

struct LhvBound {
  double max_abs;
  std::vector<int> values;  // S of each of the 16 deterministic strategies
};
/// Enumerates the 16 deterministic local strategies (a1, a2, b1, b2 in +-1).
LhvBound lhv_chsh_bound();

/// One hidden state of a local-hidden-state model: weight, Alice's fixed
/// outcome index per setting, and the Bob state shipped with it.
struct LhsComponent {
  double weight;
  std::vector<std::size_t> responses;
  DensityOp bob_state;
};
using LhsEnsemble = std::vector<LhsComponent>;

/// Throws SteeringError unless weights are nonnegative and sum to 1 (1e-9),
/// responses cover every setting, and the Bob states are valid.
void validate_ensemble(const LhsEnsemble& e, const std::vector<Setting>& settings);
/// sigma_a|x = sum_l w_l [responses_l[x] == a] rho_l.
Assemblage lhs_assemblage(const LhsEnsemble& e, const std::vector<Setting>& settings);
/// Random ensemble of `components` hidden states on the path qubit.
LhsEnsemble random_lhs_ensemble(std::size_t components, std::size_t n_settings, SplitMix64& rng);

}  // namespace photonsteer
