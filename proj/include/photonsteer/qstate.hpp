#pragma once

// Dense linear algebra on small labeled Hilbert spaces.
//
// A Space is an optional vacuum label followed by the product basis of an
// ordered list of factors (path, polarization, OAM, or any named qudit).
// Index 0 is the vacuum when present; photon basis states follow in
// row-major order over the factors, so the first factor varies slowest.
// The photonic factors used by the optics code are always declared in the
// canonical order path, pol, oam, which makes serialized states comparable
// bit for bit.
//
// The two-rail occupation picture of a photon (|a> = |0>|1>, |b> = |1>|0>)
// is not simulated as bosonic modes. A single photon lives in the labeled
// sector and "no photon" is the one shared vacuum label.

#include <Eigen/Dense>

#include <complex>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "photonsteer/rng.hpp"

namespace photonsteer {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline constexpr double kExactTol = 1e-12;
inline constexpr double kZeroProbability = 1e-14;
inline constexpr double kPsdTol = 1e-10;

/// Thrown for violated preconditions of the linear-algebra layer.
class StateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Factor {
  std::string role;
  std::vector<std::string> labels;

  std::size_t dim() const { return labels.size(); }
  bool operator==(const Factor&) const = default;
};

Factor path_factor();  // "path": a, b
Factor pol_factor();   // "pol": H, V
Factor oam_factor();   // "oam": -2, 0, +2
Factor qubit_factor(std::string role);  // role: 0, 1

class Space {
 public:
  Space() = default;
  explicit Space(std::vector<Factor> factors, bool vacuum = false);

  bool has_vacuum() const { return vacuum_; }
  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t offset() const { return vacuum_ ? 1 : 0; }
  std::size_t photon_dim() const;
  std::size_t dim() const { return offset() + photon_dim(); }

  bool has_role(std::string_view role) const { return find_role(role).has_value(); }
  std::optional<std::size_t> find_role(std::string_view role) const;
  std::size_t role_index(std::string_view role) const;  // throws if absent
  std::size_t label_index(std::string_view role, std::string_view label) const;

  /// Full-space index of the photon basis state with the given per-factor digits.
  std::size_t index(std::span<const std::size_t> digits) const;
  /// Per-factor digits of a photon basis index (full-space numbering).
  std::vector<std::size_t> digits(std::size_t index) const;
  /// Index addressed by one label per factor, or {"vac"} for the vacuum.
  std::size_t index_of(const std::vector<std::string>& labels) const;

  bool is_vacuum(std::size_t index) const { return vacuum_ && index == 0; }
  /// "vac" or the comma-joined factor labels, e.g. "a,H".
  std::string label(std::size_t index) const;
  std::vector<std::string> labels() const;

  Space with_vacuum() const { return Space(factors_, true); }
  Space without_vacuum() const { return Space(factors_, false); }

  bool operator==(const Space&) const = default;

 private:
  std::vector<Factor> factors_;
  bool vacuum_ = false;
};

/// Photon space over path x pol [x oam], optionally with the vacuum label.
Space photon_space(bool oam = false, bool vacuum = false);

enum class Sector { Vacuum, SinglePhoton };
enum class PathLabel { A, B };  // A: toward Bob, B: toward Alice
enum class PolLabel { H, V };
enum class OamLabel { Minus2, Zero, Plus2 };

/// Structured view of one basis element of a photon space.
struct BasisLabel {
  Sector sector = Sector::Vacuum;
  PathLabel path = PathLabel::A;
  PolLabel pol = PolLabel::H;
  std::optional<OamLabel> oam;

  auto operator<=>(const BasisLabel&) const = default;
};

/// Basis of a photon space in index order; throws for non-photonic spaces.
std::vector<BasisLabel> photon_basis(const Space& space);

struct LabeledState {
  Space space;
  Vec amps;

  LabeledState() = default;
  LabeledState(Space s, Vec a);

  double norm() const { return amps.norm(); }
  cplx amp(const std::vector<std::string>& labels) const { return amps[static_cast<Eigen::Index>(space.index_of(labels))]; }
};

struct DensityOp {
  Space space;
  Mat matrix;

  DensityOp() = default;
  DensityOp(Space s, Mat m);

  double trace() const { return matrix.trace().real(); }
  cplx at(const std::vector<std::string>& row, const std::vector<std::string>& col) const;
};

struct Observable {
  Space space;
  Mat matrix;

  Observable() = default;
  /// Throws unless the matrix is Hermitian within kExactTol.
  Observable(Space s, Mat m);
};

using QuantumValue = std::variant<LabeledState, DensityOp>;

/// Basis vector |labels> in `space`.
LabeledState ket(const Space& space, const std::vector<std::string>& labels);
LabeledState superpose(const std::vector<std::pair<cplx, LabeledState>>& terms);

LabeledState tensor(const LabeledState& u, const LabeledState& v);
DensityOp tensor(const DensityOp& u, const DensityOp& v);
Observable tensor(const Observable& u, const Observable& v);
/// Same as the typed overloads; throws StateError("kind mismatch") for mixed kinds.
QuantumValue tensor(const QuantumValue& u, const QuantumValue& v);

struct Normalized {
  LabeledState state;
  double norm;
};
/// Unit-norm copy plus the input norm. Throws StateError("impossible branch")
/// when the norm is below kZeroProbability.
Normalized normalize(const LabeledState& s);

DensityOp to_density(const LabeledState& s);

/// Traces out every factor not named in `keep`. Kept factors retain their
/// relative order. The vacuum population survives as the vacuum label;
/// vacuum/photon coherences vanish because the traced factors carry no
/// vacuum counterpart.
DensityOp partial_trace(const DensityOp& rho, const std::vector<std::string>& keep);
DensityOp partial_trace(const DensityOp& rho, std::string_view keep);

/// Reorders factors to the given role order (a permutation of the space's roles).
LabeledState reorder(const LabeledState& s, const std::vector<std::string>& roles);
DensityOp reorder(const DensityOp& rho, const std::vector<std::string>& roles);

/// Re(tr(rho O)); throws if the spaces differ or the imaginary residue exceeds 1e-10.
double expectation(const DensityOp& rho, const Observable& obs);
double expectation(const LabeledState& s, const Observable& obs);

/// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 in [0, 1].
/// Inputs must have unit trace within 1e-6.
double fidelity(const DensityOp& rho, const DensityOp& sigma);
double fidelity(const LabeledState& psi, const LabeledState& phi);

double purity(const DensityOp& rho);
/// Von Neumann entropy in bits.
double entropy_bits(const DensityOp& rho);
/// Wootters concurrence of a two-qubit density operator (dimension 4).
double concurrence(const DensityOp& rho);

/// Embeds an operator acting on the listed factors (product basis in the
/// listed order) as identity on the remaining factors. The vacuum row and
/// column carry `vacuum_value` on the diagonal.
Mat lift(const Space& space, const std::vector<std::string>& roles, const Mat& local, cplx vacuum_value);
Mat lift(const Space& space, std::string_view role, const Mat& local, cplx vacuum_value);

/// Restates a vector or operator on `space.with_vacuum()` (zero vacuum amplitude).
LabeledState add_vacuum(const LabeledState& s);
DensityOp add_vacuum(const DensityOp& rho);
/// Drops the vacuum label; throws if the vacuum carries weight above kZeroProbability.
LabeledState remove_vacuum(const LabeledState& s);
DensityOp remove_vacuum(const DensityOp& rho);

/// Eigen-decomposition of a Hermitian matrix, ascending eigenvalues.
Eigen::VectorXd hermitian_eigenvalues(const Mat& m);
bool is_hermitian(const Mat& m, double tol = kExactTol);
bool is_unitary(const Mat& m, double tol = kExactTol);
/// Hermitian, eigenvalues >= -kPsdTol, and trace in [0, 1 + kExactTol].
bool is_valid_density(const DensityOp& rho);

/// Pauli matrices in the (0, 1) basis of one factor.
Mat pauli_x();
Mat pauli_y();
Mat pauli_z();

/// Haar-random pure state of dimension `space.photon_dim()` (no vacuum weight).
LabeledState random_state(const Space& space, SplitMix64& rng);
/// Random mixed state from a Ginibre matrix of the given rank.
DensityOp random_density(const Space& space, SplitMix64& rng, std::size_t rank = 0);
/// Haar-random unitary of dimension n.
Mat random_unitary(std::size_t n, SplitMix64& rng);

}  // namespace photonsteer
