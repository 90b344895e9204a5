#include "photonsteer/measure.hpp"

#include <cmath>

namespace photonsteer {

namespace {

const double kInvSqrt2 = std::sqrt(0.5);
const cplx kI(0.0, 1.0);

Mat outer(const Vec& v) { return v * v.adjoint(); }

Vec vec2(cplx x, cplx y) {
  Vec v(2);
  v << x, y;
  return v;
}

MeasurementBasis two_outcome(BasisName name, std::string role, std::string o1, std::string o2, const Vec& v1,
                             const Vec& v2) {
  MeasurementBasis b;
  b.name = name;
  b.roles = {std::move(role)};
  b.outcomes = {std::move(o1), std::move(o2)};
  b.projectors = {outer(v1), outer(v2)};
  b.values = {+1, -1};
  return b;
}

double vacuum_weight(const LabeledState& s) { return s.space.has_vacuum() ? std::norm(s.amps[0]) : 0.0; }
double vacuum_weight(const DensityOp& r) { return r.space.has_vacuum() ? r.matrix(0, 0).real() : 0.0; }

}  // namespace

MeasurementBasis MeasurementBasis::hv() {
  return two_outcome(BasisName::HV, "pol", "H", "V", vec2(1, 0), vec2(0, 1));
}

MeasurementBasis MeasurementBasis::diag() {
  return two_outcome(BasisName::Diag, "pol", "+", "-", vec2(kInvSqrt2, kInvSqrt2), vec2(-kInvSqrt2, kInvSqrt2));
}

MeasurementBasis MeasurementBasis::circular() {
  return two_outcome(BasisName::Circular, "pol", "L", "R", vec2(kInvSqrt2, -kI * kInvSqrt2),
                     vec2(kInvSqrt2, kI * kInvSqrt2));
}

MeasurementBasis MeasurementBasis::path() {
  return two_outcome(BasisName::PathClick, "path", "a", "b", vec2(1, 0), vec2(0, 1));
}

MeasurementBasis MeasurementBasis::pauli(char axis, std::string role) {
  switch (axis) {
    case 'Z':
      return two_outcome(BasisName::Custom, std::move(role), "+", "-", vec2(1, 0), vec2(0, 1));
    case 'X':
      return two_outcome(BasisName::Custom, std::move(role), "+", "-", vec2(kInvSqrt2, kInvSqrt2),
                         vec2(kInvSqrt2, -kInvSqrt2));
    case 'Y':
      return two_outcome(BasisName::Custom, std::move(role), "+", "-", vec2(kInvSqrt2, kI * kInvSqrt2),
                         vec2(kInvSqrt2, -kI * kInvSqrt2));
    default:
      throw MeasurementError(std::string("unknown Pauli axis '") + axis + "'");
  }
}

MeasurementBasis MeasurementBasis::custom(std::vector<std::string> roles, std::vector<std::string> outcomes,
                                          std::vector<Mat> projectors, std::vector<int> values) {
  if (projectors.empty() || projectors.size() != outcomes.size()) {
    throw MeasurementError("custom basis needs one projector per outcome");
  }
  if (values.empty()) {
    for (std::size_t k = 0; k < projectors.size(); ++k) values.push_back(k == 0 ? 1 : -1);
  }
  if (values.size() != projectors.size()) throw MeasurementError("custom basis needs one value per outcome");
  const auto n = projectors.front().rows();
  Mat sum = Mat::Zero(n, n);
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    const Mat& p = projectors[i];
    if (p.rows() != n || p.cols() != n) throw MeasurementError("projector shapes differ");
    if (!is_hermitian(p) || (p * p - p).cwiseAbs().maxCoeff() > kExactTol) {
      throw MeasurementError("projector '" + outcomes[i] + "' is not a Hermitian idempotent");
    }
    for (std::size_t j = 0; j < i; ++j)
      if ((p * projectors[j]).cwiseAbs().maxCoeff() > kExactTol) throw MeasurementError("projectors are not orthogonal");
    sum += p;
  }
  if ((sum - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > kExactTol) {
    throw MeasurementError("projectors do not sum to the identity");
  }
  MeasurementBasis b;
  b.name = BasisName::Custom;
  b.roles = std::move(roles);
  b.outcomes = std::move(outcomes);
  b.projectors = std::move(projectors);
  b.values = std::move(values);
  return b;
}

std::string MeasurementBasis::tag() const {
  switch (name) {
    case BasisName::HV: return "HV";
    case BasisName::Diag: return "DIAG";
    case BasisName::Circular: return "CIRC";
    case BasisName::PathClick: return "PATH";
    case BasisName::Custom: return "CUSTOM";
  }
  return "CUSTOM";
}

std::size_t MeasurementBasis::outcome_index(const std::string& outcome) const {
  for (std::size_t k = 0; k < outcomes.size(); ++k)
    if (outcomes[k] == outcome) return k;
  throw MeasurementError("basis " + tag() + " has no outcome '" + outcome + "'");
}

Mat MeasurementBasis::lifted(const Space& space, std::size_t k) const {
  return lift(space, roles, projectors.at(k), 0.0);
}

Mat MeasurementBasis::local_observable() const {
  Mat o = Mat::Zero(projectors.front().rows(), projectors.front().cols());
  for (std::size_t k = 0; k < projectors.size(); ++k) o += static_cast<double>(values[k]) * projectors[k];
  return o;
}

MeasurementBasis basis_from_tag(const std::string& tag) {
  if (tag == "HV") return MeasurementBasis::hv();
  if (tag == "DIAG") return MeasurementBasis::diag();
  if (tag == "CIRC") return MeasurementBasis::circular();
  if (tag == "PATH") return MeasurementBasis::path();
  throw MeasurementError("unknown basis '" + tag + "'");
}

std::vector<OutcomeRecord> outcome_distribution(const LabeledState& s, const MeasurementBasis& basis) {
  std::vector<OutcomeRecord> out;
  for (std::size_t k = 0; k < basis.outcomes.size(); ++k) {
    const Vec branch = basis.lifted(s.space, k) * s.amps;
    const double p = branch.squaredNorm();
    if (p <= kZeroProbability) continue;
    out.push_back({basis.tag(), basis.outcomes[k], p, LabeledState(s.space, branch / std::sqrt(p)), false});
  }
  if (const double pv = vacuum_weight(s); pv > kZeroProbability) {
    out.push_back({basis.tag(), kNoPhoton, pv, ket(s.space, {"vac"}), false});
  }
  return out;
}

std::vector<OutcomeRecord> outcome_distribution(const DensityOp& rho, const MeasurementBasis& basis) {
  std::vector<OutcomeRecord> out;
  for (std::size_t k = 0; k < basis.outcomes.size(); ++k) {
    const Mat p = basis.lifted(rho.space, k);
    const Mat branch = p * rho.matrix * p;
    const double prob = branch.trace().real();
    if (prob <= kZeroProbability) continue;
    out.push_back({basis.tag(), basis.outcomes[k], prob, DensityOp(rho.space, branch / prob), false});
  }
  if (const double pv = vacuum_weight(rho); pv > kZeroProbability) {
    out.push_back({basis.tag(), kNoPhoton, pv, to_density(ket(rho.space, {"vac"})), false});
  }
  return out;
}

namespace {

OutcomeRecord sample(std::vector<OutcomeRecord> dist, SplitMix64& rng) {
  if (dist.empty()) throw MeasurementError("state has no support on any outcome");
  const double u = rng.uniform();
  double acc = 0.0;
  for (auto& rec : dist) {
    acc += rec.probability;
    if (u < acc) return std::move(rec);
  }
  return std::move(dist.back());
}

template <class State>
OutcomeRecord pick(const State& s, const MeasurementBasis& basis, const std::string& outcome) {
  if (outcome != kNoPhoton) basis.outcome_index(outcome);
  for (auto& rec : outcome_distribution(s, basis))
    if (rec.outcome == outcome) return rec;
  throw MeasurementError("zero-probability outcome '" + outcome + "'");
}

}  // namespace

OutcomeRecord measure_projective(const LabeledState& s, const MeasurementBasis& basis, SplitMix64& rng) {
  return sample(outcome_distribution(s, basis), rng);
}

OutcomeRecord measure_projective(const DensityOp& rho, const MeasurementBasis& basis, SplitMix64& rng) {
  return sample(outcome_distribution(rho, basis), rng);
}

OutcomeRecord measure_outcome(const LabeledState& s, const MeasurementBasis& basis, const std::string& outcome) {
  return pick(s, basis, outcome);
}

OutcomeRecord measure_outcome(const DensityOp& rho, const MeasurementBasis& basis, const std::string& outcome) {
  return pick(rho, basis, outcome);
}

NullResult null_result_collapse(const LabeledState& s, const Mat& absent_projector) {
  if (absent_projector.rows() != s.amps.size()) throw MeasurementError("projector does not match the state space");
  const Vec rest = s.amps - absent_projector * s.amps;
  const double p = rest.squaredNorm();
  if (p <= kZeroProbability) throw MeasurementError("null result impossible");
  return {LabeledState(s.space, rest / std::sqrt(p)), p};
}

NullResult null_result_collapse(const LabeledState& s, const MeasurementBasis& basis, const std::string& absent_outcome) {
  return null_result_collapse(s, basis.lifted(s.space, basis.outcome_index(absent_outcome)));
}

double click_probability(const LabeledState& s, const std::string& path) {
  const auto k = s.space.label_index("path", path);
  const Mat p = MeasurementBasis::path().lifted(s.space, k);
  return (p * s.amps).squaredNorm();
}

OutcomeRecord detect_path(const LabeledState& s, const std::string& path, SplitMix64& rng) {
  const auto k = s.space.label_index("path", path);
  const Mat p = MeasurementBasis::path().lifted(s.space, k);
  const double click = (p * s.amps).squaredNorm();
  const double u = rng.uniform();
  if (click > kZeroProbability && u < click) {
    const Space with_vac = s.space.with_vacuum();
    return {"PATH", "click", click, ket(with_vac, {"vac"}), true};
  }
  auto nr = null_result_collapse(s, p);
  return {"PATH", "no-click", nr.probability, std::move(nr.state), true};
}

DensityOp nonselective_measure(const DensityOp& rho, const MeasurementBasis& basis) {
  Mat out = Mat::Zero(rho.matrix.rows(), rho.matrix.cols());
  for (std::size_t k = 0; k < basis.outcomes.size(); ++k) {
    const Mat p = basis.lifted(rho.space, k);
    out += p * rho.matrix * p;
  }
  if (rho.space.has_vacuum()) out(0, 0) += rho.matrix(0, 0);
  return DensityOp(rho.space, std::move(out));
}

DensityOp nonselective_measure(const LabeledState& s, const MeasurementBasis& basis) {
  return nonselective_measure(to_density(s), basis);
}

}  // namespace photonsteer
