#include "photonsteer/steering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace photonsteer {

namespace {

Mat kron2(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

const std::array<Mat, 3>& paulis() {
  static const std::array<Mat, 3> p{pauli_x(), pauli_y(), pauli_z()};
  return p;
}

void require_two_qubit(const DensityOp& rho) {
  if (rho.matrix.rows() != 4 || rho.space.has_vacuum()) throw SteeringError("CHSH analysis needs a two-qubit state (dimension 4)");
}

Eigen::Vector3d unit_or(const Eigen::Vector3d& v, const Eigen::Vector3d& fallback) {
  const double n = v.norm();
  return n > 1e-12 ? Eigen::Vector3d(v / n) : fallback;
}

}  // namespace

std::vector<Setting> blue_yellow_settings() {
  return {{"blue", MeasurementBasis::hv()}, {"yellow", MeasurementBasis::diag()}};
}

const DensityOp& Assemblage::at(const std::string& setting, const std::string& outcome) const {
  for (const auto& s : settings) {
    if (s.label != setting) continue;
    for (const auto& m : s.members)
      if (m.outcome == outcome) return m.sigma;
  }
  throw SteeringError("assemblage has no entry " + setting + ":" + outcome);
}

DensityOp Assemblage::marginal(std::size_t x) const {
  const auto& members = settings.at(x).members;
  if (members.empty()) throw SteeringError("setting without members");
  Mat sum = Mat::Zero(members.front().sigma.matrix.rows(), members.front().sigma.matrix.cols());
  for (const auto& m : members) sum += m.sigma.matrix;
  return DensityOp(members.front().sigma.space, std::move(sum));
}

Assemblage assemblage(const DensityOp& rho_in, const std::vector<Setting>& settings, const Bipartition& parts) {
  DensityOp rho;
  try {
    rho = remove_vacuum(rho_in);
  } catch (const StateError&) {
    throw SteeringError("non-bipartite input: the vacuum is populated");
  }
  std::vector<std::string> all = parts.alice;
  all.insert(all.end(), parts.bob.begin(), parts.bob.end());
  std::vector<std::string> roles;
  for (const auto& f : rho.space.factors()) roles.push_back(f.role);
  auto sorted_all = all;
  std::sort(sorted_all.begin(), sorted_all.end());
  std::sort(roles.begin(), roles.end());
  if (parts.alice.empty() || parts.bob.empty() || sorted_all != roles ||
      std::adjacent_find(sorted_all.begin(), sorted_all.end()) != sorted_all.end()) {
    throw SteeringError("non-bipartite input: Alice and Bob must split the factors exactly");
  }

  Assemblage out;
  for (const auto& setting : settings) {
    for (const auto& r : setting.basis.roles) {
      if (std::find(parts.alice.begin(), parts.alice.end(), r) == parts.alice.end()) {
        throw SteeringError("setting '" + setting.label + "' measures a factor Alice does not hold");
      }
    }
    AssemblageSetting as{setting.label, {}};
    for (std::size_t k = 0; k < setting.basis.outcomes.size(); ++k) {
      const Mat p = setting.basis.lifted(rho.space, k);
      const DensityOp branch(rho.space, p * rho.matrix * p);
      as.members.push_back({setting.basis.outcomes[k], setting.basis.values[k], partial_trace(branch, parts.bob)});
    }
    out.settings.push_back(std::move(as));
  }
  return out;
}

Assemblage assemblage(const LabeledState& s, const std::vector<Setting>& settings, const Bipartition& parts) {
  return assemblage(to_density(s), settings, parts);
}

NoSignalling no_signalling_check(const Assemblage& a) {
  if (a.settings.size() < 2) return {true, 0.0};
  const Mat ref = a.marginal(0).matrix;
  double dev = 0.0;
  for (std::size_t x = 1; x < a.settings.size(); ++x) dev = std::max(dev, (a.marginal(x).matrix - ref).cwiseAbs().maxCoeff());
  return {dev < 1e-10, dev};
}

double lhs_bound(const std::vector<Mat>& bob_observables) {
  if (bob_observables.empty()) throw SteeringError("no Bob observables");
  const std::size_t k = bob_observables.size();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    Mat sum = Mat::Zero(bob_observables.front().rows(), bob_observables.front().cols());
    for (std::size_t x = 0; x < k; ++x) sum += ((mask >> x) & 1 ? -1.0 : 1.0) * bob_observables[x];
    best = std::max(best, hermitian_eigenvalues(0.5 * (sum + sum.adjoint())).maxCoeff());
  }
  return best;
}

SteeringValue linear_steering_value(const Assemblage& a, const std::vector<Observable>& bob_observables) {
  if (bob_observables.size() != a.settings.size()) throw SteeringError("setting/observable count mismatch");
  double s = 0.0;
  std::vector<Mat> mats;
  for (std::size_t x = 0; x < a.settings.size(); ++x) {
    const Observable& b = bob_observables[x];
    mats.push_back(b.matrix);
    for (const auto& m : a.settings[x].members) {
      if (m.sigma.space != b.space) throw SteeringError("Bob observable does not act on the assemblage space");
      s += m.value * (b.matrix * m.sigma.matrix).trace().real();
    }
  }
  const double bound = lhs_bound(mats);
  return {s, bound, s > bound + 1e-9};
}

Mat bloch_observable(const Eigen::Vector3d& n) {
  return n.x() * pauli_x() + n.y() * pauli_y() + n.z() * pauli_z();
}

double chsh_value(const DensityOp& rho, const DichotomicObservablePair& o) {
  require_two_qubit(rho);
  auto e = [&](const Mat& a, const Mat& b) { return (rho.matrix * kron2(a, b)).trace().real(); };
  return e(o.a1, o.b1) + e(o.a1, o.b2) + e(o.a2, o.b1) - e(o.a2, o.b2);
}

Eigen::Matrix3d correlation_matrix(const DensityOp& rho) {
  require_two_qubit(rho);
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = (rho.matrix * kron2(paulis()[i], paulis()[j])).trace().real();
  return t;
}

ChshResult chsh_max(const DensityOp& rho) {
  const Eigen::Matrix3d t = correlation_matrix(rho);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(t.transpose() * t);
  const double u1 = std::max(0.0, es.eigenvalues()[2]);
  const double u2 = std::max(0.0, es.eigenvalues()[1]);
  const Eigen::Vector3d c1 = es.eigenvectors().col(2);
  const Eigen::Vector3d c2 = es.eigenvectors().col(1);
  const double s_max = 2.0 * std::sqrt(u1 + u2);

  const double theta = std::atan2(std::sqrt(u2), std::sqrt(u1));
  const Eigen::Vector3d b1 = std::cos(theta) * c1 + std::sin(theta) * c2;
  const Eigen::Vector3d b2 = std::cos(theta) * c1 - std::sin(theta) * c2;
  const Eigen::Vector3d a1 = unit_or(t * c1, Eigen::Vector3d::UnitZ());
  const Eigen::Vector3d a2 = unit_or(t * c2, Eigen::Vector3d::UnitX());
  return {s_max, s_max > 2.0 + 1e-9,
          {bloch_observable(a1), bloch_observable(a2), bloch_observable(b1), bloch_observable(b2)}};
}

double chsh_angle_grid(const DensityOp& rho, double step_deg) {
  const Eigen::Matrix3d t = correlation_matrix(rho);
  const auto n = static_cast<std::size_t>(std::llround(360.0 / step_deg));
  std::vector<Eigen::Vector3d> dirs(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = static_cast<double>(k) * step_deg * std::numbers::pi / 180.0;
    dirs[k] = Eigen::Vector3d(std::sin(a), 0.0, std::cos(a));
  }
  // corr[beta][alpha] = E(alpha, beta)
  std::vector<double> corr(n * n);
  for (std::size_t b = 0; b < n; ++b) {
    const Eigen::Vector3d tb = t * dirs[b];
    for (std::size_t a = 0; a < n; ++a) corr[b * n + a] = dirs[a].dot(tb);
  }
  // For fixed Bob angles the two Alice settings decouple:
  // S = max_a1 [E(a1,b1) + E(a1,b2)] + max_a2 [E(a2,b1) - E(a2,b2)].
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t b1 = 0; b1 < n; ++b1) {
    const double* e1 = &corr[b1 * n];
    for (std::size_t b2 = 0; b2 < n; ++b2) {
      const double* e2 = &corr[b2 * n];
      double plus = -std::numeric_limits<double>::infinity();
      double minus = plus;
      for (std::size_t a = 0; a < n; ++a) {
        plus = std::max(plus, e1[a] + e2[a]);
        minus = std::max(minus, e1[a] - e2[a]);
      }
      best = std::max(best, plus + minus);
    }
  }
  return best;
}

LhvBound lhv_chsh_bound() {
  LhvBound out{0.0, {}};
  for (int mask = 0; mask < 16; ++mask) {
    const int a1 = mask & 1 ? -1 : 1;
    const int a2 = mask & 2 ? -1 : 1;
    const int b1 = mask & 4 ? -1 : 1;
    const int b2 = mask & 8 ? -1 : 1;
    const int s = a1 * b1 + a1 * b2 + a2 * b1 - a2 * b2;
    out.values.push_back(s);
    out.max_abs = std::max(out.max_abs, static_cast<double>(std::abs(s)));
  }
  return out;
}

void validate_ensemble(const LhsEnsemble& e, const std::vector<Setting>& settings) {
  if (e.empty()) throw SteeringError("empty hidden-state ensemble");
  double total = 0.0;
  for (const auto& c : e) {
    if (!(c.weight >= 0.0)) throw SteeringError("negative hidden-state weight");
    total += c.weight;
    if (c.responses.size() != settings.size()) throw SteeringError("response table does not cover every setting");
    for (std::size_t x = 0; x < settings.size(); ++x)
      if (c.responses[x] >= settings[x].basis.outcomes.size()) throw SteeringError("response outside the outcome set");
    if (c.bob_state.space != e.front().bob_state.space) throw SteeringError("hidden states live in different spaces");
    if (!is_valid_density(c.bob_state) || std::abs(c.bob_state.trace() - 1.0) > 1e-9) {
      throw SteeringError("hidden state is not a normalized density operator");
    }
  }
  if (std::abs(total - 1.0) > 1e-9) throw SteeringError("hidden-state weights do not sum to 1");
}

Assemblage lhs_assemblage(const LhsEnsemble& e, const std::vector<Setting>& settings) {
  validate_ensemble(e, settings);
  const Space& space = e.front().bob_state.space;
  const auto n = static_cast<Eigen::Index>(space.dim());
  Assemblage out;
  for (std::size_t x = 0; x < settings.size(); ++x) {
    AssemblageSetting as{settings[x].label, {}};
    for (std::size_t k = 0; k < settings[x].basis.outcomes.size(); ++k) {
      Mat sigma = Mat::Zero(n, n);
      for (const auto& c : e)
        if (c.responses[x] == k) sigma += c.weight * c.bob_state.matrix;
      as.members.push_back({settings[x].basis.outcomes[k], settings[x].basis.values[k], DensityOp(space, std::move(sigma))});
    }
    out.settings.push_back(std::move(as));
  }
  return out;
}

LhsEnsemble random_lhs_ensemble(std::size_t components, std::size_t n_settings, SplitMix64& rng) {
  if (components == 0) throw SteeringError("ensemble needs at least one component");
  const Space bob({path_factor()});
  LhsEnsemble e;
  double total = 0.0;
  for (std::size_t i = 0; i < components; ++i) {
    LhsComponent c;
    double u = rng.uniform();
    if (u <= 0.0) u = 0x1.0p-53;
    c.weight = -std::log(u);
    total += c.weight;
    for (std::size_t x = 0; x < n_settings; ++x) c.responses.push_back(static_cast<std::size_t>(rng.below(2)));
    c.bob_state = random_density(bob, rng, 1 + static_cast<std::size_t>(rng.below(2)));
    e.push_back(std::move(c));
  }
  for (auto& c : e) c.weight /= total;
  return e;
}

}  // namespace photonsteer
