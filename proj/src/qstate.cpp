#include "photonsteer/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace photonsteer {

Factor path_factor() { return {"path", {"a", "b"}}; }
Factor pol_factor() { return {"pol", {"H", "V"}}; }
Factor oam_factor() { return {"oam", {"-2", "0", "+2"}}; }
Factor qubit_factor(std::string role) { return {std::move(role), {"0", "1"}}; }

Space::Space(std::vector<Factor> factors, bool vacuum) : factors_(std::move(factors)), vacuum_(vacuum) {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].labels.empty()) throw StateError("factor '" + factors_[i].role + "' has no labels");
    for (std::size_t j = i + 1; j < factors_.size(); ++j) {
      if (factors_[i].role == factors_[j].role) throw StateError("duplicate role '" + factors_[i].role + "'");
    }
    auto labels = factors_[i].labels;
    std::sort(labels.begin(), labels.end());
    if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
      throw StateError("duplicate label in factor '" + factors_[i].role + "'");
    }
  }
}

std::size_t Space::photon_dim() const {
  if (factors_.empty()) return 0;
  std::size_t d = 1;
  for (const auto& f : factors_) d *= f.dim();
  return d;
}

std::optional<std::size_t> Space::find_role(std::string_view role) const {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].role == role) return i;
  }
  return std::nullopt;
}

std::size_t Space::role_index(std::string_view role) const {
  auto idx = find_role(role);
  if (!idx) throw StateError("role '" + std::string(role) + "' not present");
  return *idx;
}

std::size_t Space::label_index(std::string_view role, std::string_view label) const {
  const auto& f = factors_[role_index(role)];
  auto it = std::find(f.labels.begin(), f.labels.end(), label);
  if (it == f.labels.end()) throw StateError("label '" + std::string(label) + "' not in factor '" + f.role + "'");
  return static_cast<std::size_t>(it - f.labels.begin());
}

std::size_t Space::index(std::span<const std::size_t> digits) const {
  if (digits.size() != factors_.size()) throw StateError("digit count does not match factor count");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (digits[i] >= factors_[i].dim()) throw StateError("digit out of range");
    idx = idx * factors_[i].dim() + digits[i];
  }
  return offset() + idx;
}

std::vector<std::size_t> Space::digits(std::size_t index) const {
  if (index < offset() || index >= dim()) throw StateError("index is not a photon basis state");
  std::size_t rest = index - offset();
  std::vector<std::size_t> out(factors_.size());
  for (std::size_t i = factors_.size(); i-- > 0;) {
    out[i] = rest % factors_[i].dim();
    rest /= factors_[i].dim();
  }
  return out;
}

std::size_t Space::index_of(const std::vector<std::string>& labels) const {
  if (labels.size() == 1 && labels[0] == "vac") {
    if (!vacuum_) throw StateError("space has no vacuum label");
    return 0;
  }
  if (labels.size() != factors_.size()) throw StateError("label count does not match factor count");
  std::vector<std::size_t> d(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) d[i] = label_index(factors_[i].role, labels[i]);
  return index(d);
}

std::string Space::label(std::size_t index) const {
  if (is_vacuum(index)) return "vac";
  auto d = digits(index);
  std::string out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i) out += ',';
    out += factors_[i].labels[d[i]];
  }
  return out;
}

std::vector<std::string> Space::labels() const {
  std::vector<std::string> out;
  out.reserve(dim());
  for (std::size_t i = 0; i < dim(); ++i) out.push_back(label(i));
  return out;
}

Space photon_space(bool oam, bool vacuum) {
  std::vector<Factor> f{path_factor(), pol_factor()};
  if (oam) f.push_back(oam_factor());
  return Space(std::move(f), vacuum);
}

std::vector<BasisLabel> photon_basis(const Space& space) {
  const auto& f = space.factors();
  const bool oam = f.size() == 3;
  if (!(f.size() == 2 || oam) || f[0] != path_factor() || f[1] != pol_factor() || (oam && f[2] != oam_factor())) {
    throw StateError("not a photon space");
  }
  std::vector<BasisLabel> out;
  if (space.has_vacuum()) out.push_back(BasisLabel{});
  for (std::size_t i = space.offset(); i < space.dim(); ++i) {
    auto d = space.digits(i);
    BasisLabel b;
    b.sector = Sector::SinglePhoton;
    b.path = d[0] == 0 ? PathLabel::A : PathLabel::B;
    b.pol = d[1] == 0 ? PolLabel::H : PolLabel::V;
    if (oam) b.oam = static_cast<OamLabel>(d[2]);
    out.push_back(b);
  }
  return out;
}

LabeledState::LabeledState(Space s, Vec a) : space(std::move(s)), amps(std::move(a)) {
  if (static_cast<std::size_t>(amps.size()) != space.dim()) throw StateError("amplitude count does not match space dimension");
}

DensityOp::DensityOp(Space s, Mat m) : space(std::move(s)), matrix(std::move(m)) {
  if (static_cast<std::size_t>(matrix.rows()) != space.dim() || matrix.rows() != matrix.cols()) {
    throw StateError("matrix shape does not match space dimension");
  }
}

cplx DensityOp::at(const std::vector<std::string>& row, const std::vector<std::string>& col) const {
  return matrix(static_cast<Eigen::Index>(space.index_of(row)), static_cast<Eigen::Index>(space.index_of(col)));
}

Observable::Observable(Space s, Mat m) : space(std::move(s)), matrix(std::move(m)) {
  if (static_cast<std::size_t>(matrix.rows()) != space.dim() || matrix.rows() != matrix.cols()) {
    throw StateError("matrix shape does not match space dimension");
  }
  if (!is_hermitian(matrix)) throw StateError("observable is not Hermitian");
}

LabeledState ket(const Space& space, const std::vector<std::string>& labels) {
  Vec v = Vec::Zero(static_cast<Eigen::Index>(space.dim()));
  v[static_cast<Eigen::Index>(space.index_of(labels))] = 1.0;
  return LabeledState(space, std::move(v));
}

LabeledState superpose(const std::vector<std::pair<cplx, LabeledState>>& terms) {
  if (terms.empty()) throw StateError("empty superposition");
  const Space& space = terms.front().second.space;
  Vec v = Vec::Zero(static_cast<Eigen::Index>(space.dim()));
  for (const auto& [c, s] : terms) {
    if (s.space != space) throw StateError("superposed states live in different spaces");
    v += c * s.amps;
  }
  return LabeledState(space, std::move(v));
}

namespace {

Space product_space(const Space& u, const Space& v) {
  std::vector<Factor> f = u.factors();
  for (const auto& g : v.factors()) {
    if (u.has_role(g.role)) throw StateError("tensor factors share role '" + g.role + "'");
    f.push_back(g);
  }
  return Space(std::move(f), u.has_vacuum() || v.has_vacuum());
}

double photon_norm(const LabeledState& s) { return s.amps.tail(static_cast<Eigen::Index>(s.space.photon_dim())).norm(); }

// Frobenius norm of the entries in the vacuum row and column.
double vacuum_part_norm(const DensityOp& r) {
  if (!r.space.has_vacuum()) return 0.0;
  return std::sqrt(r.matrix.row(0).squaredNorm() + r.matrix.col(0).squaredNorm() - std::norm(r.matrix(0, 0)));
}

Mat photon_block(const DensityOp& r) {
  const auto o = static_cast<Eigen::Index>(r.space.offset());
  const auto n = static_cast<Eigen::Index>(r.space.photon_dim());
  return r.matrix.block(o, o, n, n);
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

LabeledState tensor(const LabeledState& u, const LabeledState& v) {
  Space space = product_space(u.space, v.space);
  const cplx au = u.space.has_vacuum() ? u.amps[0] : cplx{};
  const cplx av = v.space.has_vacuum() ? v.amps[0] : cplx{};
  if (std::abs(au) * photon_norm(v) > kExactTol || std::abs(av) * photon_norm(u) > kExactTol) {
    throw StateError("vacuum cross term: one factor is in the vacuum while the other carries a photon");
  }
  Vec out = Vec::Zero(static_cast<Eigen::Index>(space.dim()));
  if (space.has_vacuum()) out[0] = au * av;
  const auto nu = static_cast<Eigen::Index>(u.space.photon_dim());
  const auto nv = static_cast<Eigen::Index>(v.space.photon_dim());
  const auto ou = static_cast<Eigen::Index>(u.space.offset());
  const auto ov = static_cast<Eigen::Index>(v.space.offset());
  const auto o = static_cast<Eigen::Index>(space.offset());
  for (Eigen::Index i = 0; i < nu; ++i)
    for (Eigen::Index j = 0; j < nv; ++j) out[o + i * nv + j] = u.amps[ou + i] * v.amps[ov + j];
  return LabeledState(std::move(space), std::move(out));
}

DensityOp tensor(const DensityOp& u, const DensityOp& v) {
  Space space = product_space(u.space, v.space);
  Mat pu = photon_block(u), pv = photon_block(v);
  if (vacuum_part_norm(u) * pv.norm() > kExactTol || vacuum_part_norm(v) * pu.norm() > kExactTol) {
    throw StateError("vacuum cross term: one factor is in the vacuum while the other carries a photon");
  }
  Mat out = Mat::Zero(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
  const auto o = static_cast<Eigen::Index>(space.offset());
  const auto n = static_cast<Eigen::Index>(space.photon_dim());
  if (n > 0) out.block(o, o, n, n) = kron(pu, pv);
  if (u.space.has_vacuum() && v.space.has_vacuum()) out(0, 0) = u.matrix(0, 0) * v.matrix(0, 0);
  return DensityOp(std::move(space), std::move(out));
}

Observable tensor(const Observable& u, const Observable& v) {
  if (u.space.has_vacuum() || v.space.has_vacuum()) throw StateError("observable tensor requires vacuum-free spaces");
  Space space = product_space(u.space, v.space);
  return Observable(std::move(space), kron(u.matrix, v.matrix));
}

QuantumValue tensor(const QuantumValue& u, const QuantumValue& v) {
  if (u.index() != v.index()) throw StateError("kind mismatch");
  if (const auto* s = std::get_if<LabeledState>(&u)) return tensor(*s, std::get<LabeledState>(v));
  return tensor(std::get<DensityOp>(u), std::get<DensityOp>(v));
}

Normalized normalize(const LabeledState& s) {
  const double n = s.norm();
  if (!(n > kZeroProbability)) throw StateError("impossible branch");
  return {LabeledState(s.space, s.amps / n), n};
}

DensityOp to_density(const LabeledState& s) { return DensityOp(s.space, s.amps * s.amps.adjoint()); }

DensityOp partial_trace(const DensityOp& rho, const std::vector<std::string>& keep) {
  const Space& in = rho.space;
  std::vector<bool> kept(in.factors().size(), false);
  for (const auto& role : keep) kept[in.role_index(role)] = true;

  std::vector<Factor> out_factors;
  for (std::size_t i = 0; i < kept.size(); ++i)
    if (kept[i]) out_factors.push_back(in.factors()[i]);
  Space out_space(std::move(out_factors), in.has_vacuum());

  Mat out = Mat::Zero(static_cast<Eigen::Index>(out_space.dim()), static_cast<Eigen::Index>(out_space.dim()));
  if (in.has_vacuum()) out(0, 0) = rho.matrix(0, 0);

  // Precompute (kept digits -> out index, traced digits -> environment key) per input index.
  const std::size_t n = in.dim();
  std::vector<std::size_t> out_idx(n), env_key(n);
  for (std::size_t i = in.offset(); i < n; ++i) {
    auto d = in.digits(i);
    std::vector<std::size_t> kd;
    std::size_t env = 0;
    for (std::size_t f = 0; f < d.size(); ++f) {
      if (kept[f]) {
        kd.push_back(d[f]);
      } else {
        env = env * in.factors()[f].dim() + d[f];
      }
    }
    out_idx[i] = out_space.index(kd);
    env_key[i] = env;
  }
  for (std::size_t i = in.offset(); i < n; ++i)
    for (std::size_t j = in.offset(); j < n; ++j)
      if (env_key[i] == env_key[j])
        out(static_cast<Eigen::Index>(out_idx[i]), static_cast<Eigen::Index>(out_idx[j])) +=
            rho.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return DensityOp(std::move(out_space), std::move(out));
}

DensityOp partial_trace(const DensityOp& rho, std::string_view keep) {
  return partial_trace(rho, std::vector<std::string>{std::string(keep)});
}

namespace {

// perm[new_index] = old_index
std::pair<Space, std::vector<std::size_t>> reorder_map(const Space& in, const std::vector<std::string>& roles) {
  if (roles.size() != in.factors().size()) throw StateError("reorder needs every role exactly once");
  std::vector<std::size_t> src(roles.size());
  std::vector<Factor> f;
  for (std::size_t i = 0; i < roles.size(); ++i) {
    src[i] = in.role_index(roles[i]);
    f.push_back(in.factors()[src[i]]);
  }
  Space out(std::move(f), in.has_vacuum());
  std::vector<std::size_t> perm(out.dim());
  if (out.has_vacuum()) perm[0] = 0;
  for (std::size_t i = out.offset(); i < out.dim(); ++i) {
    auto d = out.digits(i);
    std::vector<std::size_t> old(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) old[src[k]] = d[k];
    perm[i] = in.index(old);
  }
  return {std::move(out), std::move(perm)};
}

}  // namespace

LabeledState reorder(const LabeledState& s, const std::vector<std::string>& roles) {
  auto [space, perm] = reorder_map(s.space, roles);
  Vec v(s.amps.size());
  for (std::size_t i = 0; i < perm.size(); ++i) v[static_cast<Eigen::Index>(i)] = s.amps[static_cast<Eigen::Index>(perm[i])];
  return LabeledState(std::move(space), std::move(v));
}

DensityOp reorder(const DensityOp& rho, const std::vector<std::string>& roles) {
  auto [space, perm] = reorder_map(rho.space, roles);
  Mat m(rho.matrix.rows(), rho.matrix.cols());
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = 0; j < perm.size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rho.matrix(static_cast<Eigen::Index>(perm[i]), static_cast<Eigen::Index>(perm[j]));
  return DensityOp(std::move(space), std::move(m));
}

double expectation(const DensityOp& rho, const Observable& obs) {
  if (rho.space != obs.space) throw StateError("basis mismatch between state and observable");
  const cplx v = (rho.matrix * obs.matrix).trace();
  if (std::abs(v.imag()) > 1e-10) throw StateError("expectation has a non-negligible imaginary part");
  return v.real();
}

double expectation(const LabeledState& s, const Observable& obs) {
  if (s.space != obs.space) throw StateError("basis mismatch between state and observable");
  const cplx v = s.amps.dot(obs.matrix * s.amps);
  if (std::abs(v.imag()) > 1e-10) throw StateError("expectation has a non-negligible imaginary part");
  return v.real();
}

Eigen::VectorXd hermitian_eigenvalues(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

namespace {

// W with W W^dagger = m, one column per eigenvalue above kZeroProbability.
Mat support_factor(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > kZeroProbability) keep.push_back(i);
  Mat w(m.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    w.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]) * std::sqrt(es.eigenvalues()[keep[j]]);
  return w;
}

}  // namespace

double fidelity(const DensityOp& rho, const DensityOp& sigma) {
  if (rho.space != sigma.space) throw StateError("basis mismatch in fidelity");
  if (std::abs(rho.trace() - 1.0) > 1e-6 || std::abs(sigma.trace() - 1.0) > 1e-6) {
    throw StateError("fidelity requires unit-trace inputs");
  }
  // Work on the support of whichever operand has the smaller numerical rank.
  // Square roots of round-off eigenvalues would otherwise leak ~1e-8 into F.
  const Mat wa = support_factor(rho.matrix), wb = support_factor(sigma.matrix);
  const bool swap = wb.cols() < wa.cols();
  const Mat& v = swap ? wb : wa;
  const Mat& other = swap ? rho.matrix : sigma.matrix;
  const Mat inner = v.adjoint() * other * v;
  Eigen::VectorXd ev = hermitian_eigenvalues(0.5 * (inner + inner.adjoint())).cwiseMax(0.0);
  const double root = ev.cwiseSqrt().sum();
  return std::clamp(root * root, 0.0, 1.0);
}

double fidelity(const LabeledState& psi, const LabeledState& phi) {
  if (psi.space != phi.space) throw StateError("basis mismatch in fidelity");
  if (std::abs(psi.norm() - 1.0) > 1e-6 || std::abs(phi.norm() - 1.0) > 1e-6) {
    throw StateError("fidelity requires unit-trace inputs");
  }
  return std::clamp(std::norm(psi.amps.dot(phi.amps)), 0.0, 1.0);
}

double purity(const DensityOp& rho) { return (rho.matrix * rho.matrix).trace().real(); }

double entropy_bits(const DensityOp& rho) {
  double h = 0.0;
  for (double l : hermitian_eigenvalues(rho.matrix)) {
    if (l > 1e-15) h -= l * std::log2(l);
  }
  return h;
}

Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Mat pauli_y() {
  Mat m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

double concurrence(const DensityOp& rho) {
  if (rho.matrix.rows() != 4 || rho.space.has_vacuum()) throw StateError("concurrence needs a two-qubit state");
  const Mat yy = kron(pauli_y(), pauli_y());
  const Mat tilde = yy * rho.matrix.conjugate() * yy;
  // The nonzero spectrum of rho * tilde equals that of W^dagger tilde W.
  const Mat w = support_factor(rho.matrix);
  const Mat r = w.adjoint() * tilde * w;
  Eigen::VectorXd ev = Eigen::VectorXd::Zero(4);
  if (r.rows() > 0) ev.tail(r.rows()) = hermitian_eigenvalues(0.5 * (r + r.adjoint())).cwiseMax(0.0).cwiseSqrt();
  std::sort(ev.begin(), ev.end());
  return std::max(0.0, ev[3] - ev[2] - ev[1] - ev[0]);
}

Mat lift(const Space& space, const std::vector<std::string>& roles, const Mat& local, cplx vacuum_value) {
  std::vector<std::size_t> idx;
  std::size_t local_dim = 1;
  for (const auto& r : roles) {
    idx.push_back(space.role_index(r));
    local_dim *= space.factors()[idx.back()].dim();
  }
  if (static_cast<std::size_t>(local.rows()) != local_dim || local.rows() != local.cols()) {
    throw StateError("local operator dimension does not match the listed factors");
  }
  std::vector<bool> acted(space.factors().size(), false);
  for (auto i : idx) acted[i] = true;

  const std::size_t n = space.dim();
  std::vector<std::size_t> local_index(n), rest_key(n);
  for (std::size_t i = space.offset(); i < n; ++i) {
    auto d = space.digits(i);
    std::size_t li = 0;
    for (auto f : idx) li = li * space.factors()[f].dim() + d[f];
    std::size_t rk = 0;
    for (std::size_t f = 0; f < d.size(); ++f)
      if (!acted[f]) rk = rk * space.factors()[f].dim() + d[f];
    local_index[i] = li;
    rest_key[i] = rk;
  }
  Mat out = Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (space.has_vacuum()) out(0, 0) = vacuum_value;
  for (std::size_t i = space.offset(); i < n; ++i)
    for (std::size_t j = space.offset(); j < n; ++j)
      if (rest_key[i] == rest_key[j])
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            local(static_cast<Eigen::Index>(local_index[i]), static_cast<Eigen::Index>(local_index[j]));
  return out;
}

Mat lift(const Space& space, std::string_view role, const Mat& local, cplx vacuum_value) {
  return lift(space, std::vector<std::string>{std::string(role)}, local, vacuum_value);
}

LabeledState add_vacuum(const LabeledState& s) {
  if (s.space.has_vacuum()) return s;
  Vec v = Vec::Zero(s.amps.size() + 1);
  v.tail(s.amps.size()) = s.amps;
  return LabeledState(s.space.with_vacuum(), std::move(v));
}

DensityOp add_vacuum(const DensityOp& rho) {
  if (rho.space.has_vacuum()) return rho;
  const auto n = rho.matrix.rows();
  Mat m = Mat::Zero(n + 1, n + 1);
  m.bottomRightCorner(n, n) = rho.matrix;
  return DensityOp(rho.space.with_vacuum(), std::move(m));
}

LabeledState remove_vacuum(const LabeledState& s) {
  if (!s.space.has_vacuum()) return s;
  if (std::norm(s.amps[0]) > kZeroProbability) throw StateError("state has vacuum weight");
  return LabeledState(s.space.without_vacuum(), s.amps.tail(s.amps.size() - 1));
}

DensityOp remove_vacuum(const DensityOp& rho) {
  if (!rho.space.has_vacuum()) return rho;
  if (std::abs(rho.matrix(0, 0)) > kZeroProbability) throw StateError("state has vacuum weight");
  const auto n = rho.matrix.rows() - 1;
  return DensityOp(rho.space.without_vacuum(), rho.matrix.bottomRightCorner(n, n));
}

bool is_hermitian(const Mat& m, double tol) {
  return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Mat& m, double tol) {
  return m.rows() == m.cols() &&
         (m.adjoint() * m - Mat::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

bool is_valid_density(const DensityOp& rho) {
  if (!is_hermitian(rho.matrix)) return false;
  const double tr = rho.trace();
  if (tr < -kExactTol || tr > 1.0 + kExactTol) return false;
  return hermitian_eigenvalues(rho.matrix).minCoeff() >= -kPsdTol;
}

namespace {

Mat ginibre(std::size_t rows, std::size_t cols, SplitMix64& rng) {
  Mat g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(i, j) = cplx(re, im);
    }
  return g;
}

}  // namespace

LabeledState random_state(const Space& space, SplitMix64& rng) {
  Vec v = Vec::Zero(static_cast<Eigen::Index>(space.dim()));
  Mat g = ginibre(space.photon_dim(), 1, rng);
  v.tail(g.rows()) = g.col(0) / g.norm();
  return LabeledState(space, std::move(v));
}

DensityOp random_density(const Space& space, SplitMix64& rng, std::size_t rank) {
  const std::size_t d = space.photon_dim();
  if (rank == 0 || rank > d) rank = d;
  Mat g = ginibre(d, rank, rng);
  Mat block = g * g.adjoint();
  block /= block.trace().real();
  Mat m = Mat::Zero(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
  const auto o = static_cast<Eigen::Index>(space.offset());
  m.block(o, o, block.rows(), block.cols()) = block;
  return DensityOp(space, std::move(m));
}

Mat random_unitary(std::size_t n, SplitMix64& rng) {
  Mat g = ginibre(n, n, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const cplx d = r(i, i);
    const double a = std::abs(d);
    if (a > 0) q.col(i) *= d / a;
  }
  return q;
}

}  // namespace photonsteer
