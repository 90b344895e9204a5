#include "photonsteer/optics.hpp"

#include <cmath>
#include <numbers>

namespace photonsteer {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
const double kInvSqrt2 = std::sqrt(0.5);
const cplx kI(0.0, 1.0);

Mat projector_on_path(const Space& space, const std::string& path) {
  const auto& f = space.factors()[space.role_index("path")];
  Mat p = Mat::Zero(static_cast<Eigen::Index>(f.dim()), static_cast<Eigen::Index>(f.dim()));
  const auto k = static_cast<Eigen::Index>(space.label_index("path", path));
  p(k, k) = 1.0;
  return p;
}

// Embeds `local` (acting on `roles`) so it only touches the `path` component
// when a path is given; identity elsewhere, identity on the vacuum.
Mat place(const Space& space, const std::string& path, std::vector<std::string> roles, const Mat& local) {
  if (path.empty()) return lift(space, roles, local, 1.0);
  const Mat pp = projector_on_path(space, path);
  const Mat rest = Mat::Identity(pp.rows(), pp.cols()) - pp;
  // path factor first, then the element's own factors
  Mat block(pp.rows() * local.rows(), pp.cols() * local.cols());
  for (Eigen::Index i = 0; i < pp.rows(); ++i)
    for (Eigen::Index j = 0; j < pp.cols(); ++j)
      block.block(i * local.rows(), j * local.cols(), local.rows(), local.cols()) =
          pp(i, j) * local + rest(i, j) * Mat::Identity(local.rows(), local.cols());
  roles.insert(roles.begin(), "path");
  return lift(space, roles, block, 1.0);
}

Mat hwp_jones(double theta_deg) {
  const double c = std::cos(2.0 * theta_deg * kDeg);
  const double s = std::sin(2.0 * theta_deg * kDeg);
  Mat j(2, 2);
  j << c, s, s, -c;
  return j;
}

Vec pol_vec(cplx h, cplx v) {
  Vec out(2);
  out << h, v;
  return out;
}

Mat qplate_local() {
  // pol (H,V) x oam (-2,0,+2), pol slowest.
  const Vec left = pol_vec(kInvSqrt2, -kI * kInvSqrt2);
  const Vec right = pol_vec(kInvSqrt2, kI * kInvSqrt2);
  auto kron_vec = [](const Vec& p, int l) {
    Vec out = Vec::Zero(6);
    for (int i = 0; i < 2; ++i) out[i * 3 + l] = p[i];
    return out;
  };
  Mat u = Mat::Zero(6, 6);
  for (int l = 0; l < 3; ++l) {
    const int up = (l + 1) % 3;
    const int down = (l + 2) % 3;
    u += kron_vec(right, up) * kron_vec(left, l).adjoint();
    u += kron_vec(left, down) * kron_vec(right, l).adjoint();
  }
  return u;
}

void require_path(const Space& space, const std::string& path) {
  if (!space.has_role("path")) throw OpticsError("space has no path factor");
  if (path.empty()) return;
  const auto& labels = space.factors()[space.role_index("path")].labels;
  if (std::find(labels.begin(), labels.end(), path) == labels.end()) {
    throw OpticsError("placement '" + path + "' not in basis");
  }
}

}  // namespace

std::string OpticalElement::name() const {
  switch (kind) {
    case ElementKind::BS50: return "bs";
    case ElementKind::PBS: return "pbs";
    case ElementKind::HWP: return "hwp";
    case ElementKind::Polarizer: return "polarizer";
    case ElementKind::QPlate: return "qplate";
    case ElementKind::Absorber: return "absorber";
    case ElementKind::PhaseShift: return "phase";
    case ElementKind::Mirror: return "mirror";
  }
  return "?";
}

Mat element_unitary(const OpticalElement& e, const Space& space) {
  require_path(space, e.path);
  switch (e.kind) {
    case ElementKind::BS50: {
      Mat b(2, 2);
      b << kInvSqrt2, kI * kInvSqrt2, kI * kInvSqrt2, kInvSqrt2;
      return lift(space, "path", b, 1.0);
    }
    case ElementKind::PBS: {
      // (a,H) (a,V) (b,H) (b,V)
      Mat p = Mat::Zero(4, 4);
      p(0, 0) = 1.0;
      p(3, 1) = 1.0;
      p(2, 2) = 1.0;
      p(1, 3) = 1.0;
      return lift(space, std::vector<std::string>{"path", "pol"}, p, 1.0);
    }
    case ElementKind::HWP:
      return place(space, e.path, {"pol"}, hwp_jones(e.angle));
    case ElementKind::QPlate:
      if (!space.has_role("oam")) throw OpticsError("q-plate needs the OAM register");
      return place(space, e.path, {"pol", "oam"}, qplate_local());
    case ElementKind::PhaseShift:
    case ElementKind::Mirror: {
      const cplx ph = e.kind == ElementKind::Mirror ? kI : std::polar(1.0, e.angle);
      if (e.path.empty()) return lift(space, "path", ph * Mat::Identity(2, 2), 1.0);
      Mat d = Mat::Identity(2, 2);
      const auto k = static_cast<Eigen::Index>(space.label_index("path", e.path));
      d(k, k) = ph;
      return lift(space, "path", d, 1.0);
    }
    case ElementKind::Polarizer:
    case ElementKind::Absorber:
      break;
  }
  throw OpticsError(e.name() + " is not a unitary element");
}

Mat loss_projector(const OpticalElement& e, const Space& space) {
  require_path(space, e.path);
  if (e.kind == ElementKind::Absorber) {
    if (e.path.empty()) throw OpticsError("absorber needs a path");
    return lift(space, "path", projector_on_path(space, e.path), 0.0);
  }
  if (e.kind == ElementKind::Polarizer) {
    const double a = e.angle * kDeg;
    const Vec blocked = pol_vec(-std::sin(a), std::cos(a));
    const Mat pb = blocked * blocked.adjoint();
    if (e.path.empty()) return lift(space, "pol", pb, 0.0);
    Mat local(4, 4);
    const Mat pp = projector_on_path(space, e.path);
    for (Eigen::Index i = 0; i < 2; ++i)
      for (Eigen::Index j = 0; j < 2; ++j) local.block(i * 2, j * 2, 2, 2) = pp(i, j) * pb;
    return lift(space, std::vector<std::string>{"path", "pol"}, local, 0.0);
  }
  throw OpticsError(e.name() + " is not a channel element");
}

std::vector<KrausOp> element_kraus(const OpticalElement& e, const Space& space) {
  if (e.is_unitary()) return {{"unitary", element_unitary(e, space)}};
  if (!space.has_vacuum()) throw OpticsError("channel elements need the vacuum label");
  const Mat loss = loss_projector(e, space);
  const auto n = loss.rows();
  std::vector<KrausOp> out;
  out.push_back({"transmit", Mat::Identity(n, n) - loss});
  // One Kraus operator |vac><u| per loss direction u.
  Eigen::SelfAdjointEigenSolver<Mat> es(loss);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (es.eigenvalues()[k] < 0.5) continue;
    Mat op = Mat::Zero(n, n);
    op.row(0) = es.eigenvectors().col(k).adjoint();
    out.push_back({"absorb", op});
  }
  return out;
}

ElementResult apply_element(const LabeledState& s, const OpticalElement& e) {
  if (e.is_unitary()) return LabeledState(s.space, element_unitary(e, s.space) * s.amps);
  const LabeledState in = add_vacuum(s);
  const Mat loss = loss_projector(e, in.space);
  const Vec lost = loss * in.amps;
  const Vec kept = in.amps - lost;
  std::vector<Branch> out;
  const double p_lost = lost.squaredNorm();
  const double p_kept = kept.squaredNorm();
  if (p_kept > kZeroProbability) {
    out.push_back({"transmit", LabeledState(in.space, kept / std::sqrt(p_kept)), p_kept});
  }
  if (p_lost > kZeroProbability) {
    out.push_back({"absorb", ket(in.space, {"vac"}), p_lost});
  }
  return out;
}

DensityOp apply_element(const DensityOp& rho, const OpticalElement& e) {
  if (e.is_unitary()) {
    const Mat u = element_unitary(e, rho.space);
    return DensityOp(rho.space, u * rho.matrix * u.adjoint());
  }
  const DensityOp in = add_vacuum(rho);
  Mat out = Mat::Zero(in.matrix.rows(), in.matrix.cols());
  for (const auto& k : element_kraus(e, in.space)) out += k.op * in.matrix * k.op.adjoint();
  return DensityOp(in.space, std::move(out));
}

LabeledState apply_unitary(const LabeledState& s, const OpticalElement& e) {
  if (!e.is_unitary()) throw OpticsError(e.name() + " is not a unitary element");
  return LabeledState(s.space, element_unitary(e, s.space) * s.amps);
}

void Circuit::validate() const {
  if (input.space != space) throw OpticsError("circuit input does not live in the circuit space");
  for (const auto& e : elements) {
    require_path(space, e.path);
    if (e.kind == ElementKind::QPlate && !space.has_role("oam")) throw OpticsError("q-plate needs the OAM register");
    if (e.kind == ElementKind::Absorber && e.path.empty()) throw OpticsError("absorber needs a path");
    if (!e.is_unitary() && !space.has_vacuum()) throw OpticsError("channel elements need the vacuum label");
  }
}

LabeledState propagate_unitary(const Circuit& c, std::size_t count) {
  c.validate();
  LabeledState s = c.input;
  for (std::size_t i = 0; i < c.elements.size() && i < count; ++i) s = apply_unitary(s, c.elements[i]);
  return s;
}

std::vector<History> propagate_all(const Circuit& c) {
  c.validate();
  std::vector<History> live{{{}, c.input, 1.0}};
  for (const auto& e : c.elements) {
    std::vector<History> next;
    for (auto& h : live) {
      auto r = apply_element(h.state, e);
      if (auto* s = std::get_if<LabeledState>(&r)) {
        next.push_back({h.labels, std::move(*s), h.probability});
        continue;
      }
      for (auto& b : std::get<std::vector<Branch>>(r)) {
        auto labels = h.labels;
        labels.push_back(b.label);
        next.push_back({std::move(labels), std::move(b.state), h.probability * b.probability});
      }
    }
    live = std::move(next);
  }
  return live;
}

std::size_t first_splitter_end(const Circuit& c) {
  for (std::size_t i = 0; i < c.elements.size(); ++i)
    if (c.elements[i].is_splitter()) return i + 1;
  return c.elements.size();
}

Circuit fig2_circuit(double hwp_theta_deg) {
  Space space = photon_space();
  return Circuit{space, ket(space, {"a", "H"}), {OpticalElement::hwp(hwp_theta_deg, "a"), OpticalElement::pbs()}};
}

LabeledState build_fig2_state(double hwp_theta_deg, std::vector<PrepEvent>* log) {
  // PBS-1 sends the V twin to detector T; the click heralds an H photon on path a.
  if (log) log->push_back({"trigger_heralded", "H photon on path a"});
  return propagate_unitary(fig2_circuit(hwp_theta_deg));
}

QPlateStages qplate_stages(std::vector<PrepEvent>* log) {
  if (log) log->push_back({"trigger_heralded", "H photon on path a, OAM 0"});
  Space space = photon_space(true);
  Circuit c{space, ket(space, {"a", "H", "0"}), {OpticalElement::qplate("a"), OpticalElement::pbs()}};
  return {propagate_unitary(c, 1), propagate_unitary(c)};
}

LabeledState build_qplate_state(std::vector<PrepEvent>* log) { return qplate_stages(log).output; }

Vec circular_oam_amplitudes(const LabeledState& s, const std::string& path) {
  const Vec left = pol_vec(kInvSqrt2, -kI * kInvSqrt2);
  const Vec right = pol_vec(kInvSqrt2, kI * kInvSqrt2);
  static const char* oam[] = {"-2", "0", "+2"};
  Vec out(6);
  for (int p = 0; p < 2; ++p) {
    const Vec& c = p == 0 ? left : right;
    for (int l = 0; l < 3; ++l) {
      out[p * 3 + l] = std::conj(c[0]) * s.amp({path, "H", oam[l]}) + std::conj(c[1]) * s.amp({path, "V", oam[l]});
    }
  }
  return out;
}

std::string MzVariant::name() const {
  switch (kind) {
    case Kind::Empty: return "empty";
    case Kind::Absorber: return "absorber";
    case Kind::Polarizer: return "polarizer";
  }
  return "?";
}

Circuit build_mach_zehnder(const MzVariant& variant) {
  Space space = photon_space(false, true);
  Circuit c{space, ket(space, {"a", "H"}), {}};
  auto mirrors = [&] {
    c.elements.push_back(OpticalElement::mirror("a"));
    c.elements.push_back(OpticalElement::mirror("b"));
  };
  switch (variant.kind) {
    case MzVariant::Kind::Empty:
      c.elements.push_back(OpticalElement::bs50());
      mirrors();
      break;
    case MzVariant::Kind::Absorber:
      c.elements.push_back(OpticalElement::bs50());
      mirrors();
      c.elements.push_back(OpticalElement::absorber("b"));
      break;
    case MzVariant::Kind::Polarizer:
      c.elements.push_back(OpticalElement::hwp(22.5, "a"));
      c.elements.push_back(OpticalElement::pbs());
      mirrors();
      c.elements.push_back(OpticalElement::polarizer(variant.alpha_deg, "b"));
      break;
    default:
      throw OpticsError("unknown interferometer variant");
  }
  c.elements.push_back(OpticalElement::bs50());
  c.validate();
  return c;
}

}  // namespace photonsteer
