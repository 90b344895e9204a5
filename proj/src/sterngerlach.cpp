#include "photonsteer/sterngerlach.hpp"

#include <cmath>
#include <numbers>

#include "photonsteer/steering.hpp"

namespace photonsteer {

namespace {

const cplx kI(0.0, 1.0);

struct Derived {
  double k;  // t mu_c / hbar
  double d;  // t^2 mu_c b / 2m
  cplx q;    // sigma0^2 + i hbar t / 2m
  cplx norm; // 1D normalization constant including its phase
};

Derived derive(const SGParams& p) {
  Derived out;
  out.k = p.t * p.mu_c / p.hbar;
  out.d = p.t * p.t * p.mu_c * p.b / (2.0 * p.m);
  out.q = cplx(p.sigma0 * p.sigma0, p.hbar * p.t / (2.0 * p.m));
  const double phase = -p.t * p.t * p.t * p.mu_c * p.mu_c * p.b * p.b / (6.0 * p.m * p.hbar);
  out.norm = std::polar(1.0, phase) * std::sqrt(p.sigma0 / std::sqrt(2.0 * std::numbers::pi)) * std::pow(out.q, -0.5);
  return out;
}

double trapezoid_weight(const ZGrid& g, std::size_t i) {
  return (i == 0 || i + 1 == g.n) ? 0.5 * g.step() : g.step();
}

cplx inner(const ZGrid& g, const std::vector<cplx>& f, const std::vector<cplx>& h) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) s += trapezoid_weight(g, i) * std::conj(f[i]) * h[i];
  return s;
}

}  // namespace

void SGParams::validate() const {
  if (!(sigma0 > 0.0) || !(m > 0.0) || !(hbar > 0.0)) throw std::invalid_argument("sigma0, m and hbar must be positive");
  if (!(t >= 0.0)) throw std::invalid_argument("t must be nonnegative");
}

double branch_center(const SGParams& p, int sign) {
  return -static_cast<double>(sign) * p.t * p.t * p.mu_c * p.b / (2.0 * p.m);
}

double branch_width(const SGParams& p) {
  const double spread = p.hbar * p.t / (2.0 * p.m * p.sigma0);
  return std::sqrt(p.sigma0 * p.sigma0 + spread * spread);
}

ZGrid default_grid(const SGParams& p, std::size_t n) {
  p.validate();
  const double half = std::abs(branch_center(p, +1)) + 8.0 * branch_width(p);
  return {-half, half, n};
}

cplx branch_amplitude(const SGParams& p, int sign, double z) {
  const Derived d = derive(p);
  const double s = static_cast<double>(sign);
  const cplx kick = std::exp(-s * kI * d.k * (p.B0 + p.b * z));
  const double shifted = z + s * d.d;
  const cplx envelope = std::exp(-shifted * shifted / (4.0 * d.q));
  return d.norm * kick * envelope;
}

void check_grid(const SGParams& p, const ZGrid& grid) {
  p.validate();
  const ZGrid suggested = default_grid(p);
  if (grid.n < 3 || !(grid.z_max > grid.z_min)) {
    throw GridError("grid needs at least 3 points over a positive span", suggested.z_min, suggested.z_max);
  }
  const double peak = std::norm(derive(p).norm);
  for (int sign : {+1, -1}) {
    for (double z : {grid.z_min, grid.z_max}) {
      if (std::norm(branch_amplitude(p, sign, z)) > 1e-8 * peak) {
        throw GridError("grid too narrow: wavepacket density at the edge exceeds 1e-8 of its peak; try [" +
                            std::to_string(suggested.z_min) + ", " + std::to_string(suggested.z_max) + "]",
                        suggested.z_min, suggested.z_max);
      }
    }
  }
}

double SGBranch::norm_squared() const {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) s += trapezoid_weight(grid, i) * std::norm(amps[i]);
  return s;
}

SGBranch eval_branch(const SGParams& p, int sign, const ZGrid& grid) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("branch sign must be +1 or -1");
  check_grid(p, grid);
  SGBranch b{sign, grid, std::vector<cplx>(grid.n)};
  for (std::size_t i = 0; i < grid.n; ++i) b.amps[i] = branch_amplitude(p, sign, grid.z(i));
  return b;
}

cplx branch_overlap(const SGParams& p, const ZGrid& grid) {
  const SGBranch plus = eval_branch(p, +1, grid);
  const SGBranch minus = eval_branch(p, -1, grid);
  return inner(grid, plus.amps, minus.amps);
}

cplx branch_overlap_closed_form(const SGParams& p) {
  p.validate();
  const Derived d = derive(p);
  const cplx qc = std::conj(d.q);
  // conj(psi_+) psi_- = |N|^2 exp(-A z^2 + B z + C)
  const cplx a = 1.0 / (4.0 * qc) + 1.0 / (4.0 * d.q);
  const cplx b = 2.0 * kI * d.k * p.b - d.d / (2.0 * qc) + d.d / (2.0 * d.q);
  const cplx c = 2.0 * kI * d.k * p.B0 - d.d * d.d / (4.0 * qc) - d.d * d.d / (4.0 * d.q);
  return std::norm(d.norm) * std::sqrt(std::numbers::pi / a) * std::exp(b * b / (4.0 * a) + c);
}

EffectiveState effective_two_qubit(const SGParams& p, const ZGrid& grid) {
  const SGBranch plus = eval_branch(p, +1, grid);
  const SGBranch minus = eval_branch(p, -1, grid);
  const double np = std::sqrt(plus.norm_squared());
  const double nm = std::sqrt(minus.norm_squared());

  // Gram-Schmidt, psi_+ first.
  std::vector<cplx> e1(grid.n), m(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    e1[i] = plus.amps[i] / np;
    m[i] = minus.amps[i] / nm;
  }
  const cplx c = inner(grid, e1, m);
  std::vector<cplx> r(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) r[i] = m[i] - c * e1[i];
  double s = std::sqrt(std::max(0.0, inner(grid, r, r).real()));

  bool degenerate = false;
  cplx c_used = c;
  if (s < 1e-10) {
    degenerate = p.t > 0.0;
    s = 0.0;
    c_used = std::abs(c) > 0.0 ? c / std::abs(c) : cplx(1.0);
  }

  const Space space({Factor{"z", {"0", "1"}}, Factor{"spin", {"up", "down"}}});
  Vec v(4);
  v << 1.0, c_used, 0.0, s;  // (0,up) (0,down) (1,up) (1,down)
  v /= v.norm();
  return {to_density(LabeledState(space, v)), inner(grid, plus.amps, minus.amps), degenerate};
}

std::vector<CurvePoint> sg_chsh_curve(const SGParams& p, const std::vector<double>& times,
                                      const std::optional<ZGrid>& grid) {
  std::vector<CurvePoint> out;
  out.reserve(times.size());
  for (double t : times) {
    SGParams pt = p;
    pt.t = t;
    const ZGrid g = grid ? *grid : default_grid(pt);
    const EffectiveState eff = effective_two_qubit(pt, g);
    out.push_back({t, eff.overlap, chsh_max(eff.rho).s_max});
  }
  return out;
}

}  // namespace photonsteer
