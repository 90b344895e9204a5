#pragma once

// Spin-position entangled wavepacket behind a Stern-Gerlach magnet.
//
// Each spin component carries a z wavepacket
//
//   psi_+-(z) = N exp(-+ i t mu_c (B0 + b z) / hbar)
//                 exp(-(z +- t^2 mu_c b / 2m)^2 / (4 q)),   q = sigma0^2 + i hbar t / 2m,
//
// with the 1D normalization N = exp(-i t^3 mu_c^2 b^2 / 6 m hbar) [sigma0 / sqrt(2 pi)]^(1/2) q^(-1/2).
// The transverse factor common to both branches is dropped: it cancels in
// every overlap, reduced state and correlator.

#include <cstddef>
#include <optional>
#include <vector>

#include "photonsteer/qstate.hpp"

namespace photonsteer {

class GridError : public std::invalid_argument {
 public:
  GridError(const std::string& what, double suggested_min, double suggested_max)
      : std::invalid_argument(what), suggested_min(suggested_min), suggested_max(suggested_max) {}
  double suggested_min;
  double suggested_max;
};

/// Dimensionless simulation units.
struct SGParams {
  double sigma0 = 1.0;
  double mu_c = 1.0;
  double b = 1.0;  // field gradient
  double B0 = 0.0;
  double m = 1.0;
  double hbar = 1.0;
  double t = 0.0;

  /// Throws std::invalid_argument unless sigma0, m, hbar > 0 and t >= 0.
  void validate() const;
  bool operator==(const SGParams&) const = default;
};

struct ZGrid {
  double z_min;
  double z_max;
  std::size_t n;

  double step() const { return (z_max - z_min) / static_cast<double>(n - 1); }
  double z(std::size_t i) const { return z_min + step() * static_cast<double>(i); }
};

/// Center of branch `sign` (+1 or -1): -sign * t^2 mu_c b / 2m.
double branch_center(const SGParams& p, int sign);
/// Position spread sqrt(sigma0^2 + (hbar t / 2 m sigma0)^2).
double branch_width(const SGParams& p);
/// n points over +-(|center| + 8 width).
ZGrid default_grid(const SGParams& p, std::size_t n = 4096);
/// Throws GridError (with the default bounds as suggestion) when the
/// probability density at either edge exceeds 1e-8 of its peak.
void check_grid(const SGParams& p, const ZGrid& grid);

/// Closed-form <z|psi_sign>.
cplx branch_amplitude(const SGParams& p, int sign, double z);

struct SGBranch {
  int sign;
  ZGrid grid;
  std::vector<cplx> amps;

  /// Trapezoidal integral of |psi|^2.
  double norm_squared() const;
};

SGBranch eval_branch(const SGParams& p, int sign, const ZGrid& grid);

/// <psi_+|psi_-> by trapezoidal quadrature.
cplx branch_overlap(const SGParams& p, const ZGrid& grid);
/// <psi_+|psi_-> from the Gaussian integral.
cplx branch_overlap_closed_form(const SGParams& p);

struct EffectiveState {
  DensityOp rho;   // factors "z" (0 = psi_+ direction, 1 = orthogonal complement) and "spin" (up, down)
  cplx overlap;    // <psi_+|psi_->
  bool degenerate; // branches colinear although t > 0; product state returned
};

/// (|psi_+>|up> + |psi_->|down>)/sqrt2 restricted to span{psi_+, psi_-},
/// orthonormalized with psi_+ first.
EffectiveState effective_two_qubit(const SGParams& p, const ZGrid& grid);

struct CurvePoint {
  double t;
  cplx overlap;
  double s_max;
};

/// CHSH maximum of the effective state at each time. Uses default_grid per
/// point unless a fixed grid is given.
std::vector<CurvePoint> sg_chsh_curve(const SGParams& p, const std::vector<double>& times,
                                      const std::optional<ZGrid>& grid = std::nullopt);

}  // namespace photonsteer
