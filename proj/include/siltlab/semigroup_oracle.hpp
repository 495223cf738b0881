#pragma once

// Deterministic evaluation of S_t, S_t^K = e^{-C_beta(K) t} S_t and the first
// and second moment formulas of the truncated superprocess Y^K started from
// mu(dx) = h(x) dx.

#include "siltlab/branching_mechanism.hpp"
#include "siltlab/grid_function.hpp"
#include "siltlab/radial_kernel.hpp"

namespace siltlab {

/// Margin the periodic grid needs for an evolution of length t: 4 t^{1/alpha}.
double required_margin(double alpha, double t);

/// S_t f (or S_t^K f when `truncated`), by spectral multiplication with
/// exp(-t psi). Grids with too small a margin are widened, evolved and cropped
/// back, with a warning on std::clog.
GridFunction apply_semigroup(const GridFunction& f, double t, bool truncated, const MechanismParams& p);

/// mu(S_t^K phi).
double first_moment(const GridFunction& h, const GridFunction& phi, double t, const MechanismParams& p);

/// (mu(S_t^K phi))^2 + chi(2) mu(int_0^t S_{t-s}^K (S_s^K phi)^2 ds), Simpson in s
/// with `intervals` (even) panels.
double second_moment(const GridFunction& h, const GridFunction& phi, double t, const MechanismParams& p,
                     int intervals = 64);

/// mu(S_t^K phi) mu(S_s^K psi) + chi(2) mu(int_0^s S_r^K (S_{t-r}^K phi S_{s-r}^K psi) dr), t >= s.
double cross_moment(const GridFunction& h, const GridFunction& phi, const GridFunction& psi, double t, double s,
                    const MechanismParams& p, int intervals = 64);

struct KernelMoment {
  double independent = 0.0;      ///< e^{-C(t+s)} <h, p_t * k * p_s * h>
  double common_ancestor = 0.0;  ///< chi(2) mu(1) int_0^s e^{-C(t+s-r)} (p_{t+s-2r} * k)(0) dr
  double total() const { return independent + common_ancestor; }
};

/// E[ int int k(z_1 - z_2) Y_t^K(dz_1) Y_s^K(dz_2) ] for a radial kernel k, t >= s.
/// The common-ancestor part is infinite for K = infinity.
KernelMoment kernel_cross_moment(const GridFunction& h, const RadialKernel& k, double t, double s,
                                 const MechanismParams& p);

}  // namespace siltlab
