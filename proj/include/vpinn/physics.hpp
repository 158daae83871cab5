#pragma once

// Residuals of the axisymmetric FSI model, written once over the scalar
// type T (double, or ad::Var when the residual itself must be
// differentiated). All quantities use the signed radial coordinate of
// domain.hpp; velocity component u_r is the component along +r in that
// coordinate, so the physical radial velocity at r < 0 is -u_r.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "vpinn/autodiff.hpp"
#include "vpinn/domain.hpp"

namespace vpinn {

struct FluidProperties {
  double density = 1.025;   // rho_f, g/cm^3
  double viscosity = 0.035;  // mu, poise
  void validate() const;
};

struct WallProperties {
  double density = 1.2;          // rho_s, g/cm^3
  double youngs_modulus = 0.5e6;  // E, dyn/cm^2
  double poisson_ratio = 0.5;     // xi
  void validate() const;
  /// b = E / (rho_s (1 - xi^2) R^2), s^-2.
  double stiffness(double radius) const;
};

enum class InletMode { Pulsatile, Steady };

/// Centerline inlet speed A(t): pulsatile (peak/2)(1 - cos(omega t)) or a
/// constant peak value.
struct InletProfile {
  InletMode mode = InletMode::Pulsatile;
  double peak_velocity = 20.0;                // cm/s
  double angular_frequency = 2.0 * std::numbers::pi;  // rad/s
  double amplitude(double t) const;
};

/// Traction: [mu (grad u + grad u^T) - P I] n = 0.
/// PseudoTraction: [mu grad u - P I] n = 0 (the do-nothing form, which the
/// fully developed Poiseuille solution satisfies exactly).
enum class OutletCondition { Traction, PseudoTraction };

struct Problem {
  VesselGeometry geometry;
  FluidProperties fluid;
  WallProperties wall;
  WallProperties plaque_wall{1.1, 1e6, 0.5};
  InletProfile inlet;
  OutletCondition outlet = OutletCondition::Traction;
  /// Rigid wall: eta is pinned to 0 and the solid problem is skipped.
  bool rigid = false;

  void validate() const;
  const WallProperties& wall_at(WallSegment s) const {
    return s == WallSegment::Plaque ? plaque_wall : wall;
  }
  double clamp_epsilon() const { return geometry.clamp_epsilon(); }
};

struct LossWeights {
  double ns = 0.0;
  double fluid_bdr = 1.0;
  double fluid_init = 0.1;
  double sc = 1.0;
  double he = 10.0;
  double solid_bdr = 0.1;
  double solid_init = 0.01;
  void validate() const;
};

struct LossBreakdown {
  double ns = 0.0;
  double fluid_bdr = 0.0;
  double fluid_init = 0.0;
  double sc = 0.0;
  double he = 0.0;
  double solid_bdr = 0.0;
  double solid_init = 0.0;
  double fluid_total = 0.0;
  double solid_total = 0.0;

  /// Recomputes both totals from the stored terms.
  void update_totals(const LossWeights& w);
  bool operator==(const LossBreakdown&) const = default;
};

double fluid_total(const LossBreakdown& b, const LossWeights& w);
double solid_total(const LossBreakdown& b, const LossWeights& w);

/// Mean squared magnitude of a list of residual vectors. Throws
/// DimensionError for an empty list.
double discrete_norm(const std::vector<std::vector<double>>& values);

// ---------------------------------------------------------------------------
// Per-point derivative jets.

/// N_u and N_p outputs and their current-frame partials; t is t'.
template <class T>
struct FlowJet {
  T uz{}, ur{}, p{};
  T uz_r{}, uz_z{}, uz_t{};
  T ur_r{}, ur_z{}, ur_t{};
  T uz_rr{}, uz_zz{}, ur_rr{}, ur_zz{};
  T p_r{}, p_z{};
};

/// N_d output and its reference-frame partials.
template <class T>
struct DisplacementJet {
  T eta{}, eta_r{}, eta_z{}, eta_t{};
  T eta_rr{}, eta_zz{}, eta_tt{};
};

/// Fluid quantities entering the wall forcing H, taken at the current wall
/// position and treated as constants.
struct WallFluidState {
  double p = 0.0;
  double uz_r = 0.0, uz_z = 0.0, ur_r = 0.0, ur_z = 0.0;
};

/// Reference wall point data for the ring equation.
struct WallSite {
  double sign = 1.0;             // sgn of the reference coordinate
  double radius = 0.25;          // R_p(z)
  double radius_slope = 0.0;     // R_p'(z)
  double thickness = 0.05;       // h0
  WallProperties props;
};

template <class T>
T clamp_radius(T r, double eps) {
  using ad::relu;
  const double s = ad::value_of(r) >= 0.0 ? 1.0 : -1.0;
  return s * (relu(s * r - eps) + eps);
}

/// (res_z, res_r, res_div) with 1/r replaced by 1/r'.
template <class T>
std::array<T, 3> ns_residual_axisym(const FlowJet<T>& f, T r, const FluidProperties& fl,
                                    double eps) {
  const double rho = fl.density;
  const double mu = fl.viscosity;
  const T rc = clamp_radius(r, eps);
  const T inv = 1.0 / rc;
  T res_z = rho * f.uz_t + rho * (f.ur * f.uz_r + f.uz * f.uz_z) + f.p_z -
            mu * (inv * f.uz_r + f.uz_rr + f.uz_zz);
  T res_r = rho * f.ur_t + rho * (f.ur * f.ur_r + f.uz * f.ur_z) + f.p_r -
            mu * (inv * f.ur_r + f.ur_rr + f.ur_zz - f.ur * inv * inv);
  T res_div = inv * f.ur + f.ur_r + f.uz_z;
  return {res_z, res_r, res_div};
}

/// (1/r') eta_r + eta_rr + eta_zz in the reference frame.
template <class T>
T harmonic_residual(const DisplacementJet<T>& d, T r, double eps) {
  const T rc = clamp_radius(r, eps);
  return d.eta_r / rc + d.eta_rr + d.eta_zz;
}

/// H = (1/(rho_s h0)) [ (R/R_p) P - g mu ((grad u + grad u^T) n) . e_r ], with
/// R = R_p + eta, g = (R/R_p) sqrt(1 + R_z^2) and n the outward normal of
/// the deformed lumen. Only eta enters as T.
template <class T>
T wall_forcing(const DisplacementJet<T>& d, const WallFluidState& fs, const WallSite& site,
               const FluidProperties& fl) {
  using ad::sqrt;
  const double s = site.sign;
  const T R = site.radius + d.eta;
  // Total z-derivative of eta along the wall r = sgn R_p(z).
  const T Rz = site.radius_slope + d.eta_z + s * site.radius_slope * d.eta_r;
  const T q = sqrt(1.0 + Rz * Rz);
  const T g = (R / site.radius) * q;
  const T n_r = 1.0 / q;
  const T n_z = -1.0 * Rz / q;
  const double two_d_rr = 2.0 * fs.ur_r;
  const double two_d_rz = s * (fs.ur_z + fs.uz_r);
  const T traction_r = two_d_rr * n_r + two_d_rz * n_z;
  return ((R / site.radius) * fs.p - g * fl.viscosity * traction_r) /
         (site.props.density * site.thickness);
}

/// eta_tt + b eta - H.
template <class T>
T ring_residual(const DisplacementJet<T>& d, double stiffness, T forcing) {
  return d.eta_tt + stiffness * d.eta - forcing;
}

template <class T>
T stress_continuity_residual(const DisplacementJet<T>& d, const WallFluidState& fs,
                             const WallSite& site, const FluidProperties& fl) {
  return ring_residual(d, site.props.stiffness(site.radius), wall_forcing(d, fs, site, fl));
}

/// (u_z - g(r_t) A(t), u_r) with g = 1 - r_t^2 / r0^2.
template <class T>
std::array<T, 2> inlet_residual(T uz, T ur, T r_t, double t, const InletProfile& inlet,
                                double r0) {
  const T g = 1.0 - r_t * r_t / (r0 * r0);
  return {uz - g * inlet.amplitude(t), ur};
}

/// Outlet traction with n = +z: (z, r) components.
template <class T>
std::array<T, 2> outlet_residual(const FlowJet<T>& f, OutletCondition cond, double mu) {
  if (cond == OutletCondition::Traction) {
    return {2.0 * mu * f.uz_z - f.p, mu * (f.ur_z + f.uz_r)};
  }
  return {mu * f.uz_z - f.p, mu * f.ur_z};
}

/// u - (d eta / dt) e_r at the moving wall: (u_r - sgn eta_t, u_z).
template <class T>
std::array<T, 2> interface_residual(T uz, T ur, T eta_t, double sign) {
  return {ur - sign * eta_t, uz};
}

/// Fluid at rest at t = 0.
template <class T>
std::array<T, 2> initial_velocity_residual(T uz, T ur) {
  return {uz, ur};
}

template <class T, std::size_t N>
T squared_norm(const std::array<T, N>& v) {
  T s = v[0] * v[0];
  for (std::size_t i = 1; i < N; ++i) s = s + v[i] * v[i];
  return s;
}

// ---------------------------------------------------------------------------
// Tape-level fields: network outputs, or closed-form functions for
// manufactured-solution checks.

struct TapeFields {
  /// (u_z, u_r) at current-frame (r, z, t').
  std::function<std::array<ad::Var, 2>(ad::Tape&, ad::Var, ad::Var, ad::Var)> velocity;
  std::function<ad::Var(ad::Tape&, ad::Var, ad::Var, ad::Var)> pressure;
  /// eta at reference (r, z, t).
  std::function<ad::Var(ad::Tape&, ad::Var, ad::Var, ad::Var)> displacement;
};

/// Partials are taken through identity copies of r and z, so they are
/// partial derivatives even when r depends on other tape roots.
FlowJet<ad::Var> flow_jet(ad::Tape& tape, const TapeFields& f, ad::Var r, ad::Var z,
                          ad::Var t_prime);
DisplacementJet<ad::Var> displacement_jet(ad::Tape& tape, const TapeFields& f, ad::Var r,
                                          ad::Var z, ad::Var t);

/// Point-wise residuals evaluated from TapeFields (the networks' inputs are
/// the ALE image of the reference point, with t' a separate root).
std::array<double, 3> ns_residual_at(const TapeFields& f, const Problem& pr, double r, double z,
                                     double t);
double harmonic_residual_at(const TapeFields& f, const Problem& pr, double r, double z, double t);
double stress_continuity_residual_at(const TapeFields& f, const Problem& pr, double r, double z,
                                     double t);

/// Eulerian residual rho (u_t + (u . grad) u) + grad P - 2 div(mu D(u)),
/// followed by div u, in any dimension. `u` maps (x, t) to a vector of the
/// same dimension as x.
using VectorFieldFn =
    std::function<std::vector<ad::Var>(ad::Tape&, std::span<const ad::Var>, ad::Var)>;
using ScalarFieldFn = std::function<ad::Var(ad::Tape&, std::span<const ad::Var>, ad::Var)>;
std::vector<ad::Var> ns_residual_cartesian(ad::Tape& tape, const VectorFieldFn& u,
                                           const ScalarFieldFn& p, std::span<const ad::Var> x,
                                           ad::Var t, const FluidProperties& fl);
std::vector<double> ns_residual_cartesian(const VectorFieldFn& u, const ScalarFieldFn& p,
                                          std::span<const double> x, double t,
                                          const FluidProperties& fl);

}  // namespace vpinn
