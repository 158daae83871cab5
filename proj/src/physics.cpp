#include "vpinn/physics.hpp"

#include <cmath>
#include <string>

#include "vpinn/errors.hpp"

namespace vpinn {

using ad::Tape;
using ad::Var;

void FluidProperties::validate() const {
  if (!(density > 0.0) || !(viscosity > 0.0)) {
    throw ConfigError("fluid: density and viscosity must be positive");
  }
}

void WallProperties::validate() const {
  if (!(density > 0.0) || !(youngs_modulus > 0.0)) {
    throw ConfigError("wall: density and Young's modulus must be positive");
  }
  if (!(poisson_ratio >= 0.0) || !(poisson_ratio < 1.0)) {
    throw ConfigError("wall: Poisson ratio must lie in [0, 1)");
  }
}

double WallProperties::stiffness(double radius) const {
  return youngs_modulus / (density * (1.0 - poisson_ratio * poisson_ratio) * radius * radius);
}

double InletProfile::amplitude(double t) const {
  if (mode == InletMode::Steady) return peak_velocity;
  return 0.5 * peak_velocity * (1.0 - std::cos(angular_frequency * t));
}

void Problem::validate() const {
  geometry.validate();
  fluid.validate();
  wall.validate();
  if (geometry.plaque) plaque_wall.validate();
  if (!std::isfinite(inlet.peak_velocity)) throw ConfigError("inlet: peak velocity must be finite");
  if (inlet.mode == InletMode::Pulsatile && !(inlet.angular_frequency > 0.0)) {
    throw ConfigError("inlet: angular frequency must be positive");
  }
}

void LossWeights::validate() const {
  for (double w : {ns, fluid_bdr, fluid_init, sc, he, solid_bdr, solid_init}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("loss weights must be finite and >= 0");
  }
}

double fluid_total(const LossBreakdown& b, const LossWeights& w) {
  return w.ns * b.ns + w.fluid_bdr * b.fluid_bdr + w.fluid_init * b.fluid_init;
}

double solid_total(const LossBreakdown& b, const LossWeights& w) {
  return w.sc * b.sc + w.he * b.he + w.solid_bdr * b.solid_bdr + w.solid_init * b.solid_init;
}

void LossBreakdown::update_totals(const LossWeights& w) {
  fluid_total = vpinn::fluid_total(*this, w);
  solid_total = vpinn::solid_total(*this, w);
}

double discrete_norm(const std::vector<std::vector<double>>& values) {
  if (values.empty()) throw DimensionError("discrete norm of an empty sample set");
  double sum = 0.0;
  for (const auto& v : values) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    sum += sq;
  }
  return sum / static_cast<double>(values.size());
}

FlowJet<Var> flow_jet(Tape& tape, const TapeFields& f, Var r, Var z, Var t_prime) {
  const Var R = tape.copy(r);
  const Var Z = tape.copy(z);
  const Var wrt[] = {R, Z, t_prime};
  FlowJet<Var> j;
  const auto u = f.velocity(tape, R, Z, t_prime);
  j.uz = u[0];
  j.ur = u[1];
  j.p = f.pressure(tape, R, Z, t_prime);
  const auto duz = tape.gradient(j.uz, wrt);
  const auto dur = tape.gradient(j.ur, wrt);
  j.uz_r = duz[0];
  j.uz_z = duz[1];
  j.uz_t = duz[2];
  j.ur_r = dur[0];
  j.ur_z = dur[1];
  j.ur_t = dur[2];
  j.uz_rr = tape.gradient(j.uz_r, R);
  j.uz_zz = tape.gradient(j.uz_z, Z);
  j.ur_rr = tape.gradient(j.ur_r, R);
  j.ur_zz = tape.gradient(j.ur_z, Z);
  const Var pxz[] = {R, Z};
  const auto dp = tape.gradient(j.p, pxz);
  j.p_r = dp[0];
  j.p_z = dp[1];
  return j;
}

DisplacementJet<Var> displacement_jet(Tape& tape, const TapeFields& f, Var r, Var z, Var t) {
  const Var R = tape.copy(r);
  const Var Z = tape.copy(z);
  const Var Tt = tape.copy(t);
  const Var wrt[] = {R, Z, Tt};
  DisplacementJet<Var> d;
  d.eta = f.displacement(tape, R, Z, Tt);
  const auto g = tape.gradient(d.eta, wrt);
  d.eta_r = g[0];
  d.eta_z = g[1];
  d.eta_t = g[2];
  d.eta_rr = tape.gradient(d.eta_r, R);
  d.eta_zz = tape.gradient(d.eta_z, Z);
  d.eta_tt = tape.gradient(d.eta_t, Tt);
  return d;
}

namespace {

WallSite wall_site(const Problem& pr, double r, double z) {
  WallSite s;
  s.sign = sign_of(r);
  s.radius = pr.geometry.reference_radius(z);
  s.radius_slope = pr.geometry.reference_radius_slope(z);
  s.thickness = pr.geometry.wall_thickness;
  s.props = pr.wall_at(wall_segment_at(pr.geometry, z));
  return s;
}

}  // namespace

std::array<double, 3> ns_residual_at(const TapeFields& f, const Problem& pr, double r, double z,
                                     double t) {
  Tape tape;
  const Var r0 = tape.input(r);
  const Var z0 = tape.input(z);
  const Var t0 = tape.input(t);
  const Var eta = pr.rigid ? tape.constant(0.0) : f.displacement(tape, r0, z0, t0);
  const Var rt = r0 + sign_of(r) * eta;
  const FlowJet<Var> j = flow_jet(tape, f, rt, z0, tape.input(t));
  const auto res = ns_residual_axisym(j, rt, pr.fluid, pr.clamp_epsilon());
  return {res[0].value(), res[1].value(), res[2].value()};
}

double harmonic_residual_at(const TapeFields& f, const Problem& pr, double r, double z, double t) {
  Tape tape;
  const Var rr = tape.input(r);
  const DisplacementJet<Var> d = displacement_jet(tape, f, rr, tape.input(z), tape.input(t));
  return harmonic_residual(d, rr, pr.clamp_epsilon()).value();
}

double stress_continuity_residual_at(const TapeFields& f, const Problem& pr, double r, double z,
                                     double t) {
  Tape tape;
  const Var r0 = tape.input(r);
  const Var z0 = tape.input(z);
  const Var t0 = tape.input(t);
  const DisplacementJet<Var> d = displacement_jet(tape, f, r0, z0, t0);
  const double rt = r + sign_of(r) * d.eta.value();
  const FlowJet<Var> j =
      flow_jet(tape, f, tape.constant(rt), tape.constant(z), tape.constant(t));
  WallFluidState fs;
  fs.p = j.p.value();
  fs.uz_r = j.uz_r.value();
  fs.uz_z = j.uz_z.value();
  fs.ur_r = j.ur_r.value();
  fs.ur_z = j.ur_z.value();
  return stress_continuity_residual(d, fs, wall_site(pr, r, z), pr.fluid).value();
}

std::vector<Var> ns_residual_cartesian(Tape& tape, const VectorFieldFn& u, const ScalarFieldFn& p,
                                       std::span<const Var> x, Var t, const FluidProperties& fl) {
  const std::size_t n = x.size();
  std::vector<Var> X(n);
  for (std::size_t i = 0; i < n; ++i) X[i] = tape.copy(x[i]);
  const Var Tt = tape.copy(t);
  const std::vector<Var> uv = u(tape, X, Tt);
  if (uv.size() != n) {
    throw DimensionError("cartesian residual: velocity has " + std::to_string(uv.size()) +
                         " components in dimension " + std::to_string(n));
  }
  const Var P = p(tape, X, Tt);
  std::vector<Var> wrt = X;
  wrt.push_back(Tt);
  // grad[i][j] = d u_i / d x_j, grad[i][n] = d u_i / dt.
  std::vector<std::vector<Var>> grad(n);
  for (std::size_t i = 0; i < n; ++i) grad[i] = tape.gradient(uv[i], wrt);
  const std::vector<Var> grad_p = tape.gradient(P, X);

  std::vector<Var> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    Var conv = uv[0] * grad[i][0];
    for (std::size_t j = 1; j < n; ++j) conv = conv + uv[j] * grad[i][j];
    // 2 div(mu D(u))_i = mu sum_j d_j (d_j u_i + d_i u_j)
    Var visc = tape.gradient(grad[i][0] + grad[0][i], X[0]);
    for (std::size_t j = 1; j < n; ++j) visc = visc + tape.gradient(grad[i][j] + grad[j][i], X[j]);
    out.push_back(fl.density * (grad[i][n] + conv) + grad_p[i] - fl.viscosity * visc);
  }
  Var div = grad[0][0];
  for (std::size_t i = 1; i < n; ++i) div = div + grad[i][i];
  out.push_back(div);
  return out;
}

std::vector<double> ns_residual_cartesian(const VectorFieldFn& u, const ScalarFieldFn& p,
                                          std::span<const double> x, double t,
                                          const FluidProperties& fl) {
  Tape tape;
  std::vector<Var> X;
  for (double xi : x) X.push_back(tape.input(xi));
  const auto res = ns_residual_cartesian(tape, u, p, X, tape.input(t), fl);
  std::vector<double> out;
  for (const Var& v : res) out.push_back(v.value());
  return out;
}

}  // namespace vpinn
