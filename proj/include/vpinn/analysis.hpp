#pragma once

// Post-processing of trained networks: the volume-weighted relative error,
// wall traction, outlet flux, probes and CSV exports. Inputs are reference
// coordinates; network fields are evaluated at their ALE images.

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "vpinn/domain.hpp"
#include "vpinn/nets.hpp"
#include "vpinn/physics.hpp"

namespace vpinn {

/// Structured grid over the meridional half-plane r in [0, R_p(z)]. Node
/// (i, j) sits at r = (i / nr) R_p(z_j), z_j = j l / nz. Cell volumes are the
/// exact annular volumes (s_+^2 - s_-^2) lumen_volume(z_j, z_j+1), s = r / R_p.
/// Times are cell midpoints t_k = (k + 1/2) T / nt, step t_l = T / nt.
struct EvaluationGrid {
  struct Cell {
    std::array<int, 4> nodes;
    double volume;
  };
  std::vector<std::array<double, 2>> nodes;  // (r, z)
  std::vector<Cell> cells;
  std::vector<double> times;
  double time_step = 0.0;

  static EvaluationGrid build(const VesselGeometry& g, int radial_cells = 64, int axial_cells = 64,
                              int time_samples = 50);
};

/// Values of a field at `nodes` and time t, node-major: values[i * c + k]
/// with c components.
using BatchField =
    std::function<std::vector<double>(std::span<const std::array<double, 2>> nodes, double t)>;
using PointField = std::function<std::vector<double>(double r, double z, double t)>;
BatchField pointwise(PointField f);

/// t_l sum_t [sum_P A(P) mean_{p in P} |f - g|^2] / [sum_P A(P) mean_{p in P} |g|^2].
/// Throws DimensionError if the reference vanishes over a whole time slice or
/// the component counts differ.
double relative_error(const BatchField& field, const BatchField& reference, const EvaluationGrid& grid);
/// sqrt of (time-summed weighted |f - g|^2) / (time-summed weighted |g|^2).
double relative_l2_error(const BatchField& field, const BatchField& reference,
                         const EvaluationGrid& grid);

/// Network output at reference points: eta = N_d(r, z, t) (0 when rigid),
/// then N_u, N_p at (r + sgn(r) eta, z, t).
struct FieldValues {
  double uz = 0.0, ur = 0.0, p = 0.0, eta = 0.0;
};
std::vector<FieldValues> evaluate_fields(const FsiNetworks& nets, bool rigid,
                                         std::span<const std::array<double, 3>> rzt);

enum class FieldKind { Velocity, AxialVelocity, Pressure, Displacement };
BatchField network_field(const FsiNetworks& nets, bool rigid, FieldKind kind);

/// |sigma n| with sigma = -P I + 2 mu D(u) in the (r, z) plane; n = (n_r, n_z).
double traction_norm(const FlowJet<double>& f, double mu, double n_r, double n_z);
/// Same, with the jet taken from the networks at the ALE image of (r, z, t).
double traction_norm(const FsiNetworks& nets, bool rigid, const FluidProperties& fluid, double r,
                     double z, double t, double n_r, double n_z);
/// Outward unit normal of the reference lumen at wall point (sgn R_p(z), z).
std::array<double, 2> wall_normal(const VesselGeometry& g, double sign, double z);

/// int_0^R u_z(r) 2 pi r dr as pi int_0^{R^2} u_z(sqrt(s)) ds, composite
/// trapezoid over `points` nodes in s (exact for the parabolic profile).
double flux_integral(const std::function<double(double r)>& uz, double radius, int points = 256);
/// Flux through the current outlet section at time t; the two signed halves
/// (r > 0, r < 0) are integrated with their own moved radius and averaged.
double outlet_flux(const FsiNetworks& nets, bool rigid, const VesselGeometry& g, double t,
                   int points = 256);

/// u_max (1 - r^2 / r0^2).
double poiseuille_oracle(double r, double u_max, double r0);
/// dP/dz = -4 mu u_max / r0^2.
double pressure_gradient_oracle(double u_max, double r0, double mu);
/// P(z) = P(l) - dP/dz (l - z) with P(l) = outlet_pressure.
double pressure_drop_oracle(double z, double u_max, double r0, double mu, double length,
                            double outlet_pressure = 0.0);

struct ProbeSeries {
  double r = 0.0, z = 0.0;
  std::vector<double> times;
  std::vector<double> velocity_magnitude;  // cm/s
  std::vector<double> pressure;            // dyn/cm^2
};

/// Centerline inlet, middle and outlet: (0, 0), (0, l/2), (0, l).
std::vector<std::array<double, 2>> default_probe_points(const VesselGeometry& g);
/// Throws ConfigError unless `times` is strictly increasing.
std::vector<ProbeSeries> probe(const FsiNetworks& nets, bool rigid,
                               std::span<const std::array<double, 2>> points,
                               std::span<const double> times);

/// n equally spaced times on [0, T], both ends included.
std::vector<double> uniform_times(double horizon, int n);

struct FluxSeries {
  std::vector<double> times;
  std::vector<double> flux;        // cm^3/s
  std::vector<double> cumulative;  // trapezoid integral of flux from times[0], cm^3
};
FluxSeries outlet_flux_series(const FsiNetworks& nets, bool rigid, const VesselGeometry& g,
                              std::span<const double> times);

/// Traction along the upper wall at time t over `points` equally spaced z.
struct WallTraction {
  std::vector<double> z;
  std::vector<double> traction;  // dyn/cm^2
};
WallTraction wall_traction(const FsiNetworks& nets, const Problem& pr, double t, int points);

/// fields CSV: t,r,z,u_z,u_r,P,eta (reference r, z)
void write_fields_csv(std::ostream& out, const FsiNetworks& nets, bool rigid,
                      std::span<const std::array<double, 2>> nodes, std::span<const double> times);
/// probes CSV: probe,r,z,t,velocity_magnitude,pressure
void write_probes_csv(std::ostream& out, std::span<const ProbeSeries> probes);
/// flux CSV: t,outlet_flux,cumulative_flux
void write_flux_csv(std::ostream& out, const FluxSeries& s);
/// traction CSV: z,traction
void write_traction_csv(std::ostream& out, const WallTraction& w);

}  // namespace vpinn
