#pragma once

// Reference geometry, the ALE map and collocation sampling.
//
// The radial coordinate is signed: the meridional half-plane r in [0, R] is
// mirrored to x in [-R, R], and e_r points along sgn(x), with sgn(0) = +1.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vpinn {

/// Elliptical dent of the lumen: long radius h_l along z, short radius h_r.
struct Plaque {
  double long_radius = 0.15;   // h_l, cm
  double short_radius = 0.1;   // h_r, cm
  double center = 1.0;         // z_p, cm
};

struct VesselGeometry {
  double radius = 0.25;          // r0, cm
  double length = 2.0;           // l, cm
  double wall_thickness = 0.05;  // h0, cm
  double horizon = 2.0;          // T, s
  std::optional<Plaque> plaque;

  /// Throws ConfigError unless all lengths are positive and any plaque lies
  /// strictly inside the lumen and the segment.
  void validate() const;

  /// R_p(z): r0 away from the plaque, r0 - sqrt(h_r^2 - (h_r/h_l)^2 (z-z_p)^2) over it.
  double reference_radius(double z) const;
  /// dR_p/dz; 0 off the plaque and at its end points.
  double reference_radius_slope(double z) const;
  /// Lumen volume between z0 <= z1: pi int R_p(z)^2 dz, in closed form.
  double lumen_volume(double z0, double z1) const;
  /// Near-axis clamp width, r0 / 100.
  double clamp_epsilon() const { return radius / 100.0; }
};

enum class Region { FluidInterior, Wall, Inlet, Outlet, WallEnds };
/// Wall sub-tags; None when the geometry has no plaque.
enum class WallSegment { None, Upstream, Plaque, Downstream };

const char* region_name(Region r);
Region parse_region(const std::string& name);
const char* segment_name(WallSegment s);

WallSegment wall_segment_at(const VesselGeometry& g, double z);

double sign_of(double x);  // +1 for x >= 0
/// r' = sgn(r) (relu(|r| - eps) + eps).
double clamp_radius(double r, double eps);

struct CurrentPoint {
  double r;
  double z;
};
/// x_t = x_0 + eta e_r; z is unchanged.
CurrentPoint ale_map(double r, double z, double eta);

struct SamplePoint {
  double r;  // signed reference radius, cm
  double z;  // cm
  double t;  // s
  Region region;
  WallSegment segment = WallSegment::None;
};

enum class TimeMode { Uniform, Initial };

struct SampleSet {
  Region region = Region::FluidInterior;
  TimeMode time = TimeMode::Uniform;
  std::uint64_t seed = 0;
  std::vector<SamplePoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Uniform independent draws of reference coordinates (rejection sampling
/// for the fluid interior) with times uniform on [0, T], or t = 0 for
/// TimeMode::Initial. Deterministic in `seed`. Throws ConfigError for count < 1.
SampleSet sample(const VesselGeometry& g, Region region, int count, std::uint64_t seed,
                 TimeMode time = TimeMode::Uniform);

/// Same spatial points, t = 0.
SampleSet at_initial_time(const SampleSet& s);

/// M interior, N wall and K inlet+outlet points; K is split evenly.
struct SampleCounts {
  int interior = 1000;
  int wall = 1000;
  int inlet_outlet = 1000;
  int wall_ends = 200;
};

struct CollocationSet {
  SampleSet interior;          // fluid interior, t in [0, T]
  SampleSet interior_initial;  // same points at t = 0
  SampleSet inlet;
  SampleSet outlet;
  SampleSet wall;
  SampleSet wall_initial;
  SampleSet wall_ends;

  /// Splits every region into P contiguous slices whose sizes differ by at
  /// most one. Throws ConfigError if any non-empty region has fewer than
  /// P points.
  std::vector<CollocationSet> shard(int parts) const;
};

CollocationSet draw_collocation(const VesselGeometry& g, const SampleCounts& counts,
                                std::uint64_t seed);

/// Header "r,z,t,region".
void write_samples_csv(std::ostream& out, const SampleSet& s);

}  // namespace vpinn
