#include "vpinn/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <ostream>
#include <random>

#include "vpinn/errors.hpp"
#include "vpinn/nets.hpp"

namespace vpinn {

void VesselGeometry::validate() const {
  if (!(radius > 0.0) || !(length > 0.0) || !(wall_thickness > 0.0) || !(horizon > 0.0)) {
    throw ConfigError("geometry: radius, length, wall thickness and horizon must be positive");
  }
  if (!plaque) return;
  const Plaque& p = *plaque;
  if (!(p.short_radius > 0.0) || !(p.short_radius < radius)) {
    throw ConfigError("plaque: short radius h_r must satisfy 0 < h_r < r0 (h_r = " +
                      format_double(p.short_radius) + ", r0 = " + format_double(radius) + ")");
  }
  if (!(p.long_radius > 0.0)) throw ConfigError("plaque: long radius h_l must be positive");
  if (!(p.center - p.long_radius > 0.0) || !(p.center + p.long_radius < length)) {
    throw ConfigError("plaque: [z_p - h_l, z_p + h_l] must lie inside (0, l)");
  }
}

namespace {

// |z - z_p| within rounding of h_l counts as the end point: the dent depth
// grows like sqrt(h_l - |dz|), so one ulp in z would otherwise leave a
// 1e-9 cm step at z = z_p + h_l.
bool at_or_past_plaque_end(const Plaque& p, double z, double dz) {
  const double tol = 4.0 * std::numeric_limits<double>::epsilon() *
                     (std::abs(z) + std::abs(p.center) + p.long_radius);
  return std::abs(dz) >= p.long_radius - tol;
}

}  // namespace

double VesselGeometry::reference_radius(double z) const {
  if (!plaque) return radius;
  const Plaque& p = *plaque;
  const double dz = z - p.center;
  if (at_or_past_plaque_end(p, z, dz)) return radius;
  const double k = p.short_radius / p.long_radius;
  const double inner = p.short_radius * p.short_radius - k * k * dz * dz;
  return radius - std::sqrt(inner > 0.0 ? inner : 0.0);
}

double VesselGeometry::reference_radius_slope(double z) const {
  if (!plaque) return 0.0;
  const Plaque& p = *plaque;
  const double dz = z - p.center;
  if (at_or_past_plaque_end(p, z, dz)) return 0.0;
  const double k = p.short_radius / p.long_radius;
  const double inner = p.short_radius * p.short_radius - k * k * dz * dz;
  return k * k * dz / std::sqrt(inner);
}

double VesselGeometry::lumen_volume(double z0, double z1) const {
  const double pi = std::numbers::pi;
  double v = radius * radius * (z1 - z0);
  if (!plaque) return pi * v;
  const Plaque& p = *plaque;
  const double a = std::max(z0, p.center - p.long_radius) - p.center;
  const double b = std::min(z1, p.center + p.long_radius) - p.center;
  if (a >= b) return pi * v;
  // R_p = r0 - S with S = k sqrt(h_l^2 - x^2), x = z - z_p.
  const double k = p.short_radius / p.long_radius;
  const double hl2 = p.long_radius * p.long_radius;
  auto int_s = [&](double x) {
    const double q = std::max(0.0, hl2 - x * x);
    return 0.5 * k * (x * std::sqrt(q) + hl2 * std::asin(std::clamp(x / p.long_radius, -1.0, 1.0)));
  };
  auto int_s2 = [&](double x) { return k * k * (hl2 * x - x * x * x / 3.0); };
  v += -2.0 * radius * (int_s(b) - int_s(a)) + (int_s2(b) - int_s2(a));
  return pi * v;
}

const char* region_name(Region r) {
  switch (r) {
    case Region::FluidInterior: return "interior";
    case Region::Wall: return "wall";
    case Region::Inlet: return "inlet";
    case Region::Outlet: return "outlet";
    case Region::WallEnds: return "wall-ends";
  }
  return "?";
}

Region parse_region(const std::string& name) {
  for (Region r : {Region::FluidInterior, Region::Wall, Region::Inlet, Region::Outlet,
                   Region::WallEnds}) {
    if (name == region_name(r)) return r;
  }
  throw ConfigError("unknown region '" + name + "'");
}

const char* segment_name(WallSegment s) {
  switch (s) {
    case WallSegment::None: return "";
    case WallSegment::Upstream: return "w1";
    case WallSegment::Plaque: return "p";
    case WallSegment::Downstream: return "w2";
  }
  return "?";
}

WallSegment wall_segment_at(const VesselGeometry& g, double z) {
  if (!g.plaque) return WallSegment::None;
  if (z < g.plaque->center - g.plaque->long_radius) return WallSegment::Upstream;
  if (z > g.plaque->center + g.plaque->long_radius) return WallSegment::Downstream;
  return WallSegment::Plaque;
}

double sign_of(double x) { return x >= 0.0 ? 1.0 : -1.0; }

double clamp_radius(double r, double eps) {
  const double s = sign_of(r);
  const double excess = s * r - eps;
  return s * ((excess > 0.0 ? excess : 0.0) + eps);
}

CurrentPoint ale_map(double r, double z, double eta) { return {r + sign_of(r) * eta, z}; }

SampleSet sample(const VesselGeometry& g, Region region, int count, std::uint64_t seed,
                 TimeMode time) {
  if (count < 1) throw ConfigError("sample count must be positive, got " + std::to_string(count));
  SampleSet s;
  s.region = region;
  s.time = time;
  s.seed = seed;
  s.points.reserve(static_cast<std::size_t>(count));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw_t = [&] { return time == TimeMode::Initial ? 0.0 : g.horizon * unit(rng); };
  auto draw_sign = [&] { return unit(rng) < 0.5 ? -1.0 : 1.0; };

  for (int i = 0; i < count; ++i) {
    SamplePoint p{0.0, 0.0, 0.0, region, WallSegment::None};
    switch (region) {
      case Region::FluidInterior:
        for (;;) {
          p.z = g.length * unit(rng);
          p.r = g.radius * (2.0 * unit(rng) - 1.0);
          if (std::abs(p.r) < g.reference_radius(p.z)) break;
        }
        break;
      case Region::Wall:
        p.z = g.length * unit(rng);
        p.r = draw_sign() * g.reference_radius(p.z);
        p.segment = wall_segment_at(g, p.z);
        break;
      case Region::Inlet:
      case Region::Outlet: {
        p.z = region == Region::Inlet ? 0.0 : g.length;
        for (;;) {
          p.r = g.reference_radius(p.z) * (2.0 * unit(rng) - 1.0);
          if (std::abs(p.r) < g.reference_radius(p.z)) break;
        }
        break;
      }
      case Region::WallEnds:
        p.z = unit(rng) < 0.5 ? 0.0 : g.length;
        p.r = draw_sign() * g.reference_radius(p.z);
        p.segment = wall_segment_at(g, p.z);
        break;
    }
    p.t = draw_t();
    s.points.push_back(p);
  }
  return s;
}

SampleSet at_initial_time(const SampleSet& s) {
  SampleSet out = s;
  out.time = TimeMode::Initial;
  for (SamplePoint& p : out.points) p.t = 0.0;
  return out;
}

namespace {

std::uint64_t region_seed(std::uint64_t seed, int k) {
  // splitmix64 step keeps the per-region streams unrelated.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SampleSet slice(const SampleSet& s, int part, int parts) {
  SampleSet out = s;
  out.points.clear();
  const std::size_t n = s.points.size();
  const std::size_t P = static_cast<std::size_t>(parts);
  const std::size_t k = static_cast<std::size_t>(part);
  const std::size_t begin = k * n / P;
  const std::size_t end = (k + 1) * n / P;
  out.points.assign(s.points.begin() + static_cast<std::ptrdiff_t>(begin),
                    s.points.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

}  // namespace

CollocationSet draw_collocation(const VesselGeometry& g, const SampleCounts& counts,
                                std::uint64_t seed) {
  CollocationSet c;
  c.interior = sample(g, Region::FluidInterior, counts.interior, region_seed(seed, 0));
  c.interior_initial = at_initial_time(c.interior);
  const int k_in = counts.inlet_outlet / 2;
  c.inlet = sample(g, Region::Inlet, k_in, region_seed(seed, 1));
  c.outlet = sample(g, Region::Outlet, counts.inlet_outlet - k_in, region_seed(seed, 2));
  c.wall = sample(g, Region::Wall, counts.wall, region_seed(seed, 3));
  c.wall_initial = at_initial_time(c.wall);
  c.wall_ends = sample(g, Region::WallEnds, counts.wall_ends, region_seed(seed, 4));
  return c;
}

std::vector<CollocationSet> CollocationSet::shard(int parts) const {
  if (parts < 1) throw ConfigError("shard count must be positive");
  const SampleSet* all[] = {&interior, &interior_initial, &inlet, &outlet,
                            &wall,     &wall_initial,     &wall_ends};
  for (const SampleSet* s : all) {
    if (!s->empty() && s->size() < static_cast<std::size_t>(parts)) {
      throw ConfigError(std::string("cannot split ") + std::to_string(s->size()) + " " +
                        region_name(s->region) + " points into " + std::to_string(parts) +
                        " non-empty shards");
    }
  }
  std::vector<CollocationSet> out(static_cast<std::size_t>(parts));
  for (int k = 0; k < parts; ++k) {
    CollocationSet& c = out[static_cast<std::size_t>(k)];
    c.interior = slice(interior, k, parts);
    c.interior_initial = slice(interior_initial, k, parts);
    c.inlet = slice(inlet, k, parts);
    c.outlet = slice(outlet, k, parts);
    c.wall = slice(wall, k, parts);
    c.wall_initial = slice(wall_initial, k, parts);
    c.wall_ends = slice(wall_ends, k, parts);
  }
  return out;
}

void write_samples_csv(std::ostream& out, const SampleSet& s) {
  out << "r,z,t,region\n";
  for (const SamplePoint& p : s.points) {
    out << format_double(p.r) << ',' << format_double(p.z) << ',' << format_double(p.t) << ','
        << region_name(p.region);
    if (p.segment != WallSegment::None) out << ':' << segment_name(p.segment);
    out << '\n';
  }
}

}  // namespace vpinn
