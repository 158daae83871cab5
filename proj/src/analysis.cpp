#include "vpinn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "vpinn/errors.hpp"
#include "vpinn/jet_kernel.hpp"

namespace vpinn {

EvaluationGrid EvaluationGrid::build(const VesselGeometry& g, int radial_cells, int axial_cells,
                                     int time_samples) {
  if (radial_cells < 1 || axial_cells < 1 || time_samples < 1) {
    throw ConfigError("evaluation grid: cell and time counts must be positive");
  }
  g.validate();
  EvaluationGrid grid;
  const int nr = radial_cells;
  const int nz = axial_cells;
  const double dz = g.length / nz;
  for (int j = 0; j <= nz; ++j) {
    const double z = j * dz;
    const double R = g.reference_radius(z);
    for (int i = 0; i <= nr; ++i) {
      grid.nodes.push_back({static_cast<double>(i) / nr * R, z});
    }
  }
  auto node = [nr](int i, int j) { return j * (nr + 1) + i; };
  for (int j = 0; j < nz; ++j) {
    const double slab = g.lumen_volume(j * dz, (j + 1) * dz);
    for (int i = 0; i < nr; ++i) {
      const double s0 = static_cast<double>(i) / nr;
      const double s1 = static_cast<double>(i + 1) / nr;
      const double vol = (s1 * s1 - s0 * s0) * slab;
      grid.cells.push_back({{node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)}, vol});
    }
  }
  grid.time_step = g.horizon / time_samples;
  for (int k = 0; k < time_samples; ++k) grid.times.push_back((k + 0.5) * grid.time_step);
  return grid;
}

BatchField pointwise(PointField f) {
  return [f = std::move(f)](std::span<const std::array<double, 2>> nodes, double t) {
    std::vector<double> out;
    for (const auto& n : nodes) {
      const auto v = f(n[0], n[1], t);
      out.insert(out.end(), v.begin(), v.end());
    }
    return out;
  };
}

namespace {

struct SliceSums {
  double diff = 0.0;
  double ref = 0.0;
};

SliceSums slice_sums(const std::vector<double>& a, const std::vector<double>& b,
                     const EvaluationGrid& grid) {
  const std::size_t n = grid.nodes.size();
  if (a.size() != b.size() || b.empty() || b.size() % n != 0) {
    throw DimensionError("relative error: field has " + std::to_string(a.size()) +
                         " values, reference " + std::to_string(b.size()) + ", for " +
                         std::to_string(n) + " nodes");
  }
  const std::size_t c = b.size() / n;
  std::vector<double> d2(n, 0.0), g2(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < c; ++k) {
      const double d = a[i * c + k] - b[i * c + k];
      d2[i] += d * d;
      g2[i] += b[i * c + k] * b[i * c + k];
    }
  }
  SliceSums s;
  for (const auto& cell : grid.cells) {
    double cd = 0.0, cg = 0.0;
    for (int v : cell.nodes) {
      cd += d2[static_cast<std::size_t>(v)];
      cg += g2[static_cast<std::size_t>(v)];
    }
    const double m = 1.0 / static_cast<double>(cell.nodes.size());
    s.diff += cell.volume * cd * m;
    s.ref += cell.volume * cg * m;
  }
  return s;
}

}  // namespace

double relative_error(const BatchField& field, const BatchField& reference, const EvaluationGrid& grid) {
  double sum = 0.0;
  for (double t : grid.times) {
    const SliceSums s = slice_sums(field(grid.nodes, t), reference(grid.nodes, t), grid);
    if (s.ref == 0.0) {
      throw DimensionError("relative error: reference field vanishes at t = " + format_double(t));
    }
    sum += s.diff / s.ref;
  }
  return grid.time_step * sum;
}

double relative_l2_error(const BatchField& field, const BatchField& reference,
                         const EvaluationGrid& grid) {
  double diff = 0.0, ref = 0.0;
  for (double t : grid.times) {
    const SliceSums s = slice_sums(field(grid.nodes, t), reference(grid.nodes, t), grid);
    diff += s.diff;
    ref += s.ref;
  }
  if (ref == 0.0) throw DimensionError("relative L2 error: reference field vanishes on the grid");
  return std::sqrt(diff / ref);
}

std::vector<FieldValues> evaluate_fields(const FsiNetworks& nets, bool rigid,
                                         std::span<const std::array<double, 3>> rzt) {
  const long long n = static_cast<long long>(rzt.size());
  std::vector<FieldValues> out(rzt.size());
  constexpr long long chunk = 512;
  const long long chunks = (n + chunk - 1) / chunk;
#pragma omp parallel for schedule(static)
  for (long long c = 0; c < chunks; ++c) {
    const long long lo = c * chunk;
    const long long hi = std::min(n, lo + chunk);
    const int m = static_cast<int>(hi - lo);
    std::vector<double> x;
    x.reserve(static_cast<std::size_t>(3 * m));
    for (long long i = lo; i < hi; ++i) {
      for (double v : rzt[static_cast<std::size_t>(i)]) x.push_back(v);
    }
    std::vector<double> eta(static_cast<std::size_t>(m), 0.0);
    if (!rigid) eta = evaluate_batch(nets.displacement, x, m);
    for (int i = 0; i < m; ++i) {
      const double r = x[static_cast<std::size_t>(3 * i)];
      x[static_cast<std::size_t>(3 * i)] = r + sign_of(r) * eta[static_cast<std::size_t>(i)];
    }
    const auto u = evaluate_batch(nets.velocity, x, m);
    const auto p = evaluate_batch(nets.pressure, x, m);
    for (int i = 0; i < m; ++i) {
      FieldValues& f = out[static_cast<std::size_t>(lo + i)];
      f.uz = u[static_cast<std::size_t>(2 * i)];
      f.ur = u[static_cast<std::size_t>(2 * i + 1)];
      f.p = p[static_cast<std::size_t>(i)];
      f.eta = eta[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

BatchField network_field(const FsiNetworks& nets, bool rigid, FieldKind kind) {
  return [&nets, rigid, kind](std::span<const std::array<double, 2>> nodes, double t) {
    std::vector<std::array<double, 3>> pts;
    pts.reserve(nodes.size());
    for (const auto& n : nodes) pts.push_back({n[0], n[1], t});
    const auto f = evaluate_fields(nets, rigid, pts);
    std::vector<double> out;
    out.reserve(nodes.size() * 2);
    for (const auto& v : f) {
      switch (kind) {
        case FieldKind::Velocity:
          out.push_back(v.uz);
          out.push_back(v.ur);
          break;
        case FieldKind::AxialVelocity: out.push_back(v.uz); break;
        case FieldKind::Pressure: out.push_back(v.p); break;
        case FieldKind::Displacement: out.push_back(v.eta); break;
      }
    }
    return out;
  };
}

double traction_norm(const FlowJet<double>& f, double mu, double n_r, double n_z) {
  const double s_rr = -f.p + 2.0 * mu * f.ur_r;
  const double s_zz = -f.p + 2.0 * mu * f.uz_z;
  const double s_rz = mu * (f.ur_z + f.uz_r);
  const double tr = s_rr * n_r + s_rz * n_z;
  const double tz = s_rz * n_r + s_zz * n_z;
  return std::hypot(tr, tz);
}

double traction_norm(const FsiNetworks& nets, bool rigid, const FluidProperties& fluid, double r,
                     double z, double t, double n_r, double n_z) {
  double eta = 0.0;
  if (!rigid) eta = nets.displacement.evaluate(std::array<double, 3>{r, z, t})[0];
  const std::array<double, 3> x{r + sign_of(r) * eta, z, t};
  JetBatch bu, bp;
  const JetRequest req{{0, 1}, {}};
  bu.forward(nets.velocity, x, 1, req);
  bp.forward(nets.pressure, x, 1, JetRequest::value_only());
  FlowJet<double> f;
  f.uz = bu.value(0, 0);
  f.ur = bu.value(0, 1);
  f.p = bp.value(0, 0);
  f.uz_r = bu.first(0, 0, 0);
  f.uz_z = bu.first(0, 0, 1);
  f.ur_r = bu.first(0, 1, 0);
  f.ur_z = bu.first(0, 1, 1);
  return traction_norm(f, fluid.viscosity, n_r, n_z);
}

std::array<double, 2> wall_normal(const VesselGeometry& g, double sign, double z) {
  const double slope = g.reference_radius_slope(z);
  const double q = std::sqrt(1.0 + slope * slope);
  return {sign / q, -slope / q};
}

double flux_integral(const std::function<double(double r)>& uz, double radius, int points) {
  if (points < 2) throw ConfigError("flux quadrature needs at least 2 points");
  const double S = radius * radius;
  const double h = S / (points - 1);
  double sum = 0.0;
  for (int k = 0; k < points; ++k) {
    const double w = (k == 0 || k == points - 1) ? 0.5 : 1.0;
    sum += w * uz(std::sqrt(k * h));
  }
  return std::numbers::pi * h * sum;
}

double outlet_flux(const FsiNetworks& nets, bool rigid, const VesselGeometry& g, double t,
                   int points) {
  if (points < 2) throw ConfigError("flux quadrature needs at least 2 points");
  const double l = g.length;
  const double Rp = g.reference_radius(l);
  double total = 0.0;
  for (double sign : {1.0, -1.0}) {
    double R = Rp;
    if (!rigid) R += nets.displacement.evaluate(std::array<double, 3>{sign * Rp, l, t})[0];
    // Current-frame radii on this half; N_u takes current coordinates.
    const double S = R * R;
    const double h = S / (points - 1);
    std::vector<double> x;
    for (int k = 0; k < points; ++k) {
      x.push_back(sign * std::sqrt(k * h));
      x.push_back(l);
      x.push_back(t);
    }
    const auto u = evaluate_batch(nets.velocity, x, points);
    double sum = 0.0;
    for (int k = 0; k < points; ++k) {
      const double w = (k == 0 || k == points - 1) ? 0.5 : 1.0;
      sum += w * u[static_cast<std::size_t>(2 * k)];
    }
    total += std::numbers::pi * h * sum;
  }
  return 0.5 * total;
}

double poiseuille_oracle(double r, double u_max, double r0) {
  return u_max * (1.0 - r * r / (r0 * r0));
}

double pressure_gradient_oracle(double u_max, double r0, double mu) {
  return -4.0 * mu * u_max / (r0 * r0);
}

double pressure_drop_oracle(double z, double u_max, double r0, double mu, double length,
                            double outlet_pressure) {
  return outlet_pressure - pressure_gradient_oracle(u_max, r0, mu) * (length - z);
}

std::vector<std::array<double, 2>> default_probe_points(const VesselGeometry& g) {
  return {{0.0, 0.0}, {0.0, g.length / 2.0}, {0.0, g.length}};
}

std::vector<ProbeSeries> probe(const FsiNetworks& nets, bool rigid,
                               std::span<const std::array<double, 2>> points,
                               std::span<const double> times) {
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw ConfigError("probe times must be strictly increasing");
  }
  std::vector<ProbeSeries> out;
  for (const auto& pt : points) {
    std::vector<std::array<double, 3>> rzt;
    for (double t : times) rzt.push_back({pt[0], pt[1], t});
    const auto f = evaluate_fields(nets, rigid, rzt);
    ProbeSeries s;
    s.r = pt[0];
    s.z = pt[1];
    s.times.assign(times.begin(), times.end());
    for (const auto& v : f) {
      s.velocity_magnitude.push_back(std::hypot(v.uz, v.ur));
      s.pressure.push_back(v.p);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<double> uniform_times(double horizon, int n) {
  if (n < 2) throw ConfigError("need at least 2 times");
  std::vector<double> t;
  for (int k = 0; k < n; ++k) t.push_back(horizon * k / (n - 1));
  return t;
}

FluxSeries outlet_flux_series(const FsiNetworks& nets, bool rigid, const VesselGeometry& g,
                              std::span<const double> times) {
  FluxSeries s;
  s.times.assign(times.begin(), times.end());
  double acc = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double q = outlet_flux(nets, rigid, g, times[k]);
    if (k > 0) acc += 0.5 * (q + s.flux.back()) * (times[k] - times[k - 1]);
    s.flux.push_back(q);
    s.cumulative.push_back(acc);
  }
  return s;
}

WallTraction wall_traction(const FsiNetworks& nets, const Problem& pr, double t, int points) {
  if (points < 2) throw ConfigError("wall traction needs at least 2 points");
  WallTraction w;
  const VesselGeometry& g = pr.geometry;
  for (int k = 0; k < points; ++k) {
    const double z = g.length * k / (points - 1);
    const auto n = wall_normal(g, 1.0, z);
    w.z.push_back(z);
    w.traction.push_back(
        traction_norm(nets, pr.rigid, pr.fluid, g.reference_radius(z), z, t, n[0], n[1]));
  }
  return w;
}

void write_fields_csv(std::ostream& out, const FsiNetworks& nets, bool rigid,
                      std::span<const std::array<double, 2>> nodes, std::span<const double> times) {
  out << "t,r,z,u_z,u_r,P,eta\n";
  for (double t : times) {
    std::vector<std::array<double, 3>> rzt;
    for (const auto& n : nodes) rzt.push_back({n[0], n[1], t});
    const auto f = evaluate_fields(nets, rigid, rzt);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      out << format_double(t) << ',' << format_double(nodes[i][0]) << ','
          << format_double(nodes[i][1]) << ',' << format_double(f[i].uz) << ','
          << format_double(f[i].ur) << ',' << format_double(f[i].p) << ','
          << format_double(f[i].eta) << '\n';
    }
  }
}

void write_probes_csv(std::ostream& out, std::span<const ProbeSeries> probes) {
  out << "probe,r,z,t,velocity_magnitude,pressure\n";
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const ProbeSeries& s = probes[k];
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      out << k << ',' << format_double(s.r) << ',' << format_double(s.z) << ','
          << format_double(s.times[i]) << ',' << format_double(s.velocity_magnitude[i]) << ','
          << format_double(s.pressure[i]) << '\n';
    }
  }
}

void write_flux_csv(std::ostream& out, const FluxSeries& s) {
  out << "t,outlet_flux,cumulative_flux\n";
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    out << format_double(s.times[i]) << ',' << format_double(s.flux[i]) << ','
        << format_double(s.cumulative[i]) << '\n';
  }
}

void write_traction_csv(std::ostream& out, const WallTraction& w) {
  out << "z,traction\n";
  for (std::size_t i = 0; i < w.z.size(); ++i) {
    out << format_double(w.z[i]) << ',' << format_double(w.traction[i]) << '\n';
  }
}

}  // namespace vpinn
