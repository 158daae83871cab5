#include "vpinn/loss.hpp"

#include <array>
#include <span>

#include "vpinn/errors.hpp"

namespace vpinn {

using ad::Tape;
using ad::Var;

BoundNetworks bind_networks(Tape& tape, const FsiNetworks& nets) {
  BoundNetworks b;
  b.u = nets.velocity.bind(tape);
  b.p = nets.pressure.bind(tape);
  b.d = nets.displacement.bind(tape);
  return b;
}

TapeFields network_fields(const FsiNetworks& nets, const BoundNetworks& bound) {
  // Captures by pointer: nets and bound must outlive the returned fields.
  const FsiNetworks* n = &nets;
  const BoundNetworks* b = &bound;
  TapeFields f;
  f.velocity = [n, b](Tape&, Var r, Var z, Var t) {
    const Var in[] = {r, z, t};
    const auto o = n->velocity.forward(b->u, in);
    return std::array<Var, 2>{o[0], o[1]};
  };
  f.pressure = [n, b](Tape&, Var r, Var z, Var t) {
    const Var in[] = {r, z, t};
    return n->pressure.forward(b->p, in)[0];
  };
  f.displacement = [n, b](Tape&, Var r, Var z, Var t) {
    const Var in[] = {r, z, t};
    return n->displacement.forward(b->d, in)[0];
  };
  return f;
}

LossBreakdown TapeLoss::values(const LossWeights& w) const {
  auto v = [](const Var& x) { return x.valid() ? x.value() : 0.0; };
  LossBreakdown b;
  b.ns = v(ns);
  b.fluid_bdr = v(fluid_bdr);
  b.fluid_init = v(fluid_init);
  b.sc = v(sc);
  b.he = v(he);
  b.solid_bdr = v(solid_bdr);
  b.solid_init = v(solid_init);
  b.update_totals(w);
  return b;
}

namespace {

/// Running mean in the same operation order as the double route.
class TapeMean {
 public:
  explicit TapeMean(Tape& t) : tape_(t) {}
  void add(Var sq) {
    sum_ = count_ == 0 ? sq : sum_ + sq;
    ++count_;
  }
  Var mean(const char* what) const {
    if (count_ == 0) throw DimensionError(std::string("no samples for ") + what);
    return sum_ / static_cast<double>(count_);
  }

 private:
  Tape& tape_;
  Var sum_;
  std::size_t count_ = 0;
};

struct TapePoint {
  Var r0, z0, t0;
  Var eta;
  Var rt;
};

TapePoint map_point(Tape& tape, const TapeFields& f, const Problem& pr, const SamplePoint& p) {
  TapePoint tp;
  tp.r0 = tape.input(p.r);
  tp.z0 = tape.input(p.z);
  tp.t0 = tape.input(p.t);
  tp.eta = pr.rigid ? tape.constant(0.0) : f.displacement(tape, tp.r0, tp.z0, tp.t0);
  tp.rt = tp.r0 + sign_of(p.r) * tp.eta;
  return tp;
}

WallSite site_at(const Problem& pr, const SamplePoint& p) {
  WallSite s;
  s.sign = sign_of(p.r);
  s.radius = pr.geometry.reference_radius(p.z);
  s.radius_slope = pr.geometry.reference_radius_slope(p.z);
  s.thickness = pr.geometry.wall_thickness;
  s.props = pr.wall_at(wall_segment_at(pr.geometry, p.z));
  return s;
}

}  // namespace

TapeLoss assemble_fluid_loss(Tape& tape, const TapeFields& f, const Problem& pr,
                             const CollocationSet& s, const LossWeights& w) {
  const double eps = pr.clamp_epsilon();
  TapeLoss out;

  TapeMean ns(tape);
  for (const SamplePoint& p : s.interior.points) {
    const TapePoint tp = map_point(tape, f, pr, p);
    const FlowJet<Var> j = flow_jet(tape, f, tp.rt, tp.z0, tape.input(p.t));
    ns.add(squared_norm(ns_residual_axisym(j, tp.rt, pr.fluid, eps)));
  }
  out.ns = ns.mean("the Navier-Stokes residual");

  TapeMean bdr(tape);
  for (const SamplePoint& p : s.inlet.points) {
    const TapePoint tp = map_point(tape, f, pr, p);
    const auto u = f.velocity(tape, tp.rt, tp.z0, tape.input(p.t));
    bdr.add(squared_norm(inlet_residual(u[0], u[1], tp.rt, p.t, pr.inlet, pr.geometry.radius)));
  }
  for (const SamplePoint& p : s.outlet.points) {
    const TapePoint tp = map_point(tape, f, pr, p);
    const FlowJet<Var> j = flow_jet(tape, f, tp.rt, tp.z0, tape.input(p.t));
    bdr.add(squared_norm(outlet_residual(j, pr.outlet, pr.fluid.viscosity)));
  }
  for (const SamplePoint& p : s.wall.points) {
    const TapePoint tp = map_point(tape, f, pr, p);
    const Var eta_t =
        pr.rigid ? tape.constant(0.0) : tape.detach(tape.gradient(tp.eta, tp.t0));
    const auto u = f.velocity(tape, tp.rt, tp.z0, tape.input(p.t));
    bdr.add(squared_norm(interface_residual(u[0], u[1], eta_t, sign_of(p.r))));
  }
  out.fluid_bdr = bdr.mean("the fluid boundary conditions");

  TapeMean init(tape);
  for (const SamplePoint& p : s.interior_initial.points) {
    const TapePoint tp = map_point(tape, f, pr, p);
    const auto u = f.velocity(tape, tp.rt, tp.z0, tape.input(p.t));
    init.add(squared_norm(initial_velocity_residual(u[0], u[1])));
  }
  out.fluid_init = init.mean("the fluid initial condition");

  out.total = w.ns * out.ns + w.fluid_bdr * out.fluid_bdr + w.fluid_init * out.fluid_init;
  return out;
}

TapeLoss assemble_solid_loss(Tape& tape, const TapeFields& f, const Problem& pr,
                             const CollocationSet& s, const LossWeights& w) {
  const double eps = pr.clamp_epsilon();
  TapeLoss out;

  TapeMean sc(tape);
  for (const SamplePoint& p : s.wall.points) {
    const Var r0 = tape.input(p.r);
    const DisplacementJet<Var> d = displacement_jet(tape, f, r0, tape.input(p.z), tape.input(p.t));
    const double rt = p.r + sign_of(p.r) * d.eta.value();
    // Fluid side of H: values only.
    const FlowJet<Var> j =
        flow_jet(tape, f, tape.constant(rt), tape.constant(p.z), tape.constant(p.t));
    WallFluidState fs{j.p.value(), j.uz_r.value(), j.uz_z.value(), j.ur_r.value(),
                      j.ur_z.value()};
    const Var res = stress_continuity_residual(d, fs, site_at(pr, p), pr.fluid);
    sc.add(res * res);
  }
  out.sc = sc.mean("the stress continuity residual");

  TapeMean he(tape);
  for (const SamplePoint& p : s.interior.points) {
    const Var r0 = tape.input(p.r);
    const DisplacementJet<Var> d = displacement_jet(tape, f, r0, tape.input(p.z), tape.input(p.t));
    const Var res = harmonic_residual(d, r0, eps);
    he.add(res * res);
  }
  out.he = he.mean("the harmonic extension residual");

  TapeMean bdr(tape);
  for (const SamplePoint& p : s.wall_ends.points) {
    const Var eta =
        f.displacement(tape, tape.input(p.r), tape.input(p.z), tape.input(p.t));
    bdr.add(eta * eta);
  }
  out.solid_bdr = bdr.mean("the wall end condition");

  TapeMean init(tape);
  for (const SampleSet* set : {&s.interior_initial, &s.wall_initial}) {
    for (const SamplePoint& p : set->points) {
      const Var eta =
          f.displacement(tape, tape.input(p.r), tape.input(p.z), tape.input(p.t));
      init.add(eta * eta);
    }
  }
  out.solid_init = init.mean("the displacement initial condition");

  out.total = w.sc * out.sc + w.he * out.he + w.solid_bdr * out.solid_bdr +
              w.solid_init * out.solid_init;
  return out;
}

// ---------------------------------------------------------------------------
// Batched route.

namespace {

std::vector<double> reference_inputs(const SampleSet& s) {
  std::vector<double> x;
  x.reserve(3 * s.size());
  for (const SamplePoint& p : s.points) {
    x.push_back(p.r);
    x.push_back(p.z);
    x.push_back(p.t);
  }
  return x;
}

/// eta at every point of `s` (zero when rigid).
std::vector<double> displacement_values(const FsiNetworks& nets, const Problem& pr,
                                        const SampleSet& s) {
  if (pr.rigid) return std::vector<double>(s.size(), 0.0);
  return evaluate_batch(nets.displacement, reference_inputs(s), static_cast<int>(s.size()));
}

/// Current-frame network inputs (r_t, z, t).
std::vector<double> current_inputs(const SampleSet& s, const std::vector<double>& eta) {
  std::vector<double> x;
  x.reserve(3 * s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const SamplePoint& p = s.points[i];
    x.push_back(p.r + sign_of(p.r) * eta[i]);
    x.push_back(p.z);
    x.push_back(p.t);
  }
  return x;
}

/// One point's squared residual on a scratch tape whose inputs are jet
/// channel values. Returns the value and writes d/d(leaf) into `adj`.
class PointTape {
 public:
  std::span<const Var> reset(std::span<const double> leaf_values) {
    tape_.clear();
    leaves_.clear();
    for (double v : leaf_values) leaves_.push_back(tape_.input(v));
    return leaves_;
  }
  Tape& tape() { return tape_; }
  double finish(Var sq, bool want_grad, std::vector<double>& adj) {
    if (want_grad) adj = tape_.gradient_values(sq, leaves_);
    return sq.value();
  }

 private:
  Tape tape_;
  std::vector<Var> leaves_;
};

constexpr int kR = 0;
constexpr int kZ = 1;
constexpr int kT = 2;

}  // namespace

LossEngine::LossEngine(const Problem& problem, const LossWeights& weights)
    : problem_(problem), weights_(weights) {}

GradientResult LossEngine::fluid(const FsiNetworks& nets, const CollocationSet& s,
                                 GradientRequest want) const {
  const Problem& pr = problem_;
  const LossWeights& w = weights_;
  const double eps = pr.clamp_epsilon();
  const double r0 = pr.geometry.radius;
  const double mu = pr.fluid.viscosity;
  const bool any_grad = want.velocity || want.pressure;

  GradientResult out;
  out.grad_u.assign(nets.velocity.param_count(), 0.0);
  out.grad_p.assign(nets.pressure.param_count(), 0.0);
  out.grad_d.assign(nets.displacement.param_count(), 0.0);

  PointTape pt;
  std::vector<double> adj;

  auto backprop = [&](const JetBatch& bu, const JetBatch* bp) {
    if (want.velocity) bu.backward(nets.velocity, out.grad_u);
    if (want.pressure && bp != nullptr) bp->backward(nets.pressure, out.grad_p);
  };

  // Navier-Stokes residual over the interior.
  {
    const SampleSet& set = s.interior;
    if (set.empty()) throw DimensionError("no samples for the Navier-Stokes residual");
    const int n = static_cast<int>(set.size());
    const std::vector<double> eta = displacement_values(nets, pr, set);
    const std::vector<double> x = current_inputs(set, eta);
    JetBatch bu;
    JetBatch bp;
    bu.forward(nets.velocity, x, n, JetRequest{{kR, kZ, kT}, {kR, kZ}});
    bp.forward(nets.pressure, x, n, JetRequest{{kR, kZ}, {}});
    const bool g = any_grad && w.ns != 0.0;
    const double scale = w.ns / static_cast<double>(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double leaf[] = {bu.value(i, 0),        bu.value(i, 1),        bp.value(i, 0),
                             bu.first(i, 0, kR),    bu.first(i, 0, kZ),    bu.first(i, 0, kT),
                             bu.first(i, 1, kR),    bu.first(i, 1, kZ),    bu.first(i, 1, kT),
                             bu.second(i, 0, kR),   bu.second(i, 0, kZ),   bu.second(i, 1, kR),
                             bu.second(i, 1, kZ),   bp.first(i, 0, kR),    bp.first(i, 0, kZ)};
      const auto v = pt.reset(leaf);
      FlowJet<Var> j{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7],
                     v[8], v[9], v[10], v[11], v[12], v[13], v[14]};
      const Var rt = pt.tape().constant(x[static_cast<std::size_t>(3 * i)]);
      sum += pt.finish(squared_norm(ns_residual_axisym(j, rt, pr.fluid, eps)), g, adj);
      if (!g) continue;
      bu.add_adjoint_value(i, 0, scale * adj[0]);
      bu.add_adjoint_value(i, 1, scale * adj[1]);
      bp.add_adjoint_value(i, 0, scale * adj[2]);
      for (int o = 0; o < 2; ++o) {
        bu.add_adjoint_first(i, o, kR, scale * adj[static_cast<std::size_t>(3 + 3 * o)]);
        bu.add_adjoint_first(i, o, kZ, scale * adj[static_cast<std::size_t>(4 + 3 * o)]);
        bu.add_adjoint_first(i, o, kT, scale * adj[static_cast<std::size_t>(5 + 3 * o)]);
        bu.add_adjoint_second(i, o, kR, scale * adj[static_cast<std::size_t>(9 + 2 * o)]);
        bu.add_adjoint_second(i, o, kZ, scale * adj[static_cast<std::size_t>(10 + 2 * o)]);
      }
      bp.add_adjoint_first(i, 0, kR, scale * adj[13]);
      bp.add_adjoint_first(i, 0, kZ, scale * adj[14]);
    }
    out.loss.ns = sum / static_cast<double>(n);
    if (g) backprop(bu, &bp);
  }

  // Boundary conditions: inlet, outlet and moving wall share one mean.
  {
    const std::size_t count = s.inlet.size() + s.outlet.size() + s.wall.size();
    if (count == 0) throw DimensionError("no samples for the fluid boundary conditions");
    const bool g = any_grad && w.fluid_bdr != 0.0;
    const double scale = w.fluid_bdr / static_cast<double>(count);
    double sum = 0.0;

    if (!s.inlet.empty()) {
      const SampleSet& set = s.inlet;
      const int n = static_cast<int>(set.size());
      const std::vector<double> x = current_inputs(set, displacement_values(nets, pr, set));
      JetBatch bu;
      bu.forward(nets.velocity, x, n, JetRequest::value_only());
      for (int i = 0; i < n; ++i) {
        const double leaf[] = {bu.value(i, 0), bu.value(i, 1)};
        const auto v = pt.reset(leaf);
        const Var rt = pt.tape().constant(x[static_cast<std::size_t>(3 * i)]);
        const double t = set.points[static_cast<std::size_t>(i)].t;
        sum += pt.finish(squared_norm(inlet_residual(v[0], v[1], rt, t, pr.inlet, r0)), g, adj);
        if (!g) continue;
        bu.add_adjoint_value(i, 0, scale * adj[0]);
        bu.add_adjoint_value(i, 1, scale * adj[1]);
      }
      if (g) backprop(bu, nullptr);
    }

    if (!s.outlet.empty()) {
      const SampleSet& set = s.outlet;
      const int n = static_cast<int>(set.size());
      const std::vector<double> x = current_inputs(set, displacement_values(nets, pr, set));
      JetBatch bu;
      JetBatch bp;
      bu.forward(nets.velocity, x, n, JetRequest{{kR, kZ}, {}});
      bp.forward(nets.pressure, x, n, JetRequest::value_only());
      for (int i = 0; i < n; ++i) {
        const double leaf[] = {bu.value(i, 0),     bu.value(i, 1),     bp.value(i, 0),
                               bu.first(i, 0, kR), bu.first(i, 0, kZ), bu.first(i, 1, kR),
                               bu.first(i, 1, kZ)};
        const auto v = pt.reset(leaf);
        FlowJet<Var> j;
        j.uz = v[0];
        j.ur = v[1];
        j.p = v[2];
        j.uz_r = v[3];
        j.uz_z = v[4];
        j.ur_r = v[5];
        j.ur_z = v[6];
        sum += pt.finish(squared_norm(outlet_residual(j, pr.outlet, mu)), g, adj);
        if (!g) continue;
        bu.add_adjoint_value(i, 0, scale * adj[0]);
        bu.add_adjoint_value(i, 1, scale * adj[1]);
        bp.add_adjoint_value(i, 0, scale * adj[2]);
        bu.add_adjoint_first(i, 0, kR, scale * adj[3]);
        bu.add_adjoint_first(i, 0, kZ, scale * adj[4]);
        bu.add_adjoint_first(i, 1, kR, scale * adj[5]);
        bu.add_adjoint_first(i, 1, kZ, scale * adj[6]);
      }
      if (g) backprop(bu, &bp);
    }

    if (!s.wall.empty()) {
      const SampleSet& set = s.wall;
      const int n = static_cast<int>(set.size());
      std::vector<double> eta(set.size(), 0.0);
      std::vector<double> eta_t(set.size(), 0.0);
      if (!pr.rigid) {
        JetBatch bd;
        bd.forward(nets.displacement, reference_inputs(set), n, JetRequest{{kT}, {}});
        for (int i = 0; i < n; ++i) {
          eta[static_cast<std::size_t>(i)] = bd.value(i, 0);
          eta_t[static_cast<std::size_t>(i)] = bd.first(i, 0, kT);
        }
      }
      const std::vector<double> x = current_inputs(set, eta);
      JetBatch bu;
      bu.forward(nets.velocity, x, n, JetRequest::value_only());
      for (int i = 0; i < n; ++i) {
        const double leaf[] = {bu.value(i, 0), bu.value(i, 1)};
        const auto v = pt.reset(leaf);
        const Var target = pt.tape().constant(eta_t[static_cast<std::size_t>(i)]);
        const double sgn = sign_of(set.points[static_cast<std::size_t>(i)].r);
        sum += pt.finish(squared_norm(interface_residual(v[0], v[1], target, sgn)), g, adj);
        if (!g) continue;
        bu.add_adjoint_value(i, 0, scale * adj[0]);
        bu.add_adjoint_value(i, 1, scale * adj[1]);
      }
      if (g) backprop(bu, nullptr);
    }
    out.loss.fluid_bdr = sum / static_cast<double>(count);
  }

  // Fluid at rest at t = 0.
  {
    const SampleSet& set = s.interior_initial;
    if (set.empty()) throw DimensionError("no samples for the fluid initial condition");
    const int n = static_cast<int>(set.size());
    const std::vector<double> x = current_inputs(set, displacement_values(nets, pr, set));
    JetBatch bu;
    bu.forward(nets.velocity, x, n, JetRequest::value_only());
    const bool g = any_grad && w.fluid_init != 0.0;
    const double scale = w.fluid_init / static_cast<double>(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double leaf[] = {bu.value(i, 0), bu.value(i, 1)};
      const auto v = pt.reset(leaf);
      sum += pt.finish(squared_norm(initial_velocity_residual(v[0], v[1])), g, adj);
      if (!g) continue;
      bu.add_adjoint_value(i, 0, scale * adj[0]);
      bu.add_adjoint_value(i, 1, scale * adj[1]);
    }
    out.loss.fluid_init = sum / static_cast<double>(n);
    if (g) backprop(bu, nullptr);
  }

  out.loss.update_totals(w);
  return out;
}

GradientResult LossEngine::solid(const FsiNetworks& nets, const CollocationSet& s,
                                 GradientRequest want) const {
  const Problem& pr = problem_;
  const LossWeights& w = weights_;
  const double eps = pr.clamp_epsilon();

  GradientResult out;
  out.grad_u.assign(nets.velocity.param_count(), 0.0);
  out.grad_p.assign(nets.pressure.param_count(), 0.0);
  out.grad_d.assign(nets.displacement.param_count(), 0.0);
  const bool any_grad = want.displacement;

  PointTape pt;
  std::vector<double> adj;

  // Ring equation on the wall, with the fluid forcing frozen.
  {
    const SampleSet& set = s.wall;
    if (set.empty()) throw DimensionError("no samples for the stress continuity residual");
    const int n = static_cast<int>(set.size());
    JetBatch bd;
    bd.forward(nets.displacement, reference_inputs(set), n, JetRequest{{kR, kZ, kT}, {kT}});
    std::vector<double> eta(set.size());
    for (int i = 0; i < n; ++i) eta[static_cast<std::size_t>(i)] = bd.value(i, 0);
    const std::vector<double> x = current_inputs(set, eta);
    JetBatch bu;
    JetBatch bp;
    bu.forward(nets.velocity, x, n, JetRequest{{kR, kZ}, {}});
    bp.forward(nets.pressure, x, n, JetRequest::value_only());
    const bool g = any_grad && w.sc != 0.0;
    const double scale = w.sc / static_cast<double>(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const SamplePoint& p = set.points[static_cast<std::size_t>(i)];
      const WallFluidState fs{bp.value(i, 0), bu.first(i, 0, kR), bu.first(i, 0, kZ),
                              bu.first(i, 1, kR), bu.first(i, 1, kZ)};
      const double leaf[] = {bd.value(i, 0), bd.first(i, 0, kR), bd.first(i, 0, kZ),
                             bd.second(i, 0, kT)};
      const auto v = pt.reset(leaf);
      DisplacementJet<Var> d;
      d.eta = v[0];
      d.eta_r = v[1];
      d.eta_z = v[2];
      d.eta_tt = v[3];
      const Var res = stress_continuity_residual(d, fs, site_at(pr, p), pr.fluid);
      sum += pt.finish(res * res, g, adj);
      if (!g) continue;
      bd.add_adjoint_value(i, 0, scale * adj[0]);
      bd.add_adjoint_first(i, 0, kR, scale * adj[1]);
      bd.add_adjoint_first(i, 0, kZ, scale * adj[2]);
      bd.add_adjoint_second(i, 0, kT, scale * adj[3]);
    }
    out.loss.sc = sum / static_cast<double>(n);
    if (g) bd.backward(nets.displacement, out.grad_d);
  }

  // Harmonic extension over the interior.
  {
    const SampleSet& set = s.interior;
    if (set.empty()) throw DimensionError("no samples for the harmonic extension residual");
    const int n = static_cast<int>(set.size());
    JetBatch bd;
    bd.forward(nets.displacement, reference_inputs(set), n, JetRequest{{kR, kZ}, {kR, kZ}});
    const bool g = any_grad && w.he != 0.0;
    const double scale = w.he / static_cast<double>(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double leaf[] = {bd.first(i, 0, kR), bd.second(i, 0, kR), bd.second(i, 0, kZ)};
      const auto v = pt.reset(leaf);
      DisplacementJet<Var> d;
      d.eta_r = v[0];
      d.eta_rr = v[1];
      d.eta_zz = v[2];
      const Var r = pt.tape().constant(set.points[static_cast<std::size_t>(i)].r);
      const Var res = harmonic_residual(d, r, eps);
      sum += pt.finish(res * res, g, adj);
      if (!g) continue;
      bd.add_adjoint_first(i, 0, kR, scale * adj[0]);
      bd.add_adjoint_second(i, 0, kR, scale * adj[1]);
      bd.add_adjoint_second(i, 0, kZ, scale * adj[2]);
    }
    out.loss.he = sum / static_cast<double>(n);
    if (g) bd.backward(nets.displacement, out.grad_d);
  }

  // eta = 0 at the wall ends, and everywhere at t = 0.
  auto squared_eta = [&](std::initializer_list<const SampleSet*> sets, double weight,
                         const char* what) {
    std::size_t count = 0;
    for (const SampleSet* set : sets) count += set->size();
    if (count == 0) throw DimensionError(std::string("no samples for ") + what);
    const bool g = any_grad && weight != 0.0;
    const double scale = weight / static_cast<double>(count);
    double sum = 0.0;
    for (const SampleSet* set : sets) {
      if (set->empty()) continue;
      const int n = static_cast<int>(set->size());
      JetBatch bd;
      bd.forward(nets.displacement, reference_inputs(*set), n, JetRequest::value_only());
      for (int i = 0; i < n; ++i) {
        const double leaf[] = {bd.value(i, 0)};
        const auto v = pt.reset(leaf);
        sum += pt.finish(v[0] * v[0], g, adj);
        if (g) bd.add_adjoint_value(i, 0, scale * adj[0]);
      }
      if (g) bd.backward(nets.displacement, out.grad_d);
    }
    return sum / static_cast<double>(count);
  };
  out.loss.solid_bdr = squared_eta({&s.wall_ends}, w.solid_bdr, "the wall end condition");
  out.loss.solid_init = squared_eta({&s.interior_initial, &s.wall_initial}, w.solid_init,
                                    "the displacement initial condition");

  out.loss.update_totals(w);
  return out;
}

}  // namespace vpinn
