// vpinn: train, evaluate and export axisymmetric FSI PINN runs.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vpinn/analysis.hpp"
#include "vpinn/autodiff.hpp"
#include "vpinn/config.hpp"
#include "vpinn/errors.hpp"
#include "vpinn/nets.hpp"
#include "vpinn/trainer.hpp"

namespace fs = std::filesystem;
using namespace vpinn;

namespace {

struct RunFiles {
  fs::path dir;
  fs::path config() const { return dir / "config.json"; }
  fs::path checkpoint() const { return dir / "checkpoints" / "checkpoint.txt"; }
};

ScenarioConfig resolve_config(const std::string& preset_name, const std::string& config_path) {
  if (!config_path.empty()) return load_config(config_path);
  return preset(preset_name.empty() ? "cylinder" : preset_name);
}

struct Loaded {
  ScenarioConfig config;
  FsiNetworks nets;
};

Loaded load_run(const fs::path& dir) {
  const RunFiles f{dir};
  Loaded l{load_config(f.config()), load_checkpoint_networks(f.checkpoint())};
  const NetworkArchitecture& a = l.config.architecture;
  ensure_architecture(l.nets.velocity, "velocity network", a.depth, a.velocity_width, 3, 2);
  ensure_architecture(l.nets.pressure, "pressure network", a.depth, a.pressure_width, 3, 1);
  ensure_architecture(l.nets.displacement, "displacement network", a.depth, a.displacement_width, 3, 1);
  return l;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

/// Reference field file in the export-fields layout; rows must follow the
/// grid's node order for each time, times in grid order.
std::vector<std::vector<double>> read_reference_fields(const fs::path& path, const EvaluationGrid& g) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open reference " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "t,r,z,u_z,u_r,P,eta") {
    throw FormatError("reference: expected header t,r,z,u_z,u_r,P,eta");
  }
  std::vector<std::vector<double>> rows;  // per time, node-major (u_z, u_r, P)
  rows.assign(g.times.size(), {});
  std::size_t k = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(parse_double(cell));
    if (v.size() != 7) throw FormatError("reference: bad row: " + line);
    const std::size_t ti = k / g.nodes.size();
    const std::size_t ni = k % g.nodes.size();
    if (ti >= g.times.size()) throw FormatError("reference: more rows than grid points");
    const auto& n = g.nodes[ni];
    if (std::abs(v[0] - g.times[ti]) > 1e-9 || std::abs(v[1] - n[0]) > 1e-9 || std::abs(v[2] - n[1]) > 1e-9) {
      throw FormatError("reference: row " + std::to_string(k + 2) + " does not match the evaluation grid");
    }
    rows[ti].insert(rows[ti].end(), {v[3], v[4], v[5]});
    ++k;
  }
  if (k != g.times.size() * g.nodes.size()) {
    throw FormatError("reference: expected " + std::to_string(g.times.size() * g.nodes.size()) +
                      " rows, found " + std::to_string(k));
  }
  return rows;
}

int cmd_train(const std::string& preset_name, const std::string& config_path, const fs::path& out,
              const CLI::App& app, long long seed, int workers, int m_fluid, int m_solid, int m1, int m2,
              int ladder, int alternations, long long interval, int log_every, bool resume) {
  const RunFiles f{out};
  ScenarioConfig c = (resume && preset_name.empty() && config_path.empty())
                         ? load_config(f.config())
                         : resolve_config(preset_name, config_path);
  if (app.count("--seed")) c.seed = static_cast<std::uint64_t>(seed);
  if (app.count("--workers")) c.workers = workers;
  if (app.count("--m-fluid")) c.plan.m_fluid = m_fluid;
  if (app.count("--m-solid")) c.plan.m_solid = m_solid;
  if (app.count("--m1")) c.plan.m1 = m1;
  if (app.count("--m2")) c.plan.m2 = m2;
  if (app.count("--ladder-steps")) c.plan.ladder_steps = ladder;
  if (app.count("--alternations")) c.plan.max_alternations = alternations;
  c.validate();

  fs::create_directories(out);
  if (resume) {
    const ScenarioConfig saved = load_config(f.config());
    if (!(saved == c)) throw ConfigError("resume: configuration differs from " + f.config().string());
  }
  save_config(f.config(), c);

  TrainerOptions opt;
  opt.seed = c.seed;
  opt.counts = c.samples;
  opt.workers = c.workers;
  opt.adam.learning_rate = c.learning_rate;
  opt.checkpoint_dir = f.checkpoint().parent_path();
  opt.checkpoint_interval = interval;
  if (log_every > 0) {
    opt.on_epoch = [log_every](const EpochRecord& r) {
      if (r.epoch % log_every == 0) {
        std::fprintf(stderr, "epoch %lld %s block %d %s alpha_ns %.3g fluid %.6g solid %.6g\n",
                     r.epoch, stage_name(r.stage), r.block, phase_name(r.phase), r.alpha_ns,
                     r.loss.fluid_total, r.loss.solid_total);
      }
    };
  }
  Trainer trainer(c.problem, c.weights, c.plan, FsiNetworks::build(c.architecture, c.seed), opt);
  if (resume) trainer.load_checkpoint(f.checkpoint());
  trainer.run();
  trainer.save_checkpoint(f.checkpoint());
  {
    auto h = open_out(out / "history.csv");
    write_history_csv(h, trainer.history());
    auto b = open_out(out / "blocks.csv");
    write_blocks_csv(b, trainer.history());
  }
  std::cout << "trained " << trainer.history().epochs.size() << " epochs in "
            << trainer.history().blocks.size() << " blocks; run directory " << out.string() << "\n";
  return 0;
}

int cmd_evaluate(const fs::path& run, const std::string& reference, int nr, int nz, int nt) {
  const Loaded l = load_run(run);
  const Problem& pr = l.config.problem;
  const EvaluationGrid grid = EvaluationGrid::build(pr.geometry, nr, nz, nt);
  std::cout.precision(8);
  if (!reference.empty()) {
    const auto rows = read_reference_fields(reference, grid);
    auto ref_part = [&rows, &grid](int first, int count) {
      return [&rows, &grid, first, count](std::span<const std::array<double, 2>>, double t) {
        std::size_t ti = 0;
        while (ti < grid.times.size() && grid.times[ti] != t) ++ti;
        std::vector<double> out;
        for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
          for (int k = 0; k < count; ++k) out.push_back(rows[ti][3 * i + static_cast<std::size_t>(first + k)]);
        }
        return out;
      };
    };
    const double ev = relative_error(network_field(l.nets, pr.rigid, FieldKind::Velocity), ref_part(0, 2), grid);
    const double ep = relative_error(network_field(l.nets, pr.rigid, FieldKind::Pressure), ref_part(2, 1), grid);
    std::cout << "velocity_relative_error " << ev << "\npressure_relative_error " << ep << "\n";
  } else if (pr.rigid && pr.inlet.mode == InletMode::Steady && !pr.geometry.plaque) {
    const double u_max = pr.inlet.peak_velocity;
    const double r0 = pr.geometry.radius;
    const BatchField oracle = pointwise([u_max, r0](double r, double, double) {
      return std::vector<double>{poiseuille_oracle(r, u_max, r0)};
    });
    const BatchField uz = network_field(l.nets, true, FieldKind::AxialVelocity);
    const double q_ref = std::numbers::pi * u_max * r0 * r0 / 2.0;
    const double q = outlet_flux(l.nets, true, pr.geometry, pr.geometry.horizon / 2.0);
    std::cout << "axial_velocity_relative_error " << relative_error(uz, oracle, grid) << "\n"
              << "axial_velocity_relative_l2_error " << relative_l2_error(uz, oracle, grid) << "\n"
              << "outlet_flux " << q << "\noutlet_flux_oracle " << q_ref << "\n";
  } else {
    std::cout << "no reference given and no analytic oracle for this scenario; writing flux only\n";
  }
  const FluxSeries flux = outlet_flux_series(l.nets, pr.rigid, pr.geometry, uniform_times(pr.geometry.horizon, 101));
  auto out = open_out(run / "flux.csv");
  write_flux_csv(out, flux);
  std::cout << "cycle_integrated_outlet_flux " << flux.cumulative.back() << "\n";
  return 0;
}

std::vector<std::array<double, 2>> parse_points(const std::vector<std::string>& specs) {
  std::vector<std::array<double, 2>> pts;
  for (const auto& s : specs) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw ConfigError("probe point '" + s + "' must be r,z");
    pts.push_back({parse_double(s.substr(0, comma)), parse_double(s.substr(comma + 1))});
  }
  return pts;
}

int cmd_probe(const fs::path& run, const std::vector<std::string>& point_specs, int nt) {
  const Loaded l = load_run(run);
  const Problem& pr = l.config.problem;
  const auto pts = point_specs.empty() ? default_probe_points(pr.geometry) : parse_points(point_specs);
  const auto times = uniform_times(pr.geometry.horizon, nt);
  const auto series = probe(l.nets, pr.rigid, pts, times);
  auto out = open_out(run / "probes.csv");
  write_probes_csv(out, series);
  std::cout << "wrote " << (run / "probes.csv").string() << "\n";
  return 0;
}

int cmd_export(const fs::path& run, int nr, int nz, int nt) {
  const Loaded l = load_run(run);
  const Problem& pr = l.config.problem;
  const EvaluationGrid grid = EvaluationGrid::build(pr.geometry, nr, nz, nt);
  auto out = open_out(run / "fields" / "fields.csv");
  write_fields_csv(out, l.nets, pr.rigid, grid.nodes, grid.times);
  auto tr = open_out(run / "fields" / "wall_traction.csv");
  write_traction_csv(tr, wall_traction(l.nets, pr, pr.geometry.horizon / 2.0, 201));
  std::cout << "wrote " << (run / "fields").string() << "\n";
  return 0;
}

/// Parameter gradient of a loss built from second input derivatives,
/// against central differences over the parameters.
int cmd_grad_check(std::uint64_t seed) {
  const FieldNetwork net = FieldNetwork::build(4, 8, 3, 1, seed);
  const std::array<double, 3> x{0.13, 0.71, 0.42};
  auto loss_on = [&](ad::Tape& tape, std::span<const ad::Var> params) {
    std::vector<ad::Var> in;
    for (double v : x) in.push_back(tape.input(v));
    const ad::Var o = net.forward(params, in)[0];
    const ad::Var d0 = tape.gradient(o, in[0]);
    const ad::Var dd0 = tape.gradient(d0, in[0]);
    const ad::Var d1 = tape.gradient(o, in[1]);
    const ad::Var e = dd0 + d1 + o;
    return e * e;
  };
  ad::Tape tape;
  const auto params = net.bind(tape);
  const auto g = ad::param_grad(loss_on(tape, params), params);

  std::vector<double> p(net.params().begin(), net.params().end());
  auto eval = [&](const std::vector<double>& q) {
    ad::Tape t;
    std::vector<ad::Var> v;
    for (double d : q) v.push_back(t.constant(d));
    return loss_on(t, v).value();
  };
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::vector<double> a = p, b = p;
    a[i] += h;
    b[i] -= h;
    const double fd = (eval(a) - eval(b)) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - g[i]) / std::max({1.0, std::abs(fd), std::abs(g[i])}));
  }
  std::cout << "grad-check seed " << seed << " params " << p.size() << " max_discrepancy " << worst << "\n";
  return worst < 1e-3 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mesh-free PINN solver for fluid-structure interaction in axisymmetric vessels"};
  app.require_subcommand(1);

  std::string preset_name, config_path, reference;
  std::string out_dir = "run";
  long long seed = 0;
  int workers = 1, m_fluid = 0, m_solid = 0, m1 = 0, m2 = 0, ladder = 0, alternations = 0;
  long long interval = 0;
  int log_every = 0;
  bool resume = false;
  int nr = 64, nz = 64, nt = 50;
  std::vector<std::string> points;
  std::string arch;

  auto* train = app.add_subcommand("train", "Run the staged training schedule");
  auto* src = train->add_option_group("source");
  src->add_option("--preset", preset_name, "Scenario preset");
  src->add_option("--config", config_path, "Scenario JSON file");
  src->require_option(0, 1);
  train->add_option("--out", out_dir, "Run directory")->capture_default_str();
  train->add_option("--seed", seed, "Random seed");
  train->add_option("--workers", workers, "Gradient shards, one OpenMP thread each");
  train->add_option("--m-fluid", m_fluid, "Epochs per fluid block");
  train->add_option("--m-solid", m_solid, "Epochs per solid block");
  train->add_option("--m1", m1, "u-epochs per fluid round");
  train->add_option("--m2", m2, "p-epochs per fluid round");
  train->add_option("--ladder-steps", ladder, "alpha_ns ladder steps (E)");
  train->add_option("--alternations", alternations, "Maximum solid/fluid alternations (F)");
  train->add_option("--checkpoint-interval", interval, "Epochs between checkpoints (0: block ends)");
  train->add_option("--log-every", log_every, "Print a loss line every N epochs (0: quiet)");
  train->add_flag("--resume", resume, "Continue from the run directory's checkpoint");

  auto* evaluate = app.add_subcommand("evaluate", "Relative errors and outlet flux of a trained run");
  evaluate->add_option("--run", out_dir, "Run directory")->required();
  evaluate->add_option("--reference", reference, "Reference field CSV on the evaluation grid");
  for (auto* c : {evaluate}) {
    c->add_option("--radial-cells", nr)->capture_default_str();
    c->add_option("--axial-cells", nz)->capture_default_str();
    c->add_option("--times", nt)->capture_default_str();
  }

  auto* probe_cmd = app.add_subcommand("probe", "Velocity magnitude and pressure time series");
  probe_cmd->add_option("--run", out_dir, "Run directory")->required();
  probe_cmd->add_option("--point", points, "Probe point r,z (repeatable; default inlet/middle/outlet)");
  int probe_times = 101;
  probe_cmd->add_option("--times", probe_times, "Number of equally spaced times")->capture_default_str();

  auto* export_cmd = app.add_subcommand("export-fields", "Write field snapshots on the evaluation grid");
  export_cmd->add_option("--run", out_dir, "Run directory")->required();
  int enr = 16, enz = 32, ent = 5;
  export_cmd->add_option("--radial-cells", enr)->capture_default_str();
  export_cmd->add_option("--axial-cells", enz)->capture_default_str();
  export_cmd->add_option("--times", ent)->capture_default_str();

  auto* count = app.add_subcommand("param-count", "Fluid parameter count of DxW-split or DxW-single");
  count->add_option("spec", arch, "e.g. 12x30-split")->required();

  auto* grad = app.add_subcommand("grad-check", "Finite-difference check of parameter gradients");
  std::uint64_t grad_seed = 7;
  grad->add_option("--seed", grad_seed)->capture_default_str();

  auto* show = app.add_subcommand("show-preset", "Print a preset as a config file");
  show->add_option("name", preset_name)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      return cmd_train(preset_name, config_path, out_dir, *train, seed, workers, m_fluid, m_solid, m1, m2,
                       ladder, alternations, interval, log_every, resume);
    }
    if (*evaluate) return cmd_evaluate(out_dir, reference, nr, nz, nt);
    if (*probe_cmd) return cmd_probe(out_dir, points, probe_times);
    if (*export_cmd) return cmd_export(out_dir, enr, enz, ent);
    if (*count) {
      std::cout << fluid_param_count(arch) << "\n";
      return 0;
    }
    if (*grad) return cmd_grad_check(grad_seed);
    if (*show) {
      std::cout << to_json(preset(preset_name));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
