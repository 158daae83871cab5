#include "vpinn/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vpinn/errors.hpp"

namespace vpinn {

using nlohmann::json;

namespace {

const char* inlet_mode_name(InletMode m) { return m == InletMode::Steady ? "steady" : "pulsatile"; }
const char* outlet_name(OutletCondition c) {
  return c == OutletCondition::Traction ? "traction" : "pseudo-traction";
}

/// Reads keys from one section and rejects leftovers.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("config: section '" + name_ + "' must be an object");
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) throw ConfigError("config: missing key '" + name_ + "." + key + "'");
    return *it;
  }
  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError("config: '" + name_ + "." + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("config: '" + name_ + "." + key + "' must be finite");
    return d;
  }
  double positive(const std::string& key) {
    const double d = number(key);
    if (!(d > 0.0)) throw ConfigError("config: '" + name_ + "." + key + "' must be > 0");
    return d;
  }
  long long integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) {
      throw ConfigError("config: '" + name_ + "." + key + "' must be an integer");
    }
    return v.get<long long>();
  }
  std::string text(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError("config: '" + name_ + "." + key + "' must be a string");
    return v.get<std::string>();
  }
  bool boolean(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError("config: '" + name_ + "." + key + "' must be true or false");
    return v.get<bool>();
  }
  Section sub(const std::string& key) { return Section(raw(key), name_ + "." + key); }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError("config: unknown key '" + name_ + "." + it.key() + "'");
      }
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

json wall_json(const WallProperties& w) {
  return {{"density_g_per_cm3", w.density},
          {"youngs_modulus_dyn_per_cm2", w.youngs_modulus},
          {"poisson_ratio", w.poisson_ratio}};
}

WallProperties read_wall(Section& s) {
  WallProperties w;
  w.density = s.positive("density_g_per_cm3");
  w.youngs_modulus = s.positive("youngs_modulus_dyn_per_cm2");
  w.poisson_ratio = s.number("poisson_ratio");
  return w;
}

json to_tree(const ScenarioConfig& c) {
  const Problem& p = c.problem;
  const VesselGeometry& g = p.geometry;
  json j;
  j["name"] = c.name;
  j["geometry"] = {{"radius_cm", g.radius},
                   {"length_cm", g.length},
                   {"wall_thickness_cm", g.wall_thickness},
                   {"horizon_s", g.horizon}};
  j["fluid"] = {{"density_g_per_cm3", p.fluid.density},
                {"viscosity_poise", p.fluid.viscosity},
                {"outlet_condition", outlet_name(p.outlet)}};
  j["wall"] = wall_json(p.wall);
  j["wall"]["rigid"] = p.rigid;
  if (g.plaque) {
    json pl = wall_json(p.plaque_wall);
    pl["long_radius_cm"] = g.plaque->long_radius;
    pl["short_radius_cm"] = g.plaque->short_radius;
    pl["center_cm"] = g.plaque->center;
    j["plaque"] = pl;
  }
  j["inlet"] = {{"mode", inlet_mode_name(p.inlet.mode)},
                {"peak_velocity_cm_per_s", p.inlet.peak_velocity},
                {"angular_frequency_rad_per_s", p.inlet.angular_frequency}};
  const LossWeights& w = c.weights;
  j["weights"] = {{"ns", w.ns},         {"fluid_bdr", w.fluid_bdr}, {"fluid_init", w.fluid_init},
                  {"sc", w.sc},         {"he", w.he},               {"solid_bdr", w.solid_bdr},
                  {"solid_init", w.solid_init}};
  const TrainingPlan& t = c.plan;
  const NetworkArchitecture& a = c.architecture;
  j["training"] = {
      {"m_fluid", t.m_fluid},
      {"m_solid", t.m_solid},
      {"m1", t.m1},
      {"m2", t.m2},
      {"ladder_steps", t.ladder_steps},
      {"max_alternations", t.max_alternations},
      {"epsilon", t.epsilon},
      {"window", t.window},
      {"alpha_start", t.alpha_start},
      {"alpha_factor", t.alpha_factor},
      {"learning_rate", c.learning_rate},
      {"seed", c.seed},
      {"workers", c.workers},
      {"samples",
       {{"interior", c.samples.interior},
        {"wall", c.samples.wall},
        {"inlet_outlet", c.samples.inlet_outlet},
        {"wall_ends", c.samples.wall_ends}}},
      {"network",
       {{"depth", a.depth},
        {"velocity_width", a.velocity_width},
        {"pressure_width", a.pressure_width},
        {"displacement_width", a.displacement_width},
        {"schedule", schedule_name(a.schedule)}}},
  };
  return j;
}

int to_int(long long v, const char* what) {
  if (v < -2147483647LL || v > 2147483647LL) throw ConfigError(std::string("config: ") + what + " out of range");
  return static_cast<int>(v);
}

ScenarioConfig from_tree(const json& j) {
  Section root(j, "config");
  ScenarioConfig c;
  c.name = root.text("name");

  Problem& p = c.problem;
  {
    Section s = root.sub("geometry");
    p.geometry.radius = s.positive("radius_cm");
    p.geometry.length = s.positive("length_cm");
    p.geometry.wall_thickness = s.positive("wall_thickness_cm");
    p.geometry.horizon = s.positive("horizon_s");
    s.finish();
  }
  {
    Section s = root.sub("fluid");
    p.fluid.density = s.positive("density_g_per_cm3");
    p.fluid.viscosity = s.positive("viscosity_poise");
    const std::string oc = s.text("outlet_condition");
    if (oc == "traction") {
      p.outlet = OutletCondition::Traction;
    } else if (oc == "pseudo-traction") {
      p.outlet = OutletCondition::PseudoTraction;
    } else {
      throw ConfigError("config: fluid.outlet_condition must be 'traction' or 'pseudo-traction'");
    }
    s.finish();
  }
  {
    Section s = root.sub("wall");
    p.wall = read_wall(s);
    p.rigid = s.boolean("rigid");
    s.finish();
  }
  if (j.contains("plaque")) {
    Section s = root.sub("plaque");
    p.plaque_wall = read_wall(s);
    Plaque pl;
    pl.long_radius = s.positive("long_radius_cm");
    pl.short_radius = s.positive("short_radius_cm");
    pl.center = s.number("center_cm");
    p.geometry.plaque = pl;
    s.finish();
  }
  {
    Section s = root.sub("inlet");
    const std::string mode = s.text("mode");
    if (mode == "pulsatile") {
      p.inlet.mode = InletMode::Pulsatile;
    } else if (mode == "steady") {
      p.inlet.mode = InletMode::Steady;
    } else {
      throw ConfigError("config: inlet.mode must be 'pulsatile' or 'steady'");
    }
    p.inlet.peak_velocity = s.number("peak_velocity_cm_per_s");
    p.inlet.angular_frequency = s.number("angular_frequency_rad_per_s");
    s.finish();
  }
  {
    Section s = root.sub("weights");
    LossWeights& w = c.weights;
    w.ns = s.number("ns");
    w.fluid_bdr = s.number("fluid_bdr");
    w.fluid_init = s.number("fluid_init");
    w.sc = s.number("sc");
    w.he = s.number("he");
    w.solid_bdr = s.number("solid_bdr");
    w.solid_init = s.number("solid_init");
    s.finish();
  }
  {
    Section s = root.sub("training");
    TrainingPlan& t = c.plan;
    t.m_fluid = to_int(s.integer("m_fluid"), "m_fluid");
    t.m_solid = to_int(s.integer("m_solid"), "m_solid");
    t.m1 = to_int(s.integer("m1"), "m1");
    t.m2 = to_int(s.integer("m2"), "m2");
    t.ladder_steps = to_int(s.integer("ladder_steps"), "ladder_steps");
    t.max_alternations = to_int(s.integer("max_alternations"), "max_alternations");
    t.epsilon = s.number("epsilon");
    t.window = to_int(s.integer("window"), "window");
    t.alpha_start = s.number("alpha_start");
    t.alpha_factor = s.number("alpha_factor");
    c.learning_rate = s.positive("learning_rate");
    const long long seed = s.integer("seed");
    if (seed < 0) throw ConfigError("config: training.seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
    c.workers = to_int(s.integer("workers"), "workers");
    {
      Section n = s.sub("samples");
      c.samples.interior = to_int(n.integer("interior"), "samples.interior");
      c.samples.wall = to_int(n.integer("wall"), "samples.wall");
      c.samples.inlet_outlet = to_int(n.integer("inlet_outlet"), "samples.inlet_outlet");
      c.samples.wall_ends = to_int(n.integer("wall_ends"), "samples.wall_ends");
      n.finish();
    }
    {
      Section n = s.sub("network");
      NetworkArchitecture& a = c.architecture;
      a.depth = to_int(n.integer("depth"), "network.depth");
      a.velocity_width = to_int(n.integer("velocity_width"), "network.velocity_width");
      a.pressure_width = to_int(n.integer("pressure_width"), "network.pressure_width");
      a.displacement_width = to_int(n.integer("displacement_width"), "network.displacement_width");
      a.schedule = parse_schedule(n.text("schedule"));
      n.finish();
    }
    s.finish();
  }
  root.finish();
  c.validate();
  return c;
}

}  // namespace

void ScenarioConfig::validate() const {
  problem.validate();
  weights.validate();
  plan.validate();
  if (architecture.depth < 2 || architecture.velocity_width < 1 || architecture.pressure_width < 1 ||
      architecture.displacement_width < 1) {
    throw ConfigError("config: network depth must be >= 2 and widths >= 1");
  }
  if (samples.interior < 1 || samples.wall < 1 || samples.inlet_outlet < 2 || samples.wall_ends < 2) {
    throw ConfigError("config: sample counts must be positive (inlet_outlet and wall_ends >= 2)");
  }
  if (!(learning_rate > 0.0)) throw ConfigError("config: learning rate must be > 0");
  if (workers < 1) throw ConfigError("config: workers must be >= 1");
}

bool ScenarioConfig::operator==(const ScenarioConfig& other) const {
  return to_tree(*this) == to_tree(other);
}

std::vector<std::string> preset_names() {
  return {"cylinder", "plaque-mild", "plaque-moderate", "plaque-severe", "one-pulse", "poiseuille-rigid"};
}

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig c;  // defaults are the cylinder scenario
  c.name = name;
  if (name == "cylinder") return c;
  if (name == "plaque-mild" || name == "plaque-moderate" || name == "plaque-severe") {
    const double h_r = name == "plaque-mild" ? 0.05 : (name == "plaque-moderate" ? 0.1 : 0.15);
    c.problem.geometry.plaque = Plaque{0.15, h_r, c.problem.geometry.length / 2.0};
    c.problem.plaque_wall = WallProperties{1.1, 1e6, 0.5};
    return c;
  }
  if (name == "one-pulse") {
    VesselGeometry& g = c.problem.geometry;
    g.length = 25.0;
    g.radius = 1.0;
    g.wall_thickness = 0.2;
    g.horizon = 0.2;
    c.problem.wall.youngs_modulus = 0.8e7;
    c.problem.inlet.peak_velocity = 20.0;
    c.problem.inlet.angular_frequency = 20.0 * std::numbers::pi;
    return c;
  }
  if (name == "poiseuille-rigid") {
    c.problem.rigid = true;
    c.problem.inlet.mode = InletMode::Steady;
    c.problem.inlet.peak_velocity = 20.0;
    c.problem.outlet = OutletCondition::PseudoTraction;
    // A steady inlet contradicts a fluid at rest at t = 0.
    c.weights.fluid_init = 0.0;
    return c;
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

std::string to_json(const ScenarioConfig& c) { return to_tree(c).dump(2) + "\n"; }

ScenarioConfig from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("config: malformed JSON: ") + e.what());
  }
  return from_tree(j);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void save_config(const std::filesystem::path& path, const ScenarioConfig& c) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config " + path.string());
  out << to_json(c);
}

}  // namespace vpinn
