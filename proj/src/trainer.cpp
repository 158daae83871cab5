#include "vpinn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <omp.h>

#include "vpinn/errors.hpp"

namespace vpinn {

void TrainingPlan::validate() const {
  if (m_fluid < 1 || m_solid < 1 || m1 < 1 || m2 < 1 || window < 1) {
    throw ConfigError("training plan: epoch counts and window must be positive");
  }
  if (ladder_steps < 0 || max_alternations < 0) {
    throw ConfigError("training plan: ladder steps and alternations must be >= 0");
  }
  if (m_fluid % (m1 + m2) != 0) {
    throw ConfigError("training plan: m1 + m2 = " + std::to_string(m1 + m2) +
                      " does not divide m_fluid = " + std::to_string(m_fluid));
  }
  if (!(epsilon >= 0.0) || !(alpha_start > 0.0) || !(alpha_factor > 1.0)) {
    throw ConfigError("training plan: need epsilon >= 0, alpha_start > 0, alpha_factor > 1");
  }
}

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::Init: return "init";
    case Stage::Ladder: return "ladder";
    case Stage::Coupled: return "coupled";
  }
  return "?";
}

const char* block_kind_name(BlockKind k) { return k == BlockKind::Fluid ? "fluid" : "solid"; }

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Velocity: return "u";
    case Phase::Pressure: return "p";
    case Phase::Displacement: return "d";
  }
  return "?";
}

Stage parse_stage(const std::string& s) {
  for (Stage v : {Stage::Init, Stage::Ladder, Stage::Coupled}) {
    if (s == stage_name(v)) return v;
  }
  throw FormatError("unknown stage '" + s + "'");
}

BlockKind parse_block_kind(const std::string& s) {
  if (s == "fluid") return BlockKind::Fluid;
  if (s == "solid") return BlockKind::Solid;
  throw FormatError("unknown block kind '" + s + "'");
}

Phase parse_phase(const std::string& s) {
  for (Phase v : {Phase::Velocity, Phase::Pressure, Phase::Displacement}) {
    if (s == phase_name(v)) return v;
  }
  throw FormatError("unknown phase '" + s + "'");
}

Phase fluid_phase(int k, int m1, int m2) {
  return k % (m1 + m2) < m1 ? Phase::Velocity : Phase::Pressure;
}

bool converged(std::span<const double> tail, double eps, int window) {
  if (window < 1 || tail.size() < static_cast<std::size_t>(window)) return false;
  const auto last = tail.subspan(tail.size() - static_cast<std::size_t>(window));
  const double best = *std::min_element(last.begin(), last.end());
  return last.front() - best < eps;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

constexpr const char* kHistoryHeader =
    "epoch,stage,block,kind,phase,alpha_ns,ns,fluid_bdr,fluid_init,sc,he,solid_bdr,"
    "solid_init,fluid_total,solid_total";
constexpr const char* kBlocksHeader = "block,stage,kind,alpha_ns,first_epoch,epochs,converged";

void write_record(std::ostream& out, const EpochRecord& r) {
  const LossBreakdown& l = r.loss;
  out << r.epoch << ',' << stage_name(r.stage) << ',' << r.block << ',' << block_kind_name(r.kind)
      << ',' << phase_name(r.phase) << ',' << format_double(r.alpha_ns);
  for (double v : {l.ns, l.fluid_bdr, l.fluid_init, l.sc, l.he, l.solid_bdr, l.solid_init,
                   l.fluid_total, l.solid_total}) {
    out << ',' << format_double(v);
  }
  out << '\n';
}

EpochRecord parse_record(const std::string& line) {
  const auto c = split_csv(line);
  if (c.size() != 15) throw FormatError("history row has " + std::to_string(c.size()) + " fields: " + line);
  EpochRecord r;
  try {
    r.epoch = std::stoll(c[0]);
    r.block = std::stoi(c[2]);
  } catch (const std::exception&) {
    throw FormatError("history row: bad integer field: " + line);
  }
  r.stage = parse_stage(c[1]);
  r.kind = parse_block_kind(c[3]);
  r.phase = parse_phase(c[4]);
  r.alpha_ns = parse_double(c[5]);
  double* f[] = {&r.loss.ns, &r.loss.fluid_bdr, &r.loss.fluid_init, &r.loss.sc, &r.loss.he,
                 &r.loss.solid_bdr, &r.loss.solid_init, &r.loss.fluid_total, &r.loss.solid_total};
  for (int i = 0; i < 9; ++i) *f[i] = parse_double(c[static_cast<std::size_t>(6 + i)]);
  return r;
}

void write_marker(std::ostream& out, const BlockMarker& b) {
  out << b.block << ',' << stage_name(b.stage) << ',' << block_kind_name(b.kind) << ','
      << format_double(b.alpha_ns) << ',' << b.first_epoch << ',' << b.epochs << ','
      << (b.converged ? 1 : 0) << '\n';
}

BlockMarker parse_marker(const std::string& line) {
  const auto c = split_csv(line);
  if (c.size() != 7) throw FormatError("blocks row has " + std::to_string(c.size()) + " fields: " + line);
  BlockMarker b;
  try {
    b.block = std::stoi(c[0]);
    b.first_epoch = std::stoll(c[4]);
    b.epochs = std::stoll(c[5]);
  } catch (const std::exception&) {
    throw FormatError("blocks row: bad integer field: " + line);
  }
  b.stage = parse_stage(c[1]);
  b.kind = parse_block_kind(c[2]);
  b.alpha_ns = parse_double(c[3]);
  if (c[6] != "0" && c[6] != "1") throw FormatError("blocks row: converged must be 0 or 1: " + line);
  b.converged = c[6] == "1";
  return b;
}

template <class T, class Parse>
std::vector<T> read_rows(std::istream& in, const char* header, Parse parse) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw FormatError(std::string("expected header '") + header + "'");
  }
  std::vector<T> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(parse(line));
  }
  return rows;
}

}  // namespace

void write_history_csv(std::ostream& out, const TrainingHistory& h) {
  out << kHistoryHeader << '\n';
  for (const auto& r : h.epochs) write_record(out, r);
}

void write_blocks_csv(std::ostream& out, const TrainingHistory& h) {
  out << kBlocksHeader << '\n';
  for (const auto& b : h.blocks) write_marker(out, b);
}

std::vector<EpochRecord> read_history_csv(std::istream& in) {
  return read_rows<EpochRecord>(in, kHistoryHeader, parse_record);
}

std::vector<BlockMarker> read_blocks_csv(std::istream& in) {
  return read_rows<BlockMarker>(in, kBlocksHeader, parse_marker);
}

// ---------------------------------------------------------------------------
// Gradient averaging

std::vector<double> parallel_grad(std::size_t shards, const ShardEvaluator& eval, int workers) {
  if (shards == 0) throw ConfigError("parallel_grad: no shards");
  std::vector<std::vector<double>> parts(shards);
  std::vector<std::exception_ptr> errors(shards);
  const long long n = static_cast<long long>(shards);
  if (workers <= 1) {
    for (long long k = 0; k < n; ++k) parts[static_cast<std::size_t>(k)] = eval(static_cast<std::size_t>(k));
  } else {
#pragma omp parallel for num_threads(workers) schedule(static)
    for (long long k = 0; k < n; ++k) {
      const auto i = static_cast<std::size_t>(k);
      try {
        parts[i] = eval(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::vector<double> sum = std::move(parts[0]);
  for (std::size_t k = 1; k < shards; ++k) {
    if (parts[k].size() != sum.size()) {
      throw DimensionError("parallel_grad: shard " + std::to_string(k) + " returned " +
                           std::to_string(parts[k].size()) + " values, shard 0 returned " +
                           std::to_string(sum.size()));
    }
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += parts[k][i];
  }
  const double inv = 1.0 / static_cast<double>(shards);
  for (double& v : sum) v *= inv;
  return sum;
}

namespace {

void require_points(const CollocationSet& s, std::size_t k, BlockKind kind, bool rigid) {
  auto need = [&](const SampleSet& set, const char* what) {
    if (set.empty()) {
      throw ConfigError("shard " + std::to_string(k) + " has no " + what + " points");
    }
  };
  if (kind == BlockKind::Fluid) {
    need(s.interior, "interior");
    need(s.interior_initial, "initial interior");
    need(s.wall, "wall");
  } else if (!rigid) {
    need(s.interior, "interior");
    need(s.wall, "wall");
    need(s.wall_initial, "initial wall");
    need(s.wall_ends, "wall end");
  }
}

constexpr std::size_t kTerms = 7;

std::vector<double> flatten(const GradientResult& g) {
  const LossBreakdown& l = g.loss;
  std::vector<double> v = {l.ns, l.fluid_bdr, l.fluid_init, l.sc, l.he, l.solid_bdr, l.solid_init};
  v.insert(v.end(), g.grad_u.begin(), g.grad_u.end());
  v.insert(v.end(), g.grad_p.begin(), g.grad_p.end());
  v.insert(v.end(), g.grad_d.begin(), g.grad_d.end());
  return v;
}

}  // namespace

GradientResult parallel_loss_gradient(const LossEngine& engine, BlockKind kind,
                                      const FsiNetworks& nets,
                                      std::span<const CollocationSet> shards,
                                      GradientRequest want, int workers) {
  for (std::size_t k = 0; k < shards.size(); ++k) {
    require_points(shards[k], k, kind, engine.problem().rigid);
  }
  const auto avg = parallel_grad(
      shards.size(),
      [&](std::size_t k) {
        return flatten(kind == BlockKind::Fluid ? engine.fluid(nets, shards[k], want)
                                                : engine.solid(nets, shards[k], want));
      },
      workers);
  GradientResult out;
  LossBreakdown& l = out.loss;
  double* f[] = {&l.ns, &l.fluid_bdr, &l.fluid_init, &l.sc, &l.he, &l.solid_bdr, &l.solid_init};
  for (std::size_t i = 0; i < kTerms; ++i) *f[i] = avg[i];
  l.update_totals(engine.weights());
  auto it = avg.begin() + static_cast<std::ptrdiff_t>(kTerms);
  auto take = [&](std::vector<double>& dst, std::size_t n) {
    dst.assign(it, it + static_cast<std::ptrdiff_t>(n));
    it += static_cast<std::ptrdiff_t>(n);
  };
  take(out.grad_u, nets.velocity.param_count());
  take(out.grad_p, nets.pressure.param_count());
  take(out.grad_d, nets.displacement.param_count());
  return out;
}

// ---------------------------------------------------------------------------

Optimizers Optimizers::for_networks(const FsiNetworks& nets, const AdamConfig& cfg) {
  return {AdamState(nets.velocity.param_count(), cfg), AdamState(nets.pressure.param_count(), cfg),
          AdamState(nets.displacement.param_count(), cfg)};
}

namespace {

bool finite(const LossBreakdown& l) {
  for (double v : {l.ns, l.fluid_bdr, l.fluid_init, l.sc, l.he, l.solid_bdr, l.solid_init,
                   l.fluid_total, l.solid_total}) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

/// Loss of the current parameters, then one Adam step on the phase's network.
/// Returns the pre-update loss.
LossBreakdown train_epoch(FsiNetworks& nets, Optimizers& opt, const LossEngine& engine,
                          std::span<const CollocationSet> shards, Phase phase, int workers) {
  GradientRequest want;
  want.velocity = phase == Phase::Velocity;
  want.pressure = phase == Phase::Pressure;
  want.displacement = phase == Phase::Displacement;
  const BlockKind kind = phase == Phase::Displacement ? BlockKind::Solid : BlockKind::Fluid;
  const GradientResult g = parallel_loss_gradient(engine, kind, nets, shards, want, workers);
  if (!finite(g.loss)) return g.loss;
  switch (phase) {
    case Phase::Velocity: opt.velocity.step(nets.velocity.params(), g.grad_u); break;
    case Phase::Pressure: opt.pressure.step(nets.pressure.params(), g.grad_p); break;
    case Phase::Displacement: opt.displacement.step(nets.displacement.params(), g.grad_d); break;
  }
  return g.loss;
}

}  // namespace

BlockOutcome fluid_block(FsiNetworks& nets, Optimizers& opt, const LossEngine& engine,
                         std::span<const CollocationSet> shards, const TrainingPlan& plan,
                         int workers, const std::function<void(Phase, const LossBreakdown&)>& record) {
  plan.validate();
  BlockOutcome out;
  std::vector<double> tail;
  for (int k = 0; k < plan.m_fluid; ++k) {
    const Phase phase = fluid_phase(k, plan.m1, plan.m2);
    const LossBreakdown l = train_epoch(nets, opt, engine, shards, phase, workers);
    if (!finite(l)) throw TrainingAborted("non-finite fluid loss at block epoch " + std::to_string(k), "");
    if (record) record(phase, l);
    ++out.epochs;
    tail.push_back(l.fluid_total);
    if (converged(tail, plan.epsilon, plan.window)) {
      out.converged = true;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trainer

Trainer::Trainer(Problem problem, LossWeights weights, TrainingPlan plan, FsiNetworks nets,
                 TrainerOptions options)
    : problem_(std::move(problem)),
      weights_(weights),
      plan_(plan),
      options_(std::move(options)),
      nets_(std::move(nets)) {
  problem_.validate();
  weights_.validate();
  plan_.validate();
  if (options_.workers < 1) throw ConfigError("trainer: workers must be >= 1");
  for (double w : nets_.displacement.weights(nets_.displacement.layers().size() - 1)) {
    if (w != 0.0) throw ConfigError("trainer: N_d must start with a zero output layer");
  }
  opt_ = Optimizers::for_networks(nets_, options_.adam);
}

std::optional<Trainer::Block> Trainer::block_at(const TrainingPlan& plan, bool rigid, int index,
                                                std::span<const BlockMarker> done) {
  if (index < 0) return std::nullopt;
  if (index == 0) return Block{Stage::Init, BlockKind::Fluid, 0.0, plan.m_fluid};
  double alpha = plan.alpha_start;
  const int ladder = std::min(index, plan.ladder_steps);
  for (int k = 0; k < ladder; ++k) alpha *= plan.alpha_factor;
  if (index <= plan.ladder_steps) return Block{Stage::Ladder, BlockKind::Fluid, alpha, plan.m_fluid};

  const int j = index - plan.ladder_steps - 1;
  const int per_round = rigid ? 1 : 2;
  const int round = j / per_round;
  if (round >= plan.max_alternations) return std::nullopt;
  const bool first_of_round = j % per_round == 0;
  if (first_of_round && round > 0) {
    // The previous round's fluid block decides whether to continue.
    const auto prev = static_cast<std::size_t>(index - 1);
    if (prev < done.size() && done[prev].converged) return std::nullopt;
  }
  if (!rigid && first_of_round) return Block{Stage::Coupled, BlockKind::Solid, alpha, plan.m_solid};
  return Block{Stage::Coupled, BlockKind::Fluid, alpha, plan.m_fluid};
}

bool Trainer::finished() const {
  return !block_at(plan_, problem_.rigid, block_, history_.blocks).has_value();
}

const std::vector<CollocationSet>& Trainer::shards_for(Stage s) {
  const int idx = static_cast<int>(s);
  if (shard_stage_ != idx) {
    // One draw per stage; the seed mixes the run seed with the stage index.
    const std::uint64_t stage_seed = options_.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(idx + 1);
    const CollocationSet all = draw_collocation(problem_.geometry, options_.counts, stage_seed);
    shards_ = all.shard(options_.workers);
    shard_stage_ = idx;
  }
  return shards_;
}

bool Trainer::run(long long max_epochs) {
  long long done_now = 0;
  while (true) {
    const auto blk = block_at(plan_, problem_.rigid, block_, history_.blocks);
    if (!blk) return true;
    if (max_epochs >= 0 && done_now >= max_epochs) return false;

    if (epoch_in_block_ == 0) {
      BlockMarker m;
      m.block = block_;
      m.stage = blk->stage;
      m.kind = blk->kind;
      m.alpha_ns = blk->alpha_ns;
      m.first_epoch = epoch_;
      history_.blocks.push_back(m);
      tail_.clear();
    }
    BlockMarker& marker = history_.blocks.back();

    LossWeights w = weights_;
    w.ns = blk->alpha_ns;
    const LossEngine engine(problem_, w);
    const auto& shards = shards_for(blk->stage);

    const Phase phase = blk->kind == BlockKind::Solid
                            ? Phase::Displacement
                            : fluid_phase(epoch_in_block_, plan_.m1, plan_.m2);
    LossBreakdown loss;
    try {
      loss = train_epoch(nets_, opt_, engine, shards, phase, options_.workers);
    } catch (const std::domain_error& e) {
      throw TrainingAborted(std::string(e.what()) + " at epoch " + std::to_string(epoch_) +
                                "; last good checkpoint: " +
                                (last_checkpoint_.empty() ? "none" : last_checkpoint_),
                            last_checkpoint_);
    }
    if (!finite(loss)) {
      throw TrainingAborted("non-finite loss at epoch " + std::to_string(epoch_) +
                                "; last good checkpoint: " +
                                (last_checkpoint_.empty() ? "none" : last_checkpoint_),
                            last_checkpoint_);
    }

    EpochRecord rec;
    rec.epoch = epoch_;
    rec.stage = blk->stage;
    rec.block = block_;
    rec.kind = blk->kind;
    rec.phase = phase;
    rec.alpha_ns = blk->alpha_ns;
    rec.loss = loss;
    history_.epochs.push_back(rec);
    if (options_.on_epoch) options_.on_epoch(rec);

    ++epoch_;
    ++epoch_in_block_;
    ++done_now;
    ++marker.epochs;
    tail_.push_back(blk->kind == BlockKind::Fluid ? loss.fluid_total : loss.solid_total);
    // Only the last `window` values matter for convergence.
    if (tail_.size() > static_cast<std::size_t>(plan_.window)) tail_.erase(tail_.begin());

    const bool conv = converged(tail_, plan_.epsilon, plan_.window);
    const bool block_end = conv || epoch_in_block_ >= blk->epochs;
    if (block_end) {
      marker.converged = conv;
      ++block_;
      epoch_in_block_ = 0;
      tail_.clear();
    }
    write_periodic_checkpoint(block_end);
  }
}

void Trainer::write_periodic_checkpoint(bool block_end) {
  if (!options_.checkpoint_dir) return;
  const bool interval = options_.checkpoint_interval > 0 && epoch_ % options_.checkpoint_interval == 0;
  if (!block_end && !interval) return;
  std::filesystem::create_directories(*options_.checkpoint_dir);
  const auto path = *options_.checkpoint_dir / "checkpoint.txt";
  const auto tmp = *options_.checkpoint_dir / "checkpoint.txt.tmp";
  save_checkpoint(tmp);
  std::filesystem::rename(tmp, path);
  last_checkpoint_ = path.string();
}

// ---------------------------------------------------------------------------
// Checkpoint

void write_checkpoint_networks(std::ostream& out, const FsiNetworks& nets) {
  write_network(out, nets.velocity);
  write_network(out, nets.pressure);
  write_network(out, nets.displacement);
}

FsiNetworks read_checkpoint_networks(std::istream& in) {
  FsiNetworks n;
  n.velocity = read_network(in);
  n.pressure = read_network(in);
  n.displacement = read_network(in);
  auto check = [](const FieldNetwork& net, const char* name, int out) {
    if (net.in_dim() != 3 || net.out_dim() != out) {
      throw FormatError(std::string("checkpoint: ") + name + " expected 3 -> " + std::to_string(out) +
                        ", found " + std::to_string(net.in_dim()) + " -> " +
                        std::to_string(net.out_dim()));
    }
  };
  check(n.velocity, "velocity network", 2);
  check(n.pressure, "pressure network", 1);
  check(n.displacement, "displacement network", 1);
  return n;
}

namespace {

std::string expect_token(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) throw FormatError(std::string("checkpoint: missing ") + what);
  return tok;
}

void expect_word(std::istream& in, const char* word) {
  const std::string tok = expect_token(in, word);
  if (tok != word) {
    throw FormatError(std::string("checkpoint: expected '") + word + "', found '" + tok + "'");
  }
}

long long expect_int(std::istream& in, const char* what) {
  const std::string tok = expect_token(in, what);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw FormatError(std::string("checkpoint: bad ") + what + " '" + tok + "'");
  }
}

}  // namespace

FsiNetworks load_checkpoint_networks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  expect_word(in, "vpinn-checkpoint");
  if (expect_int(in, "version") != 1) throw FormatError("checkpoint: unsupported version");
  return read_checkpoint_networks(in);
}

void Trainer::save_checkpoint(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write checkpoint " + path.string());
  out << "vpinn-checkpoint 1\n";
  write_checkpoint_networks(out, nets_);
  write_adam(out, opt_.velocity);
  write_adam(out, opt_.pressure);
  write_adam(out, opt_.displacement);
  out << "cursor " << block_ << ' ' << epoch_in_block_ << ' ' << epoch_ << '\n';
  out << "tail " << tail_.size();
  for (double v : tail_) out << ' ' << format_double(v);
  out << '\n';
  out << "history " << history_.epochs.size() << ' ' << history_.blocks.size() << '\n';
  // Data rows without headers; the CSV encoders give bit-exact values.
  for (const auto& r : history_.epochs) write_record(out, r);
  for (const auto& b : history_.blocks) write_marker(out, b);
  out << "end-checkpoint\n";
  if (!out) throw FormatError("error writing checkpoint " + path.string());
}

void Trainer::load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  expect_word(in, "vpinn-checkpoint");
  if (expect_int(in, "version") != 1) throw FormatError("checkpoint: unsupported version");
  FsiNetworks nets = read_checkpoint_networks(in);
  auto same_shape = [](const FieldNetwork& a, const FieldNetwork& b, const char* name) {
    ensure_architecture(a, name, b.depth(), b.hidden_width(), b.in_dim(), b.out_dim());
  };
  same_shape(nets.velocity, nets_.velocity, "velocity network");
  same_shape(nets.pressure, nets_.pressure, "pressure network");
  same_shape(nets.displacement, nets_.displacement, "displacement network");
  Optimizers opt{read_adam(in), read_adam(in), read_adam(in)};
  if (opt.velocity.size() != nets.velocity.param_count() ||
      opt.pressure.size() != nets.pressure.param_count() ||
      opt.displacement.size() != nets.displacement.param_count()) {
    throw FormatError("checkpoint: optimizer state does not match the networks");
  }
  expect_word(in, "cursor");
  const int block = static_cast<int>(expect_int(in, "block index"));
  const int in_block = static_cast<int>(expect_int(in, "epoch in block"));
  const long long epoch = expect_int(in, "epoch");
  expect_word(in, "tail");
  const long long nt = expect_int(in, "tail length");
  if (nt < 0) throw FormatError("checkpoint: negative tail length");
  std::vector<double> tail(static_cast<std::size_t>(nt));
  for (double& v : tail) v = parse_double(expect_token(in, "tail value"));
  expect_word(in, "history");
  const long long ne = expect_int(in, "history length");
  const long long nb = expect_int(in, "block count");
  if (ne < 0 || nb < 0) throw FormatError("checkpoint: negative history size");
  std::string line;
  std::getline(in, line);
  TrainingHistory h;
  for (long long i = 0; i < ne; ++i) {
    if (!std::getline(in, line)) throw FormatError("checkpoint: truncated history");
    h.epochs.push_back(parse_record(line));
  }
  for (long long i = 0; i < nb; ++i) {
    if (!std::getline(in, line)) throw FormatError("checkpoint: truncated block list");
    h.blocks.push_back(parse_marker(line));
  }
  expect_word(in, "end-checkpoint");
  if (static_cast<long long>(h.epochs.size()) != epoch) {
    throw FormatError("checkpoint: cursor epoch does not match the history length");
  }

  nets_ = std::move(nets);
  opt_ = std::move(opt);
  block_ = block;
  epoch_in_block_ = in_block;
  epoch_ = epoch;
  tail_ = std::move(tail);
  history_ = std::move(h);
  last_checkpoint_ = path.string();
}

}  // namespace vpinn
