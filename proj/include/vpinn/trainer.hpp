#pragma once

// Staged training: an alpha_ns = 0 fluid block, the alpha_ns ladder, then
// alternating solid / fluid blocks. Every epoch evaluates the loss of the
// current parameters, records it, and takes one Adam step on the networks
// of the active phase.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vpinn/domain.hpp"
#include "vpinn/loss.hpp"
#include "vpinn/nets.hpp"
#include "vpinn/optim.hpp"
#include "vpinn/physics.hpp"

namespace vpinn {

struct TrainingPlan {
  int m_fluid = 2000;
  int m_solid = 500;
  int m1 = 80;  // u-epochs per fluid round
  int m2 = 20;  // p-epochs per fluid round
  int ladder_steps = 5;      // E
  int max_alternations = 6;  // F
  double epsilon = 0.1;
  int window = 100;
  double alpha_start = 1e-8;
  double alpha_factor = 10.0;

  /// Throws ConfigError unless counts are positive (E, F may be 0) and
  /// m1 + m2 divides m_fluid.
  void validate() const;
};

enum class Stage { Init, Ladder, Coupled };
enum class BlockKind { Fluid, Solid };
enum class Phase { Velocity, Pressure, Displacement };

const char* stage_name(Stage s);
const char* block_kind_name(BlockKind k);
const char* phase_name(Phase p);
Stage parse_stage(const std::string& s);
BlockKind parse_block_kind(const std::string& s);
Phase parse_phase(const std::string& s);

/// Phase of epoch k (0-based) inside a fluid block: u for the first m1 of
/// every m1 + m2, then p.
Phase fluid_phase(int k, int m1, int m2);

/// True iff `tail` holds at least `window` values and the best value of the
/// last `window` improves on the first of them by less than eps.
bool converged(std::span<const double> tail, double eps, int window);

struct EpochRecord {
  long long epoch = 0;
  Stage stage = Stage::Init;
  int block = 0;
  BlockKind kind = BlockKind::Fluid;
  Phase phase = Phase::Velocity;
  double alpha_ns = 0.0;
  /// Terms of the sub-problem not trained in this epoch are 0.
  LossBreakdown loss;
  bool operator==(const EpochRecord&) const = default;
};

struct BlockMarker {
  int block = 0;
  Stage stage = Stage::Init;
  BlockKind kind = BlockKind::Fluid;
  double alpha_ns = 0.0;
  long long first_epoch = 0;
  long long epochs = 0;
  bool converged = false;
  bool operator==(const BlockMarker&) const = default;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  std::vector<BlockMarker> blocks;
  bool operator==(const TrainingHistory&) const = default;
};

/// history.csv: epoch,stage,block,kind,phase,alpha_ns,ns,fluid_bdr,
/// fluid_init,sc,he,solid_bdr,solid_init,fluid_total,solid_total
void write_history_csv(std::ostream& out, const TrainingHistory& h);
/// blocks.csv: block,stage,kind,alpha_ns,first_epoch,epochs,converged
void write_blocks_csv(std::ostream& out, const TrainingHistory& h);
/// Bit-exact inverses of the writers. Throw FormatError.
std::vector<EpochRecord> read_history_csv(std::istream& in);
std::vector<BlockMarker> read_blocks_csv(std::istream& in);

// ---------------------------------------------------------------------------
// Data-parallel gradient averaging.

/// Flat per-shard result; every shard must return the same length.
using ShardEvaluator = std::function<std::vector<double>(std::size_t shard)>;

/// (1/P) sum_k eval(k), summed in shard order so the result does not depend
/// on `workers`. workers <= 1 runs the serial loop. Throws ConfigError for
/// P = 0 and DimensionError for ragged shard results.
std::vector<double> parallel_grad(std::size_t shards, const ShardEvaluator& eval, int workers);

/// Loss terms and gradients averaged over `shards`. Throws ConfigError if a
/// shard lacks points in a region the loss needs.
GradientResult parallel_loss_gradient(const LossEngine& engine, BlockKind kind,
                                      const FsiNetworks& nets,
                                      std::span<const CollocationSet> shards,
                                      GradientRequest want, int workers);

// ---------------------------------------------------------------------------

struct Optimizers {
  AdamState velocity, pressure, displacement;
  static Optimizers for_networks(const FsiNetworks& nets, const AdamConfig& cfg = {});
  bool operator==(const Optimizers&) const = default;
};

struct BlockOutcome {
  long long epochs = 0;
  bool converged = false;
};

/// One fluid block run to completion: rounds of m1 u-epochs and m2 p-epochs,
/// at most m_fluid epochs, stopping early on convergence of the fluid total.
/// `record` receives every epoch's pre-update loss.
BlockOutcome fluid_block(FsiNetworks& nets, Optimizers& opt, const LossEngine& engine,
                         std::span<const CollocationSet> shards, const TrainingPlan& plan,
                         int workers, const std::function<void(Phase, const LossBreakdown&)>& record = {});

struct TrainerOptions {
  std::uint64_t seed = 0;
  SampleCounts counts;
  /// P: shards per epoch, one OpenMP thread each. Results depend on P but
  /// not on scheduling.
  int workers = 1;
  AdamConfig adam;
  /// Checkpoints go here when set: every `checkpoint_interval` epochs
  /// (0 = only at block ends) and at every block end.
  std::optional<std::filesystem::path> checkpoint_dir;
  long long checkpoint_interval = 0;
  std::function<void(const EpochRecord&)> on_epoch;
};

/// Raised for a non-finite loss or gradient. what() names the last
/// checkpoint that was written, or says none exists.
class TrainingAborted : public std::runtime_error {
 public:
  TrainingAborted(const std::string& what, std::string checkpoint)
      : std::runtime_error(what), checkpoint_(std::move(checkpoint)) {}
  const std::string& checkpoint() const { return checkpoint_; }

 private:
  std::string checkpoint_;
};

class Trainer {
 public:
  /// N_d must have a zero output layer (FsiNetworks::build provides one).
  Trainer(Problem problem, LossWeights weights, TrainingPlan plan, FsiNetworks nets,
          TrainerOptions options);

  /// Trains until the plan is exhausted, or pauses after `max_epochs`
  /// epochs (negative: no limit). Returns true when the plan is complete.
  bool run(long long max_epochs = -1);
  bool finished() const;

  const FsiNetworks& networks() const { return nets_; }
  const Optimizers& optimizers() const { return opt_; }
  const TrainingHistory& history() const { return history_; }
  const TrainingPlan& plan() const { return plan_; }
  const Problem& problem() const { return problem_; }

  /// Networks, optimizer states, cursor, convergence tail and history.
  void save_checkpoint(const std::filesystem::path& path) const;
  /// Replaces the state with a checkpoint; run() then continues exactly
  /// where the saved trainer stopped.
  void load_checkpoint(const std::filesystem::path& path);
  const std::string& last_checkpoint() const { return last_checkpoint_; }

  struct Block {
    Stage stage;
    BlockKind kind;
    double alpha_ns;
    int epochs;
  };
  /// The block at `index` given the markers of earlier blocks, or nullopt
  /// when the plan ends there.
  static std::optional<Block> block_at(const TrainingPlan& plan, bool rigid, int index,
                                       std::span<const BlockMarker> done);

 private:
  void write_periodic_checkpoint(bool block_end);
  const std::vector<CollocationSet>& shards_for(Stage s);

  Problem problem_;
  LossWeights weights_;
  TrainingPlan plan_;
  TrainerOptions options_;
  FsiNetworks nets_;
  Optimizers opt_;
  TrainingHistory history_;

  // Cursor.
  int block_ = 0;
  int epoch_in_block_ = 0;
  long long epoch_ = 0;
  std::vector<double> tail_;

  int shard_stage_ = -1;
  std::vector<CollocationSet> shards_;
  std::string last_checkpoint_;
};

/// Text checkpoint helpers shared with the CLI.
void write_checkpoint_networks(std::ostream& out, const FsiNetworks& nets);
FsiNetworks read_checkpoint_networks(std::istream& in);
/// Networks only, from a trainer checkpoint file.
FsiNetworks load_checkpoint_networks(const std::filesystem::path& path);

}  // namespace vpinn
