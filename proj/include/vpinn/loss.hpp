#pragma once

// Loss assembly for the fluid and solid sub-problems.
//
// Two routes compute the same numbers:
//  - the reference route records every network evaluation and derivative on
//    one scalar tape (slow, used to verify);
//  - LossEngine evaluates each region in one JetBatch per network and pulls
//    per-point residual adjoints back through JetBatch::backward.
//
// Detach policy: in the fluid loss the interface target d eta/dt is a
// constant; in the solid loss every N_u / N_p value inside H is a constant.
// The fluid loss still depends on theta_d through the current-frame
// coordinates r_t = r + eta e_r.

#include <vector>

#include "vpinn/autodiff.hpp"
#include "vpinn/domain.hpp"
#include "vpinn/jet_kernel.hpp"
#include "vpinn/nets.hpp"
#include "vpinn/physics.hpp"

namespace vpinn {

struct BoundNetworks {
  std::vector<ad::Var> u, p, d;
};

/// Every parameter becomes a tape input.
BoundNetworks bind_networks(ad::Tape& tape, const FsiNetworks& nets);
TapeFields network_fields(const FsiNetworks& nets, const BoundNetworks& bound);

struct TapeLoss {
  ad::Var ns, fluid_bdr, fluid_init;
  ad::Var sc, he, solid_bdr, solid_init;
  ad::Var total;
  /// Values of the recorded terms; totals recomputed from the weights.
  LossBreakdown values(const LossWeights& w) const;
};

TapeLoss assemble_fluid_loss(ad::Tape& tape, const TapeFields& f, const Problem& pr,
                             const CollocationSet& s, const LossWeights& w);
TapeLoss assemble_solid_loss(ad::Tape& tape, const TapeFields& f, const Problem& pr,
                             const CollocationSet& s, const LossWeights& w);

struct GradientResult {
  LossBreakdown loss;
  std::vector<double> grad_u, grad_p, grad_d;
};

struct GradientRequest {
  bool velocity = false;
  bool pressure = false;
  bool displacement = false;
};

class LossEngine {
 public:
  LossEngine(const Problem& problem, const LossWeights& weights);

  void set_weights(const LossWeights& w) { weights_ = w; }
  const LossWeights& weights() const { return weights_; }
  const Problem& problem() const { return problem_; }

  /// Fluid terms and the gradient of the weighted fluid total. Only the
  /// velocity and pressure gradients can be requested; theta_d is trained
  /// through the solid loss alone.
  GradientResult fluid(const FsiNetworks& nets, const CollocationSet& s,
                       GradientRequest want) const;
  /// Solid terms and the gradient of the weighted solid total w.r.t. theta_d.
  GradientResult solid(const FsiNetworks& nets, const CollocationSet& s,
                       GradientRequest want) const;

 private:
  Problem problem_;
  LossWeights weights_;
};

}  // namespace vpinn
