#pragma once

// Batched derivative-jet kernel for FieldNetwork.
//
// For B points at once it propagates, through every layer, the value plus
// the requested first derivatives d/dx_k and diagonal second derivatives
// d2/dx_k2 with respect to the network inputs (forward-mode Taylor
// propagation). backward() then pulls adjoints of those output channels back
// to the parameters, giving parameter gradients of any loss built from the
// jets without recording a scalar tape.
//
// Layout: each layer's activations are an M_l x (C*B) column-major matrix,
// channel-major: columns [c*B, (c+1)*B) hold channel c for every point.
// Channel 0 is the value.

#include <span>
#include <vector>

#include <Eigen/Core>

#include "vpinn/nets.hpp"

namespace vpinn {

struct JetRequest {
  std::vector<int> first;   // input directions with first derivatives
  std::vector<int> second;  // directions with d2/dx_k2; each must be in `first`

  static JetRequest value_only() { return {}; }
  int channels() const { return 1 + static_cast<int>(first.size() + second.size()); }
};

class JetBatch {
 public:
  /// `inputs` holds `points` rows of net.in_dim() values, row-major.
  void forward(const FieldNetwork& net, std::span<const double> inputs, int points,
               const JetRequest& request);

  int points() const { return points_; }
  int outputs() const { return outputs_; }
  const JetRequest& request() const { return request_; }

  double value(int p, int o) const { return out()(o, p); }
  /// Requires `dir` in request().first / request().second.
  double first(int p, int o, int dir) const;
  double second(int p, int o, int dir) const;
  bool has_first(int dir) const;
  bool has_second(int dir) const;

  /// Output adjoints start at zero after forward().
  void add_adjoint_value(int p, int o, double g) { adj_(o, p) += g; }
  void add_adjoint_first(int p, int o, int dir, double g);
  void add_adjoint_second(int p, int o, int dir, double g);

  /// Accumulates d(loss)/d(params) into `grad` (length net.param_count()),
  /// where the loss adjoints of the output channels were supplied above.
  void backward(const FieldNetwork& net, std::span<double> grad) const;

 private:
  const Eigen::MatrixXd& out() const { return post_.back(); }
  int first_channel(int dir) const;
  int second_channel(int dir) const;

  JetRequest request_;
  int points_ = 0;
  int outputs_ = 0;
  int channels_ = 1;
  std::vector<int> first_channel_;   // by input direction, -1 if absent
  std::vector<int> second_channel_;  // by input direction, -1 if absent
  std::vector<Eigen::MatrixXd> pre_;   // pre-activations per layer
  std::vector<Eigen::MatrixXd> post_;  // post_[0] is the input jet
  Eigen::MatrixXd adj_;
};

/// Values only: `points` rows of outputs, row-major.
std::vector<double> evaluate_batch(const FieldNetwork& net, std::span<const double> inputs,
                                   int points);

}  // namespace vpinn
