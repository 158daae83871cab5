#pragma once

// Fully connected coordinate networks N_u, N_p, N_d.
//
// Depth L counts affine layers. Layer 1 and every odd layer use sigmoid,
// even layers use ReLU, and the final affine layer has no activation.
// Parameters are stored flat, layer by layer: W (row-major, rows = fan-out)
// followed by b.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vpinn/autodiff.hpp"

namespace vpinn {

enum class Activation { Sigmoid, Relu, Identity };
enum class ActivationSchedule { Alternating, AllSigmoid };
enum class NetworkRole { Displacement, Velocity, Pressure };

const char* activation_name(Activation a);
const char* schedule_name(ActivationSchedule s);
const char* role_name(NetworkRole r);
ActivationSchedule parse_schedule(const std::string& s);

/// Input dimension is 3 for every role: (r, z, t) for N_d and the
/// current-frame (r_t, z_t, t') for N_u and N_p.
int role_input_dim(NetworkRole role);
/// 1 for N_d (eta) and N_p (P), 2 for N_u (u_z, u_r).
int role_output_dim(NetworkRole role);

/// Activation of affine layer `layer` (1-based) in a depth-`depth` network.
Activation activation_for_layer(int layer, int depth, ActivationSchedule schedule);

struct LayerShape {
  int rows = 0;  // fan-out M_l
  int cols = 0;  // fan-in M_{l-1}
  Activation activation = Activation::Identity;
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;
};

/// sum_l M_l (M_{l-1} + 1) for uniform hidden width.
std::size_t param_count(int depth, int hidden_width, int in_dim, int out_dim);

class FieldNetwork {
 public:
  FieldNetwork() = default;

  /// Scaled-uniform (Glorot) weights in +-sqrt(6 / (fan_in + fan_out)),
  /// zero biases. Throws ConfigError for depth < 2 or non-positive widths.
  static FieldNetwork build(int depth, int hidden_width, int in_dim, int out_dim,
                            std::uint64_t seed,
                            ActivationSchedule schedule = ActivationSchedule::Alternating);

  int depth() const { return static_cast<int>(layers_.size()); }
  int hidden_width() const { return hidden_width_; }
  int in_dim() const { return layers_.empty() ? 0 : layers_.front().cols; }
  int out_dim() const { return layers_.empty() ? 0 : layers_.back().rows; }
  ActivationSchedule schedule() const { return schedule_; }
  const std::vector<LayerShape>& layers() const { return layers_; }
  std::size_t param_count() const { return params_.size(); }

  std::span<const double> params() const { return params_; }
  std::span<double> params() { return params_; }
  std::span<const double> weights(std::size_t layer) const;
  std::span<const double> biases(std::size_t layer) const;
  std::span<double> weights(std::size_t layer);
  std::span<double> biases(std::size_t layer);

  /// Zeroes the final layer so the network output is identically 0.
  void zero_init_output();

  /// Allocates one tape input per parameter (in storage order).
  std::vector<ad::Var> bind(ad::Tape& tape) const;
  /// Parameters inserted as constants (no gradient flow).
  std::vector<ad::Var> bind_constant(ad::Tape& tape) const;

  /// Differentiable forward pass on the tape.
  std::vector<ad::Var> forward(std::span<const ad::Var> params,
                               std::span<const ad::Var> input) const;
  /// Plain forward pass; same operation order as the tape path.
  std::vector<double> evaluate(std::span<const double> input) const;

  bool operator==(const FieldNetwork& other) const;

 private:
  FieldNetwork(int depth, int hidden_width, int in_dim, int out_dim,
               ActivationSchedule schedule);

  std::vector<LayerShape> layers_;
  std::vector<double> params_;
  int hidden_width_ = 0;
  ActivationSchedule schedule_ = ActivationSchedule::Alternating;
};

/// Depth and hidden widths of the three networks. Widths default to 20 for
/// N_u and N_d and 10 for N_p.
struct NetworkArchitecture {
  int depth = 12;
  int velocity_width = 20;
  int pressure_width = 10;
  int displacement_width = 20;
  ActivationSchedule schedule = ActivationSchedule::Alternating;
};

struct FsiNetworks {
  FieldNetwork velocity;      // N_u: (r_t, z_t, t') -> (u_z, u_r)
  FieldNetwork pressure;      // N_p: (r_t, z_t, t') -> P
  FieldNetwork displacement;  // N_d: (r, z, t) -> eta

  /// Seeds the three networks from one seed; N_d gets a zero output layer.
  static FsiNetworks build(const NetworkArchitecture& arch, std::uint64_t seed);
  bool operator==(const FsiNetworks& other) const;
};

/// Parses "<depth>x<width>-split" (N_u gets 2/3 of the width, N_p 1/3) or
/// "<depth>x<width>-single" (one network with three outputs) and returns the
/// combined fluid parameter count. Throws ConfigError on malformed specs.
std::size_t fluid_param_count(const std::string& spec);

/// Text block:
///   network <depth> <in_dim> <out_dim> <hidden_width> <schedule>
///   layer <l> <rows> <cols> <activation>
///   <rows*cols weights, row-major> <rows biases>   (one line each)
///   ...
///   end-network
/// Values use shortest round-trip formatting, so write/read is bit-exact.
void write_network(std::ostream& out, const FieldNetwork& net);
FieldNetwork read_network(std::istream& in);

/// Throws FormatError naming expected vs found dimensions if `net` does not
/// have the given architecture.
void ensure_architecture(const FieldNetwork& net, const std::string& name, int depth,
                         int hidden_width, int in_dim, int out_dim);

// Shared number formatting for the text file formats.
std::string format_double(double v);
double parse_double(const std::string& token);

}  // namespace vpinn
