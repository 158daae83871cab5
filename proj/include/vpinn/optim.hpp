#pragma once

// Adam with bias correction. One state per network.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace vpinn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamState {
 public:
  AdamState() = default;
  explicit AdamState(std::size_t n, AdamConfig config = {});

  /// theta <- theta - lr * m_hat / (sqrt(v_hat) + eps). Throws DimensionError
  /// on length mismatch and std::domain_error naming the first non-finite
  /// gradient entry; params are untouched in both cases.
  void step(std::span<double> params, std::span<const double> grads);

  long long steps() const { return steps_; }
  std::size_t size() const { return m_.size(); }
  const AdamConfig& config() const { return config_; }
  std::span<const double> first_moment() const { return m_; }
  std::span<const double> second_moment() const { return v_; }

  bool operator==(const AdamState& other) const;

 private:
  friend void write_adam(std::ostream&, const AdamState&);
  friend AdamState read_adam(std::istream&);

  AdamConfig config_;
  long long steps_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

/// Text block "adam <n> <steps> <lr> <b1> <b2> <eps>", m line, v line,
/// "end-adam". Bit-exact round trip.
void write_adam(std::ostream& out, const AdamState& state);
AdamState read_adam(std::istream& in);

}  // namespace vpinn
