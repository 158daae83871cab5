#pragma once

// Reverse-mode scalar autodiff with nested differentiation.
//
// Every DiffScalar (Var) is a node on a Tape. Tape::gradient() records the
// adjoint computation back onto the same tape, so the returned derivatives
// are themselves differentiable; applying it twice gives second derivatives,
// and a final Tape::gradient_values() sweep gives parameter gradients of
// losses that contain input derivatives.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vpinn::ad {

enum class Op : std::uint8_t {
  Input,
  Const,
  Copy,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Exp,
  Sqrt,
  Relu,
  Sigmoid,
  Sin,
  Cos,
};

const char* op_name(Op op);

/// Raised when a primitive is evaluated outside its domain (x/0, sqrt(x<0)).
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, std::size_t node)
      : std::runtime_error(what), node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

class Tape;

class Var {
 public:
  Var() = default;

  double value() const;
  std::int32_t index() const { return index_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::int32_t index) : tape_(tape), index_(index) {}

  Tape* tape_ = nullptr;
  std::int32_t index_ = -1;
};

class Tape {
 public:
  Tape() { nodes_.reserve(1024); }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// A differentiation root.
  Var input(double v);
  Var constant(double v);
  /// Identity node: a distinct root for partial derivatives while still
  /// depending on `x` for outer derivatives.
  Var copy(Var x);
  /// Same value as `x`, no gradient flow.
  Var detach(Var x) { return constant(x.value()); }

  Var unary(Op op, Var x);
  Var binary(Op op, Var x, Var y);

  /// d y / d wrt_k, recorded on this tape (differentiable).
  std::vector<Var> gradient(Var y, std::span<const Var> wrt);
  Var gradient(Var y, Var wrt);
  /// d y / d wrt_k as plain numbers. Unconnected entries are exactly 0.
  std::vector<double> gradient_values(Var y, std::span<const Var> wrt) const;

  /// Recomputes every node from its operands; true iff all values match
  /// the recorded ones bit for bit.
  bool replay_matches() const;

  std::size_t size() const { return nodes_.size(); }
  double value(std::int32_t i) const { return nodes_[static_cast<std::size_t>(i)].value; }
  void clear() { nodes_.clear(); }

 private:
  struct Node {
    Op op;
    std::int32_t a;
    std::int32_t b;
    double value;
  };

  Var push(Op op, std::int32_t a, std::int32_t b, double value);
  void check_owner(Var x) const;
  double evaluate(const Node& n) const;

  std::vector<Node> nodes_;
};

inline double Var::value() const { return tape_->value(index_); }

// Arithmetic. Mixed Var/double operands promote the double to a constant node.
Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);
Var operator-(Var a);
Var operator+(Var a, double b);
Var operator+(double a, Var b);
Var operator-(Var a, double b);
Var operator-(double a, Var b);
Var operator*(Var a, double b);
Var operator*(double a, Var b);
Var operator/(Var a, double b);
Var operator/(double a, Var b);
inline Var& operator+=(Var& a, Var b) { return a = a + b; }
inline Var& operator-=(Var& a, Var b) { return a = a - b; }
inline Var& operator*=(Var& a, Var b) { return a = a * b; }

Var exp(Var x);
Var sqrt(Var x);
Var relu(Var x);
Var sigmoid(Var x);
Var sin(Var x);
Var cos(Var x);

// Plain-double twins, so code templated on the scalar type reads the same.
// sigmoid uses the same operation sequence as the tape primitive.
inline double relu(double x) { return x > 0.0 ? x : 0.0; }
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
using std::cos;
using std::exp;
using std::sin;
using std::sqrt;

inline double value_of(double x) { return x; }
inline double value_of(Var x) { return x.value(); }

using ScalarFn = std::function<Var(Tape&, std::span<const Var>)>;

std::vector<double> grad_inputs(const ScalarFn& f, std::span<const double> x);
double second_derivative(const ScalarFn& f, std::span<const double> x, std::size_t i,
                         std::size_t j);
/// Gradient of `loss` aligned with `params`; parameters the loss does not
/// depend on get exactly 0.
std::vector<double> param_grad(Var loss, std::span<const Var> params);

struct FdReport {
  double first = 0.0;   // max discrepancy over all first derivatives
  double second = 0.0;  // max discrepancy over all (i, j) second derivatives
};

/// Compares grad_inputs/second_derivative with central differences of f.
/// Discrepancy is |ad - fd| / max(1, |ad|, |fd|).
FdReport fd_check(const ScalarFn& f, std::span<const double> x, double step);

}  // namespace vpinn::ad
