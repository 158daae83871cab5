#include "vpinn/autodiff.hpp"

#include <algorithm>
#include <cstring>
#include <limits>

namespace vpinn::ad {

const char* op_name(Op op) {
  switch (op) {
    case Op::Input: return "input";
    case Op::Const: return "const";
    case Op::Copy: return "copy";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Neg: return "neg";
    case Op::Exp: return "exp";
    case Op::Sqrt: return "sqrt";
    case Op::Relu: return "relu";
    case Op::Sigmoid: return "sigmoid";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
  }
  return "?";
}

Var Tape::push(Op op, std::int32_t a, std::int32_t b, double value) {
  if (nodes_.size() >= static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw std::length_error("tape: node limit exceeded");
  }
  nodes_.push_back({op, a, b, value});
  return Var(this, static_cast<std::int32_t>(nodes_.size() - 1));
}

void Tape::check_owner(Var x) const {
  if (x.tape_ != this) {
    throw std::invalid_argument("tape: operand belongs to a different tape");
  }
}

Var Tape::input(double v) { return push(Op::Input, -1, -1, v); }
Var Tape::constant(double v) { return push(Op::Const, -1, -1, v); }

Var Tape::copy(Var x) {
  check_owner(x);
  return push(Op::Copy, x.index_, -1, x.value());
}

double Tape::evaluate(const Node& n) const {
  const double a = n.a >= 0 ? nodes_[static_cast<std::size_t>(n.a)].value : 0.0;
  const double b = n.b >= 0 ? nodes_[static_cast<std::size_t>(n.b)].value : 0.0;
  switch (n.op) {
    case Op::Input:
    case Op::Const: return n.value;
    case Op::Copy: return a;
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return a / b;
    case Op::Neg: return -a;
    case Op::Exp: return std::exp(a);
    case Op::Sqrt: return std::sqrt(a);
    case Op::Relu: return relu(a);
    case Op::Sigmoid: return sigmoid(a);
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
  }
  return 0.0;
}

Var Tape::unary(Op op, Var x) {
  check_owner(x);
  const Node probe{op, x.index_, -1, 0.0};
  if (op == Op::Sqrt && x.value() < 0.0) {
    throw EvaluationError("sqrt of negative value " + std::to_string(x.value()) + " at node " +
                              std::to_string(nodes_.size()),
                          nodes_.size());
  }
  return push(op, x.index_, -1, evaluate(probe));
}

Var Tape::binary(Op op, Var x, Var y) {
  check_owner(x);
  check_owner(y);
  if (op == Op::Div && y.value() == 0.0) {
    throw EvaluationError("division by zero at node " + std::to_string(nodes_.size()),
                          nodes_.size());
  }
  const Node probe{op, x.index_, y.index_, 0.0};
  return push(op, x.index_, y.index_, evaluate(probe));
}

std::vector<Var> Tape::gradient(Var y, std::span<const Var> wrt) {
  check_owner(y);
  const auto top = static_cast<std::size_t>(y.index_);
  std::int32_t lowest = y.index_;
  for (const Var& w : wrt) {
    check_owner(w);
    lowest = std::min(lowest, w.index_);
  }

  // adjoint[i] is the node holding dy/d(node i), or -1 for structural zero.
  std::vector<std::int32_t> adjoint(top + 1, -1);
  adjoint[top] = constant(1.0).index_;

  auto accumulate = [&](std::int32_t k, Var contribution) {
    auto& slot = adjoint[static_cast<std::size_t>(k)];
    slot = slot < 0 ? contribution.index_ : (Var(this, slot) + contribution).index_;
  };

  for (std::int32_t i = y.index_; i >= lowest; --i) {
    const std::int32_t gi = adjoint[static_cast<std::size_t>(i)];
    if (gi < 0) continue;
    // Copy the node: accumulate() may reallocate nodes_.
    const Node n = nodes_[static_cast<std::size_t>(i)];
    const Var g(this, gi);
    const Var self(this, i);
    const Var a(this, n.a);
    const Var b(this, n.b);
    switch (n.op) {
      case Op::Input:
      case Op::Const: break;
      case Op::Copy: accumulate(n.a, g); break;
      case Op::Add:
        accumulate(n.a, g);
        accumulate(n.b, g);
        break;
      case Op::Sub:
        accumulate(n.a, g);
        accumulate(n.b, -g);
        break;
      case Op::Mul:
        accumulate(n.a, g * b);
        accumulate(n.b, g * a);
        break;
      case Op::Div:
        accumulate(n.a, g / b);
        accumulate(n.b, -(g * self) / b);
        break;
      case Op::Neg: accumulate(n.a, -g); break;
      case Op::Exp: accumulate(n.a, g * self); break;
      case Op::Sqrt: accumulate(n.a, (g * 0.5) / self); break;
      case Op::Relu:
        // Derivative at exactly 0 is taken as 0.
        if (a.value() > 0.0) accumulate(n.a, g);
        break;
      case Op::Sigmoid: accumulate(n.a, g * (self - self * self)); break;
      case Op::Sin: accumulate(n.a, g * ad::cos(a)); break;
      case Op::Cos: accumulate(n.a, -(g * ad::sin(a))); break;
    }
  }

  std::vector<Var> out;
  out.reserve(wrt.size());
  for (const Var& w : wrt) {
    const std::int32_t gi =
        w.index_ > y.index_ ? -1 : adjoint[static_cast<std::size_t>(w.index_)];
    out.push_back(gi < 0 ? constant(0.0) : Var(this, gi));
  }
  return out;
}

Var Tape::gradient(Var y, Var wrt) {
  const Var w[] = {wrt};
  return gradient(y, w)[0];
}

std::vector<double> Tape::gradient_values(Var y, std::span<const Var> wrt) const {
  check_owner(y);
  std::int32_t lowest = y.index_;
  for (const Var& w : wrt) {
    check_owner(w);
    lowest = std::min(lowest, w.index_);
  }
  std::vector<double> adjoint(static_cast<std::size_t>(y.index_) + 1, 0.0);
  adjoint[static_cast<std::size_t>(y.index_)] = 1.0;

  for (std::int32_t i = y.index_; i >= lowest; --i) {
    const double g = adjoint[static_cast<std::size_t>(i)];
    if (g == 0.0) continue;
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    const auto ia = static_cast<std::size_t>(n.a);
    const auto ib = static_cast<std::size_t>(n.b);
    switch (n.op) {
      case Op::Input:
      case Op::Const: break;
      case Op::Copy: adjoint[ia] += g; break;
      case Op::Add:
        adjoint[ia] += g;
        adjoint[ib] += g;
        break;
      case Op::Sub:
        adjoint[ia] += g;
        adjoint[ib] -= g;
        break;
      case Op::Mul:
        adjoint[ia] += g * nodes_[ib].value;
        adjoint[ib] += g * nodes_[ia].value;
        break;
      case Op::Div:
        adjoint[ia] += g / nodes_[ib].value;
        adjoint[ib] -= (g * n.value) / nodes_[ib].value;
        break;
      case Op::Neg: adjoint[ia] -= g; break;
      case Op::Exp: adjoint[ia] += g * n.value; break;
      case Op::Sqrt: adjoint[ia] += (g * 0.5) / n.value; break;
      case Op::Relu:
        if (nodes_[ia].value > 0.0) adjoint[ia] += g;
        break;
      case Op::Sigmoid: adjoint[ia] += g * (n.value - n.value * n.value); break;
      case Op::Sin: adjoint[ia] += g * std::cos(nodes_[ia].value); break;
      case Op::Cos: adjoint[ia] -= g * std::sin(nodes_[ia].value); break;
    }
  }

  std::vector<double> out;
  out.reserve(wrt.size());
  for (const Var& w : wrt) {
    out.push_back(w.index_ > y.index_ ? 0.0 : adjoint[static_cast<std::size_t>(w.index_)]);
  }
  return out;
}

bool Tape::replay_matches() const {
  for (const Node& n : nodes_) {
    const double v = evaluate(n);
    if (std::memcmp(&v, &n.value, sizeof v) != 0) return false;
  }
  return true;
}

namespace {
Tape& tape_of(Var a, Var b) {
  if (a.tape() == nullptr || a.tape() != b.tape()) {
    throw std::invalid_argument("autodiff: operands on different or missing tapes");
  }
  return *a.tape();
}
Tape& tape_of(Var a) {
  if (a.tape() == nullptr) throw std::invalid_argument("autodiff: operand without tape");
  return *a.tape();
}
}  // namespace

Var operator+(Var a, Var b) { return tape_of(a, b).binary(Op::Add, a, b); }
Var operator-(Var a, Var b) { return tape_of(a, b).binary(Op::Sub, a, b); }
Var operator*(Var a, Var b) { return tape_of(a, b).binary(Op::Mul, a, b); }
Var operator/(Var a, Var b) { return tape_of(a, b).binary(Op::Div, a, b); }
Var operator-(Var a) { return tape_of(a).unary(Op::Neg, a); }
Var operator+(Var a, double b) { return a + tape_of(a).constant(b); }
Var operator+(double a, Var b) { return tape_of(b).constant(a) + b; }
Var operator-(Var a, double b) { return a - tape_of(a).constant(b); }
Var operator-(double a, Var b) { return tape_of(b).constant(a) - b; }
Var operator*(Var a, double b) { return a * tape_of(a).constant(b); }
Var operator*(double a, Var b) { return tape_of(b).constant(a) * b; }
Var operator/(Var a, double b) { return a / tape_of(a).constant(b); }
Var operator/(double a, Var b) { return tape_of(b).constant(a) / b; }

Var exp(Var x) { return tape_of(x).unary(Op::Exp, x); }
Var sqrt(Var x) { return tape_of(x).unary(Op::Sqrt, x); }
Var relu(Var x) { return tape_of(x).unary(Op::Relu, x); }
Var sigmoid(Var x) { return tape_of(x).unary(Op::Sigmoid, x); }
Var sin(Var x) { return tape_of(x).unary(Op::Sin, x); }
Var cos(Var x) { return tape_of(x).unary(Op::Cos, x); }

std::vector<double> grad_inputs(const ScalarFn& f, std::span<const double> x) {
  Tape tape;
  std::vector<Var> in;
  in.reserve(x.size());
  for (double xi : x) in.push_back(tape.input(xi));
  const Var y = f(tape, in);
  return tape.gradient_values(y, in);
}

double second_derivative(const ScalarFn& f, std::span<const double> x, std::size_t i,
                         std::size_t j) {
  if (i >= x.size() || j >= x.size()) {
    throw std::out_of_range("second_derivative: index out of range");
  }
  Tape tape;
  std::vector<Var> in;
  in.reserve(x.size());
  for (double xi : x) in.push_back(tape.input(xi));
  const Var y = f(tape, in);
  const Var dy_di = tape.gradient(y, in[i]);
  const Var wrt[] = {in[j]};
  return tape.gradient_values(dy_di, wrt)[0];
}

std::vector<double> param_grad(Var loss, std::span<const Var> params) {
  if (!loss.valid()) throw std::invalid_argument("param_grad: loss has no tape");
  return loss.tape()->gradient_values(loss, params);
}

FdReport fd_check(const ScalarFn& f, std::span<const double> x, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("fd_check: step must be positive");
  const std::size_t n = x.size();

  auto eval = [&](const std::vector<double>& p) {
    Tape tape;
    std::vector<Var> in;
    for (double v : p) in.push_back(tape.input(v));
    return f(tape, in).value();
  };
  auto discrepancy = [](double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
  };

  FdReport report;
  const std::vector<double> base(x.begin(), x.end());
  const std::vector<double> g = grad_inputs(f, x);
  const double f0 = eval(base);
  for (std::size_t i = 0; i < n; ++i) {
    auto plus = base;
    auto minus = base;
    plus[i] += step;
    minus[i] -= step;
    const double fp = eval(plus);
    const double fm = eval(minus);
    report.first = std::max(report.first, discrepancy(g[i], (fp - fm) / (2.0 * step)));

    const double fd_ii = (fp - 2.0 * f0 + fm) / (step * step);
    report.second = std::max(report.second, discrepancy(second_derivative(f, x, i, i), fd_ii));
    for (std::size_t j = i + 1; j < n; ++j) {
      auto pp = base, pm = base, mp = base, mm = base;
      pp[i] += step, pp[j] += step;
      pm[i] += step, pm[j] -= step;
      mp[i] -= step, mp[j] += step;
      mm[i] -= step, mm[j] -= step;
      const double fd_ij = (eval(pp) - eval(pm) - eval(mp) + eval(mm)) / (4.0 * step * step);
      report.second = std::max(report.second, discrepancy(second_derivative(f, x, i, j), fd_ij));
    }
  }
  return report;
}

}  // namespace vpinn::ad
