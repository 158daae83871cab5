#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "vpinn/autodiff.hpp"
#include "vpinn/nets.hpp"

namespace vpinn::ad {
namespace {

std::vector<double> grad1(const ScalarFn& f, std::initializer_list<double> x) {
  const std::vector<double> v(x);
  return grad_inputs(f, v);
}

TEST(GradInputs, Square) {
  const auto g = grad1([](Tape&, std::span<const Var> x) { return x[0] * x[0]; }, {3.0});
  EXPECT_EQ(g[0], 6.0);
}

TEST(GradInputs, Bilinear) {
  const auto g = grad1([](Tape&, std::span<const Var> x) { return x[0] * x[1]; }, {2.0, 5.0});
  EXPECT_EQ(g[0], 5.0);
  EXPECT_EQ(g[1], 2.0);
}

TEST(GradInputs, SigmoidAtZero) {
  const auto g = grad1([](Tape&, std::span<const Var> x) { return sigmoid(x[0]); }, {0.0});
  EXPECT_DOUBLE_EQ(g[0], 0.25);
}

TEST(GradInputs, DivisionByZeroNamesNode) {
  const std::vector<double> x{0.0};
  try {
    grad_inputs([](Tape&, std::span<const Var> v) { return 1.0 / v[0]; }, x);
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_GE(e.node(), 1u);
    EXPECT_NE(std::string(e.what()).find("node"), std::string::npos);
  }
}

TEST(GradInputs, SqrtOfNegativeIsAnError) {
  const std::vector<double> x{-1.0};
  EXPECT_THROW(grad_inputs([](Tape&, std::span<const Var> v) { return sqrt(v[0]); }, x),
               EvaluationError);
}

TEST(SecondDerivative, Cubic) {
  const std::vector<double> x{2.0};
  EXPECT_DOUBLE_EQ(second_derivative([](Tape&, std::span<const Var> v) { return v[0] * v[0] * v[0]; }, x, 0, 0),
                   12.0);
}

TEST(SecondDerivative, MixedPartial) {
  const std::vector<double> x{0.3, -0.7};
  EXPECT_EQ(second_derivative([](Tape&, std::span<const Var> v) { return v[0] * v[1]; }, x, 0, 1), 1.0);
}

TEST(SecondDerivative, ReluLinearRegion) {
  const std::vector<double> x{1.0};
  EXPECT_EQ(second_derivative([](Tape&, std::span<const Var> v) { return relu(v[0]); }, x, 0, 0), 0.0);
}

TEST(SecondDerivative, ReluKinkTakesZeroSlope) {
  const auto g = grad1([](Tape&, std::span<const Var> x) { return relu(x[0]); }, {0.0});
  EXPECT_EQ(g[0], 0.0);
}

TEST(ParamGrad, Square) {
  Tape t;
  const Var w = t.input(3.0);
  const std::vector<Var> p{w};
  EXPECT_EQ(param_grad(w * w, p)[0], 6.0);
}

TEST(ParamGrad, SquaredInputDerivative) {
  for (double xv : {-1.5, 0.0, 2.0}) {
    Tape t;
    const Var w = t.input(3.0);
    const Var x = t.input(xv);
    const Var d = t.gradient(w * x, x);
    const std::vector<Var> p{w};
    EXPECT_DOUBLE_EQ(param_grad(d * d, p)[0], 6.0);
  }
}

TEST(ParamGrad, ConstantLossGivesZeros) {
  Tape t;
  const std::vector<Var> p{t.input(1.0), t.input(2.0)};
  const Var loss = t.constant(4.0) + 1.0;
  for (double g : param_grad(loss, p)) EXPECT_EQ(g, 0.0);
}

TEST(FdCheck, Square) {
  const std::vector<double> x{1.0};
  const auto r = fd_check([](Tape&, std::span<const Var> v) { return v[0] * v[0]; }, x, 1e-4);
  EXPECT_LT(r.first, 1e-6);
}

TEST(FdCheck, QuadraticSecondDerivative) {
  const std::vector<double> x{0.4, -1.3};
  const auto r = fd_check(
      [](Tape&, std::span<const Var> v) { return 3.0 * v[0] * v[0] - v[0] * v[1] + 0.5 * v[1] * v[1]; }, x, 1e-3);
  EXPECT_LT(r.second, 1e-6);
}

TEST(FdCheck, LinearFirstDerivative) {
  const std::vector<double> x{0.4, -1.3};
  const auto r = fd_check([](Tape&, std::span<const Var> v) { return 2.0 * v[0] - 5.0 * v[1] + 1.0; }, x, 1e-3);
  EXPECT_LT(r.first, 1e-10);
}

struct Primitive {
  const char* name;
  ScalarFn f;
};

std::vector<Primitive> primitives() {
  return {
      {"add", [](Tape&, std::span<const Var> x) { return x[0] + x[1]; }},
      {"sub", [](Tape&, std::span<const Var> x) { return x[0] - x[1]; }},
      {"mul", [](Tape&, std::span<const Var> x) { return x[0] * x[1]; }},
      {"div", [](Tape&, std::span<const Var> x) { return x[0] / (x[1] * x[1] + 0.5); }},
      {"neg", [](Tape&, std::span<const Var> x) { return -(x[0] * x[1]); }},
      {"exp", [](Tape&, std::span<const Var> x) { return exp(x[0] * x[1]); }},
      {"sqrt", [](Tape&, std::span<const Var> x) { return sqrt(x[0] * x[0] + x[1] * x[1] + 0.1); }},
      {"relu", [](Tape&, std::span<const Var> x) { return relu(x[0] - 0.3 * x[1]); }},
      {"sigmoid", [](Tape&, std::span<const Var> x) { return sigmoid(x[0] * x[1]); }},
      {"sin", [](Tape&, std::span<const Var> x) { return sin(x[0] + 2.0 * x[1]); }},
      {"cos", [](Tape&, std::span<const Var> x) { return cos(x[0] * x[1]); }},
      {"composite",
       [](Tape&, std::span<const Var> x) { return sigmoid(relu(x[0]) * exp(-1.0 * x[1] * x[1])) / (1.0 + x[0] * x[0]); }},
  };
}

double kink_distance(const char* name, double a, double b) {
  if (std::string(name) == "relu") return std::abs(a - 0.3 * b);
  if (std::string(name) == "composite") return std::abs(a);
  return 1.0;
}

TEST(Property, PrimitivesMatchCentralDifferences) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const auto& p : primitives()) {
    int tested = 0;
    while (tested < 100) {
      const std::vector<double> x{u(rng), u(rng)};
      if (kink_distance(p.name, x[0], x[1]) < 1e-3) continue;
      const auto g = grad_inputs(p.f, x);
      for (std::size_t i = 0; i < 2; ++i) {
        auto eval = [&](double h) {
          Tape t;
          std::vector<double> y = x;
          y[i] += h;
          return p.f(t, std::vector<Var>{t.input(y[0]), t.input(y[1])}).value();
        };
        const double fd = (eval(1e-5) - eval(-1e-5)) / 2e-5;
        EXPECT_LE(std::abs(g[i] - fd), 1e-5 * std::max(1.0, std::abs(fd))) << p.name << " d/dx" << i;
      }
      ++tested;
    }
  }
}

TEST(Property, SecondDerivativesAreSymmetric) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const auto& p : primitives()) {
    for (int k = 0; k < 20; ++k) {
      const std::vector<double> x{u(rng), u(rng)};
      const double a = second_derivative(p.f, x, 0, 1);
      const double b = second_derivative(p.f, x, 1, 0);
      EXPECT_LE(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(a))) << p.name;
    }
  }
}

TEST(Property, ArithmeticMatchesPlainDoubles) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const double a = u(rng), b = u(rng) + 3.0;
    Tape t;
    const Var x = t.input(a), y = t.input(b);
    const double plain = std::exp(a * b) / b - std::sqrt(b) + a * 0.5 - 1.0 / (1.0 + std::exp(-a));
    const Var v = exp(x * y) / y - sqrt(y) + x * 0.5 - sigmoid(x);
    EXPECT_EQ(v.value(), plain);
  }
}

TEST(Property, DerivativeExtractionKeepsValues) {
  Tape t;
  const Var x = t.input(0.7);
  const Var y = sigmoid(x) * x;
  const double before = y.value();
  const Var d = t.gradient(y, x);
  t.gradient(d, x);
  EXPECT_EQ(y.value(), before);
  EXPECT_TRUE(t.replay_matches());
}

TEST(Property, ReplayIsDeterministic) {
  const ScalarFn f = [](Tape& t, std::span<const Var> x) {
    const Var d = t.gradient(sigmoid(x[0] * x[1]) * x[0], x[0]);
    return d * d + relu(x[1]);
  };
  const std::vector<double> x{0.3, 1.1};
  EXPECT_EQ(grad_inputs(f, x), grad_inputs(f, x));
  Tape a, b;
  EXPECT_EQ(f(a, std::vector<Var>{a.input(0.3), a.input(1.1)}).value(),
            f(b, std::vector<Var>{b.input(0.3), b.input(1.1)}).value());
}

// Loss containing second input derivatives of a 2-layer network against
// finite differences over the parameters.
TEST(Property, ParamGradOfSecondDerivativeLossMatchesFd) {
  const FieldNetwork net = FieldNetwork::build(2, 4, 2, 1, 5);
  const std::vector<double> x{0.4, -0.2};
  auto loss = [&](Tape& t, std::span<const Var> params) {
    const std::vector<Var> in{t.input(x[0]), t.input(x[1])};
    const Var o = net.forward(params, in)[0];
    const Var dxx = t.gradient(t.gradient(o, in[0]), in[0]);
    const Var dy = t.gradient(o, in[1]);
    const Var e = dxx + dy;
    return e * e;
  };
  Tape t;
  const auto params = net.bind(t);
  const auto g = param_grad(loss(t, params), params);
  const std::vector<double> p0(net.params().begin(), net.params().end());
  for (std::size_t i = 0; i < p0.size(); ++i) {
    auto eval = [&](double h) {
      Tape s;
      std::vector<Var> q;
      for (std::size_t k = 0; k < p0.size(); ++k) q.push_back(s.constant(p0[k] + (k == i ? h : 0.0)));
      return loss(s, q).value();
    };
    const double fd = (eval(1e-5) - eval(-1e-5)) / 2e-5;
    EXPECT_LE(std::abs(g[i] - fd), 1e-3 * std::max(1e-6, std::abs(fd))) << "param " << i;
  }
}

}  // namespace
}  // namespace vpinn::ad
