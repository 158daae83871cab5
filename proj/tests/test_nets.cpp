#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "vpinn/errors.hpp"
#include "vpinn/nets.hpp"

namespace vpinn {
namespace {

using ad::Tape;
using ad::Var;

TEST(ParamCount, FluidArchitectureTable) {
  // Width W splits as 2W/3 for N_u and W/3 for N_p.
  EXPECT_EQ(fluid_param_count("12x30-split"), 5473u);
  EXPECT_EQ(fluid_param_count("6x30-split"), 2293u);
  EXPECT_EQ(fluid_param_count("8x30-split"), 3353u);
  EXPECT_EQ(fluid_param_count("10x30-split"), 4413u);
  EXPECT_EQ(fluid_param_count("14x30-split"), 6533u);
  EXPECT_EQ(fluid_param_count("12x60-split"), 20943u);
  EXPECT_EQ(fluid_param_count("14x60-split"), 25063u);
  EXPECT_EQ(fluid_param_count("6x60-split"), 8583u);
  EXPECT_EQ(fluid_param_count("8x60-split"), 12703u);
  EXPECT_EQ(fluid_param_count("10x60-split"), 16823u);
  EXPECT_EQ(fluid_param_count("12x30-single"), 9513u);
}

TEST(ParamCount, MatchesBuiltNetworks) {
  const FieldNetwork u = FieldNetwork::build(12, 20, 3, 2, 1);
  const FieldNetwork p = FieldNetwork::build(12, 10, 3, 1, 2);
  EXPECT_EQ(u.param_count() + p.param_count(), 5473u);
  EXPECT_EQ(u.param_count(), param_count(12, 20, 3, 2));
  EXPECT_EQ(FieldNetwork::build(12, 30, 3, 3, 1).param_count(), 9513u);
  const FieldNetwork us = FieldNetwork::build(12, 20, 3, 2, 1, ActivationSchedule::AllSigmoid);
  const FieldNetwork ps = FieldNetwork::build(12, 10, 3, 1, 2, ActivationSchedule::AllSigmoid);
  EXPECT_EQ(us.param_count() + ps.param_count(), 5473u);
}

TEST(ParamCount, MalformedSpecs) {
  for (const char* s : {"12x30", "x30-split", "12x-split", "1x30-split", "12x30-double", "12x31-split"}) {
    EXPECT_THROW(fluid_param_count(s), ConfigError) << s;
  }
}

TEST(Build, RejectsShallowNetworks) {
  EXPECT_THROW(FieldNetwork::build(1, 10, 3, 1, 0), ConfigError);
}

TEST(Build, GlorotBoundsAndZeroBiases) {
  const FieldNetwork n = FieldNetwork::build(5, 16, 3, 2, 9);
  for (std::size_t l = 0; l < n.layers().size(); ++l) {
    const auto& s = n.layers()[l];
    const double bound = std::sqrt(6.0 / (s.rows + s.cols));
    for (double w : n.weights(l)) EXPECT_LE(std::abs(w), bound);
    for (double b : n.biases(l)) EXPECT_EQ(b, 0.0);
  }
  EXPECT_EQ(FieldNetwork::build(5, 16, 3, 2, 9), n);
  EXPECT_FALSE(FieldNetwork::build(5, 16, 3, 2, 10) == n);
}

TEST(Schedule, AlternatingLayers) {
  const FieldNetwork n = FieldNetwork::build(6, 4, 3, 1, 0);
  const Activation expect[] = {Activation::Sigmoid, Activation::Relu, Activation::Sigmoid,
                               Activation::Relu, Activation::Sigmoid, Activation::Identity};
  for (int l = 0; l < 6; ++l) EXPECT_EQ(n.layers()[static_cast<std::size_t>(l)].activation, expect[l]) << l;
  const FieldNetwork s = FieldNetwork::build(6, 4, 3, 1, 0, ActivationSchedule::AllSigmoid);
  for (int l = 0; l < 5; ++l) EXPECT_EQ(s.layers()[static_cast<std::size_t>(l)].activation, Activation::Sigmoid);
}

TEST(Schedule, EvenLayersAreExactRelu) {
  FieldNetwork n = FieldNetwork::build(3, 2, 1, 1, 0);
  // Layer 1: sigmoid, layer 2: relu, layer 3: identity. Make layer 2 pass its
  // pre-activation straight to a readable output.
  auto w1 = n.weights(0);
  w1[0] = 1.0;
  w1[1] = -1.0;
  auto w2 = n.weights(1);
  w2[0] = 1.0, w2[1] = 0.0, w2[2] = 0.0, w2[3] = 1.0;
  auto b2 = n.biases(1);
  b2[0] = -0.6;
  b2[1] = -0.6;
  auto w3 = n.weights(2);
  w3[0] = 1.0;
  w3[1] = 10.0;
  for (double x : {-2.0, 0.5, 3.0}) {
    const double h0 = 1.0 / (1.0 + std::exp(-x));
    const double h1 = 1.0 / (1.0 + std::exp(x));
    const double expect = std::max(0.0, h0 - 0.6) + 10.0 * std::max(0.0, h1 - 0.6);
    EXPECT_NEAR(n.evaluate(std::vector<double>{x})[0], expect, 1e-15);
  }
}

TEST(Forward, HandEvaluatedTwoLayerNetwork) {
  FieldNetwork n = FieldNetwork::build(2, 1, 1, 1, 0);
  for (double& p : n.params()) p = 1.0;
  // W2 sigmoid(W1 x + b1) + b2 at x = 0 with every parameter 1.
  const double expect = 1.0 / (1.0 + std::exp(-1.0)) + 1.0;
  EXPECT_DOUBLE_EQ(n.evaluate(std::vector<double>{0.0})[0], expect);
  Tape t;
  const auto params = n.bind(t);
  const std::vector<Var> in{t.input(0.0)};
  EXPECT_EQ(n.forward(params, in)[0].value(), n.evaluate(std::vector<double>{0.0})[0]);
}

TEST(Forward, DimensionMismatch) {
  const FieldNetwork n = FieldNetwork::build(3, 4, 3, 1, 0);
  EXPECT_THROW(n.evaluate(std::vector<double>{1.0, 2.0}), DimensionError);
  Tape t;
  const auto params = n.bind(t);
  const std::vector<Var> in{t.input(1.0)};
  EXPECT_THROW(n.forward(params, in), DimensionError);
}

TEST(ZeroInit, OutputAndInputGradientVanish) {
  FieldNetwork n = FieldNetwork::build(4, 6, 3, 1, 3);
  const FieldNetwork before = n;
  n.zero_init_output();
  for (std::size_t l = 0; l + 1 < n.layers().size(); ++l) {
    EXPECT_TRUE(std::equal(n.weights(l).begin(), n.weights(l).end(), before.weights(l).begin()));
  }
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 10; ++k) {
    const std::vector<double> x{u(rng), u(rng), u(rng)};
    EXPECT_EQ(n.evaluate(x)[0], 0.0);
    Tape t;
    const auto params = n.bind(t);
    std::vector<Var> in;
    for (double v : x) in.push_back(t.input(v));
    const Var o = n.forward(params, in)[0];
    for (double g : t.gradient_values(o, in)) EXPECT_EQ(g, 0.0);
    // d(o^2)/d b_L = 2 o = 0.
    const auto pg = ad::param_grad(o * o, params);
    const std::size_t bias = n.layers().back().bias_offset;
    EXPECT_EQ(pg[bias], 0.0);
  }
}

TEST(Property, SecondDerivativesMatchFiniteDifferences) {
  const FieldNetwork n = FieldNetwork::build(12, 30, 3, 1, 4);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  const double h = 1e-4;
  for (int k = 0; k < 30; ++k) {
    const std::vector<double> x{u(rng), u(rng), u(rng)};
    const ad::ScalarFn f = [&n](Tape& t, std::span<const Var> in) {
      return n.forward(n.bind_constant(t), in)[0];
    };
    for (std::size_t i = 0; i < 3; ++i) {
      const double d2 = ad::second_derivative(f, x, i, i);
      auto at = [&](double dh) {
        std::vector<double> y = x;
        y[i] += dh;
        return n.evaluate(y)[0];
      };
      const double fd = (at(h) - 2.0 * at(0.0) + at(-h)) / (h * h);
      EXPECT_LE(std::abs(d2 - fd), 1e-3 * std::max(1e-3, std::abs(d2))) << "point " << k << " dir " << i;
    }
  }
}

TEST(Checkpoint, BitExactRoundTrip) {
  const FieldNetwork n = FieldNetwork::build(5, 7, 3, 2, 8, ActivationSchedule::AllSigmoid);
  std::stringstream ss;
  write_network(ss, n);
  const FieldNetwork m = read_network(ss);
  EXPECT_EQ(m, n);
  EXPECT_EQ(m.schedule(), ActivationSchedule::AllSigmoid);
}

TEST(Checkpoint, ArchitectureMismatchNamesDimensions) {
  const FieldNetwork n = FieldNetwork::build(5, 7, 3, 2, 8);
  try {
    ensure_architecture(n, "velocity network", 12, 20, 3, 2);
    FAIL();
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("12"), std::string::npos);
    EXPECT_NE(msg.find("5"), std::string::npos);
  }
}

TEST(Checkpoint, TruncatedInputIsAnError) {
  const FieldNetwork n = FieldNetwork::build(3, 4, 3, 1, 8);
  std::stringstream ss;
  write_network(ss, n);
  std::string text = ss.str();
  text.resize(text.size() / 2);
  std::stringstream cut(text);
  EXPECT_THROW(read_network(cut), FormatError);
}

TEST(FsiNetworks, DefaultWidthsAndZeroDisplacement) {
  const FsiNetworks n = FsiNetworks::build(NetworkArchitecture{}, 3);
  EXPECT_EQ(n.velocity.param_count() + n.pressure.param_count(), 5473u);
  EXPECT_EQ(n.displacement.hidden_width(), 20);
  EXPECT_EQ(n.displacement.evaluate(std::vector<double>{0.1, 0.2, 0.3})[0], 0.0);
  EXPECT_EQ(FsiNetworks::build(NetworkArchitecture{}, 3), n);
}

}  // namespace
}  // namespace vpinn
