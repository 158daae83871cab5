#include "vpinn/nets.hpp"

#include <charconv>
#include <cstring>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "vpinn/errors.hpp"

namespace vpinn {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Relu: return "relu";
    case Activation::Identity: return "none";
  }
  return "?";
}

const char* schedule_name(ActivationSchedule s) {
  return s == ActivationSchedule::Alternating ? "alternating" : "all-sigmoid";
}

const char* role_name(NetworkRole r) {
  switch (r) {
    case NetworkRole::Displacement: return "displacement";
    case NetworkRole::Velocity: return "velocity";
    case NetworkRole::Pressure: return "pressure";
  }
  return "?";
}

ActivationSchedule parse_schedule(const std::string& s) {
  if (s == "alternating") return ActivationSchedule::Alternating;
  if (s == "all-sigmoid") return ActivationSchedule::AllSigmoid;
  throw ConfigError("unknown activation schedule '" + s + "'");
}

int role_input_dim(NetworkRole) { return 3; }

int role_output_dim(NetworkRole role) { return role == NetworkRole::Velocity ? 2 : 1; }

Activation activation_for_layer(int layer, int depth, ActivationSchedule schedule) {
  if (layer == depth) return Activation::Identity;
  if (schedule == ActivationSchedule::AllSigmoid) return Activation::Sigmoid;
  return layer % 2 == 1 ? Activation::Sigmoid : Activation::Relu;
}

std::size_t param_count(int depth, int hidden_width, int in_dim, int out_dim) {
  if (depth < 2) throw ConfigError("network depth must be >= 2, got " + std::to_string(depth));
  const auto M = static_cast<std::size_t>(hidden_width);
  const auto in = static_cast<std::size_t>(in_dim);
  const auto out = static_cast<std::size_t>(out_dim);
  const auto hidden_transitions = static_cast<std::size_t>(depth - 2);
  return M * (in + 1) + hidden_transitions * M * (M + 1) + out * (M + 1);
}

FieldNetwork::FieldNetwork(int depth, int hidden_width, int in_dim, int out_dim,
                           ActivationSchedule schedule)
    : hidden_width_(hidden_width), schedule_(schedule) {
  if (depth < 2) throw ConfigError("network depth must be >= 2, got " + std::to_string(depth));
  if (hidden_width < 1 || in_dim < 1 || out_dim < 1) {
    throw ConfigError("network widths must be positive");
  }
  std::size_t offset = 0;
  for (int l = 1; l <= depth; ++l) {
    LayerShape s;
    s.rows = l == depth ? out_dim : hidden_width;
    s.cols = l == 1 ? in_dim : hidden_width;
    s.activation = activation_for_layer(l, depth, schedule);
    s.weight_offset = offset;
    offset += static_cast<std::size_t>(s.rows) * static_cast<std::size_t>(s.cols);
    s.bias_offset = offset;
    offset += static_cast<std::size_t>(s.rows);
    layers_.push_back(s);
  }
  params_.assign(offset, 0.0);
}

FieldNetwork FieldNetwork::build(int depth, int hidden_width, int in_dim, int out_dim,
                                 std::uint64_t seed, ActivationSchedule schedule) {
  FieldNetwork net(depth, hidden_width, in_dim, out_dim, schedule);
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < net.layers_.size(); ++l) {
    const LayerShape& s = net.layers_[l];
    const double limit = std::sqrt(6.0 / static_cast<double>(s.rows + s.cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : net.weights(l)) w = dist(rng);
  }
  return net;
}

std::span<const double> FieldNetwork::weights(std::size_t layer) const {
  const LayerShape& s = layers_.at(layer);
  return {params_.data() + s.weight_offset, static_cast<std::size_t>(s.rows * s.cols)};
}
std::span<const double> FieldNetwork::biases(std::size_t layer) const {
  const LayerShape& s = layers_.at(layer);
  return {params_.data() + s.bias_offset, static_cast<std::size_t>(s.rows)};
}
std::span<double> FieldNetwork::weights(std::size_t layer) {
  const LayerShape& s = layers_.at(layer);
  return {params_.data() + s.weight_offset, static_cast<std::size_t>(s.rows * s.cols)};
}
std::span<double> FieldNetwork::biases(std::size_t layer) {
  const LayerShape& s = layers_.at(layer);
  return {params_.data() + s.bias_offset, static_cast<std::size_t>(s.rows)};
}

void FieldNetwork::zero_init_output() {
  const std::size_t last = layers_.size() - 1;
  for (double& w : weights(last)) w = 0.0;
  for (double& b : biases(last)) b = 0.0;
}

std::vector<ad::Var> FieldNetwork::bind(ad::Tape& tape) const {
  std::vector<ad::Var> out;
  out.reserve(params_.size());
  for (double p : params_) out.push_back(tape.input(p));
  return out;
}

std::vector<ad::Var> FieldNetwork::bind_constant(ad::Tape& tape) const {
  std::vector<ad::Var> out;
  out.reserve(params_.size());
  for (double p : params_) out.push_back(tape.constant(p));
  return out;
}

namespace {

template <class T>
T activate(Activation a, T x) {
  using ad::relu;
  using ad::sigmoid;
  switch (a) {
    case Activation::Sigmoid: return sigmoid(x);
    case Activation::Relu: return relu(x);
    case Activation::Identity: return x;
  }
  return x;
}

// Shared by the tape and plain paths so both perform identical operations:
// acc = W_i0 x_0; acc += W_ij x_j; acc += b_i; activation.
template <class T, class ParamAt>
std::vector<T> run_layers(const std::vector<LayerShape>& layers, ParamAt param,
                          std::vector<T> x) {
  for (const LayerShape& s : layers) {
    if (static_cast<int>(x.size()) != s.cols) {
      throw DimensionError("network input has " + std::to_string(x.size()) +
                           " entries, layer expects " + std::to_string(s.cols));
    }
    std::vector<T> y;
    y.reserve(static_cast<std::size_t>(s.rows));
    for (int i = 0; i < s.rows; ++i) {
      const std::size_t row = s.weight_offset + static_cast<std::size_t>(i * s.cols);
      T acc = param(row) * x[0];
      for (int j = 1; j < s.cols; ++j) acc = acc + param(row + static_cast<std::size_t>(j)) * x[static_cast<std::size_t>(j)];
      acc = acc + param(s.bias_offset + static_cast<std::size_t>(i));
      y.push_back(activate(s.activation, acc));
    }
    x = std::move(y);
  }
  return x;
}

}  // namespace

std::vector<ad::Var> FieldNetwork::forward(std::span<const ad::Var> params,
                                           std::span<const ad::Var> input) const {
  if (params.size() != params_.size()) {
    throw DimensionError("forward: got " + std::to_string(params.size()) +
                         " parameter nodes, network has " + std::to_string(params_.size()));
  }
  if (static_cast<int>(input.size()) != in_dim()) {
    throw DimensionError("forward: input has " + std::to_string(input.size()) +
                         " entries, network expects " + std::to_string(in_dim()));
  }
  return run_layers<ad::Var>(
      layers_, [&](std::size_t k) { return params[k]; },
      std::vector<ad::Var>(input.begin(), input.end()));
}

std::vector<double> FieldNetwork::evaluate(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != in_dim()) {
    throw DimensionError("evaluate: input has " + std::to_string(input.size()) +
                         " entries, network expects " + std::to_string(in_dim()));
  }
  return run_layers<double>(
      layers_, [&](std::size_t k) { return params_[k]; },
      std::vector<double>(input.begin(), input.end()));
}

bool FieldNetwork::operator==(const FieldNetwork& other) const {
  if (schedule_ != other.schedule_ || hidden_width_ != other.hidden_width_ ||
      layers_.size() != other.layers_.size() || params_.size() != other.params_.size()) {
    return false;
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].rows != other.layers_[l].rows || layers_[l].cols != other.layers_[l].cols ||
        layers_[l].activation != other.layers_[l].activation) {
      return false;
    }
  }
  // Bitwise comparison; -0.0 vs 0.0 or NaN payloads count as different.
  for (std::size_t k = 0; k < params_.size(); ++k) {
    if (std::memcmp(&params_[k], &other.params_[k], sizeof(double)) != 0) return false;
  }
  return true;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    // from_chars does not accept "inf"/"nan" spelled by to_chars on all
    // platforms; fall back to strtod for those.
    char* end = nullptr;
    v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) {
      throw FormatError("cannot parse number '" + token + "'");
    }
  }
  return v;
}

void write_network(std::ostream& out, const FieldNetwork& net) {
  out << "network " << net.depth() << ' ' << net.in_dim() << ' ' << net.out_dim() << ' '
      << net.hidden_width() << ' ' << schedule_name(net.schedule()) << '\n';
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    const LayerShape& s = net.layers()[l];
    out << "layer " << l + 1 << ' ' << s.rows << ' ' << s.cols << ' '
        << activation_name(s.activation) << '\n';
    const char* sep = "";
    for (double w : net.weights(l)) {
      out << sep << format_double(w);
      sep = " ";
    }
    out << '\n';
    sep = "";
    for (double b : net.biases(l)) {
      out << sep << format_double(b);
      sep = " ";
    }
    out << '\n';
  }
  out << "end-network\n";
}

namespace {

std::string expect_word(std::istream& in, const char* word) {
  std::string tok;
  if (!(in >> tok) || tok != word) {
    throw FormatError(std::string("checkpoint: expected '") + word + "', found '" + tok + "'");
  }
  return tok;
}

int read_int(std::istream& in, const char* what) {
  long long v = 0;
  if (!(in >> v)) throw FormatError(std::string("checkpoint: cannot read ") + what);
  return static_cast<int>(v);
}

}  // namespace

FieldNetwork read_network(std::istream& in) {
  expect_word(in, "network");
  const int depth = read_int(in, "depth");
  const int in_dim = read_int(in, "input dimension");
  const int out_dim = read_int(in, "output dimension");
  const int width = read_int(in, "hidden width");
  std::string schedule;
  in >> schedule;
  FieldNetwork net = FieldNetwork::build(depth, width, in_dim, out_dim, 0, parse_schedule(schedule));
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    const LayerShape s = net.layers()[l];
    expect_word(in, "layer");
    const int index = read_int(in, "layer index");
    const int rows = read_int(in, "layer rows");
    const int cols = read_int(in, "layer cols");
    std::string act;
    in >> act;
    if (index != static_cast<int>(l) + 1 || rows != s.rows || cols != s.cols ||
        act != activation_name(s.activation)) {
      throw FormatError("checkpoint: layer " + std::to_string(l + 1) + " expected " +
                        std::to_string(s.rows) + "x" + std::to_string(s.cols) + " " +
                        activation_name(s.activation) + ", found " + std::to_string(rows) + "x" +
                        std::to_string(cols) + " " + act);
    }
    std::string tok;
    for (double& w : net.weights(l)) {
      if (!(in >> tok)) throw FormatError("checkpoint: truncated weights");
      w = parse_double(tok);
    }
    for (double& b : net.biases(l)) {
      if (!(in >> tok)) throw FormatError("checkpoint: truncated biases");
      b = parse_double(tok);
    }
  }
  expect_word(in, "end-network");
  return net;
}

void ensure_architecture(const FieldNetwork& net, const std::string& name, int depth,
                         int hidden_width, int in_dim, int out_dim) {
  if (net.depth() != depth || net.hidden_width() != hidden_width || net.in_dim() != in_dim ||
      net.out_dim() != out_dim) {
    std::ostringstream msg;
    msg << name << " network architecture mismatch: expected depth " << depth << " width "
        << hidden_width << " in " << in_dim << " out " << out_dim << ", found depth "
        << net.depth() << " width " << net.hidden_width() << " in " << net.in_dim() << " out "
        << net.out_dim();
    throw FormatError(msg.str());
  }
}

FsiNetworks FsiNetworks::build(const NetworkArchitecture& arch, std::uint64_t seed) {
  FsiNetworks n;
  n.velocity = FieldNetwork::build(arch.depth, arch.velocity_width, 3, 2, seed * 3 + 1, arch.schedule);
  n.pressure = FieldNetwork::build(arch.depth, arch.pressure_width, 3, 1, seed * 3 + 2, arch.schedule);
  n.displacement =
      FieldNetwork::build(arch.depth, arch.displacement_width, 3, 1, seed * 3 + 3, arch.schedule);
  n.displacement.zero_init_output();
  return n;
}

bool FsiNetworks::operator==(const FsiNetworks& other) const {
  return velocity == other.velocity && pressure == other.pressure &&
         displacement == other.displacement;
}

std::size_t fluid_param_count(const std::string& spec) {
  const auto x = spec.find('x');
  const auto dash = spec.find('-');
  if (x == std::string::npos || dash == std::string::npos || dash < x) {
    throw ConfigError("architecture spec must look like 12x30-split or 12x30-single, got '" +
                      spec + "'");
  }
  int depth = 0;
  int width = 0;
  const auto r1 = std::from_chars(spec.data(), spec.data() + x, depth);
  const auto r2 = std::from_chars(spec.data() + x + 1, spec.data() + dash, width);
  if (r1.ec != std::errc() || r1.ptr != spec.data() + x || r2.ec != std::errc() ||
      r2.ptr != spec.data() + dash || width < 1) {
    throw ConfigError("cannot parse depth and width in '" + spec + "'");
  }
  const std::string kind = spec.substr(dash + 1);
  if (kind == "single") return param_count(depth, width, 3, 3);
  if (kind == "split") {
    if (width % 3 != 0) throw ConfigError("split width must be divisible by 3, got " + spec);
    return param_count(depth, 2 * width / 3, 3, 2) + param_count(depth, width / 3, 3, 1);
  }
  throw ConfigError("architecture kind must be 'split' or 'single', got '" + kind + "'");
}

}  // namespace vpinn
