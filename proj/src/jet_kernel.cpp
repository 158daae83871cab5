#include "vpinn/jet_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vpinn/errors.hpp"

namespace vpinn {

namespace {

using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using RowMajorMutMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

struct Derivs {
  double s0, s1, s2, s3;  // phi and its first three derivatives at a0
};

inline Derivs activation_derivs(Activation act, double a0) {
  switch (act) {
    case Activation::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-a0));
      const double d1 = s - s * s;
      return {s, d1, d1 * (1.0 - 2.0 * s), d1 * (1.0 - 6.0 * s + 6.0 * s * s)};
    }
    case Activation::Relu:
      // Kink at 0 takes derivative 0, as on the tape.
      return {a0 > 0.0 ? a0 : 0.0, a0 > 0.0 ? 1.0 : 0.0, 0.0, 0.0};
    case Activation::Identity: return {a0, 1.0, 0.0, 0.0};
  }
  return {a0, 1.0, 0.0, 0.0};
}

}  // namespace

void JetBatch::forward(const FieldNetwork& net, std::span<const double> inputs, int points,
                       const JetRequest& request) {
  const int in_dim = net.in_dim();
  if (points < 0 || inputs.size() != static_cast<std::size_t>(points) * static_cast<std::size_t>(in_dim)) {
    throw DimensionError("jet forward: expected " + std::to_string(points) + " x " +
                         std::to_string(in_dim) + " inputs, got " + std::to_string(inputs.size()));
  }
  request_ = request;
  points_ = points;
  outputs_ = net.out_dim();
  channels_ = request.channels();
  first_channel_.assign(static_cast<std::size_t>(in_dim), -1);
  second_channel_.assign(static_cast<std::size_t>(in_dim), -1);
  int c = 1;
  for (int dir : request.first) {
    if (dir < 0 || dir >= in_dim || first_channel_[static_cast<std::size_t>(dir)] >= 0) {
      throw DimensionError("jet forward: bad first-derivative direction " + std::to_string(dir));
    }
    first_channel_[static_cast<std::size_t>(dir)] = c++;
  }
  for (int dir : request.second) {
    if (dir < 0 || dir >= in_dim || first_channel_[static_cast<std::size_t>(dir)] < 0 ||
        second_channel_[static_cast<std::size_t>(dir)] >= 0) {
      throw DimensionError("jet forward: second derivative in direction " + std::to_string(dir) +
                           " needs the matching first derivative");
    }
    second_channel_[static_cast<std::size_t>(dir)] = c++;
  }

  const Eigen::Index B = points;
  const Eigen::Index C = channels_;
  const auto& layers = net.layers();
  pre_.resize(layers.size());
  post_.resize(layers.size() + 1);

  Eigen::MatrixXd& x0 = post_[0];
  x0.setZero(in_dim, C * B);
  for (Eigen::Index p = 0; p < B; ++p) {
    for (int k = 0; k < in_dim; ++k) x0(k, p) = inputs[static_cast<std::size_t>(p * in_dim + k)];
  }
  for (int dir : request.first) {
    const Eigen::Index ch = first_channel_[static_cast<std::size_t>(dir)];
    x0.row(dir).segment(ch * B, B).setOnes();
  }

  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerShape& s = layers[l];
    const RowMajorMap W(net.weights(l).data(), s.rows, s.cols);
    const Eigen::Map<const Eigen::VectorXd> b(net.biases(l).data(), s.rows);
    Eigen::MatrixXd& a = pre_[l];
    a.noalias() = W * post_[l];
    a.leftCols(B).colwise() += b;

    Eigen::MatrixXd& h = post_[l + 1];
    if (s.activation == Activation::Identity) {
      h = a;
      continue;
    }
    h.resize(s.rows, C * B);
    for (Eigen::Index p = 0; p < B; ++p) {
      for (Eigen::Index i = 0; i < s.rows; ++i) {
        const Derivs d = activation_derivs(s.activation, a(i, p));
        h(i, p) = d.s0;
        for (int dir : request.first) {
          const Eigen::Index col = first_channel_[static_cast<std::size_t>(dir)] * B + p;
          h(i, col) = d.s1 * a(i, col);
        }
        for (int dir : request.second) {
          const Eigen::Index c1 = first_channel_[static_cast<std::size_t>(dir)] * B + p;
          const Eigen::Index c2 = second_channel_[static_cast<std::size_t>(dir)] * B + p;
          h(i, c2) = d.s2 * a(i, c1) * a(i, c1) + d.s1 * a(i, c2);
        }
      }
    }
  }
  adj_.setZero(outputs_, C * B);
}

bool JetBatch::has_first(int dir) const {
  return dir >= 0 && dir < static_cast<int>(first_channel_.size()) &&
         first_channel_[static_cast<std::size_t>(dir)] >= 0;
}

bool JetBatch::has_second(int dir) const {
  return dir >= 0 && dir < static_cast<int>(second_channel_.size()) &&
         second_channel_[static_cast<std::size_t>(dir)] >= 0;
}

int JetBatch::first_channel(int dir) const {
  if (!has_first(dir)) {
    throw DimensionError("jet: first derivative in direction " + std::to_string(dir) +
                         " was not requested");
  }
  return first_channel_[static_cast<std::size_t>(dir)];
}

int JetBatch::second_channel(int dir) const {
  if (!has_second(dir)) {
    throw DimensionError("jet: second derivative in direction " + std::to_string(dir) +
                         " was not requested");
  }
  return second_channel_[static_cast<std::size_t>(dir)];
}

double JetBatch::first(int p, int o, int dir) const {
  return out()(o, first_channel(dir) * points_ + p);
}

double JetBatch::second(int p, int o, int dir) const {
  return out()(o, second_channel(dir) * points_ + p);
}

void JetBatch::add_adjoint_first(int p, int o, int dir, double g) {
  adj_(o, first_channel(dir) * points_ + p) += g;
}

void JetBatch::add_adjoint_second(int p, int o, int dir, double g) {
  adj_(o, second_channel(dir) * points_ + p) += g;
}

void JetBatch::backward(const FieldNetwork& net, std::span<double> grad) const {
  if (grad.size() != net.param_count()) {
    throw DimensionError("jet backward: gradient has " + std::to_string(grad.size()) +
                         " entries, network has " + std::to_string(net.param_count()));
  }
  const auto& layers = net.layers();
  if (pre_.size() != layers.size()) throw DimensionError("jet backward: forward() not run for this network");
  const Eigen::Index B = points_;

  Eigen::MatrixXd upstream = adj_;  // adjoint of post_[l + 1]
  Eigen::MatrixXd abar;
  for (std::size_t li = layers.size(); li-- > 0;) {
    const LayerShape& s = layers[li];
    const Eigen::MatrixXd& a = pre_[li];

    if (s.activation == Activation::Identity) {
      abar.swap(upstream);
    } else {
      abar.resize(s.rows, upstream.cols());
      for (Eigen::Index p = 0; p < B; ++p) {
        for (Eigen::Index i = 0; i < s.rows; ++i) {
          const Derivs d = activation_derivs(s.activation, a(i, p));
          double g0 = upstream(i, p) * d.s1;
          for (int dir : request_.first) {
            const Eigen::Index c1 = first_channel_[static_cast<std::size_t>(dir)] * B + p;
            double g1 = upstream(i, c1) * d.s1;
            g0 += upstream(i, c1) * d.s2 * a(i, c1);
            const int ch2 = second_channel_[static_cast<std::size_t>(dir)];
            if (ch2 >= 0) {
              const Eigen::Index c2 = ch2 * B + p;
              const double u2 = upstream(i, c2);
              g0 += u2 * (d.s3 * a(i, c1) * a(i, c1) + d.s2 * a(i, c2));
              g1 += u2 * 2.0 * d.s2 * a(i, c1);
              abar(i, c2) = u2 * d.s1;
            }
            abar(i, c1) = g1;
          }
          abar(i, p) = g0;
        }
      }
    }

    RowMajorMutMap gW(grad.data() + s.weight_offset, s.rows, s.cols);
    gW.noalias() += abar * post_[li].transpose();
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + s.bias_offset, s.rows);
    gb += abar.leftCols(B).rowwise().sum();

    if (li > 0) {
      const RowMajorMap W(net.weights(li).data(), s.rows, s.cols);
      upstream.noalias() = W.transpose() * abar;
    }
  }
}

std::vector<double> evaluate_batch(const FieldNetwork& net, std::span<const double> inputs,
                                   int points) {
  JetBatch batch;
  batch.forward(net, inputs, points, JetRequest::value_only());
  std::vector<double> out(static_cast<std::size_t>(points) * static_cast<std::size_t>(net.out_dim()));
  for (int p = 0; p < points; ++p) {
    for (int o = 0; o < net.out_dim(); ++o) {
      out[static_cast<std::size_t>(p * net.out_dim() + o)] = batch.value(p, o);
    }
  }
  return out;
}

}  // namespace vpinn
