#include "vpinn/optim.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "vpinn/errors.hpp"
#include "vpinn/nets.hpp"

namespace vpinn {

AdamState::AdamState(std::size_t n, AdamConfig config) : config_(config), m_(n, 0.0), v_(n, 0.0) {}

void AdamState::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw DimensionError("adam: state has " + std::to_string(m_.size()) + " entries, params " +
                         std::to_string(params.size()) + ", grads " + std::to_string(grads.size()));
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw std::domain_error("adam: non-finite gradient at parameter " + std::to_string(i));
    }
  }
  ++steps_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
  }
}

bool AdamState::operator==(const AdamState& other) const {
  auto same = [](const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
  };
  return steps_ == other.steps_ && config_.learning_rate == other.config_.learning_rate &&
         config_.beta1 == other.config_.beta1 && config_.beta2 == other.config_.beta2 &&
         config_.epsilon == other.config_.epsilon && same(m_, other.m_) && same(v_, other.v_);
}

namespace {

void write_line(std::ostream& out, const std::vector<double>& xs) {
  const char* sep = "";
  for (double x : xs) {
    out << sep << format_double(x);
    sep = " ";
  }
  out << '\n';
}

std::string next_token(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) throw FormatError(std::string("adam state: cannot read ") + what);
  return tok;
}

}  // namespace

void write_adam(std::ostream& out, const AdamState& s) {
  out << "adam " << s.m_.size() << ' ' << s.steps_ << ' ' << format_double(s.config_.learning_rate)
      << ' ' << format_double(s.config_.beta1) << ' ' << format_double(s.config_.beta2) << ' '
      << format_double(s.config_.epsilon) << '\n';
  write_line(out, s.m_);
  write_line(out, s.v_);
  out << "end-adam\n";
}

AdamState read_adam(std::istream& in) {
  if (next_token(in, "header") != "adam") throw FormatError("adam state: expected 'adam'");
  const auto n = static_cast<std::size_t>(std::stoull(next_token(in, "size")));
  AdamState s;
  s.steps_ = std::stoll(next_token(in, "step count"));
  s.config_.learning_rate = parse_double(next_token(in, "learning rate"));
  s.config_.beta1 = parse_double(next_token(in, "beta1"));
  s.config_.beta2 = parse_double(next_token(in, "beta2"));
  s.config_.epsilon = parse_double(next_token(in, "epsilon"));
  s.m_.resize(n);
  s.v_.resize(n);
  for (double& x : s.m_) x = parse_double(next_token(in, "first moment"));
  for (double& x : s.v_) x = parse_double(next_token(in, "second moment"));
  if (next_token(in, "footer") != "end-adam") throw FormatError("adam state: expected 'end-adam'");
  return s;
}

}  // namespace vpinn
