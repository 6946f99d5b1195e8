#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "crnlyap/compose.hpp"
#include "crnlyap/parser.hpp"

namespace crnlyap::testing {

inline std::string source_path(const std::string& rel) { return std::string(CRNLYAP_SOURCE_DIR) + "/" + rel; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ReactionNetwork load_network(const std::string& rel) { return parse_network_or_throw(read_file(source_path(rel))); }

inline CompoundSpec load_compound(const std::string& rel) {
  return parse_compound_or_throw(read_file(source_path(rel)));
}

inline ReactionNetwork net(const std::string& text) { return parse_network_or_throw(text); }

inline State vec(std::initializer_list<double> values) {
  State x(static_cast<Eigen::Index>(values.size()));
  Eigen::Index j = 0;
  for (double v : values) x(j++) = v;
  return x;
}

// Componentwise log-uniform in [x/spread, x*spread].
inline State log_uniform_around(const State& x, double spread, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-std::log(spread), std::log(spread));
  State y(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) y(j) = x(j) * std::exp(u(rng));
  return y;
}

// Central differences with step h * max(1, |x_j|).
inline Eigen::VectorXd fd_gradient(const std::function<double(const State&)>& f, const State& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double step = h * std::max(1.0, std::abs(x(j)));
    State a = x, b = x;
    a(j) += step;
    b(j) -= step;
    g(j) = (f(a) - f(b)) / (2 * step);
  }
  return g;
}

inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const State&)>& f, const State& x,
                                   double h = 1e-6) {
  const Eigen::Index m = f(x).size();
  Eigen::MatrixXd jac(m, x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double step = h * std::max(1.0, std::abs(x(j)));
    State a = x, b = x;
    a(j) += step;
    b(j) -= step;
    jac.col(j) = (f(a) - f(b)) / (2 * step);
  }
  return jac;
}

// max_j |a_j - b_j| / max(1, |b_j|)
inline double rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return ((a - b).array().abs() / b.array().abs().max(1.0)).maxCoeff();
}

}  // namespace crnlyap::testing
