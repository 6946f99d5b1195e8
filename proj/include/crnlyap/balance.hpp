#pragma once

#include <cstddef>
#include <vector>

#include "crnlyap/compose.hpp"
#include "crnlyap/model.hpp"

namespace crnlyap {

struct EquilibriumResult {
  State point;
  double residual = 0.0;  // max-norm of the vector field at `point`
  bool is_complex_balanced = false;
  bool is_reaction_vector_balanced = false;
  bool has_unpaired_reaction_vector = false;
  State class_anchor;
  int iterations = 0;
  int restarts = 0;
};

/// Newton failure; carries the best iterate found.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& message, State last_iterate, double residual)
      : NumericalError(message), last_iterate_(std::move(last_iterate)), residual_(residual) {}
  const State& last_iterate() const { return last_iterate_; }
  double residual() const { return residual_; }

 private:
  State last_iterate_;
  double residual_;
};

/// Positive equilibrium in the compatibility class of x0. Throws
/// ConvergenceError when neither x0 nor any of 8 perturbed starts converge.
EquilibriumResult find_equilibrium(const ReactionNetwork& net, const State& x0, double tol = 1e-10,
                                   int max_iter = 200);

/// Per complex, inflow minus outflow.
Eigen::VectorXd complex_imbalance(const ReactionNetwork& net, const State& x);

bool is_complex_balanced_at(const ReactionNetwork& net, const State& x, double tol);

struct ReactionVectorBalance {
  bool balanced = false;
  bool has_unpaired = false;  // some reaction vector has no opposite
  double max_imbalance = 0.0;
};

ReactionVectorBalance reaction_vector_balance(const ReactionNetwork& net, const State& x, double tol);

bool is_reaction_vector_balanced_at(const ReactionNetwork& net, const State& x, double tol);

struct AutocaRoots {
  std::size_t count = 0;
  std::vector<double> roots;  // ascending, positive
};

/// Positive roots s of sum_m k_m1 x_p s^(m-1) = k2 s, isolated exactly with
/// Sturm sequences over the rationals.
AutocaRoots autoca_equilibrium_count(const AutocaShape& shape, double x_p_star);
AutocaRoots autoca_equilibrium_count(const ReactionNetwork& subnet, double x_p_star);

}  // namespace crnlyap
