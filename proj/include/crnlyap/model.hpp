#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crnlyap/errors.hpp"
#include "crnlyap/rational.hpp"

namespace crnlyap {

/// Concentrations indexed by species.
using State = Eigen::VectorXd;
using IntVector = Eigen::Matrix<long long, Eigen::Dynamic, 1>;
using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

struct SpeciesId {
  std::size_t index = 0;
  std::string name;
};

/// A non-negative integer combination of species. Zero coefficients are never
/// stored, so the zero complex is the empty map.
class Complex {
 public:
  Complex() = default;
  explicit Complex(std::map<std::size_t, int> coefficients);

  static Complex from_dense(const std::vector<int>& dense);

  int coefficient(std::size_t species) const;
  const std::map<std::size_t, int>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Sum of coefficients.
  int molecularity() const;
  std::vector<int> dense(std::size_t num_species) const;

  friend bool operator==(const Complex&, const Complex&) = default;
  friend auto operator<=>(const Complex&, const Complex&) = default;

 private:
  std::map<std::size_t, int> terms_;
};

struct Reaction {
  Complex reactant;
  Complex product;
  Rational rate;

  double rate_value() const { return to_double(rate); }
  friend bool operator==(const Reaction&, const Reaction&) = default;
};

/// Species plus mass-action reactions. Validated on construction and
/// immutable afterwards.
class ReactionNetwork {
 public:
  /// Throws NetworkError on duplicate species names, out-of-range species
  /// references, non-positive rates, self-loops, duplicate reactions, or an
  /// empty reaction list.
  ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions);

  std::size_t num_species() const { return species_.size(); }
  std::size_t num_reactions() const { return reactions_.size(); }
  const std::vector<std::string>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  const Reaction& reaction(std::size_t i) const { return reactions_.at(i); }
  SpeciesId species_id(std::size_t index) const;
  std::optional<std::size_t> find_species(const std::string& name) const;

  /// v'_i - v_i as a dense integer vector.
  IntVector reaction_vector(std::size_t i) const;
  IntVector reactant_vector(std::size_t i) const;

  friend bool operator==(const ReactionNetwork&, const ReactionNetwork&) = default;

 private:
  std::vector<std::string> species_;
  std::vector<Reaction> reactions_;
};

/// k_i * prod_j x_j^{v_ji}, with 0^0 = 1.
double reaction_rate(const ReactionNetwork& net, std::size_t i, const State& x);

/// All reaction rates R(x).
Eigen::VectorXd reaction_rates(const ReactionNetwork& net, const State& x);

/// dx/dt = sum_i R_i(x) (v'_i - v_i).
State vector_field(const ReactionNetwork& net, const State& x);

/// Jacobian of the rate vector, r x n. Requires x >= 0.
Eigen::MatrixXd rate_jacobian(const ReactionNetwork& net, const State& x);

/// Jacobian of the vector field, n x n.
Eigen::MatrixXd vector_field_jacobian(const ReactionNetwork& net, const State& x);

/// Throws NetworkError unless x has one entry per species and all are >= 0.
void check_nonnegative_state(const ReactionNetwork& net, const State& x);

/// Throws NetworkError unless x has one entry per species and all are > 0.
void check_positive_state(const ReactionNetwork& net, const State& x);

}  // namespace crnlyap
