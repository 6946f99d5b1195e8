#include "crnlyap/model.hpp"

#include <cmath>
#include <set>
#include <unordered_set>

namespace crnlyap {

namespace {

double int_power(double base, int exponent) {
  double result = 1.0;
  for (int e = 0; e < exponent; ++e) result *= base;
  return result;
}

void check_dimension(const ReactionNetwork& net, const State& x) {
  if (static_cast<std::size_t>(x.size()) != net.num_species()) {
    throw NetworkError("state has " + std::to_string(x.size()) + " entries but the network has " +
                       std::to_string(net.num_species()) + " species");
  }
}

}  // namespace

Complex::Complex(std::map<std::size_t, int> coefficients) {
  for (const auto& [species, coeff] : coefficients) {
    if (coeff < 0) throw NetworkError("negative stoichiometric coefficient");
    if (coeff > 0) terms_.emplace(species, coeff);
  }
}

Complex Complex::from_dense(const std::vector<int>& dense) {
  std::map<std::size_t, int> terms;
  for (std::size_t j = 0; j < dense.size(); ++j) {
    if (dense[j] != 0) terms.emplace(j, dense[j]);
  }
  return Complex(std::move(terms));
}

int Complex::coefficient(std::size_t species) const {
  const auto it = terms_.find(species);
  return it == terms_.end() ? 0 : it->second;
}

int Complex::molecularity() const {
  int total = 0;
  for (const auto& [_, coeff] : terms_) total += coeff;
  return total;
}

std::vector<int> Complex::dense(std::size_t num_species) const {
  std::vector<int> out(num_species, 0);
  for (const auto& [species, coeff] : terms_) out.at(species) = coeff;
  return out;
}

ReactionNetwork::ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions)
    : species_(std::move(species)), reactions_(std::move(reactions)) {
  std::unordered_set<std::string> names;
  for (const auto& name : species_) {
    if (name.empty()) throw NetworkError("empty species name");
    if (!names.insert(name).second) throw NetworkError("duplicate species name '" + name + "'");
  }
  if (reactions_.empty()) throw NetworkError("a network needs at least one reaction");

  std::set<std::pair<Complex, Complex>> seen;
  for (std::size_t i = 0; i < reactions_.size(); ++i) {
    const auto& r = reactions_[i];
    for (const auto* c : {&r.reactant, &r.product}) {
      for (const auto& [j, _] : c->terms()) {
        if (j >= species_.size()) {
          throw NetworkError("reaction " + std::to_string(i) + " references unknown species index " +
                             std::to_string(j));
        }
      }
    }
    if (r.rate <= 0) throw NetworkError("reaction " + std::to_string(i) + " has a non-positive rate");
    if (r.reactant == r.product) {
      throw NetworkError("reaction " + std::to_string(i) + " is a self-loop reaction");
    }
    if (!seen.emplace(r.reactant, r.product).second) {
      throw NetworkError("reaction " + std::to_string(i) + " duplicates an earlier reaction");
    }
  }
}

SpeciesId ReactionNetwork::species_id(std::size_t index) const {
  return SpeciesId{index, species_.at(index)};
}

std::optional<std::size_t> ReactionNetwork::find_species(const std::string& name) const {
  for (std::size_t j = 0; j < species_.size(); ++j) {
    if (species_[j] == name) return j;
  }
  return std::nullopt;
}

IntVector ReactionNetwork::reaction_vector(std::size_t i) const {
  const auto& r = reactions_.at(i);
  IntVector out = IntVector::Zero(static_cast<Eigen::Index>(species_.size()));
  for (const auto& [j, c] : r.product.terms()) out(static_cast<Eigen::Index>(j)) += c;
  for (const auto& [j, c] : r.reactant.terms()) out(static_cast<Eigen::Index>(j)) -= c;
  return out;
}

IntVector ReactionNetwork::reactant_vector(std::size_t i) const {
  const auto& r = reactions_.at(i);
  IntVector out = IntVector::Zero(static_cast<Eigen::Index>(species_.size()));
  for (const auto& [j, c] : r.reactant.terms()) out(static_cast<Eigen::Index>(j)) = c;
  return out;
}

void check_nonnegative_state(const ReactionNetwork& net, const State& x) {
  check_dimension(net, x);
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (!std::isfinite(x(j))) throw NetworkError("state entry " + std::to_string(j) + " is not finite");
    if (x(j) < 0.0) throw NetworkError("negative concentration at species " + net.species()[j]);
  }
}

void check_positive_state(const ReactionNetwork& net, const State& x) {
  check_dimension(net, x);
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (!(x(j) > 0.0) || !std::isfinite(x(j))) {
      throw NetworkError("state entry for species " + net.species()[j] + " must be positive and finite");
    }
  }
}

double reaction_rate(const ReactionNetwork& net, std::size_t i, const State& x) {
  check_nonnegative_state(net, x);
  const auto& r = net.reaction(i);
  double rate = r.rate_value();
  for (const auto& [j, c] : r.reactant.terms()) rate *= int_power(x(static_cast<Eigen::Index>(j)), c);
  return rate;
}

Eigen::VectorXd reaction_rates(const ReactionNetwork& net, const State& x) {
  check_nonnegative_state(net, x);
  Eigen::VectorXd rates(static_cast<Eigen::Index>(net.num_reactions()));
  for (std::size_t i = 0; i < net.num_reactions(); ++i) {
    const auto& r = net.reaction(i);
    double rate = r.rate_value();
    for (const auto& [j, c] : r.reactant.terms()) rate *= int_power(x(static_cast<Eigen::Index>(j)), c);
    rates(static_cast<Eigen::Index>(i)) = rate;
  }
  return rates;
}

State vector_field(const ReactionNetwork& net, const State& x) {
  const Eigen::VectorXd rates = reaction_rates(net, x);
  State dx = State::Zero(x.size());
  for (std::size_t i = 0; i < net.num_reactions(); ++i) {
    const auto& r = net.reaction(i);
    const double rate = rates(static_cast<Eigen::Index>(i));
    for (const auto& [j, c] : r.product.terms()) dx(static_cast<Eigen::Index>(j)) += rate * c;
    for (const auto& [j, c] : r.reactant.terms()) dx(static_cast<Eigen::Index>(j)) -= rate * c;
  }
  return dx;
}

Eigen::MatrixXd rate_jacobian(const ReactionNetwork& net, const State& x) {
  check_nonnegative_state(net, x);
  const auto n = static_cast<Eigen::Index>(net.num_species());
  const auto r = static_cast<Eigen::Index>(net.num_reactions());
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(r, n);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& reaction = net.reaction(static_cast<std::size_t>(i));
    const double k = reaction.rate_value();
    for (const auto& [a, ca] : reaction.reactant.terms()) {
      double term = k * ca * int_power(x(static_cast<Eigen::Index>(a)), ca - 1);
      for (const auto& [b, cb] : reaction.reactant.terms()) {
        if (b != a) term *= int_power(x(static_cast<Eigen::Index>(b)), cb);
      }
      jac(i, static_cast<Eigen::Index>(a)) = term;
    }
  }
  return jac;
}

Eigen::MatrixXd vector_field_jacobian(const ReactionNetwork& net, const State& x) {
  const Eigen::MatrixXd rj = rate_jacobian(net, x);
  const auto n = static_cast<Eigen::Index>(net.num_species());
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(net.num_reactions()));
  for (std::size_t i = 0; i < net.num_reactions(); ++i) {
    gamma.col(static_cast<Eigen::Index>(i)) = net.reaction_vector(i).cast<double>();
  }
  return gamma * rj;
}

}  // namespace crnlyap
