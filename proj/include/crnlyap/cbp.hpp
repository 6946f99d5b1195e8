#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "crnlyap/model.hpp"

namespace crnlyap {

/// Positive diagonal matrix D, stored as its diagonal.
struct ScalingMatrix {
  std::vector<Rational> diag;

  bool is_identity() const;
  std::string to_string() const;
  friend bool operator==(const ScalingMatrix&, const ScalingMatrix&) = default;
};

/// Candidate values of one diagonal entry, ascending. `unconstrained` marks a
/// species with no net change in any reaction; its values are then just {1}.
struct FeasibleSet {
  bool unconstrained = false;
  std::vector<Rational> values;
};

struct CbpResult {
  ScalingMatrix scaling;
  ReactionNetwork network;  // products v + D^-1 (v' - v), rates k prod d^v
  ReactionNetwork source;
};

/// Per species, every d = p/q (p, q <= max_denominator) such that each
/// (v'_j - v_j)/d is an integer and v_j + (v'_j - v_j)/d >= 0.
std::vector<FeasibleSet> feasible_scalings(const ReactionNetwork& net, int max_denominator = 64);

/// Throws NetworkError for an identity, non-positive, or infeasible D, naming
/// the offending reaction and species.
CbpResult apply_scaling(const ReactionNetwork& net, const ScalingMatrix& d);

/// Applies every non-identity combination of feasible values in lexicographic
/// order (species 0 most significant), stopping after `limit` results.
/// Combinations that would merge two reactions are skipped and described in
/// `skipped` when given.
std::vector<CbpResult> enumerate_cbp(const ReactionNetwork& net, int max_denominator = 64, std::size_t limit = 1000,
                                     std::vector<std::string>* skipped = nullptr);

struct ConjugacyOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;
  int samples = 512;
};

/// Integrates the source from x0 and the CBP network from D^-1 x0 and returns
/// max_t || x_cbp(t) - D^-1 x(t) ||_inf over a uniform grid on [0, t_end].
double verify_conjugacy(const ReactionNetwork& source, const CbpResult& cbp, const State& x0, double t_end,
                        const ConjugacyOptions& options = {});

/// Looks for weights d (identity first) such that the network is a CBP image
/// of a network complex balanced at D x_star. Species in `pinned` keep d = 1.
/// Returns nullopt when no candidate with numerators and denominators up to
/// `max_denominator` works.
std::optional<std::vector<Rational>> find_helmholtz_weights(const ReactionNetwork& net, const State& x_star,
                                                            const std::vector<std::size_t>& pinned = {},
                                                            int max_denominator = 16, double rel_tol = 1e-9);

}  // namespace crnlyap
