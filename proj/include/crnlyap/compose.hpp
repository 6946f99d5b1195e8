#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "crnlyap/model.hpp"
#include "crnlyap/parser.hpp"

namespace crnlyap {

enum class PartKind { sub1, autoca };

const char* to_string(PartKind kind);

/// Two-species autocatalytic network: S_i + (m-1) S_j -> m S_j for m in the
/// index set, plus the back-reaction S_j -> S_i.
struct AutocaShape {
  std::size_t source_species = 0;         // S_i, local index
  std::size_t autocatalytic_species = 1;  // S_j, local index
  std::vector<int> index_set;             // ascending, contains 1
  int tau = 1;
  std::map<int, Rational> rates_k_m1;
  Rational rate_k2;
  std::size_t back_reaction = 0;          // local index of S_j -> S_i
  std::map<int, std::size_t> forward_reaction;  // m -> local reaction index
  bool mass_conserved = false;
};

/// Throws NetworkError naming the offending reaction. When `source` is given,
/// that local species is taken as S_i; otherwise both assignments are tried,
/// preferring species 0.
AutocaShape validate_autoca(const ReactionNetwork& net, std::optional<std::size_t> source = std::nullopt);

struct CompoundPart {
  PartKind kind;
  ReactionNetwork network;
  std::vector<std::size_t> species_layout;   // local species -> global
  std::vector<std::size_t> reaction_layout;  // local reaction -> global
  std::optional<std::size_t> shared_global;  // autoca: global index of S_p
  std::optional<AutocaShape> shape;
};

struct CompoundSpec {
  PartKind kind;
  ReactionNetwork cbp_part;
  std::vector<std::size_t> cbp_layout;           // CBP species -> global
  std::vector<std::size_t> cbp_reaction_layout;  // CBP reaction -> global
  std::optional<std::vector<Rational>> cbp_weights;
  std::vector<CompoundPart> parts;
  ReactionNetwork network;  // the assembled compound

  std::size_t num_parts() const { return parts.size(); }
};

/// Species-disjoint union with one-dimensional parts. Part p (1-based) gets
/// species names prefixed `p{p}_` unless `rename` is false.
CompoundSpec compose_sub1(const ReactionNetwork& cbp, const std::vector<ReactionNetwork>& parts,
                          bool rename = true);

struct AutocaBinding {
  std::string shared;  // CBP species name
  ReactionNetwork autoca;
};

/// Shared species go first in the global order, then the remaining CBP
/// species, then one private species per part.
CompoundSpec compose_autoca(const ReactionNetwork& cbp, const std::vector<AutocaBinding>& bindings);

struct PartCondition {
  std::size_t part = 0;  // 1-based
  int tau = 0;
  bool mass_conserved = false;
  bool has_index_above_two = false;
  std::optional<double> stability_sum;  // sum (2-m) k_m1 x*^(m-1)
  std::optional<bool> stability_sum_positive;
  bool shared_stoichiometry_ok = false;  // 0/1 coefficients on the shared species
  bool cbp_consumes_shared = false;      // some CBP reaction has v_p = 1, v'_p = 0
};

struct UniquenessReport {
  bool all_tau_at_most_two = false;
  bool high_order_parts_conserved = false;
  bool uniqueness_guaranteed = false;
  std::optional<bool> stability_guaranteed;  // needs an equilibrium
  bool decomposition_conditions_hold = false;
  std::vector<PartCondition> parts;
};

/// Autoca compounds only; throws NetworkError otherwise.
UniquenessReport check_uniqueness_conditions(const CompoundSpec& spec,
                                             const std::optional<State>& equilibrium = std::nullopt);

/// Sum over m of (2-m) k_m1 s^(m-1).
double autoca_stability_sum(const AutocaShape& shape, double s);

/// Parses a `.crnc` file with sections `[cbp]` (optionally `d=...`),
/// `[sub1 p=N]`, and `[autoca p=N shared=NAME]`.
std::variant<CompoundSpec, std::vector<ParseDiagnostic>> parse_compound(std::string_view text);

/// Throws NetworkError carrying the first diagnostic.
CompoundSpec parse_compound_or_throw(std::string_view text);

/// Restriction of a global state to a part's local species.
State restrict_state(const State& x, const std::vector<std::size_t>& layout);

}  // namespace crnlyap
