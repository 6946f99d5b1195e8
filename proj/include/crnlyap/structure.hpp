#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "crnlyap/model.hpp"

namespace crnlyap {

struct StructureReport {
  IntMatrix stoich_matrix;              // n x r, column i is v'_i - v_i
  Eigen::MatrixXd subspace_basis;       // n x dim_s, orthonormal columns
  IntMatrix subspace_integer_basis;     // n x dim_s, independent columns of the stoichiometric matrix
  IntMatrix conservation_basis;         // n x (n - dim_s), primitive integer columns w with w^T G = 0
  std::vector<std::size_t> independent_rows;  // row basis of the stoichiometric matrix
  std::size_t dim_s = 0;
  std::vector<Complex> complexes;       // distinct complexes, first-appearance order
  std::vector<std::size_t> linkage_class;  // linkage class index per complex
  std::size_t num_complexes = 0;
  std::size_t num_linkage_classes = 0;
  bool weakly_reversible = false;
  long long deficiency = 0;
};

IntMatrix stoichiometric_matrix(const ReactionNetwork& net);

StructureReport analyze(const ReactionNetwork& net);

/// True iff x - x0 lies in the stoichiometric subspace, measured by the
/// Euclidean norm of the residual after orthogonal projection.
bool same_compatibility_class(const StructureReport& report, const State& x0, const State& x, double tol);

/// Euclidean norm of the component of d orthogonal to the stoichiometric subspace.
double subspace_residual(const StructureReport& report, const Eigen::VectorXd& d);

/// A subnetwork together with the global indices of its species and reactions.
struct SubnetworkPart {
  ReactionNetwork network;
  std::vector<std::size_t> species_map;   // local species index -> global
  std::vector<std::size_t> reaction_map;  // local reaction index -> global
};

/// Splits a network into connected components of the species-reaction graph.
/// Parts are ordered by their first reaction; species keep their global order.
/// Species that occur in no reaction belong to no part.
std::vector<SubnetworkPart> decompose_species_independent(const ReactionNetwork& net);

}  // namespace crnlyap
