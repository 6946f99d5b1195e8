#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "crnlyap/exact_linalg.hpp"
#include "crnlyap/structure.hpp"
#include "support.hpp"

using namespace crnlyap;
using namespace crnlyap::testing;

namespace {

// Random mass-action network over n species with small coefficients.
ReactionNetwork random_network(std::mt19937_64& rng, std::size_t n, std::size_t r) {
  std::vector<std::string> species;
  for (std::size_t j = 0; j < n; ++j) species.push_back("X" + std::to_string(j));
  std::uniform_int_distribution<int> coeff(0, 2);
  std::set<std::pair<Complex, Complex>> seen;
  std::vector<Reaction> reactions;
  for (int attempt = 0; attempt < 1000 && reactions.size() < r; ++attempt) {
    std::vector<int> a(n), b(n);
    for (auto& v : a) v = coeff(rng) == 2 ? coeff(rng) : 0;
    for (auto& v : b) v = coeff(rng) == 2 ? coeff(rng) : 0;
    Complex ca = Complex::from_dense(a), cb = Complex::from_dense(b);
    if (ca == cb || !seen.emplace(ca, cb).second) continue;
    reactions.push_back(Reaction{ca, cb, Rational(1)});
  }
  return ReactionNetwork(species, reactions);
}

// Union-find over species, linking species that share a reaction.
std::size_t count_species_components(const ReactionNetwork& n) {
  std::vector<std::size_t> parent(n.num_species());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::vector<bool> used(n.num_species(), false);
  for (const auto& r : n.reactions()) {
    std::vector<std::size_t> members;
    for (const auto& [j, c] : r.reactant.terms()) members.push_back(j);
    for (const auto& [j, c] : r.product.terms()) members.push_back(j);
    for (auto j : members) used[j] = true;
    for (std::size_t k = 1; k < members.size(); ++k) parent[find(members[k])] = find(members[0]);
  }
  std::set<std::size_t> roots;
  for (std::size_t j = 0; j < n.num_species(); ++j) {
    if (used[j]) roots.insert(find(j));
  }
  return roots.size();
}

}  // namespace

TEST(Structure, BirthDeathSource) {
  const auto rep = analyze(net("2S1 <-> 0 @ 1, 1"));
  EXPECT_EQ(rep.stoich_matrix, (IntMatrix(1, 2) << -2, 2).finished());
  EXPECT_EQ(rep.dim_s, 1u);
  EXPECT_EQ(rep.num_complexes, 2u);
  EXPECT_EQ(rep.num_linkage_classes, 1u);
  EXPECT_EQ(rep.deficiency, 0);
  EXPECT_TRUE(rep.weakly_reversible);
  EXPECT_EQ(rep.conservation_basis.cols(), 0);
}

TEST(Structure, Sub1Compound) {
  const auto spec = load_compound("networks/sub1_compound.crnc");
  const auto rep = analyze(spec.network);
  EXPECT_EQ(rep.dim_s, 3u);
  EXPECT_EQ(rep.deficiency, 2);
  EXPECT_FALSE(rep.weakly_reversible);
}

TEST(Structure, AutocaTau4Compound) {
  const auto spec = load_compound("networks/autoca_tau4.crnc");
  EXPECT_EQ(spec.network.num_reactions(), 8u);
  const auto rep = analyze(spec.network);
  EXPECT_EQ(rep.dim_s, 3u);
  EXPECT_EQ(rep.deficiency, 4);
}

TEST(Structure, AutocaTau2Compound) {
  const auto rep = analyze(load_compound("networks/autoca_tau2.crnc").network);
  EXPECT_EQ(rep.dim_s, 2u);
  EXPECT_EQ(rep.deficiency, 2);
  EXPECT_FALSE(rep.weakly_reversible);
}

TEST(Structure, CalvinConservation) {
  const auto n = load_network("networks/calvin.crn");
  const auto rep = analyze(n);
  EXPECT_EQ(rep.dim_s + static_cast<std::size_t>(rep.conservation_basis.cols()), n.num_species());
  EXPECT_TRUE((rep.conservation_basis.transpose() * rep.stoich_matrix).isZero());
  EXPECT_TRUE(rep.weakly_reversible);
  EXPECT_EQ(rep.deficiency, 0);
}

TEST(Structure, WeakReversibility) {
  EXPECT_TRUE(analyze(net("A -> B @ 1\nB -> C @ 1\nC -> A @ 1")).weakly_reversible);
  EXPECT_FALSE(analyze(net("A -> B @ 1\nB -> C @ 1")).weakly_reversible);
  EXPECT_TRUE(analyze(net("A <-> B @ 1, 1\n2C -> D @ 1\nD -> 2C @ 1")).weakly_reversible);
}

TEST(Structure, CompatibilityClass) {
  const auto part = net("2A -> 2B @ 1\nB -> A @ 2\n");
  const auto rep = analyze(part);
  EXPECT_TRUE(same_compatibility_class(rep, vec({1.0, 1.0}), vec({1.0, 1.0}), 1e-12));
  EXPECT_TRUE(same_compatibility_class(rep, vec({1.0, 1.0}), vec({1.5, 0.5}), 1e-12));
  // Adding a conservation vector leaves the class.
  const Eigen::VectorXd w = rep.conservation_basis.col(0).cast<double>();
  EXPECT_FALSE(same_compatibility_class(rep, vec({1.0, 1.0}), vec({1.0, 1.0}) + w, 1e-6));
  EXPECT_THROW(same_compatibility_class(rep, vec({1.0}), vec({1.0, 1.0}), 1e-12), NetworkError);
}

TEST(Structure, DecomposeSub1Compound) {
  const auto spec = load_compound("networks/sub1_compound.crnc");
  const auto parts = decompose_species_independent(spec.network);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts[0].species_map, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(parts[1].species_map, (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(parts[0].network.num_reactions(), 3u);
  EXPECT_EQ(parts[1].network.num_reactions(), 2u);
}

TEST(Structure, DecomposeSinglePartAndShared) {
  const auto n = net("A -> B @ 1\nB -> A @ 1");
  const auto parts = decompose_species_independent(n);
  ASSERT_EQ(parts.size(), 1u);
  EXPECT_EQ(parts[0].network, n);
  EXPECT_EQ(decompose_species_independent(load_compound("networks/autoca_tau2.crnc").network).size(), 1u);
}

TEST(StructureProperty, RandomNetworks) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 5;
    const std::size_t r = 1 + rng() % 7;
    const ReactionNetwork network = random_network(rng, n, r);
    const auto rep = analyze(network);
    // Columns are reaction vectors.
    for (std::size_t i = 0; i < network.num_reactions(); ++i) {
      EXPECT_EQ(rep.stoich_matrix.col(static_cast<Eigen::Index>(i)), network.reaction_vector(i));
    }
    EXPECT_GE(rep.deficiency, 0);
    EXPECT_EQ(rep.deficiency, static_cast<long long>(rep.num_complexes) -
                                  static_cast<long long>(rep.num_linkage_classes) -
                                  static_cast<long long>(rep.dim_s));
    // Exact left null space.
    EXPECT_TRUE((rep.conservation_basis.transpose() * rep.stoich_matrix).isZero());
    EXPECT_EQ(rep.dim_s + static_cast<std::size_t>(rep.conservation_basis.cols()), network.num_species());
    EXPECT_EQ(rep.dim_s, rank(rep.stoich_matrix));
    if (rep.dim_s > 0) {
      const Eigen::MatrixXd qtq = rep.subspace_basis.transpose() * rep.subspace_basis;
      EXPECT_TRUE(qtq.isIdentity(1e-12));
      for (std::size_t i = 0; i < network.num_reactions(); ++i) {
        EXPECT_LT(subspace_residual(rep, network.reaction_vector(i).cast<double>()), 1e-10);
      }
    }
    // Decomposition partitions the reactions and matches a union-find count.
    const auto parts = decompose_species_independent(network);
    EXPECT_EQ(parts.size(), count_species_components(network));
    std::vector<int> hits(network.num_reactions(), 0);
    std::set<std::size_t> species_seen;
    for (const auto& p : parts) {
      for (auto i : p.reaction_map) ++hits[i];
      for (auto j : p.species_map) EXPECT_TRUE(species_seen.insert(j).second);
    }
    for (int h : hits) EXPECT_EQ(h, 1);
  }
}

TEST(ExactLinalg, NullSpaceAndPrimitive) {
  const RationalMatrix m = to_rational((IntMatrix(2, 3) << 1, 2, 3, 2, 4, 6).finished());
  const auto ns = null_space(m, 3);
  ASSERT_EQ(ns.size(), 2u);
  for (const auto& v : ns) {
    EXPECT_EQ(v[0] + 2 * v[1] + 3 * v[2], 0);
  }
  EXPECT_EQ(primitive_integer({make_rational(1, 2), make_rational(-3, 4)}), (IntVector(2) << 2, -3).finished());
  EXPECT_EQ(rref(m).rank(), 1u);
}
