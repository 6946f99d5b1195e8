#include "crnlyap/structure.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "crnlyap/exact_linalg.hpp"

namespace crnlyap {

namespace {

std::size_t complex_index(std::vector<Complex>& complexes, const Complex& c) {
  const auto it = std::find(complexes.begin(), complexes.end(), c);
  if (it != complexes.end()) return static_cast<std::size_t>(it - complexes.begin());
  complexes.push_back(c);
  return complexes.size() - 1;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

// Tarjan's strongly connected components; returns the component id per vertex.
std::vector<std::size_t> strong_components(const std::vector<std::vector<std::size_t>>& adj) {
  const std::size_t n = adj.size();
  std::vector<long> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack, comp(n, 0);
  long counter = 0;
  std::size_t num_comp = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (auto w : adj[v]) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      while (true) {
        const auto w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = num_comp;
        if (w == v) break;
      }
      ++num_comp;
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] < 0) visit(v);
  }
  return comp;
}

}  // namespace

IntMatrix stoichiometric_matrix(const ReactionNetwork& net) {
  const auto n = static_cast<Eigen::Index>(net.num_species());
  const auto r = static_cast<Eigen::Index>(net.num_reactions());
  IntMatrix gamma(n, r);
  for (Eigen::Index i = 0; i < r; ++i) gamma.col(i) = net.reaction_vector(static_cast<std::size_t>(i));
  return gamma;
}

StructureReport analyze(const ReactionNetwork& net) {
  StructureReport report;
  const std::size_t n = net.num_species();
  report.stoich_matrix = stoichiometric_matrix(net);

  // Column basis of the stoichiometric matrix from pivot columns.
  const RowEchelon cols = rref(to_rational(report.stoich_matrix));
  report.dim_s = cols.rank();
  report.subspace_integer_basis.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(report.dim_s));
  for (std::size_t k = 0; k < report.dim_s; ++k) {
    report.subspace_integer_basis.col(static_cast<Eigen::Index>(k)) =
        report.stoich_matrix.col(static_cast<Eigen::Index>(cols.pivots[k]));
  }
  if (report.dim_s > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(report.subspace_integer_basis.cast<double>());
    report.subspace_basis = qr.householderQ() * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                                         static_cast<Eigen::Index>(report.dim_s));
  } else {
    report.subspace_basis.resize(static_cast<Eigen::Index>(n), 0);
  }

  // Left null space: null space of the transpose.
  const IntMatrix gamma_t = report.stoich_matrix.transpose();
  const auto laws = null_space(to_rational(gamma_t), n);
  report.conservation_basis.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(laws.size()));
  for (std::size_t k = 0; k < laws.size(); ++k) {
    report.conservation_basis.col(static_cast<Eigen::Index>(k)) = primitive_integer(laws[k]);
  }
  report.independent_rows = independent_rows(report.stoich_matrix);

  // Complex graph.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& r : net.reactions()) {
    const auto a = complex_index(report.complexes, r.reactant);
    const auto b = complex_index(report.complexes, r.product);
    edges.emplace_back(a, b);
  }
  const std::size_t c = report.complexes.size();
  report.num_complexes = c;

  UnionFind uf(c);
  std::vector<std::vector<std::size_t>> adj(c);
  for (const auto& [a, b] : edges) {
    uf.unite(a, b);
    adj[a].push_back(b);
  }
  std::vector<std::size_t> roots;
  report.linkage_class.resize(c);
  for (std::size_t v = 0; v < c; ++v) {
    const auto root = uf.find(v);
    auto it = std::find(roots.begin(), roots.end(), root);
    if (it == roots.end()) {
      roots.push_back(root);
      it = roots.end() - 1;
    }
    report.linkage_class[v] = static_cast<std::size_t>(it - roots.begin());
  }
  report.num_linkage_classes = roots.size();

  // Weakly reversible iff every edge stays inside one strongly connected component.
  const auto scc = strong_components(adj);
  report.weakly_reversible = std::all_of(edges.begin(), edges.end(),
                                         [&](const auto& e) { return scc[e.first] == scc[e.second]; });

  report.deficiency = static_cast<long long>(c) - static_cast<long long>(report.num_linkage_classes) -
                      static_cast<long long>(report.dim_s);
  return report;
}

double subspace_residual(const StructureReport& report, const Eigen::VectorXd& d) {
  if (d.size() != report.stoich_matrix.rows()) {
    throw NetworkError("vector has " + std::to_string(d.size()) + " entries, expected " +
                       std::to_string(report.stoich_matrix.rows()));
  }
  const Eigen::VectorXd proj = report.subspace_basis * (report.subspace_basis.transpose() * d);
  return (d - proj).norm();
}

bool same_compatibility_class(const StructureReport& report, const State& x0, const State& x, double tol) {
  if (x0.size() != x.size()) throw NetworkError("states have different dimensions");
  return subspace_residual(report, x - x0) < tol;
}

std::vector<SubnetworkPart> decompose_species_independent(const ReactionNetwork& net) {
  const std::size_t n = net.num_species();
  const std::size_t r = net.num_reactions();
  // Vertices: species 0..n-1, reactions n..n+r-1.
  UnionFind uf(n + r);
  for (std::size_t i = 0; i < r; ++i) {
    const auto& reaction = net.reaction(i);
    for (const auto* c : {&reaction.reactant, &reaction.product}) {
      for (const auto& [j, _] : c->terms()) uf.unite(j, n + i);
    }
  }

  std::vector<std::size_t> roots;
  std::vector<std::vector<std::size_t>> reactions_of;
  for (std::size_t i = 0; i < r; ++i) {
    const auto root = uf.find(n + i);
    auto it = std::find(roots.begin(), roots.end(), root);
    if (it == roots.end()) {
      roots.push_back(root);
      reactions_of.emplace_back();
      it = roots.end() - 1;
    }
    reactions_of[static_cast<std::size_t>(it - roots.begin())].push_back(i);
  }

  std::vector<SubnetworkPart> parts;
  for (std::size_t p = 0; p < roots.size(); ++p) {
    std::vector<std::size_t> species_map;
    std::vector<long> local(n, -1);
    for (std::size_t j = 0; j < n; ++j) {
      if (uf.find(j) == roots[p]) {
        local[j] = static_cast<long>(species_map.size());
        species_map.push_back(j);
      }
    }
    std::vector<std::string> names;
    for (auto j : species_map) names.push_back(net.species()[j]);
    auto relabel = [&](const Complex& c) {
      std::map<std::size_t, int> terms;
      for (const auto& [j, coeff] : c.terms()) terms.emplace(static_cast<std::size_t>(local[j]), coeff);
      return Complex(std::move(terms));
    };
    std::vector<Reaction> reactions;
    for (auto i : reactions_of[p]) {
      const auto& reaction = net.reaction(i);
      reactions.push_back(Reaction{relabel(reaction.reactant), relabel(reaction.product), reaction.rate});
    }
    parts.push_back(SubnetworkPart{ReactionNetwork(std::move(names), std::move(reactions)),
                                   std::move(species_map), reactions_of[p]});
  }
  return parts;
}

}  // namespace crnlyap
