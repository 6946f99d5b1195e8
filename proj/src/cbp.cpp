#include "crnlyap/cbp.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "crnlyap/parser.hpp"
#include "crnlyap/sim.hpp"

namespace crnlyap {

namespace {

bool is_integer(const Rational& r) { return boost::multiprecision::denominator(r) == 1; }

BigInt gcd_of_changes(const ReactionNetwork& net, std::size_t j, bool& any) {
  BigInt g = 0;
  any = false;
  for (std::size_t i = 0; i < net.num_reactions(); ++i) {
    const long long delta = net.reaction_vector(i)(static_cast<Eigen::Index>(j));
    if (delta != 0) {
      any = true;
      g = gcd(g, BigInt(delta < 0 ? -delta : delta));
    }
  }
  return g;
}

// Advances a mixed-radix counter; false when it wraps.
bool next_combination(std::vector<std::size_t>& idx, const std::vector<std::size_t>& sizes) {
  for (std::size_t k = idx.size(); k-- > 0;) {
    if (++idx[k] < sizes[k]) return true;
    idx[k] = 0;
  }
  return false;
}

}  // namespace

bool ScalingMatrix::is_identity() const {
  return std::all_of(diag.begin(), diag.end(), [](const Rational& d) { return d == 1; });
}

std::string ScalingMatrix::to_string() const {
  std::string out = "diag(";
  for (std::size_t j = 0; j < diag.size(); ++j) {
    if (j) out += ", ";
    out += crnlyap::to_string(diag[j]);
  }
  return out + ")";
}

std::vector<FeasibleSet> feasible_scalings(const ReactionNetwork& net, int max_denominator) {
  if (max_denominator < 1) throw NetworkError("max_denominator must be at least 1");
  const BigInt max_den = max_denominator;
  std::vector<FeasibleSet> sets(net.num_species());
  for (std::size_t j = 0; j < net.num_species(); ++j) {
    bool any = false;
    const BigInt g = gcd_of_changes(net, j, any);
    if (!any) {
      sets[j] = FeasibleSet{true, {Rational(1)}};
      continue;
    }
    // d = g/t; decreasing reactions need t <= g v / |delta|.
    BigInt t_max = g * max_den;
    for (std::size_t i = 0; i < net.num_reactions(); ++i) {
      const long long delta = net.reaction_vector(i)(static_cast<Eigen::Index>(j));
      if (delta < 0) {
        const BigInt bound = g * net.reaction(i).reactant.coefficient(j) / BigInt(-delta);
        t_max = std::min(t_max, bound);
      }
    }
    std::vector<Rational> values;
    for (BigInt t = 1; t <= t_max; ++t) {
      const Rational d(g, t);
      if (boost::multiprecision::numerator(d) <= max_den && boost::multiprecision::denominator(d) <= max_den) {
        values.push_back(d);
      }
    }
    std::sort(values.begin(), values.end());
    sets[j] = FeasibleSet{false, std::move(values)};
  }
  return sets;
}

CbpResult apply_scaling(const ReactionNetwork& net, const ScalingMatrix& d) {
  if (d.diag.size() != net.num_species()) {
    throw NetworkError("scaling has " + std::to_string(d.diag.size()) + " entries, expected " +
                       std::to_string(net.num_species()));
  }
  for (const auto& v : d.diag) {
    if (v <= 0) throw NetworkError("scaling entries must be positive");
  }
  if (d.is_identity()) throw NetworkError("identity scaling does not produce a CBP network");

  std::vector<Reaction> reactions;
  for (std::size_t i = 0; i < net.num_reactions(); ++i) {
    const auto& r = net.reaction(i);
    const IntVector delta = net.reaction_vector(i);
    std::map<std::size_t, int> product;
    Rational rate = r.rate;
    for (std::size_t j = 0; j < net.num_species(); ++j) {
      const int v = r.reactant.coefficient(j);
      const Rational entry = Rational(v) + Rational(delta(static_cast<Eigen::Index>(j))) / d.diag[j];
      if (!is_integer(entry) || entry < 0) {
        throw NetworkError("scaling " + d.to_string() + " is infeasible: reaction " + std::to_string(i) + " (" +
                           format_complex(net, r.reactant) + " -> " + format_complex(net, r.product) +
                           ") gets coefficient " + crnlyap::to_string(entry) + " for species " +
                           net.species()[j]);
      }
      if (entry > 0) product.emplace(j, boost::multiprecision::numerator(entry).convert_to<int>());
      if (v > 0) rate *= pow(d.diag[j], v);
    }
    reactions.push_back(Reaction{r.reactant, Complex(std::move(product)), rate});
  }
  try {
    return CbpResult{d, ReactionNetwork(net.species(), std::move(reactions)), net};
  } catch (const NetworkError& e) {
    throw NetworkError("scaling " + d.to_string() + " is infeasible: " + e.what());
  }
}

std::vector<CbpResult> enumerate_cbp(const ReactionNetwork& net, int max_denominator, std::size_t limit,
                                     std::vector<std::string>* skipped) {
  const auto sets = feasible_scalings(net, max_denominator);
  std::vector<std::size_t> sizes, idx(sets.size(), 0);
  for (const auto& s : sets) sizes.push_back(s.values.size());
  std::vector<CbpResult> out;
  if (limit == 0) return out;
  do {
    ScalingMatrix d;
    for (std::size_t j = 0; j < sets.size(); ++j) d.diag.push_back(sets[j].values[idx[j]]);
    if (d.is_identity()) continue;
    try {
      out.push_back(apply_scaling(net, d));
    } catch (const NetworkError& e) {
      if (skipped) skipped->push_back(e.what());
      continue;
    }
    if (out.size() >= limit) break;
  } while (next_combination(idx, sizes));
  return out;
}

double verify_conjugacy(const ReactionNetwork& source, const CbpResult& cbp, const State& x0, double t_end,
                        const ConjugacyOptions& options) {
  if (cbp.scaling.is_identity()) throw NetworkError("identity scaling is not a CBP transformation");
  if (cbp.scaling.diag.size() != source.num_species() || cbp.network.num_species() != source.num_species()) {
    throw NetworkError("CBP result does not match the source network");
  }
  check_positive_state(source, x0);
  Eigen::VectorXd dinv(x0.size());
  for (Eigen::Index j = 0; j < x0.size(); ++j) dinv(j) = 1.0 / to_double(cbp.scaling.diag[static_cast<std::size_t>(j)]);

  IntegrateOptions opts;
  opts.rel_tol = options.rel_tol;
  opts.abs_tol = options.abs_tol;
  opts.grid_points = options.samples;
  const Trajectory a = integrate(source, x0, t_end, opts);
  const Trajectory b = integrate(cbp.network, (x0.array() * dinv.array()).matrix(), t_end, opts);
  if (a.status != IntegrationStatus::ok || b.status != IntegrationStatus::ok) {
    throw NumericalError("integration failed while checking conjugacy");
  }
  const auto ga = resample(a, options.samples);
  const auto gb = resample(b, options.samples);
  double worst = 0.0;
  for (std::size_t k = 0; k < ga.states.size(); ++k) {
    const Eigen::VectorXd diff = gb.states[k] - (ga.states[k].array() * dinv.array()).matrix();
    worst = std::max(worst, diff.lpNorm<Eigen::Infinity>());
  }
  return worst;
}

std::optional<std::vector<Rational>> find_helmholtz_weights(const ReactionNetwork& net, const State& x_star,
                                                            const std::vector<std::size_t>& pinned,
                                                            int max_denominator, double rel_tol) {
  check_positive_state(net, x_star);
  const std::size_t n = net.num_species();
  const std::size_t r = net.num_reactions();
  const Eigen::VectorXd rates = reaction_rates(net, x_star);
  const double scale = std::max(1.0, rates.lpNorm<Eigen::Infinity>());
  const BigInt cap = max_denominator;

  // Candidate d_j = a/b with b | g_j, so that d_j * delta is integral, and
  // v + d_j * delta >= 0 for decreasing reactions.
  std::vector<std::vector<Rational>> candidates(n);
  for (std::size_t j = 0; j < n; ++j) {
    bool any = false;
    const BigInt g = gcd_of_changes(net, j, any);
    if (!any || std::find(pinned.begin(), pinned.end(), j) != pinned.end()) {
      candidates[j] = {Rational(1)};
      continue;
    }
    std::optional<Rational> upper;
    for (std::size_t i = 0; i < r; ++i) {
      const long long delta = net.reaction_vector(i)(static_cast<Eigen::Index>(j));
      if (delta < 0) {
        const Rational bound(net.reaction(i).reactant.coefficient(j), -delta);
        if (!upper || bound < *upper) upper = bound;
      }
    }
    std::set<Rational> values{Rational(1)};
    for (BigInt b = 1; b <= g && b <= cap; ++b) {
      if (g % b != 0) continue;
      for (BigInt a = 1; a <= cap; ++a) {
        const Rational d(a, b);
        if (upper && d > *upper) break;
        values.insert(d);
      }
    }
    candidates[j].assign(values.begin(), values.end());
  }

  auto balanced = [&](const std::vector<Rational>& d) {
    std::map<std::vector<Rational>, double> flow;
    for (std::size_t i = 0; i < r; ++i) {
      const auto& reaction = net.reaction(i);
      const IntVector delta = net.reaction_vector(i);
      std::vector<Rational> in(n), out(n);
      for (std::size_t j = 0; j < n; ++j) {
        in[j] = reaction.reactant.coefficient(j);
        out[j] = in[j] + d[j] * Rational(delta(static_cast<Eigen::Index>(j)));
      }
      const double rate = rates(static_cast<Eigen::Index>(i));
      flow[in] -= rate;
      flow[out] += rate;
    }
    return std::all_of(flow.begin(), flow.end(), [&](const auto& kv) { return std::abs(kv.second) < rel_tol * scale; });
  };

  const std::vector<Rational> identity(n, Rational(1));
  if (balanced(identity)) return identity;
  std::vector<std::size_t> sizes, idx(n, 0);
  double total = 1.0;
  for (const auto& c : candidates) {
    sizes.push_back(c.size());
    total *= static_cast<double>(c.size());
  }
  if (total > 2e5) return std::nullopt;
  do {
    std::vector<Rational> d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = candidates[j][idx[j]];
    if (balanced(d)) return d;
  } while (next_combination(idx, sizes));
  return std::nullopt;
}

}  // namespace crnlyap
