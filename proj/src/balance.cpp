#include "crnlyap/balance.hpp"

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "crnlyap/polynomial.hpp"
#include "crnlyap/structure.hpp"

namespace crnlyap {

namespace {

struct NewtonOutcome {
  bool converged = false;
  State x;
  double residual = 0.0;
  int iterations = 0;
};

class EquilibriumSystem {
 public:
  EquilibriumSystem(const ReactionNetwork& net, const State& anchor)
      : net_(net), report_(analyze(net)), anchor_(anchor) {
    gamma_ = report_.stoich_matrix.cast<double>();
    laws_ = report_.conservation_basis.cast<double>().transpose();
  }

  Eigen::Index size() const { return static_cast<Eigen::Index>(net_.num_species()); }

  Eigen::VectorXd residual(const State& x) const {
    const Eigen::VectorXd field = vector_field(net_, x);
    Eigen::VectorXd out(size());
    Eigen::Index k = 0;
    for (auto row : report_.independent_rows) out(k++) = field(static_cast<Eigen::Index>(row));
    if (laws_.rows() > 0) out.tail(laws_.rows()) = laws_ * (x - anchor_);
    return out;
  }

  Eigen::MatrixXd jacobian(const State& x) const {
    const Eigen::MatrixXd jf = gamma_ * rate_jacobian(net_, x);
    Eigen::MatrixXd out(size(), size());
    Eigen::Index k = 0;
    for (auto row : report_.independent_rows) out.row(k++) = jf.row(static_cast<Eigen::Index>(row));
    if (laws_.rows() > 0) out.bottomRows(laws_.rows()) = laws_;
    return out;
  }

  double field_residual(const State& x) const { return vector_field(net_, x).lpNorm<Eigen::Infinity>(); }

  NewtonOutcome solve(State x, double tol, int max_iter) const {
    NewtonOutcome out;
    Eigen::VectorXd f = residual(x);
    double merit = f.squaredNorm();
    int polish = 0;
    for (int iter = 0; iter < max_iter; ++iter) {
      out.iterations = iter;
      const double res = field_residual(x);
      const double drift = laws_.rows() > 0 ? (laws_ * (x - anchor_)).lpNorm<Eigen::Infinity>() : 0.0;
      if (res < tol && drift < tol * std::max(1.0, anchor_.lpNorm<Eigen::Infinity>())) {
        // A few extra steps push the residual toward machine precision.
        if (++polish > 3) break;
      }
      const Eigen::MatrixXd jac = jacobian(x);
      const Eigen::VectorXd step = jac.fullPivLu().solve(-f);
      if (!step.allFinite()) break;
      double lambda = 1.0;
      bool accepted = false;
      for (int halving = 0; halving <= 60; ++halving, lambda *= 0.5) {
        const State trial = x + lambda * step;
        if ((trial.array() <= 0.0).any()) continue;
        const Eigen::VectorXd ft = residual(trial);
        const double mt = ft.squaredNorm();
        if (std::isfinite(mt) && (mt < merit || (polish > 0 && mt <= merit))) {
          x = trial;
          f = ft;
          merit = mt;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
    out.x = x;
    out.residual = field_residual(x);
    const double drift = laws_.rows() > 0 ? (laws_ * (x - anchor_)).lpNorm<Eigen::Infinity>() : 0.0;
    // A tiny absolute residual near the boundary is not enough: the Newton step must also be small
    // relative to every coordinate, otherwise the iterate is still sliding toward a face.
    const Eigen::VectorXd last = jacobian(x).fullPivLu().solve(-f);
    const double rel_step = (last.array().abs() / x.array()).maxCoeff();
    out.converged = out.residual < tol && drift < tol * std::max(1.0, anchor_.lpNorm<Eigen::Infinity>()) &&
                    (x.array() > 0.0).all() && last.allFinite() && rel_step < 1e-6;
    return out;
  }

 private:
  const ReactionNetwork& net_;
  StructureReport report_;
  State anchor_;
  Eigen::MatrixXd gamma_;
  Eigen::MatrixXd laws_;
};

}  // namespace

EquilibriumResult find_equilibrium(const ReactionNetwork& net, const State& x0, double tol, int max_iter) {
  check_positive_state(net, x0);
  if (!(tol > 0.0)) throw NetworkError("tolerance must be positive");
  const EquilibriumSystem system(net, x0);

  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal(0.0, 1.0);
  NewtonOutcome best;
  best.residual = std::numeric_limits<double>::infinity();
  int restarts = 0;
  for (int attempt = 0; attempt <= 24; ++attempt) {
    State start = x0;
    if (attempt > 0) {
      ++restarts;
      for (Eigen::Index j = 0; j < start.size(); ++j) start(j) *= std::exp((1.0 + attempt / 8) * normal(rng));
    }
    NewtonOutcome out = system.solve(start, tol, max_iter);
    if (out.converged) {
      EquilibriumResult result;
      result.point = out.x;
      result.residual = out.residual;
      result.class_anchor = x0;
      result.iterations = out.iterations;
      result.restarts = restarts;
      const double balance_tol = std::max(tol, 1e-9) * std::max(1.0, reaction_rates(net, out.x).lpNorm<Eigen::Infinity>());
      result.is_complex_balanced = is_complex_balanced_at(net, out.x, balance_tol);
      const auto rvb = reaction_vector_balance(net, out.x, balance_tol);
      result.is_reaction_vector_balanced = rvb.balanced;
      result.has_unpaired_reaction_vector = rvb.has_unpaired;
      return result;
    }
    if (out.residual < best.residual) best = out;
  }
  std::ostringstream msg;
  msg << "equilibrium solver did not converge (best residual " << best.residual << ")";
  throw ConvergenceError(msg.str(),
                         best.x, best.residual);
}

Eigen::VectorXd complex_imbalance(const ReactionNetwork& net, const State& x) {
  const Eigen::VectorXd rates = reaction_rates(net, x);
  std::vector<Complex> complexes;
  std::vector<double> net_flow;
  auto index = [&](const Complex& c) {
    for (std::size_t k = 0; k < complexes.size(); ++k) {
      if (complexes[k] == c) return k;
    }
    complexes.push_back(c);
    net_flow.push_back(0.0);
    return complexes.size() - 1;
  };
  for (std::size_t i = 0; i < net.num_reactions(); ++i) {
    const auto& r = net.reaction(i);
    const double rate = rates(static_cast<Eigen::Index>(i));
    net_flow[index(r.reactant)] -= rate;
    net_flow[index(r.product)] += rate;
  }
  return Eigen::Map<Eigen::VectorXd>(net_flow.data(), static_cast<Eigen::Index>(net_flow.size()));
}

bool is_complex_balanced_at(const ReactionNetwork& net, const State& x, double tol) {
  check_positive_state(net, x);
  const Eigen::VectorXd imbalance = complex_imbalance(net, x);
  return (imbalance.array().abs() < tol).all();
}

ReactionVectorBalance reaction_vector_balance(const ReactionNetwork& net, const State& x, double tol) {
  check_positive_state(net, x);
  const Eigen::VectorXd rates = reaction_rates(net, x);
  std::map<std::vector<long long>, double> groups;
  for (std::size_t i = 0; i < net.num_reactions(); ++i) {
    const IntVector eta = net.reaction_vector(i);
    groups[std::vector<long long>(eta.data(), eta.data() + eta.size())] += rates(static_cast<Eigen::Index>(i));
  }
  ReactionVectorBalance out;
  for (const auto& [eta, total] : groups) {
    std::vector<long long> neg(eta.size());
    for (std::size_t j = 0; j < eta.size(); ++j) neg[j] = -eta[j];
    const auto it = groups.find(neg);
    double diff = total;
    if (it == groups.end()) {
      out.has_unpaired = true;
    } else {
      diff = total - it->second;
    }
    out.max_imbalance = std::max(out.max_imbalance, std::abs(diff));
  }
  out.balanced = out.max_imbalance < tol;
  return out;
}

bool is_reaction_vector_balanced_at(const ReactionNetwork& net, const State& x, double tol) {
  return reaction_vector_balance(net, x, tol).balanced;
}

AutocaRoots autoca_equilibrium_count(const AutocaShape& shape, double x_p_star) {
  if (!(x_p_star > 0.0) || !std::isfinite(x_p_star)) throw NetworkError("shared-species value must be positive");
  const Rational xp = from_double(x_p_star);
  std::vector<Rational> coeffs(static_cast<std::size_t>(shape.tau), Rational(0));
  for (const auto& [m, k] : shape.rates_k_m1) coeffs[static_cast<std::size_t>(m - 1)] += k * xp;
  if (coeffs.size() < 2) coeffs.resize(2, Rational(0));
  coeffs[1] -= shape.rate_k2;
  AutocaRoots out;
  out.roots = positive_roots(Polynomial(std::move(coeffs)));
  out.count = out.roots.size();
  return out;
}

AutocaRoots autoca_equilibrium_count(const ReactionNetwork& subnet, double x_p_star) {
  return autoca_equilibrium_count(validate_autoca(subnet), x_p_star);
}

}  // namespace crnlyap
