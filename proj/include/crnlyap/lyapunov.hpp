#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "crnlyap/compose.hpp"
#include "crnlyap/model.hpp"

namespace crnlyap {

/// f(x) = sum_j d_j (x*_j - x_j - x_j ln(x*_j / x_j)).
class PseudoHelmholtz {
 public:
  /// Empty weights mean all ones. Throws NetworkError on non-positive input.
  PseudoHelmholtz(State x_star, Eigen::VectorXd weights = {});

  const State& x_star() const { return x_star_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  Eigen::Index dimension() const { return x_star_.size(); }

  double value(const State& x) const;
  Eigen::VectorXd gradient(const State& x) const;
  Eigen::MatrixXd hessian(const State& x) const;
  /// exp(eta^T grad f(x)) = prod_j (x_j / x*_j)^(d_j eta_j).
  double exp_directional(const Eigen::VectorXd& eta, const State& x) const;

 private:
  State x_star_;
  Eigen::VectorXd weights_;
};

/// Solution for a network with a one-dimensional stoichiometric subspace
/// spanned by omega, where each reaction vector is beta_i omega:
///
///   f(x) = int_{gamma(x*)}^{gamma(x)} ln u(y(x) + a omega) da,
///   gamma(x) = omega^T x / |omega|^2,  y(x) = x - gamma(x) omega,
///
/// and u(x) > 0 is the root of h(x, u) = sum_i R_i(x) (u^beta_i - 1)/(u - 1).
class OneDimIntegral {
 public:
  /// Throws NetworkError unless dim S = 1 and x_star is a positive
  /// equilibrium (relative residual below 1e-8).
  OneDimIntegral(ReactionNetwork net, State x_star);

  const ReactionNetwork& network() const { return net_; }
  const State& x_star() const { return x_star_; }
  /// Primitive integer vector along the first reaction vector.
  const IntVector& omega() const { return omega_; }
  const std::vector<int>& betas() const { return betas_; }
  Eigen::Index dimension() const { return x_star_.size(); }

  double gamma(const State& x) const;
  State y_dagger(const State& x) const;
  double h(const State& x, double u) const;
  /// dh/du, positive for all u > 0.
  double h_u(const State& x, double u) const;
  Eigen::VectorXd h_x(const State& x, double u) const;
  /// Positive root of h(x, .). Throws DomainError when none exists.
  double u_tilde(const State& x) const;
  double log_u_tilde(const State& x) const;
  Eigen::VectorXd grad_log_u(const State& x) const;
  Eigen::MatrixXd hess_log_u(const State& x) const;

  double value(const State& x) const;
  Eigen::VectorXd gradient(const State& x) const;
  Eigen::MatrixXd hessian(const State& x) const;
  /// For eta = beta omega this is u(x)^beta, computed without quadrature.
  double exp_directional(const Eigen::VectorXd& eta, const State& x) const;

  /// omega^T dh/dx at (x, 1).
  double stability_derivative(const State& x) const;

 private:
  struct Solved {
    double v;          // ln u
    double h_v;        // dH/dv
    double h_vv;       // d2H/dv2
    Eigen::VectorXd h_x;   // dH/dx
    Eigen::VectorXd h_xv;  // d2H/dx dv
    Eigen::MatrixXd h_xx;  // d2H/dx2
  };
  // Root of H(x, v) = h(x, e^v) and its partial derivatives.
  Solved solve(const State& x, bool second_order) const;
  // Start of the integration segment ending at x.
  double gamma_star() const { return gamma_star_; }
  void check_segment(const State& x) const;

  ReactionNetwork net_;
  State x_star_;
  IntVector omega_;
  Eigen::VectorXd omega_d_;
  double omega_sq_ = 1.0;
  std::vector<int> betas_;
  double gamma_star_ = 0.0;
};

/// Sum of a pseudo-Helmholtz term on the CBP coordinates and one OneDimIntegral
/// per species-disjoint part.
struct CompoundSub1 {
  PseudoHelmholtz cbp;
  std::vector<std::size_t> cbp_layout;
  std::vector<OneDimIntegral> parts;
  std::vector<std::vector<std::size_t>> part_layouts;
  Eigen::Index dimension = 0;
};

/// Pseudo-Helmholtz on the CBP coordinates (unit weight on shared species)
/// plus, per autocatalytic part, int_{x*_q}^{x_q} ln(k2 a / (x*_p sum_m k_m1 a^(m-1))) da.
struct AutocaCompound {
  struct Part {
    AutocaShape shape;
    std::size_t shared_global = 0;
    std::size_t private_global = 0;
    double x_p_star = 0.0;
    double x_q_star = 0.0;
  };
  PseudoHelmholtz cbp;
  std::vector<std::size_t> cbp_layout;
  std::vector<Part> parts;
  Eigen::Index dimension = 0;
};

enum class LyapunovKind { pseudo_helmholtz, onedim_integral, compound_sub1, autoca_compound };

const char* to_string(LyapunovKind kind);

class LyapunovFunction {
 public:
  using Variant = std::variant<PseudoHelmholtz, OneDimIntegral, CompoundSub1, AutocaCompound>;

  explicit LyapunovFunction(Variant v) : impl_(std::move(v)) {}

  LyapunovKind kind() const { return static_cast<LyapunovKind>(impl_.index()); }
  const Variant& variant() const { return impl_; }
  Eigen::Index dimension() const;

  double value(const State& x) const;
  Eigen::VectorXd gradient(const State& x) const;
  Eigen::MatrixXd hessian(const State& x) const;
  double directional_derivative(const Eigen::VectorXd& eta, const State& x) const;
  /// exp(eta^T grad f(x)) through the closed form of each family.
  double exp_directional(const Eigen::VectorXd& eta, const State& x) const;

 private:
  Variant impl_;
};

/// Throws NetworkError on non-positive x_star or weights.
LyapunovFunction build_pseudo_helmholtz(const State& x_star, const std::vector<Rational>& weights = {});

LyapunovFunction build_onedim(const ReactionNetwork& net, const State& x_star);

/// Part equilibria are the restrictions of `equilibrium`. CBP weights come from
/// spec.cbp_weights, else from find_helmholtz_weights (shared species pinned to 1).
LyapunovFunction build_compound(const CompoundSpec& spec, const State& equilibrium);

enum class FamilyChoice { automatic, helmholtz, onedim };

/// Picks a family for a plain network: complex balanced at x_star gives the
/// plain pseudo-Helmholtz function, recognized CBP weights give the weighted
/// form, a one-dimensional subspace gives OneDimIntegral.
LyapunovFunction build_for_network(const ReactionNetwork& net, const State& x_star,
                                   FamilyChoice choice = FamilyChoice::automatic);

/// sum_i R_i(x) (1 - exp((v'_i - v_i)^T grad f(x))), compensated summation.
double pde_residual(const ReactionNetwork& net, const LyapunovFunction& f, const State& x);

/// Sum of |R_i(x)| (1 + exp(...)); a natural scale for pde_residual.
double pde_residual_scale(const ReactionNetwork& net, const LyapunovFunction& f, const State& x);

struct ConditionResult {
  std::string name;
  double value = 0.0;
  bool pass = false;
  bool informational = false;  // reported but not required for the certificate
  std::string detail;
};

struct CertificateReport {
  double equilibrium_residual = 0.0;
  bool equilibrium_ok = false;
  double projected_hessian_min_eigenvalue = 0.0;
  bool hessian_pass = false;
  std::vector<ConditionResult> conditions;
  bool pass = false;
};

/// Side conditions of the family plus the minimum eigenvalue of the Hessian
/// restricted to the stoichiometric subspace at x_star.
CertificateReport stability_conditions(const ReactionNetwork& net, const LyapunovFunction& f, const State& x_star,
                                       const CompoundSpec* spec = nullptr);

}  // namespace crnlyap
