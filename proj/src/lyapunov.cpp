#include "crnlyap/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "crnlyap/balance.hpp"
#include "crnlyap/cbp.hpp"
#include "crnlyap/quadrature.hpp"
#include "crnlyap/structure.hpp"

namespace crnlyap {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void check_dim(const State& x, Eigen::Index n) {
  if (x.size() != n) {
    throw NetworkError("state has " + std::to_string(x.size()) + " entries, expected " + std::to_string(n));
  }
}

void check_positive(const State& x) {
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (!(x(j) > 0.0) || !std::isfinite(x(j))) {
      throw DomainError("the Lyapunov function is defined for positive states only");
    }
  }
}

Eigen::VectorXd restrict_vec(const Eigen::VectorXd& v, const std::vector<std::size_t>& layout) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(layout.size()));
  for (std::size_t k = 0; k < layout.size(); ++k) out(static_cast<Eigen::Index>(k)) = v(static_cast<Eigen::Index>(layout[k]));
  return out;
}

void scatter_add(Eigen::VectorXd& out, const Eigen::VectorXd& local, const std::vector<std::size_t>& layout) {
  for (std::size_t k = 0; k < layout.size(); ++k) out(static_cast<Eigen::Index>(layout[k])) += local(static_cast<Eigen::Index>(k));
}

void scatter_add(Eigen::MatrixXd& out, const Eigen::MatrixXd& local, const std::vector<std::size_t>& layout) {
  for (std::size_t a = 0; a < layout.size(); ++a) {
    for (std::size_t b = 0; b < layout.size(); ++b) {
      out(static_cast<Eigen::Index>(layout[a]), static_cast<Eigen::Index>(layout[b])) +=
          local(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
}

double relative_field_residual(const ReactionNetwork& net, const State& x) {
  const double scale = std::max(1.0, reaction_rates(net, x).lpNorm<Eigen::Infinity>());
  return vector_field(net, x).lpNorm<Eigen::Infinity>() / scale;
}

// Autocatalytic private-coordinate pieces.
double autoca_sum(const AutocaShape& shape, double s, int power_shift) {
  double sum = 0.0;
  for (const auto& [m, k] : shape.rates_k_m1) sum += to_double(k) * std::pow(s, m - 1 + power_shift);
  return sum;
}

double autoca_log_ratio(const AutocaCompound::Part& part, double s) {
  return std::log(to_double(part.shape.rate_k2) * s) - std::log(part.x_p_star) - std::log(autoca_sum(part.shape, s, 0));
}

double autoca_ratio(const AutocaCompound::Part& part, double s) {
  return to_double(part.shape.rate_k2) * s / (part.x_p_star * autoca_sum(part.shape, s, 0));
}

double autoca_second(const AutocaCompound::Part& part, double s) {
  double num = 0.0;
  for (const auto& [m, k] : part.shape.rates_k_m1) num += (2 - m) * to_double(k) * std::pow(s, m - 1);
  return num / autoca_sum(part.shape, s, 1);
}

}  // namespace

// ---------------------------------------------------------------- PseudoHelmholtz

PseudoHelmholtz::PseudoHelmholtz(State x_star, Eigen::VectorXd weights)
    : x_star_(std::move(x_star)), weights_(std::move(weights)) {
  if (x_star_.size() == 0) throw NetworkError("empty equilibrium");
  for (Eigen::Index j = 0; j < x_star_.size(); ++j) {
    if (!(x_star_(j) > 0.0) || !std::isfinite(x_star_(j))) throw NetworkError("equilibrium must be positive");
  }
  if (weights_.size() == 0) weights_ = Eigen::VectorXd::Ones(x_star_.size());
  if (weights_.size() != x_star_.size()) throw NetworkError("one weight per species is required");
  for (Eigen::Index j = 0; j < weights_.size(); ++j) {
    if (!(weights_(j) > 0.0) || !std::isfinite(weights_(j))) throw NetworkError("weights must be positive");
  }
}

double PseudoHelmholtz::value(const State& x) const {
  check_dim(x, dimension());
  check_positive(x);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    sum += weights_(j) * (x_star_(j) - x(j) + x(j) * std::log(x(j) / x_star_(j)));
  }
  return sum;
}

Eigen::VectorXd PseudoHelmholtz::gradient(const State& x) const {
  check_dim(x, dimension());
  check_positive(x);
  return (weights_.array() * (x.array() / x_star_.array()).log()).matrix();
}

Eigen::MatrixXd PseudoHelmholtz::hessian(const State& x) const {
  check_dim(x, dimension());
  check_positive(x);
  return (weights_.array() / x.array()).matrix().asDiagonal();
}

double PseudoHelmholtz::exp_directional(const Eigen::VectorXd& eta, const State& x) const {
  check_dim(x, dimension());
  check_positive(x);
  double arg = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (eta(j) != 0.0) arg += weights_(j) * eta(j) * std::log(x(j) / x_star_(j));
  }
  return std::exp(arg);
}

// ---------------------------------------------------------------- OneDimIntegral

OneDimIntegral::OneDimIntegral(ReactionNetwork net, State x_star) : net_(std::move(net)), x_star_(std::move(x_star)) {
  const auto report = analyze(net_);
  if (report.dim_s != 1) {
    throw NetworkError("a one-dimensional construction needs dim S = 1, got " + std::to_string(report.dim_s));
  }
  check_positive_state(net_, x_star_);

  IntVector first = net_.reaction_vector(0);
  long long g = 0;
  for (Eigen::Index j = 0; j < first.size(); ++j) g = std::gcd(g, std::llabs(first(j)));
  omega_ = first / g;
  omega_d_ = omega_.cast<double>();
  omega_sq_ = omega_d_.squaredNorm();
  Eigen::Index pivot = 0;
  while (omega_(pivot) == 0) ++pivot;
  for (std::size_t i = 0; i < net_.num_reactions(); ++i) {
    const IntVector eta = net_.reaction_vector(i);
    const long long beta = eta(pivot) / omega_(pivot);
    if (eta != beta * omega_) throw NetworkError("reaction vector is not an integer multiple of omega");
    betas_.push_back(static_cast<int>(beta));
  }
  if (relative_field_residual(net_, x_star_) > 1e-8) {
    throw NetworkError("the supplied point is not an equilibrium of the one-dimensional network");
  }
  gamma_star_ = gamma(x_star_);
}

double OneDimIntegral::gamma(const State& x) const {
  check_dim(x, dimension());
  return omega_d_.dot(x) / omega_sq_;
}

State OneDimIntegral::y_dagger(const State& x) const { return x - gamma(x) * omega_d_; }

OneDimIntegral::Solved OneDimIntegral::solve(const State& x, bool second_order) const {
  check_dim(x, dimension());
  check_positive(x);
  const Eigen::VectorXd rates = reaction_rates(net_, x);
  const std::size_t r = net_.num_reactions();

  // H(v) = sum_i R_i P_i(v) with P_i the geometric sums below.
  auto poly = [&](int beta, double v, int deriv) {
    double sum = 0.0;
    if (beta > 0) {
      for (int k = 0; k < beta; ++k) sum += std::pow(static_cast<double>(k), deriv) * std::exp(k * v);
    } else {
      for (int k = 1; k <= -beta; ++k) {
        const double sign = deriv % 2 == 0 ? -1.0 : 1.0;
        sum += sign * std::pow(static_cast<double>(k), deriv) * std::exp(-k * v);
      }
    }
    return sum;
  };
  auto H = [&](double v, int deriv) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < r; ++i) acc.add(rates(static_cast<Eigen::Index>(i)) * poly(betas_[i], v, deriv));
    return acc.value();
  };

  // Bracket the root of the increasing function H, then safeguarded Newton.
  double lo = 0.0, hi = 0.0;
  const double h0 = H(0.0, 0);
  if (h0 == 0.0) {
    lo = hi = 0.0;
  } else if (h0 < 0.0) {
    double step = 1.0;
    hi = step;
    while (H(hi, 0) < 0.0) {
      lo = hi;
      step *= 2.0;
      hi += step;
      if (hi > 700.0) throw DomainError("h(x, u) has no positive root (no positive equilibrium direction)");
    }
  } else {
    double step = 1.0;
    lo = -step;
    while (H(lo, 0) > 0.0) {
      hi = lo;
      step *= 2.0;
      lo -= step;
      if (lo < -700.0) throw DomainError("h(x, u) has no positive root (no positive equilibrium direction)");
    }
  }
  double v = 0.5 * (lo + hi);
  if (lo != hi) {
    for (int iter = 0; iter < 200; ++iter) {
      const double hv = H(v, 0);
      if (hv == 0.0) break;
      if (hv < 0.0) {
        lo = v;
      } else {
        hi = v;
      }
      const double dh = H(v, 1);
      double next = v - hv / dh;
      if (!(dh > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double change = std::abs(next - v);
      v = next;
      if (change <= 1e-16 * std::max(1.0, std::abs(v)) || hi - lo <= 1e-16 * std::max(1.0, std::abs(v))) break;
    }
  }

  Solved s;
  s.v = v;
  s.h_v = H(v, 1);
  const Eigen::Index n = dimension();
  s.h_x = Eigen::VectorXd::Zero(n);
  s.h_xv = Eigen::VectorXd::Zero(n);
  if (second_order) {
    s.h_vv = H(v, 2);
    s.h_xx = Eigen::MatrixXd::Zero(n, n);
  }
  for (std::size_t i = 0; i < r; ++i) {
    const double rate = rates(static_cast<Eigen::Index>(i));
    const double p0 = poly(betas_[i], v, 0);
    const double p1 = poly(betas_[i], v, 1);
    const auto& terms = net_.reaction(i).reactant.terms();
    for (const auto& [a, va] : terms) {
      const auto ia = static_cast<Eigen::Index>(a);
      const double dr = rate * va / x(ia);
      s.h_x(ia) += dr * p0;
      s.h_xv(ia) += dr * p1;
      if (!second_order) continue;
      for (const auto& [b, vb] : terms) {
        const auto ib = static_cast<Eigen::Index>(b);
        const double d2 = rate * (va * vb - (a == b ? va : 0)) / (x(ia) * x(ib));
        s.h_xx(ia, ib) += d2 * p0;
      }
    }
  }
  return s;
}

double OneDimIntegral::h(const State& x, double u) const {
  check_dim(x, dimension());
  if (!(u > 0.0)) throw DomainError("u must be positive");
  const Eigen::VectorXd rates = reaction_rates(net_, x);
  CompensatedSum acc;
  for (std::size_t i = 0; i < net_.num_reactions(); ++i) {
    const int beta = betas_[i];
    double p = 0.0;
    if (beta > 0) {
      for (int k = 0; k < beta; ++k) p += std::pow(u, k);
    } else {
      for (int k = 1; k <= -beta; ++k) p -= std::pow(u, -k);
    }
    acc.add(rates(static_cast<Eigen::Index>(i)) * p);
  }
  return acc.value();
}

double OneDimIntegral::h_u(const State& x, double u) const {
  check_dim(x, dimension());
  if (!(u > 0.0)) throw DomainError("u must be positive");
  const Eigen::VectorXd rates = reaction_rates(net_, x);
  double sum = 0.0;
  for (std::size_t i = 0; i < net_.num_reactions(); ++i) {
    const int beta = betas_[i];
    double p = 0.0;
    if (beta > 0) {
      for (int k = 1; k < beta; ++k) p += k * std::pow(u, k - 1);
    } else {
      for (int k = 1; k <= -beta; ++k) p += k * std::pow(u, -k - 1);
    }
    sum += rates(static_cast<Eigen::Index>(i)) * p;
  }
  return sum;
}

Eigen::VectorXd OneDimIntegral::h_x(const State& x, double u) const {
  check_dim(x, dimension());
  check_positive(x);
  const Eigen::VectorXd rates = reaction_rates(net_, x);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dimension());
  for (std::size_t i = 0; i < net_.num_reactions(); ++i) {
    const int beta = betas_[i];
    double p = 0.0;
    if (beta > 0) {
      for (int k = 0; k < beta; ++k) p += std::pow(u, k);
    } else {
      for (int k = 1; k <= -beta; ++k) p -= std::pow(u, -k);
    }
    for (const auto& [a, va] : net_.reaction(i).reactant.terms()) {
      const auto ia = static_cast<Eigen::Index>(a);
      out(ia) += rates(static_cast<Eigen::Index>(i)) * va / x(ia) * p;
    }
  }
  return out;
}

double OneDimIntegral::log_u_tilde(const State& x) const { return solve(x, false).v; }

double OneDimIntegral::u_tilde(const State& x) const { return std::exp(log_u_tilde(x)); }

Eigen::VectorXd OneDimIntegral::grad_log_u(const State& x) const {
  const Solved s = solve(x, false);
  return -s.h_x / s.h_v;
}

Eigen::MatrixXd OneDimIntegral::hess_log_u(const State& x) const {
  const Solved s = solve(x, true);
  const Eigen::VectorXd g = -s.h_x / s.h_v;
  const Eigen::MatrixXd m = s.h_xx + s.h_xv * g.transpose() + g * s.h_xv.transpose() + s.h_vv * g * g.transpose();
  return -m / s.h_v;
}

void OneDimIntegral::check_segment(const State& x) const {
  const State end = x + (gamma_star_ - gamma(x)) * omega_d_;
  for (Eigen::Index j = 0; j < end.size(); ++j) {
    if (!(end(j) > 0.0)) {
      throw DomainError("the integration path from this state leaves the positive orthant");
    }
  }
}

double OneDimIntegral::value(const State& x) const {
  check_dim(x, dimension());
  check_positive(x);
  check_segment(x);
  const double g = gamma(x);
  auto integrand = [&](double alpha) -> double {
    const State p = x + (alpha - g) * omega_d_;
    return log_u_tilde(p);
  };
  return integrate_gl(integrand, gamma_star_, g);
}

Eigen::VectorXd OneDimIntegral::gradient(const State& x) const {
  check_dim(x, dimension());
  check_positive(x);
  check_segment(x);
  const double g = gamma(x);
  auto integrand = [&](double alpha) -> Eigen::VectorXd {
    const State p = x + (alpha - g) * omega_d_;
    return grad_log_u(p);
  };
  const Eigen::VectorXd integral = integrate_gl(integrand, gamma_star_, g);
  const Eigen::VectorXd projected = integral - omega_d_ * (omega_d_.dot(integral) / omega_sq_);
  return log_u_tilde(x) * omega_d_ / omega_sq_ + projected;
}

Eigen::MatrixXd OneDimIntegral::hessian(const State& x) const {
  check_dim(x, dimension());
  check_positive(x);
  check_segment(x);
  const Eigen::Index n = dimension();
  const double g = gamma(x);
  auto integrand = [&](double alpha) -> Eigen::MatrixXd {
    const State p = x + (alpha - g) * omega_d_;
    return hess_log_u(p);
  };
  const Eigen::MatrixXd integral = integrate_gl(integrand, gamma_star_, g);
  const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n) - omega_d_ * omega_d_.transpose() / omega_sq_;
  const Eigen::VectorXd grad_l = grad_log_u(x);
  return (omega_d_ * grad_l.transpose() + proj * grad_l * omega_d_.transpose()) / omega_sq_ + proj * integral * proj;
}

double OneDimIntegral::exp_directional(const Eigen::VectorXd& eta, const State& x) const {
  check_dim(x, dimension());
  const double beta = eta.dot(omega_d_) / omega_sq_;
  if ((eta - beta * omega_d_).lpNorm<Eigen::Infinity>() <= 1e-12 * std::max(1.0, eta.lpNorm<Eigen::Infinity>())) {
    return std::exp(beta * log_u_tilde(x));
  }
  return std::exp(eta.dot(gradient(x)));
}

double OneDimIntegral::stability_derivative(const State& x) const { return omega_d_.dot(h_x(x, 1.0)); }

// ---------------------------------------------------------------- LyapunovFunction

const char* to_string(LyapunovKind kind) {
  switch (kind) {
    case LyapunovKind::pseudo_helmholtz:
      return "pseudo_helmholtz";
    case LyapunovKind::onedim_integral:
      return "onedim_integral";
    case LyapunovKind::compound_sub1:
      return "compound_sub1";
    case LyapunovKind::autoca_compound:
      return "autoca_compound";
  }
  return "unknown";
}

Eigen::Index LyapunovFunction::dimension() const {
  return std::visit(overloaded{[](const PseudoHelmholtz& f) { return f.dimension(); },
                               [](const OneDimIntegral& f) { return f.dimension(); },
                               [](const CompoundSub1& f) { return f.dimension; },
                               [](const AutocaCompound& f) { return f.dimension; }},
                    impl_);
}

double LyapunovFunction::value(const State& x) const {
  check_dim(x, dimension());
  return std::visit(
      overloaded{[&](const PseudoHelmholtz& f) { return f.value(x); },
                 [&](const OneDimIntegral& f) { return f.value(x); },
                 [&](const CompoundSub1& f) {
                   double sum = f.cbp.value(restrict_vec(x, f.cbp_layout));
                   for (std::size_t p = 0; p < f.parts.size(); ++p) sum += f.parts[p].value(restrict_vec(x, f.part_layouts[p]));
                   return sum;
                 },
                 [&](const AutocaCompound& f) {
                   check_positive(x);
                   double sum = f.cbp.value(restrict_vec(x, f.cbp_layout));
                   for (const auto& part : f.parts) {
                     const double s = x(static_cast<Eigen::Index>(part.private_global));
                     sum += integrate_gl([&](double a) { return autoca_log_ratio(part, a); }, part.x_q_star, s);
                   }
                   return sum;
                 }},
      impl_);
}

Eigen::VectorXd LyapunovFunction::gradient(const State& x) const {
  check_dim(x, dimension());
  return std::visit(overloaded{[&](const PseudoHelmholtz& f) { return f.gradient(x); },
                               [&](const OneDimIntegral& f) { return f.gradient(x); },
                               [&](const CompoundSub1& f) {
                                 Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
                                 scatter_add(g, f.cbp.gradient(restrict_vec(x, f.cbp_layout)), f.cbp_layout);
                                 for (std::size_t p = 0; p < f.parts.size(); ++p) {
                                   scatter_add(g, f.parts[p].gradient(restrict_vec(x, f.part_layouts[p])),
                                               f.part_layouts[p]);
                                 }
                                 return g;
                               },
                               [&](const AutocaCompound& f) {
                                 check_positive(x);
                                 Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
                                 scatter_add(g, f.cbp.gradient(restrict_vec(x, f.cbp_layout)), f.cbp_layout);
                                 for (const auto& part : f.parts) {
                                   const auto q = static_cast<Eigen::Index>(part.private_global);
                                   g(q) += autoca_log_ratio(part, x(q));
                                 }
                                 return g;
                               }},
                    impl_);
}

Eigen::MatrixXd LyapunovFunction::hessian(const State& x) const {
  check_dim(x, dimension());
  return std::visit(overloaded{[&](const PseudoHelmholtz& f) { return f.hessian(x); },
                               [&](const OneDimIntegral& f) { return f.hessian(x); },
                               [&](const CompoundSub1& f) {
                                 Eigen::MatrixXd h = Eigen::MatrixXd::Zero(x.size(), x.size());
                                 scatter_add(h, f.cbp.hessian(restrict_vec(x, f.cbp_layout)), f.cbp_layout);
                                 for (std::size_t p = 0; p < f.parts.size(); ++p) {
                                   scatter_add(h, f.parts[p].hessian(restrict_vec(x, f.part_layouts[p])),
                                               f.part_layouts[p]);
                                 }
                                 return h;
                               },
                               [&](const AutocaCompound& f) {
                                 check_positive(x);
                                 Eigen::MatrixXd h = Eigen::MatrixXd::Zero(x.size(), x.size());
                                 scatter_add(h, f.cbp.hessian(restrict_vec(x, f.cbp_layout)), f.cbp_layout);
                                 for (const auto& part : f.parts) {
                                   const auto q = static_cast<Eigen::Index>(part.private_global);
                                   h(q, q) += autoca_second(part, x(q));
                                 }
                                 return h;
                               }},
                    impl_);
}

double LyapunovFunction::directional_derivative(const Eigen::VectorXd& eta, const State& x) const {
  check_dim(eta, dimension());
  return gradient(x).dot(eta);
}

double LyapunovFunction::exp_directional(const Eigen::VectorXd& eta, const State& x) const {
  check_dim(x, dimension());
  check_dim(eta, dimension());
  return std::visit(
      overloaded{[&](const PseudoHelmholtz& f) { return f.exp_directional(eta, x); },
                 [&](const OneDimIntegral& f) { return f.exp_directional(eta, x); },
                 [&](const CompoundSub1& f) {
                   double prod = f.cbp.exp_directional(restrict_vec(eta, f.cbp_layout), restrict_vec(x, f.cbp_layout));
                   for (std::size_t p = 0; p < f.parts.size(); ++p) {
                     const Eigen::VectorXd local = restrict_vec(eta, f.part_layouts[p]);
                     if (local.isZero(0.0)) continue;
                     prod *= f.parts[p].exp_directional(local, restrict_vec(x, f.part_layouts[p]));
                   }
                   return prod;
                 },
                 [&](const AutocaCompound& f) {
                   check_positive(x);
                   double prod = f.cbp.exp_directional(restrict_vec(eta, f.cbp_layout), restrict_vec(x, f.cbp_layout));
                   for (const auto& part : f.parts) {
                     const auto q = static_cast<Eigen::Index>(part.private_global);
                     if (eta(q) != 0.0) prod *= std::pow(autoca_ratio(part, x(q)), eta(q));
                   }
                   return prod;
                 }},
      impl_);
}

// ---------------------------------------------------------------- builders

LyapunovFunction build_pseudo_helmholtz(const State& x_star, const std::vector<Rational>& weights) {
  Eigen::VectorXd w;
  if (!weights.empty()) {
    w.resize(static_cast<Eigen::Index>(weights.size()));
    for (std::size_t j = 0; j < weights.size(); ++j) {
      if (weights[j] <= 0) throw NetworkError("weights must be positive");
      w(static_cast<Eigen::Index>(j)) = to_double(weights[j]);
    }
  }
  return LyapunovFunction(PseudoHelmholtz(x_star, w));
}

LyapunovFunction build_onedim(const ReactionNetwork& net, const State& x_star) {
  return LyapunovFunction(OneDimIntegral(net, x_star));
}

LyapunovFunction build_compound(const CompoundSpec& spec, const State& equilibrium) {
  const auto& net = spec.network;
  check_positive_state(net, equilibrium);
  if (relative_field_residual(net, equilibrium) > 1e-8) {
    throw NetworkError("the supplied point is not an equilibrium of the compound network");
  }
  const State cbp_star = restrict_state(equilibrium, spec.cbp_layout);

  std::vector<std::size_t> pinned;
  if (spec.kind == PartKind::autoca) {
    for (const auto& part : spec.parts) {
      const auto it = std::find(spec.cbp_layout.begin(), spec.cbp_layout.end(), *part.shared_global);
      pinned.push_back(static_cast<std::size_t>(it - spec.cbp_layout.begin()));
    }
  }
  std::vector<Rational> weights;
  if (spec.cbp_weights) {
    weights = *spec.cbp_weights;
    for (auto j : pinned) {
      if (weights[j] != 1) throw NetworkError("shared species must carry weight 1 in the CBP part");
    }
  } else {
    auto found = find_helmholtz_weights(spec.cbp_part, cbp_star, pinned);
    if (!found) {
      throw NetworkError(
          "the CBP part is not recognized as a scaled complex-balanced network at this equilibrium; supply weights "
          "with d=... in the [cbp] header");
    }
    weights = *found;
  }
  PseudoHelmholtz cbp = std::get<PseudoHelmholtz>(build_pseudo_helmholtz(cbp_star, weights).variant());

  if (spec.kind == PartKind::sub1) {
    CompoundSub1 f{cbp, spec.cbp_layout, {}, {}, static_cast<Eigen::Index>(net.num_species())};
    for (const auto& part : spec.parts) {
      f.parts.emplace_back(part.network, restrict_state(equilibrium, part.species_layout));
      f.part_layouts.push_back(part.species_layout);
    }
    return LyapunovFunction(std::move(f));
  }

  AutocaCompound f{cbp, spec.cbp_layout, {}, static_cast<Eigen::Index>(net.num_species())};
  for (std::size_t p = 0; p < spec.parts.size(); ++p) {
    const auto& part = spec.parts[p];
    AutocaCompound::Part ap;
    ap.shape = *part.shape;
    ap.shared_global = *part.shared_global;
    ap.private_global = part.species_layout[ap.shape.autocatalytic_species];
    ap.x_p_star = equilibrium(static_cast<Eigen::Index>(ap.shared_global));
    ap.x_q_star = equilibrium(static_cast<Eigen::Index>(ap.private_global));
    const double produced = ap.x_p_star * autoca_sum(ap.shape, ap.x_q_star, 0);
    const double consumed = to_double(ap.shape.rate_k2) * ap.x_q_star;
    if (std::abs(produced - consumed) > 1e-8 * std::max({1.0, produced, consumed})) {
      throw NetworkError("autocatalytic part " + std::to_string(p + 1) +
                         " is not reaction-vector balanced at the supplied equilibrium");
    }
    f.parts.push_back(ap);
  }
  return LyapunovFunction(std::move(f));
}

LyapunovFunction build_for_network(const ReactionNetwork& net, const State& x_star, FamilyChoice choice) {
  check_positive_state(net, x_star);
  if (choice == FamilyChoice::onedim) return build_onedim(net, x_star);
  if (relative_field_residual(net, x_star) > 1e-8) throw NetworkError("the supplied point is not an equilibrium");
  const double scale = std::max(1.0, reaction_rates(net, x_star).lpNorm<Eigen::Infinity>());
  if (is_complex_balanced_at(net, x_star, 1e-9 * scale)) return build_pseudo_helmholtz(x_star);
  if (auto weights = find_helmholtz_weights(net, x_star)) return build_pseudo_helmholtz(x_star, *weights);
  if (choice == FamilyChoice::helmholtz) {
    throw NetworkError("the network is neither complex balanced nor a recognized scaled complex-balanced network");
  }
  if (analyze(net).dim_s == 1) return build_onedim(net, x_star);
  throw NetworkError("no supported Lyapunov construction applies to this network");
}

// ---------------------------------------------------------------- residual and certificate

double pde_residual(const ReactionNetwork& net, const LyapunovFunction& f, const State& x) {
  check_dim(x, static_cast<Eigen::Index>(net.num_species()));
  const Eigen::VectorXd rates = reaction_rates(net, x);
  CompensatedSum acc;
  for (std::size_t i = 0; i < net.num_reactions(); ++i) {
    const double rate = rates(static_cast<Eigen::Index>(i));
    const Eigen::VectorXd eta = net.reaction_vector(i).cast<double>();
    acc.add(rate);
    acc.add(-rate * f.exp_directional(eta, x));
  }
  return acc.value();
}

double pde_residual_scale(const ReactionNetwork& net, const LyapunovFunction& f, const State& x) {
  const Eigen::VectorXd rates = reaction_rates(net, x);
  double scale = 0.0;
  for (std::size_t i = 0; i < net.num_reactions(); ++i) {
    const Eigen::VectorXd eta = net.reaction_vector(i).cast<double>();
    scale += std::abs(rates(static_cast<Eigen::Index>(i))) * (1.0 + f.exp_directional(eta, x));
  }
  return scale;
}

CertificateReport stability_conditions(const ReactionNetwork& net, const LyapunovFunction& f, const State& x_star,
                                       const CompoundSpec* spec) {
  CertificateReport report;
  check_positive_state(net, x_star);
  report.equilibrium_residual = vector_field(net, x_star).lpNorm<Eigen::Infinity>();
  report.equilibrium_ok = relative_field_residual(net, x_star) <= 1e-8;

  const auto structure = analyze(net);
  const Eigen::MatrixXd& q = structure.subspace_basis;
  if (q.cols() == 0) {
    report.projected_hessian_min_eigenvalue = std::numeric_limits<double>::infinity();
    report.hessian_pass = true;
  } else {
    try {
      const Eigen::MatrixXd h = f.hessian(x_star);
      const Eigen::MatrixXd m = q.transpose() * (0.5 * (h + h.transpose())) * q;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
      report.projected_hessian_min_eigenvalue = eig.eigenvalues().minCoeff();
      report.hessian_pass = report.projected_hessian_min_eigenvalue > 0.0;
    } catch (const NumericalError& e) {
      report.projected_hessian_min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
      report.hessian_pass = false;
    }
  }

  auto onedim_condition = [&](const OneDimIntegral& part, const State& local, const std::string& name) {
    ConditionResult c;
    c.name = name;
    c.value = part.stability_derivative(local);
    c.pass = c.value < 0.0;
    c.detail = "omega^T dh/dx at (x*, 1) must be negative";
    report.conditions.push_back(c);
  };

  std::visit(overloaded{[&](const PseudoHelmholtz&) {},
                        [&](const OneDimIntegral& g) { onedim_condition(g, x_star, "h_derivative"); },
                        [&](const CompoundSub1& g) {
                          for (std::size_t p = 0; p < g.parts.size(); ++p) {
                            onedim_condition(g.parts[p], restrict_vec(x_star, g.part_layouts[p]),
                                             "part" + std::to_string(p + 1) + "_h_derivative");
                          }
                        },
                        [&](const AutocaCompound& g) {
                          for (std::size_t p = 0; p < g.parts.size(); ++p) {
                            const auto& part = g.parts[p];
                            const std::string prefix = "part" + std::to_string(p + 1) + "_";
                            const bool high_order = part.shape.tau > 2;
                            ConditionResult sum;
                            sum.name = prefix + "autoca_sum";
                            sum.value = autoca_stability_sum(part.shape,
                                                             x_star(static_cast<Eigen::Index>(part.private_global)));
                            sum.pass = sum.value > 0.0;
                            sum.informational = !high_order;
                            sum.detail = "sum over m of (2-m) k_m1 x*^(m-1) must be positive";
                            report.conditions.push_back(sum);
                            if (high_order) {
                              ConditionResult mc;
                              mc.name = prefix + "mass_conserved";
                              mc.value = part.shape.mass_conserved ? 1.0 : 0.0;
                              mc.pass = part.shape.mass_conserved;
                              mc.detail = "parts with an index above 2 must conserve mass";
                              report.conditions.push_back(mc);
                            }
                          }
                        }},
             f.variant());

  if (spec && spec->kind == PartKind::autoca) {
    const auto u = check_uniqueness_conditions(*spec, x_star);
    ConditionResult c;
    c.name = "uniqueness_in_class";
    c.value = u.uniqueness_guaranteed ? 1.0 : 0.0;
    c.pass = u.uniqueness_guaranteed;
    c.informational = true;
    c.detail = u.all_tau_at_most_two ? "every part has tau <= 2"
                                     : "parts with an index above 2 are mass-conserved";
    if (!u.uniqueness_guaranteed) c.detail = "uniqueness not guaranteed";
    report.conditions.push_back(c);
    ConditionResult d;
    d.name = "decomposition_conditions";
    d.value = u.decomposition_conditions_hold ? 1.0 : 0.0;
    d.pass = u.decomposition_conditions_hold;
    d.informational = true;
    d.detail = "shared species consumed by the CBP part with unit stoichiometry";
    report.conditions.push_back(d);
  }

  report.pass = report.equilibrium_ok && report.hessian_pass;
  for (const auto& c : report.conditions) {
    if (!c.informational && !c.pass) report.pass = false;
  }
  return report;
}

}  // namespace crnlyap
