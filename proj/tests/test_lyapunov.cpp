#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "crnlyap/balance.hpp"
#include "crnlyap/lyapunov.hpp"
#include "support.hpp"

using namespace crnlyap;
using namespace crnlyap::testing;

namespace {

// Dissipation grad f . F(x) must not be positive wherever the PDE holds.
void expect_dissipative(const ReactionNetwork& n, const LyapunovFunction& f, const State& x_star, int samples,
                        unsigned seed, double spread = 10.0) {
  std::mt19937_64 rng(seed);
  for (int k = 0; k < samples; ++k) {
    const State x = log_uniform_around(x_star, spread, rng);
    const double d = f.gradient(x).dot(vector_field(n, x));
    EXPECT_LE(d, 1e-12) << "at sample " << k;
  }
}

void expect_derivatives_match(const LyapunovFunction& f, const State& x_star, int samples, unsigned seed,
                              double spread = 3.0) {
  std::mt19937_64 rng(seed);
  for (int k = 0; k < samples; ++k) {
    const State x = log_uniform_around(x_star, spread, rng);
    const Eigen::VectorXd g = f.gradient(x);
    const Eigen::VectorXd g_fd = fd_gradient([&](const State& y) { return f.value(y); }, x);
    EXPECT_LT(rel_error(g, g_fd), 1e-5) << "gradient at sample " << k;
    const Eigen::MatrixXd h = f.hessian(x);
    const Eigen::MatrixXd h_fd = fd_jacobian([&](const State& y) { return f.gradient(y); }, x);
    EXPECT_LT(rel_error(h, h_fd), 1e-5) << "hessian at sample " << k;
  }
}

double max_pde_residual(const ReactionNetwork& n, const LyapunovFunction& f, const State& x_star, int samples,
                        unsigned seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const State x = log_uniform_around(x_star, 10.0, rng);
    worst = std::max(worst, std::abs(pde_residual(n, f, x)));
  }
  return worst;
}

// Closed form of the positive root of x1^2 (1 + u) - 2 x2 / u.
double sub1_part_root(double x1, double x2) { return (-x1 * x1 + x1 * std::sqrt(x1 * x1 + 8 * x2)) / (2 * x1 * x1); }

}  // namespace

TEST(PseudoHelmholtz, ValueVanishesAtEquilibrium) {
  const PseudoHelmholtz f(vec({1.0, 4.0}), vec({1.0, 0.5}));
  EXPECT_DOUBLE_EQ(f.value(vec({1.0, 4.0})), 0.0);
  EXPECT_TRUE(f.gradient(vec({1.0, 4.0})).isZero(0.0));
  EXPECT_GT(f.value(vec({2.0, 1.0})), 0.0);
}

TEST(PseudoHelmholtz, ClosedFormMatchesDefinition) {
  const PseudoHelmholtz f(vec({2.0, 3.0}), vec({2.0, 1.0}));
  const State x = vec({0.7, 5.0});
  const double expected = 2 * (2.0 - 0.7 - 0.7 * std::log(2.0 / 0.7)) + (3.0 - 5.0 - 5.0 * std::log(3.0 / 5.0));
  EXPECT_NEAR(f.value(x), expected, 1e-14);
  const Eigen::VectorXd eta = vec({-1.0, 2.0});
  EXPECT_NEAR(f.exp_directional(eta, x), std::exp(eta.dot(f.gradient(x))), 1e-14);
}

TEST(PseudoHelmholtz, RejectsBadInput) {
  EXPECT_THROW(PseudoHelmholtz(vec({1.0, -1.0})), NetworkError);
  EXPECT_THROW(PseudoHelmholtz(vec({1.0, 1.0}), vec({1.0})), NetworkError);
  EXPECT_THROW(PseudoHelmholtz(vec({1.0}), vec({0.0})), NetworkError);
  const PseudoHelmholtz f(vec({1.0}));
  EXPECT_THROW(f.value(vec({0.0})), DomainError);
}

TEST(PseudoHelmholtz, BirthDeathWeightedSolvesPde) {
  const auto n = load_network("networks/birth_death.crn");
  const auto f = build_for_network(n, vec({0.5}));
  ASSERT_EQ(f.kind(), LyapunovKind::pseudo_helmholtz);
  EXPECT_DOUBLE_EQ(std::get<PseudoHelmholtz>(f.variant()).weights()(0), 2.0);
  EXPECT_LT(max_pde_residual(n, f, vec({0.5}), 100, 7), 1e-10);
  expect_dissipative(n, f, vec({0.5}), 200, 8);
  expect_derivatives_match(f, vec({0.5}), 20, 9);
}

TEST(PseudoHelmholtz, ComplexBalancedUsesUnitWeights) {
  const auto n = net("A <-> B @ 2, 1\nB + C <-> 2A @ 1, 1\n");
  const auto eq = find_equilibrium(n, vec({1.0, 1.0, 1.0}));
  ASSERT_TRUE(eq.is_complex_balanced);
  const auto f = build_for_network(n, eq.point);
  EXPECT_TRUE(std::get<PseudoHelmholtz>(f.variant()).weights().isOnes());
  EXPECT_LT(max_pde_residual(n, f, eq.point, 200, 3), 1e-10);
  expect_dissipative(n, f, eq.point, 200, 4);
  expect_derivatives_match(f, eq.point, 20, 5);
}

TEST(OneDimIntegral, Sub1PartRootMatchesClosedForm) {
  const auto part = net("2A -> 2B @ 1\nB -> A @ 2\n");
  const OneDimIntegral f(part, vec({1.0, 1.0}));
  EXPECT_EQ(f.omega(), (IntVector(2) << -1, 1).finished());
  EXPECT_EQ(f.betas(), (std::vector<int>{2, -1}));
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const State x = log_uniform_around(vec({1.0, 1.0}), 10.0, rng);
    const double expected = sub1_part_root(x(0), x(1));
    EXPECT_NEAR(f.u_tilde(x), expected, 1e-10 * std::max(1.0, expected));
    EXPECT_NEAR(f.h(x, f.u_tilde(x)), 0.0, 1e-10 * std::max(1.0, x(0) * x(0) + x(1)));
  }
  EXPECT_NEAR(f.stability_derivative(vec({1.0, 1.0})), -6.0, 1e-12);
}

TEST(OneDimIntegral, HelpersAgreeWithDifferences) {
  const auto part = net("2A -> 2B @ 1\nB -> A @ 2\n");
  const OneDimIntegral f(part, vec({1.0, 1.0}));
  const State x = vec({0.8, 1.7});
  EXPECT_NEAR(f.gamma(x), 0.45, 1e-15);
  EXPECT_TRUE(f.y_dagger(x).isApprox(vec({1.25, 1.25}), 1e-15));
  const double u = 1.3;
  EXPECT_NEAR(f.h_u(x, u), (f.h(x, u + 1e-6) - f.h(x, u - 1e-6)) / 2e-6, 1e-6);
  const Eigen::VectorXd hx_fd = fd_gradient([&](const State& y) { return f.h(y, u); }, x);
  EXPECT_LT(rel_error(f.h_x(x, u), hx_fd), 1e-7);
  const Eigen::VectorXd gl_fd = fd_gradient([&](const State& y) { return f.log_u_tilde(y); }, x);
  EXPECT_LT(rel_error(f.grad_log_u(x), gl_fd), 1e-7);
  const Eigen::MatrixXd hl_fd = fd_jacobian([&](const State& y) { return f.grad_log_u(y); }, x);
  EXPECT_LT(rel_error(f.hess_log_u(x), hl_fd), 1e-6);
}

TEST(OneDimIntegral, SolvesPdeAndIsDissipative) {
  const auto part = net("2A -> 2B @ 1\nB -> A @ 2\n");
  const LyapunovFunction f = build_onedim(part, vec({1.0, 1.0}));
  EXPECT_NEAR(f.value(vec({1.0, 1.0})), 0.0, 1e-15);
  EXPECT_LT(max_pde_residual(part, f, vec({1.0, 1.0}), 100, 21), 1e-10);
  expect_dissipative(part, f, vec({1.0, 1.0}), 200, 22);
  expect_derivatives_match(f, vec({1.0, 1.0}), 20, 23);
}

TEST(OneDimIntegral, BirthDeathAgreesWithWeightedHelmholtz) {
  // Both solve the same PDE with f(x*) = 0 in one dimension.
  const auto n = load_network("networks/birth_death.crn");
  const LyapunovFunction a = build_onedim(n, vec({0.5}));
  const LyapunovFunction b = build_pseudo_helmholtz(vec({0.5}), {Rational(2)});
  for (double x : {0.05, 0.3, 0.5, 1.0, 4.0}) {
    EXPECT_NEAR(a.value(vec({x})), b.value(vec({x})), 1e-11);
    EXPECT_NEAR(a.gradient(vec({x}))(0), b.gradient(vec({x}))(0), 1e-11);
  }
}

TEST(OneDimIntegral, HigherStoichiometry) {
  const auto n = net("3X -> Y @ 1\nY -> 3X @ 2\n0 -> X @ 1/2\nX -> 0 @ 1\nY -> 0 @ 1/3\n");
  EXPECT_THROW(OneDimIntegral(n, vec({1.0, 1.0})), NetworkError);  // dim S = 2
  const auto m = net("3X -> Y @ 1\nY -> 3X @ 2\n6X -> 2Y @ 1/4\n");
  const auto eq = find_equilibrium(m, vec({1.0, 1.0}));
  const LyapunovFunction f = build_onedim(m, eq.point);
  EXPECT_LT(max_pde_residual(m, f, eq.point, 100, 31), 1e-9);
  expect_dissipative(m, f, eq.point, 200, 32, 2.0);
  expect_derivatives_match(f, eq.point, 10, 33, 1.5);
}

TEST(OneDimIntegral, RejectsInvalidInput) {
  const auto part = net("2A -> 2B @ 1\nB -> A @ 2\n");
  EXPECT_THROW(OneDimIntegral(part, vec({1.0, 2.0})), NetworkError);
  EXPECT_THROW(OneDimIntegral(net("A -> B @ 1\nB -> C @ 1\n"), vec({1.0, 1.0, 1.0})), NetworkError);
  const auto f = OneDimIntegral(net("A -> B @ 1\nB -> A @ 1\n"), vec({1.0, 1.0}));
  EXPECT_THROW(f.value(vec({-1.0, 1.0})), DomainError);
}

TEST(OneDimIntegral, PathLeavingOrthantIsDomainError) {
  // A + B conserved and the anchor lies on the line A = B.
  const auto part = net("A -> B @ 1\nB -> A @ 1\n");
  const OneDimIntegral f(part, vec({3.0, 3.0}));
  // gamma(x*) = 0 so the path from (0.1, 0.2) ends at (0.15, 0.15): fine.
  EXPECT_NO_THROW(f.value(vec({0.1, 0.2})));
  const auto shifted = net("A -> B @ 1\nB -> A @ 4\n");
  const OneDimIntegral g(shifted, vec({4.0, 1.0}));
  // gamma* = -1.5; from (0.1, 0.2) the endpoint is (-1.35, 1.65).
  EXPECT_THROW(g.value(vec({0.1, 0.2})), DomainError);
}

TEST(CompoundSub1, Sub1CompoundConstruction) {
  const auto spec = load_compound("networks/sub1_compound.crnc");
  const State x_star = vec({1.0, 4.0, 1.0, 1.0});
  const auto f = build_compound(spec, x_star);
  ASSERT_EQ(f.kind(), LyapunovKind::compound_sub1);
  EXPECT_NEAR(f.value(x_star), 0.0, 1e-14);
  EXPECT_LT(max_pde_residual(spec.network, f, x_star, 100, 41), 1e-8);
  expect_dissipative(spec.network, f, x_star, 200, 42);
  expect_derivatives_match(f, x_star, 10, 43);

  // Part at its anchor, so only the CBP term remains.
  const State x = vec({1.3, 2.5, 1.0, 1.0});
  const double cbp = 3 - x(0) + x(0) * std::log(x(0)) - x(1) / 2 - x(1) / 2 * std::log(4 / x(1));
  EXPECT_NEAR(f.value(x), cbp, 1e-12);

  const auto cert = stability_conditions(spec.network, f, x_star, &spec);
  EXPECT_TRUE(cert.pass);
  ASSERT_EQ(cert.conditions.size(), 1u);
  EXPECT_NEAR(cert.conditions[0].value, -6.0, 1e-12);
  EXPECT_GT(cert.projected_hessian_min_eigenvalue, 0.0);
}

TEST(CompoundSub1, WeightsFoundWithoutHint) {
  auto spec = load_compound("networks/sub1_compound.crnc");
  spec.cbp_weights.reset();
  const auto f = build_compound(spec, vec({1.0, 4.0, 1.0, 1.0}));
  const auto& g = std::get<CompoundSub1>(f.variant());
  EXPECT_DOUBLE_EQ(g.cbp.weights()(0), 1.0);
  EXPECT_DOUBLE_EQ(g.cbp.weights()(1), 0.5);
}

TEST(CompoundSub1, RejectsNonEquilibrium) {
  const auto spec = load_compound("networks/sub1_compound.crnc");
  EXPECT_THROW(build_compound(spec, vec({1.0, 4.0, 1.5, 0.5})), NetworkError);
}

TEST(AutocaCompound, AutocaTau2HessianClosedForm) {
  const auto spec = load_compound("networks/autoca_tau2.crnc");
  const State x_star = vec({1.0, 1.0, 1.0});
  const auto f = build_compound(spec, x_star);
  ASSERT_EQ(f.kind(), LyapunovKind::autoca_compound);
  const auto& g = std::get<AutocaCompound>(f.variant());
  EXPECT_DOUBLE_EQ(g.cbp.weights()(1), 2.0);
  const double k11 = 2, k21 = 1;
  std::mt19937_64 rng(51);
  for (int k = 0; k < 50; ++k) {
    const State x = log_uniform_around(x_star, 10.0, rng);
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 3);
    expected(0, 0) = 1 / x(0);
    expected(1, 1) = 2 / x(1);
    expected(2, 2) = k11 / (x(2) * (k11 + k21 * x(2)));
    EXPECT_LT((f.hessian(x) - expected).cwiseAbs().maxCoeff(), 1e-10);
  }
  EXPECT_LT(max_pde_residual(spec.network, f, x_star, 100, 52), 1e-10);
  expect_dissipative(spec.network, f, x_star, 200, 53);
  expect_derivatives_match(f, x_star, 10, 54);
  EXPECT_TRUE(stability_conditions(spec.network, f, x_star, &spec).pass);
}

TEST(AutocaCompound, AutocaTau2ValueClosedForm) {
  const auto spec = load_compound("networks/autoca_tau2.crnc");
  const State s = vec({1.0, 1.0, 1.0});
  const auto f = build_compound(spec, s);
  const double k2 = 3, k11 = 2, k21 = 1;
  auto closed = [&](const State& x) {
    auto priv = [&](double x3) {
      return x3 * std::log(k2 * x3) - (k11 + k21 * x3) / k21 * std::log(s(0) * k11 + s(0) * k21 * x3);
    };
    return s(0) - x(0) - x(0) * std::log(s(0) / x(0)) + 2 * (s(1) - x(1) - x(1) * std::log(s(1) / x(1))) +
           priv(x(2)) - priv(s(2));
  };
  for (const State& x : {vec({0.5, 2.0, 3.0}), vec({2.0, 0.2, 0.4})}) {
    EXPECT_NEAR(f.value(x), closed(x), 1e-11);
  }
}

TEST(AutocaCompound, AutocaTau4HessianAndCondition) {
  const auto spec = load_compound("networks/autoca_tau4.crnc");
  const State x_star = vec({1.0, 4.0, 1.0});
  const auto f = build_compound(spec, x_star);
  std::mt19937_64 rng(61);
  for (int k = 0; k < 50; ++k) {
    const State x = log_uniform_around(x_star, 10.0, rng);
    const double s = x(2);
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 3);
    expected(0, 0) = 1 / x(0);
    expected(1, 1) = 0.5 / x(1);
    expected(2, 2) = (8 - s * s - 2 * s * s * s) / (s * (8 + 2 * s + s * s + s * s * s));
    EXPECT_LT((f.hessian(x) - expected).cwiseAbs().maxCoeff(), 1e-10);
  }
  const auto cert = stability_conditions(spec.network, f, x_star, &spec);
  bool found = false;
  for (const auto& c : cert.conditions) {
    if (c.name == "part1_autoca_sum") {
      found = true;
      EXPECT_NEAR(c.value, 5.0, 1e-12);
      EXPECT_TRUE(c.pass);
    }
  }
  EXPECT_TRUE(found);
  EXPECT_TRUE(cert.pass);
  EXPECT_LT(max_pde_residual(spec.network, f, x_star, 100, 62), 1e-10);
  expect_dissipative(spec.network, f, x_star, 200, 63);
  expect_derivatives_match(f, x_star, 10, 64);
}

TEST(AutocaCompound, AutocaTau4SecondEquilibriumFailsCertificate) {
  // s^3 + s^2 - 10 s + 8 = (s - 1)(s - 2)(s + 4): a second positive root at s = 2.
  const auto spec = load_compound("networks/autoca_tau4.crnc");
  const State other = vec({1.0, 4.0, 2.0});
  const auto f = build_compound(spec, other);
  const auto cert = stability_conditions(spec.network, f, other, &spec);
  EXPECT_FALSE(cert.pass);
  EXPECT_LT(cert.projected_hessian_min_eigenvalue, 0.0);
}

TEST(Certificate, FailsAwayFromEquilibrium) {
  const auto n = load_network("networks/birth_death.crn");
  const auto f = build_pseudo_helmholtz(vec({0.5}), {Rational(2)});
  const auto cert = stability_conditions(n, f, vec({0.7}));
  EXPECT_FALSE(cert.equilibrium_ok);
  EXPECT_FALSE(cert.pass);
}

TEST(BuildForNetwork, FamilySelection) {
  const auto bd = load_network("networks/birth_death.crn");
  EXPECT_EQ(build_for_network(bd, vec({0.5}), FamilyChoice::onedim).kind(), LyapunovKind::onedim_integral);
  EXPECT_EQ(build_for_network(bd, vec({0.5}), FamilyChoice::helmholtz).kind(), LyapunovKind::pseudo_helmholtz);
  // Unbalanced one-dimensional network falls through to the integral form.
  const auto n = net("2A -> 2B @ 1\nB -> A @ 2\n");
  EXPECT_EQ(build_for_network(n, vec({1.0, 1.0})).kind(), LyapunovKind::onedim_integral);
  EXPECT_THROW(build_for_network(n, vec({1.0, 1.0}), FamilyChoice::helmholtz), NetworkError);
}
