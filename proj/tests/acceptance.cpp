// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "crnlyap/balance.hpp"
#include "crnlyap/cbp.hpp"
#include "crnlyap/lyapunov.hpp"
#include "crnlyap/sim.hpp"
#include "crnlyap/structure.hpp"
#include "support.hpp"

using namespace crnlyap;
using namespace crnlyap::testing;

namespace {

// Collects failed checks; the first few are kept for the summary line.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (ok) return;
    ++failed_;
    if (messages_.size() < 4) messages_.push_back(what);
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool ok() const { return failed_ == 0; }
  std::string summary() const {
    std::ostringstream os;
    os << total_ - failed_ << "/" << total_ << " checks";
    for (const auto& n : notes_) os << "; " << n;
    for (const auto& m : messages_) os << "; FAILED " << m;
    return os.str();
  }

 private:
  int total_ = 0;
  int failed_ = 0;
  std::vector<std::string> messages_;
  std::vector<std::string> notes_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double max_pde_residual(const ReactionNetwork& n, const LyapunovFunction& f, const State& x_star, int samples,
                        unsigned seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) worst = std::max(worst, std::abs(pde_residual(n, f, log_uniform_around(x_star, 10.0, rng))));
  return worst;
}

// Componentwise +-spread perturbation projected back onto x_star + S.
State in_class_perturbation(const StructureReport& s, const State& x_star, double spread, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(1.0 - spread, 1.0 + spread);
  for (;;) {
    State x = x_star;
    for (Eigen::Index j = 0; j < x.size(); ++j) x(j) *= u(rng);
    const Eigen::MatrixXd& q = s.subspace_basis;
    const State y = x_star + q * (q.transpose() * (x - x_star));
    if ((y.array() > 0.0).all() && (y - x_star).norm() > 1e-3) return y;
  }
}

void check_convergence(Checks& c, const ReactionNetwork& n, const State& x_star, int runs, double t_end, unsigned seed,
                       const std::string& label) {
  const auto s = analyze(n);
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < runs; ++k) {
    const State x0 = in_class_perturbation(s, x_star, 0.2, rng);
    const auto traj = integrate(n, x0, t_end);
    c.expect(traj.status == IntegrationStatus::ok, label + " integration status " + to_string(traj.status));
    const double d = (traj.states.back() - x_star).lpNorm<Eigen::Infinity>();
    worst = std::max(worst, d);
    c.expect(d < 1e-5, label + " run " + std::to_string(k) + " distance " + fmt(d));
  }
  c.note(label + " worst final distance " + fmt(worst));
}

double sub1_part_root(double x1, double x2) { return (-x1 * x1 + x1 * std::sqrt(x1 * x1 + 8 * x2)) / (2 * x1 * x1); }

// --- criteria ---------------------------------------------------------------

void ac1(Checks& c) {
  const auto results = enumerate_cbp(load_network("networks/calvin.crn"));
  c.expect(results.size() == 4, "expected 4 scalings, got " + std::to_string(results.size()));
  const std::vector<Rational> d1{Rational(5, 4), Rational(5, 3), Rational(5, 2), Rational(5)};
  const std::vector<Rational> k1{Rational(3125, 1024), Rational(3125, 243), Rational(3125, 32), Rational(3125)};
  // Rates as printed with two decimals.
  const std::vector<double> printed{3.05, 12.86, 97.66, 3125.0};
  for (std::size_t k = 0; k < std::min<std::size_t>(4, results.size()); ++k) {
    const auto& r = results[k];
    c.expect(r.scaling.diag[0] == d1[k], "d1 #" + std::to_string(k) + " = " + crnlyap::to_string(r.scaling.diag[0]));
    for (std::size_t j = 1; j < r.scaling.diag.size(); ++j) c.expect(r.scaling.diag[j] == 1, "other entries are 1");
    c.expect(r.network.reaction(0).rate == k1[k], "k1 #" + std::to_string(k) + " = " + crnlyap::to_string(r.network.reaction(0).rate));
    const double v = to_double(r.network.reaction(0).rate);
    c.expect(std::abs(std::round(v * 100) / 100 - printed[k]) < 1e-9, "decimal rate " + fmt(v));
  }
}

void ac2(Checks& c) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> num(50, 5000);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    // Source 2S1 <-> 0 with k1 on the forward reaction; D = 2 gives 2S1 -> S1 @ 4k1, 0 -> S1 @ k2.
    const Rational ka(num(rng), 1000), kb(num(rng), 1000);
    const auto src = parse_network_or_throw("2S1 -> 0 @ " + crnlyap::to_string(ka) + "\n0 -> 2S1 @ " +
                                            crnlyap::to_string(kb) + "\n");
    const auto cbp = apply_scaling(src, ScalingMatrix{{Rational(2)}});
    const double expected = std::sqrt(to_double(kb) / (4 * to_double(ka)));
    const auto eq = find_equilibrium(cbp.network, vec({1.0}), 1e-14);
    const double err = std::abs(eq.point(0) - expected);
    worst = std::max(worst, err);
    c.expect(err < 1e-10, "equilibrium error " + fmt(err));
  }
  c.note("worst equilibrium error " + fmt(worst));

  const auto bd = load_network("networks/birth_death.crn");
  const auto traj = integrate(bd, vec({2.0}), 20.0);
  const double dist = std::abs(traj.states.back()(0) - 0.5);
  c.expect(traj.status == IntegrationStatus::ok && dist < 1e-6, "simulation distance " + fmt(dist));
  c.note("distance at t=20 " + fmt(dist));

  const auto f = build_pseudo_helmholtz(vec({0.5}), {Rational(2)});
  const double res = max_pde_residual(bd, f, vec({0.5}), 100, 7);
  c.expect(res < 1e-10, "pde residual " + fmt(res));
  c.note("pde residual " + fmt(res));
}

void ac3(Checks& c) {
  const auto spec = load_compound("networks/sub1_compound.crnc");
  const auto s = analyze(spec.network);
  c.expect(s.dim_s == 3, "dim S = " + std::to_string(s.dim_s));
  c.expect(s.deficiency == 2, "deficiency = " + std::to_string(s.deficiency));

  const State x_star = vec({1.0, 4.0, 1.0, 1.0});
  const double eq_res = vector_field(spec.network, x_star).lpNorm<Eigen::Infinity>();
  c.expect(eq_res < 1e-12, "equilibrium residual " + fmt(eq_res));

  const auto f = build_compound(spec, x_star);
  const auto& g = std::get<CompoundSub1>(f.variant());
  std::mt19937_64 rng(44);
  double worst_u = 0.0;
  for (int k = 0; k < 50; ++k) {
    const State x = log_uniform_around(x_star, 10.0, rng);
    const State xp = restrict_state(x, g.part_layouts[0]);
    const double expected = sub1_part_root(xp(0), xp(1));
    const double err = std::abs(g.parts[0].u_tilde(xp) - expected) / std::max(1.0, expected);
    worst_u = std::max(worst_u, err);
    c.expect(err < 1e-10, "u closed form error " + fmt(err));
  }
  c.note("u error " + fmt(worst_u));

  const auto cert = stability_conditions(spec.network, f, x_star, &spec);
  bool found = false;
  for (const auto& cond : cert.conditions) {
    if (cond.name == "part1_h_derivative") {
      found = true;
      c.expect(std::abs(cond.value + 6.0) < 1e-12, "side condition " + fmt(cond.value));
    }
  }
  c.expect(found, "side condition reported");
  c.expect(cert.pass, "certificate passes");

  const double res = max_pde_residual(spec.network, f, x_star, 100, 45);
  c.expect(res < 1e-8, "pde residual " + fmt(res));
  c.note("pde residual " + fmt(res));
  check_convergence(c, spec.network, x_star, 10, 200.0, 46, "sub1_compound");
}

void ac4(Checks& c) {
  {
    const auto spec = load_compound("networks/autoca_tau2.crnc");
    const State x_star = vec({1.0, 1.0, 1.0});
    const auto f = build_compound(spec, x_star);
    const double k11 = 2, k21 = 1;
    std::mt19937_64 rng(57);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const State x = log_uniform_around(x_star, 10.0, rng);
      Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 3);
      expected(0, 0) = 1 / x(0);
      expected(1, 1) = 2 / x(1);
      expected(2, 2) = k11 / (x(2) * (k11 + k21 * x(2)));
      const double err = (f.hessian(x) - expected).cwiseAbs().maxCoeff();
      worst = std::max(worst, err);
      c.expect(err < 1e-10, "autoca_tau2 hessian error " + fmt(err));
    }
    const double res = max_pde_residual(spec.network, f, x_star, 100, 571);
    c.expect(res < 1e-10, "autoca_tau2 pde residual " + fmt(res));
    c.note("autoca_tau2 hessian error " + fmt(worst) + ", pde residual " + fmt(res));
    check_convergence(c, spec.network, x_star, 10, 200.0, 572, "autoca_tau2");
  }
  {
    const auto spec = load_compound("networks/autoca_tau4.crnc");
    const State x_star = vec({1.0, 4.0, 1.0});
    const auto f = build_compound(spec, x_star);
    std::mt19937_64 rng(58);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const State x = log_uniform_around(x_star, 10.0, rng);
      const double s = x(2);
      Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 3);
      expected(0, 0) = 1 / x(0);
      expected(1, 1) = 0.5 / x(1);
      expected(2, 2) = (8 - s * s - 2 * s * s * s) / (s * (8 + 2 * s + s * s + s * s * s));
      const double err = (f.hessian(x) - expected).cwiseAbs().maxCoeff();
      worst = std::max(worst, err);
      c.expect(err < 1e-10, "autoca_tau4 hessian error " + fmt(err));
    }
    const auto cert = stability_conditions(spec.network, f, x_star, &spec);
    bool found = false;
    for (const auto& cond : cert.conditions) {
      if (cond.name == "part1_autoca_sum") {
        found = true;
        c.expect(std::abs(cond.value - 5.0) < 1e-12 && cond.pass, "condition value " + fmt(cond.value));
      }
    }
    c.expect(found, "condition reported");
    c.expect(cert.pass, "autoca_tau4 certificate passes");
    const double res = max_pde_residual(spec.network, f, x_star, 100, 581);
    c.expect(res < 1e-10, "autoca_tau4 pde residual " + fmt(res));
    c.note("autoca_tau4 hessian error " + fmt(worst) + ", pde residual " + fmt(res));
    check_convergence(c, spec.network, x_star, 10, 200.0, 582, "autoca_tau4");
  }
}

// m' S1 <-> m S2 plus a species-disjoint reversible monomolecular pair, with
// each reversible pair balanced at a random positive point.
ReactionNetwork conjugacy_seed(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coeff(1, 4);
  std::uniform_int_distribution<int> num(1, 8);
  std::uniform_real_distribution<double> rate(0.5, 2.0);
  const int mp = coeff(rng), m = coeff(rng);
  const Rational x1(num(rng), 4), x2(num(rng), 4), x3(num(rng), 4), x4(num(rng), 4);
  const Rational kf = from_double(std::round(rate(rng) * 100) / 100);
  const Rational kg = from_double(std::round(rate(rng) * 100) / 100);
  auto pow = [](const Rational& b, int e) {
    Rational r(1);
    for (int i = 0; i < e; ++i) r *= b;
    return r;
  };
  const Rational kb = kf * pow(x1, mp) / pow(x2, m);
  const Rational kh = kg * x3 / x4;
  std::ostringstream os;
  os << "species S1 S2 S3 S4\n";
  os << (mp == 1 ? "" : std::to_string(mp)) << "S1 -> " << (m == 1 ? "" : std::to_string(m)) << "S2 @ "
     << crnlyap::to_string(kf) << "\n";
  os << (m == 1 ? "" : std::to_string(m)) << "S2 -> " << (mp == 1 ? "" : std::to_string(mp)) << "S1 @ "
     << crnlyap::to_string(kb) << "\n";
  os << "S3 <-> S4 @ " << crnlyap::to_string(kg) << ", " << crnlyap::to_string(kh) << "\n";
  return parse_network_or_throw(os.str());
}

void ac5(Checks& c) {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> start(0.2, 3.0);
  std::size_t networks = 0;
  double worst = 0.0;
  for (int seed = 0; seed < 10; ++seed) {
    const auto src = conjugacy_seed(rng);
    const State x0 = vec({start(rng), start(rng), start(rng), start(rng)});
    const auto eq = find_equilibrium(src, x0);
    c.expect(eq.is_complex_balanced, "seed " + std::to_string(seed) + " complex balanced");
    for (const auto& cbp : enumerate_cbp(src)) {
      ++networks;
      const double dev = verify_conjugacy(src, cbp, x0, 10.0);
      worst = std::max(worst, dev);
      c.expect(dev < 1e-6, "seed " + std::to_string(seed) + " D=" + cbp.scaling.to_string() + " deviation " + fmt(dev));
    }
  }
  c.expect(networks > 0, "at least one CBP network enumerated");
  c.note(std::to_string(networks) + " CBP networks, worst deviation " + fmt(worst));
}

void ac6(Checks& c) {
  // Constructed functions: derivative checks and dissipation.
  struct Case {
    std::string label;
    ReactionNetwork net;
    LyapunovFunction f;
    State x_star;
  };
  std::vector<Case> cases;
  {
    const auto bd = load_network("networks/birth_death.crn");
    cases.push_back({"birth_death", bd, build_pseudo_helmholtz(vec({0.5}), {Rational(2)}), vec({0.5})});
    const auto part = parse_network_or_throw("2A -> 2B @ 1\nB -> A @ 2\n");
    cases.push_back({"onedim", part, build_onedim(part, vec({1.0, 1.0})), vec({1.0, 1.0})});
    const auto cb = parse_network_or_throw("A <-> B @ 2, 1\nB + C <-> 2A @ 1, 1\n");
    const State cb_star = find_equilibrium(cb, vec({1.0, 1.0, 1.0})).point;
    cases.push_back({"complex_balanced", cb, build_for_network(cb, cb_star), cb_star});
    for (const auto& [file, xs] : std::vector<std::pair<std::string, State>>{
             {"networks/sub1_compound.crnc", vec({1.0, 4.0, 1.0, 1.0})},
             {"networks/autoca_tau2.crnc", vec({1.0, 1.0, 1.0})},
             {"networks/autoca_tau4.crnc", vec({1.0, 4.0, 1.0})}}) {
      const auto spec = load_compound(file);
      cases.push_back({file, spec.network, build_compound(spec, xs), xs});
    }
  }
  for (const auto& cs : cases) {
    std::mt19937_64 rng(600);
    double worst_fd = 0.0;
    for (int k = 0; k < 10; ++k) {
      const State x = log_uniform_around(cs.x_star, 3.0, rng);
      const Eigen::VectorXd g = cs.f.gradient(x);
      const Eigen::VectorXd g_fd = fd_gradient([&](const State& y) { return cs.f.value(y); }, x);
      const Eigen::MatrixXd h = cs.f.hessian(x);
      const Eigen::MatrixXd h_fd = fd_jacobian([&](const State& y) { return cs.f.gradient(y); }, x);
      worst_fd = std::max({worst_fd, rel_error(g, g_fd), rel_error(h, h_fd)});
    }
    c.expect(worst_fd < 1e-5, cs.label + " finite differences " + fmt(worst_fd));
    double worst_diss = -1e300;
    for (int k = 0; k < 200; ++k) {
      const State x = log_uniform_around(cs.x_star, 10.0, rng);
      worst_diss = std::max(worst_diss, cs.f.gradient(x).dot(vector_field(cs.net, x)));
    }
    c.expect(worst_diss <= 1e-12, cs.label + " dissipation " + fmt(worst_diss));
  }

  // Structure invariants and round trip over the corpus.
  const std::filesystem::path corpus = source_path("tests/data/corpus");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(corpus)) {
    if (e.path().extension() == ".crn") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  c.expect(files.size() == 30, "corpus has " + std::to_string(files.size()) + " files");
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    const auto n = parse_network_or_throw(read_file(path.string()));
    const std::string once = serialize_network(n);
    const auto back = parse_network_or_throw(once);
    c.expect(back == n && serialize_network(back) == once, name + " round trip");

    const auto s = analyze(n);
    c.expect(s.deficiency >= 0, name + " deficiency " + std::to_string(s.deficiency));
    const IntMatrix left = s.conservation_basis.transpose() * s.stoich_matrix;
    c.expect(left.isZero(0), name + " left null space");
    c.expect(static_cast<std::size_t>(s.conservation_basis.cols()) + s.dim_s == n.num_species(),
             name + " rank plus nullity");
    if (s.conservation_basis.cols() > 0) {
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(s.conservation_basis.cast<double>());
      c.expect(lu.rank() == s.conservation_basis.cols(), name + " conservation basis independent");
    }
  }
}

struct Criterion {
  const char* id;
  const char* title;
  double budget_seconds;
  std::function<void(Checks&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC1", "Calvin subnetwork scalings", 1.0, ac1},
      {"AC2", "birth-death CBP", 5.0, ac2},
      {"AC3", "one-dimensional compound end to end", 30.0, ac3},
      {"AC4", "autocatalytic compounds", 30.0, ac4},
      {"AC5", "conjugacy of CBP networks", 120.0, ac5},
      {"AC6", "invariant suites", 120.0, ac6},
  };
  bool all = true;
  for (const auto& cr : criteria) {
    Checks checks;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(checks);
    } catch (const std::exception& e) {
      checks.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    checks.expect(secs < cr.budget_seconds, "runtime " + fmt(secs) + " s over budget " + fmt(cr.budget_seconds) + " s");
    const bool ok = checks.ok();
    all = all && ok;
    std::printf("%s %s: %s (%.3f s) %s\n", cr.id, ok ? "PASS" : "FAIL", cr.title, secs, checks.summary().c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
