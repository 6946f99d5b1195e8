#include "crnlyap/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "crnlyap/lyapunov.hpp"

namespace crnlyap {

namespace {

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

// Stage states may leave the orthant slightly; the polynomial field is still
// defined there, and a negative accepted state is rejected later.
State raw_field(const ReactionNetwork& net, const State& x) {
  State dx = State::Zero(x.size());
  for (std::size_t i = 0; i < net.num_reactions(); ++i) {
    const auto& r = net.reaction(i);
    double rate = r.rate_value();
    for (const auto& [j, c] : r.reactant.terms()) rate *= std::pow(x(static_cast<Eigen::Index>(j)), c);
    for (const auto& [j, c] : r.product.terms()) dx(static_cast<Eigen::Index>(j)) += rate * c;
    for (const auto& [j, c] : r.reactant.terms()) dx(static_cast<Eigen::Index>(j)) -= rate * c;
  }
  return dx;
}

void record(Trajectory& traj, const ReactionNetwork& net, const LyapunovFunction* f, double t, const State& x,
            const State& dx) {
  traj.times.push_back(t);
  traj.states.push_back(x);
  if (!f) return;
  double value = std::numeric_limits<double>::quiet_NaN();
  double diss = std::numeric_limits<double>::quiet_NaN();
  // f is only defined on the open orthant; boundary samples stay NaN.
  try {
    value = f->value(x);
    diss = f->gradient(x).dot(dx);
  } catch (const NumericalError&) {
  } catch (const NetworkError&) {
  }
  (void)net;
  traj.f_values.push_back(value);
  traj.dissipation.push_back(diss);
}

}  // namespace

const char* to_string(IntegrationStatus status) {
  switch (status) {
    case IntegrationStatus::ok:
      return "ok";
    case IntegrationStatus::step_underflow:
      return "step_underflow";
    case IntegrationStatus::max_steps:
      return "max_steps";
  }
  return "unknown";
}

Trajectory integrate(const ReactionNetwork& net, const State& x0, double t_end, const IntegrateOptions& options,
                     const LyapunovFunction* f) {
  check_nonnegative_state(net, x0);
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw NetworkError("t_end must be positive");
  if (!(options.rel_tol > 0.0) || !(options.abs_tol > 0.0)) throw NetworkError("tolerances must be positive");
  if (f && f->dimension() != x0.size()) throw NetworkError("Lyapunov function dimension does not match the network");

  const double min_step = options.min_step > 0.0 ? options.min_step : 1e-14 * t_end;
  double h = options.initial_step > 0.0 ? options.initial_step : t_end / 1e4;
  const int grid = std::max(options.grid_points, 0);
  int next_grid = 1;
  auto grid_time = [&](int k) { return k == grid ? t_end : t_end * k / grid; };

  Trajectory traj;
  double t = 0.0;
  State x = x0;
  State k1 = vector_field(net, x);
  record(traj, net, f, t, x, k1);

  std::size_t steps = 0;
  while (t < t_end) {
    if (steps++ >= options.max_steps) {
      traj.status = IntegrationStatus::max_steps;
      traj.message = "maximum number of steps reached at t = " + std::to_string(t);
      return traj;
    }
    double target = t_end;
    if (grid > 0) {
      while (next_grid < grid && grid_time(next_grid) <= t) ++next_grid;
      target = grid_time(next_grid);
    }
    bool hits_target = false;
    double step = h;
    if (t + step >= target || target - (t + step) < 1e-12 * std::max(1.0, target)) {
      step = target - t;
      hits_target = true;
    }

    const State k2 = raw_field(net, x + step * a21 * k1);
    const State k3 = raw_field(net, x + step * (a31 * k1 + a32 * k2));
    const State k4 = raw_field(net, x + step * (a41 * k1 + a42 * k2 + a43 * k3));
    const State k5 = raw_field(net, x + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 = raw_field(net, x + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    State next = x + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = raw_field(net, next);
    const State err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double norm = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double sc = options.abs_tol + options.rel_tol * std::max(std::abs(x(j)), std::abs(next(j)));
      norm = std::max(norm, std::abs(err(j)) / sc);
    }
    // Error per unit step: local errors summed over [0, t_end] stay within the tolerance.
    norm *= t_end / step;
    const bool finite = next.allFinite() && std::isfinite(norm);
    const bool negative = finite && next.minCoeff() < 0.0;

    if (!finite || norm > 1.0 || negative) {
      ++traj.rejected_steps;
      if (step <= min_step) {
        // Tiny step that only dips below zero by rounding: clamp and continue.
        if (finite && norm <= 1.0 && next.minCoeff() >= -1e-13) {
          next = next.cwiseMax(0.0);
          ++traj.clamp_events;
        } else {
          traj.status = IntegrationStatus::step_underflow;
          traj.message = "step size underflow at t = " + std::to_string(t);
          return traj;
        }
      } else {
        if (!finite || negative) {
          h = std::max(0.5 * step, min_step);
        } else {
          h = std::max(step * std::max(0.2, 0.9 * std::pow(norm, -0.25)), min_step);
        }
        continue;
      }
    }

    t = hits_target ? target : t + step;
    x = next;
    k1 = vector_field(net, x);  // FSAL would reuse k7 only without clamping
    record(traj, net, f, t, x, k1);
    const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.25), 0.2, 5.0);
    // Do not let a short step forced by the grid shrink the working step size.
    h = hits_target && step < h ? std::max(h, step * factor) : std::max(step * factor, min_step);
  }
  return traj;
}

Trajectory resample(const Trajectory& traj, int points) {
  if (traj.times.empty()) throw NetworkError("cannot resample an empty trajectory");
  if (points < 2) throw NetworkError("resampling needs at least two points");
  Trajectory out;
  out.status = traj.status;
  out.message = traj.message;
  out.clamp_events = traj.clamp_events;
  out.rejected_steps = traj.rejected_steps;
  const double t0 = traj.times.front();
  const double t1 = traj.times.back();
  const bool lyap = traj.has_lyapunov();
  std::size_t seg = 0;
  for (int k = 0; k < points; ++k) {
    const double t = k == points - 1 ? t1 : t0 + (t1 - t0) * k / (points - 1);
    while (seg + 1 < traj.times.size() && traj.times[seg + 1] < t) ++seg;
    const std::size_t hi = std::min(seg + 1, traj.times.size() - 1);
    const double span = traj.times[hi] - traj.times[seg];
    const double w = span > 0.0 ? std::clamp((t - traj.times[seg]) / span, 0.0, 1.0) : 0.0;
    out.times.push_back(t);
    out.states.push_back((1.0 - w) * traj.states[seg] + w * traj.states[hi]);
    if (lyap) {
      out.f_values.push_back((1.0 - w) * traj.f_values[seg] + w * traj.f_values[hi]);
      out.dissipation.push_back((1.0 - w) * traj.dissipation[seg] + w * traj.dissipation[hi]);
    }
  }
  return out;
}

ConvergenceReport convergence_report(const Trajectory& traj, const State& x_star, double monotone_tol) {
  ConvergenceReport report;
  if (traj.states.empty()) throw NetworkError("empty trajectory");
  report.final_distance = (traj.states.back() - x_star).lpNorm<Eigen::Infinity>();
  if (!traj.has_lyapunov()) {
    report.max_dissipation = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  report.max_dissipation = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.f_values.size(); ++k) {
    if (std::isfinite(traj.dissipation[k])) report.max_dissipation = std::max(report.max_dissipation, traj.dissipation[k]);
    if (k > 0 && std::isfinite(traj.f_values[k]) && std::isfinite(traj.f_values[k - 1]) &&
        traj.f_values[k] > traj.f_values[k - 1] + monotone_tol) {
      report.f_monotone = false;
    }
  }
  if (!std::isfinite(report.max_dissipation)) report.max_dissipation = std::numeric_limits<double>::quiet_NaN();
  return report;
}

void write_csv(std::ostream& out, const ReactionNetwork& net, const Trajectory& traj) {
  auto fmt = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "t";
  for (const auto& name : net.species()) out << ',' << name;
  if (traj.has_lyapunov()) out << ",f,dissipation";
  out << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << fmt(traj.times[k]);
    for (Eigen::Index j = 0; j < traj.states[k].size(); ++j) out << ',' << fmt(traj.states[k](j));
    if (traj.has_lyapunov()) out << ',' << fmt(traj.f_values[k]) << ',' << fmt(traj.dissipation[k]);
    out << '\n';
  }
}

}  // namespace crnlyap
