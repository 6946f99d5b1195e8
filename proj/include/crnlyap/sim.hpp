#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "crnlyap/model.hpp"

namespace crnlyap {

class LyapunovFunction;

enum class IntegrationStatus { ok, step_underflow, max_steps };

const char* to_string(IntegrationStatus status);

struct IntegrateOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double initial_step = 0.0;  // 0 means t_end / 1e4
  std::size_t max_steps = 10'000'000;
  // When positive, steps are shortened so that each of the grid_points + 1
  // uniform times on [0, t_end] is hit exactly.
  int grid_points = 0;
  double min_step = 0.0;  // 0 means 1e-14 * t_end
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<double> f_values;     // empty unless a Lyapunov function was attached
  std::vector<double> dissipation;  // grad f . dx/dt, same length as f_values
  IntegrationStatus status = IntegrationStatus::ok;
  std::string message;
  std::size_t clamp_events = 0;
  std::size_t rejected_steps = 0;

  bool has_lyapunov() const { return !f_values.empty(); }
};

/// Dormand-Prince 5(4) with step rejection on negative components. On failure
/// the partial trajectory is returned with a non-ok status.
/// Throws NetworkError on bad arguments.
Trajectory integrate(const ReactionNetwork& net, const State& x0, double t_end, const IntegrateOptions& options = {},
                     const LyapunovFunction* f = nullptr);

/// Linear interpolation onto `points` uniform times spanning the trajectory.
Trajectory resample(const Trajectory& traj, int points = 512);

struct ConvergenceReport {
  double final_distance = 0.0;
  bool f_monotone = true;
  double max_dissipation = 0.0;  // NaN when no Lyapunov data
};

ConvergenceReport convergence_report(const Trajectory& traj, const State& x_star, double monotone_tol = 1e-10);

/// Header `t,<species...>[,f,dissipation]`, 17 significant digits.
void write_csv(std::ostream& out, const ReactionNetwork& net, const Trajectory& traj);

}  // namespace crnlyap
