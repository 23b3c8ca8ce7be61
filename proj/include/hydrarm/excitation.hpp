#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hydrarm/base_reduction.hpp"
#include "hydrarm/model.hpp"

namespace hydrarm {

/// Finite Fourier-series joint trajectory with velocity-amplitude coefficients:
///   q_i(t)   = sum_l a_il/(w l) sin(w l t) - b_il/(w l) cos(w l t) + q_i0
///   dq_i(t)  = sum_l a_il cos(w l t) + b_il sin(w l t)
///   ddq_i(t) = sum_l -a_il w l sin(w l t) + b_il w l cos(w l t)
struct FourierTrajectory {
  struct JointSeries {
    Eigen::VectorXd a;  // rad/s, one per harmonic
    Eigen::VectorXd b;  // rad/s
    double offset = 0.0;  // q_i0, rad
  };

  double omega_f = 0.0;  // base angular frequency, rad/s
  int n_harmonics = 0;
  std::array<JointSeries, kNumJoints> joints;

  double period() const;
};

JointState eval_trajectory(const FourierTrajectory& traj, double t);

enum class ConstraintKind { pos, vel, acc, boundary_pos, boundary_vel, boundary_acc };

std::string to_string(ConstraintKind kind);

struct ConstraintViolation {
  int joint = 0;  // 1-based
  ConstraintKind kind = ConstraintKind::pos;
  double worst = 0.0;
  double bound = 0.0;
};

struct ConstraintReport {
  bool feasible = false;
  std::vector<ConstraintViolation> violations;
  // conservative per-joint position amplitude sum 1/(w l) sqrt(a^2+b^2); when
  // offset +/- amplitude stays inside the limits the grid check cannot fail
  std::array<double, kNumJoints> analytic_amplitude{};
  bool analytic_ok = false;
};

/// Grid check of |q|,|dq|,|ddq| over one period plus boundary conditions at t0
/// and tf (velocity/acceleration to 1e-6; position relative to the offset).
ConstraintReport check_constraints(const FourierTrajectory& traj,
                                   const std::vector<JointLimits>& limits, double grid_dt);

struct ConditionNumberResult {
  double kappa = 0.0;  // infinity when the stacked regressor is rank deficient
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  std::string diagnostic;
};

/// Condition number of the base regressor stacked over n_samples uniform time
/// points across one period.
ConditionNumberResult condition_number(const RobotModel& model, const BaseParamMapping& mapping,
                                       const FourierTrajectory& traj, int n_samples = 100);

struct TrajectoryOptions {
  int n_harmonics = 3;
  double omega_f = 0.0;  // defaults to 0.1*pi when zero
  std::uint64_t seed = 1;
  int budget = 600;            // objective evaluations
  int n_samples = 100;         // stacking grid for the condition number
  bool strict_zero_position = false;  // force q(t0) = 0 instead of q(t0) = q_i0
};

struct OptimizedTrajectory {
  FourierTrajectory trajectory;
  double kappa = 0.0;
  ConstraintReport report;
  std::vector<double> best_history;  // best-so-far objective per evaluation
  int params_pre_elimination = 0;    // 6 * (2 n_H + 1)
  int evaluations = 0;
};

/// Derivative-free search (random multistart + coordinate pattern refinement)
/// over boundary-eliminated coefficients; deterministic for a fixed seed.
OptimizedTrajectory optimize_trajectory(const RobotModel& model, const BaseParamMapping& mapping,
                                        const std::vector<JointLimits>& limits,
                                        const TrajectoryOptions& options);

/// Fills the boundary-eliminated coefficients (a_nH from zero start velocity,
/// b_1 and b_2 from zero start acceleration and start-at-offset position).
FourierTrajectory complete_trajectory(double omega_f, int n_harmonics,
                                      const std::array<Eigen::VectorXd, kNumJoints>& a_free,
                                      const std::array<Eigen::VectorXd, kNumJoints>& b_free,
                                      const std::array<double, kNumJoints>& offsets);

std::string trajectory_to_json(const FourierTrajectory& traj);
/// Accepts units "rad" (native) or "deg" (coefficients deg/s, offsets deg).
FourierTrajectory trajectory_from_json(const std::string& json_text);

/// The published coefficient table for this arm (degree units, omega_f = 0.1*pi,
/// three harmonics); shipped for regression use, not asserted feasible.
FourierTrajectory table3_preset();

void write_trajectory_profile_csv(const std::string& path, const FourierTrajectory& traj,
                                  double dt, const std::vector<std::string>& comments = {});

}  // namespace hydrarm
