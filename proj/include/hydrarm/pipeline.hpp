#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hydrarm/base_reduction.hpp"
#include "hydrarm/excitation.hpp"
#include "hydrarm/friction_ident.hpp"
#include "hydrarm/hydraulic.hpp"
#include "hydrarm/model.hpp"

namespace hydrarm {

struct IdentificationDataset {
  std::vector<JointState> states;
  std::vector<TorqueVector> torques;  // measured, aligned with states
  double rate_hz = 0.0;
  std::string trajectory_ref;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Samples states along one trajectory period and produces measured torques as
/// ground-truth inverse dynamics plus i.i.d. Gaussian noise.
IdentificationDataset simulate_arm_run(const RobotModel& model, const LinkInertialSet& ground_truth,
                                       const FourierTrajectory& traj, double rate_hz,
                                       double noise_sigma, std::uint64_t seed,
                                       bool check_feasible = true);

/// Stacks the identification system in per-joint blocks: all of joint 1's rows,
/// then joint 2's, ... Row correspondence between H and gamma is exact.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_system(const BaseParamMapping& mapping,
                                                            const RobotModel& model,
                                                            const IdentificationDataset& ds);

struct LsSolution {
  Eigen::VectorXd beta;
  double residual_rms = 0.0;
  double kappa = 0.0;
  int rank = 0;
};

/// Orthogonal-decomposition least squares (the normal equations are never
/// formed). Throws on rank deficiency, naming near-null directions by label.
LsSolution solve_ls(const Eigen::MatrixXd& h, const Eigen::VectorXd& gamma,
                    const std::vector<std::string>& labels = {});

std::vector<TorqueVector> predict_torques(const BaseParamMapping& mapping, const RobotModel& model,
                                          const Eigen::VectorXd& beta,
                                          const std::vector<JointState>& states);

/// Residual standard deviation: sqrt(sum (pred-meas)^2 / sum pred^2).
double rsd(const Eigen::VectorXd& predicted, const Eigen::VectorXd& measured);
double rsd(const std::vector<TorqueVector>& predicted, const std::vector<TorqueVector>& measured,
           int joint);

struct PipelineConfig {
  RobotModel model;
  LinkInertialSet ground_truth;
  FourierTrajectory trajectory;
  double rate_hz = 50.0;
  double torque_noise = 0.1;  // N*m
  std::uint64_t seed = 1;

  bool skip_friction = false;  // ablation: leave friction in the measurements
  std::optional<std::array<FrictionParams, kNumJoints>> preidentified_friction;

  // cylinder stage
  ExcitationSpec cylinder_excitation = default_identification_excitation();
  NoiseSpec cylinder_noise;
  double cylinder_periods = 3.0;
  double cylinder_rate_hz = 50.0;

  // reduction stage
  int reduction_samples = 200;
  std::uint64_t reduction_seed = 42;
  double reduction_tol = 1e-9;
};

struct IdentificationReport {
  Eigen::VectorXd beta;
  std::vector<std::string> labels;
  std::array<double, kNumJoints> rsd_ratio{};      // dimensionless, the defining formula
  std::array<double, kNumJoints> residual_rms{};   // N*m, comparable to reported torque errors
  double kappa = 0.0;
  int rank = 0;
  int samples = 0;
  std::array<FrictionParams, kNumJoints> friction;
  bool friction_applied = false;
  std::map<std::string, double> stage_ms;
};

/// Full flow: cylinder friction identification, base reduction, arm run,
/// friction substitution, least squares, prediction and RSD validation.
/// Stage failures rethrow with a stage tag.
IdentificationReport run_pipeline(const PipelineConfig& config);

/// Plausible ground-truth inertial description of the arm used by the
/// synthetic testbed (CAD-style COM inputs, friction triples planted per joint).
LinkInertialSet testbed_ground_truth();

void write_dataset_csv(const std::string& path, const IdentificationDataset& ds,
                       const std::vector<std::string>& comments = {});
IdentificationDataset read_dataset_csv(const std::string& path);

std::string report_to_json(const IdentificationReport& report);

}  // namespace hydrarm
