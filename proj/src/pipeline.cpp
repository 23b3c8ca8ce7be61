#include "hydrarm/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>

#include <json.hpp>

#include "hydrarm/csv.hpp"
#include "hydrarm/dynamics.hpp"

namespace hydrarm {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

[[noreturn]] void stage_fail(const std::string& stage, const std::exception& e) {
  throw std::runtime_error("pipeline stage '" + stage + "': " + e.what());
}

}  // namespace

IdentificationDataset simulate_arm_run(const RobotModel& model, const LinkInertialSet& ground_truth,
                                       const FourierTrajectory& traj, double rate_hz,
                                       double noise_sigma, std::uint64_t seed,
                                       bool check_feasible) {
  if (!(rate_hz > 0.0)) {
    throw std::invalid_argument("simulate_arm_run: rate must be positive");
  }
  if (check_feasible) {
    const ConstraintReport report = check_constraints(traj, model.limits, traj.period() / 2000.0);
    if (!report.feasible) {
      std::string what = "simulate_arm_run: trajectory violates limits:";
      for (const auto& v : report.violations) {
        what += " joint" + std::to_string(v.joint) + "/" + to_string(v.kind);
      }
      throw std::invalid_argument(what);
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  IdentificationDataset ds;
  ds.rate_hz = rate_hz;
  ds.noise_sigma = noise_sigma;
  ds.seed = seed;
  const int count = static_cast<int>(std::llround(traj.period() * rate_hz));
  ds.states.reserve(count);
  ds.torques.reserve(count);
  for (int k = 0; k < count; ++k) {
    const JointState s = eval_trajectory(traj, k / rate_hz);
    TorqueVector tau = inverse_dynamics(model, ground_truth, s);
    for (int i = 0; i < kNumJoints; ++i) tau[i] += noise_sigma * normal(rng);
    ds.states.push_back(s);
    ds.torques.push_back(tau);
  }
  return ds;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_system(const BaseParamMapping& mapping,
                                                            const RobotModel& model,
                                                            const IdentificationDataset& ds) {
  if (ds.states.empty() || ds.states.size() != ds.torques.size()) {
    throw std::invalid_argument("assemble_system: dataset is empty or misaligned");
  }
  const int count = static_cast<int>(ds.states.size());
  Eigen::MatrixXd h(count * kNumJoints, mapping.rank);
  Eigen::VectorXd gamma(count * kNumJoints);
  for (int k = 0; k < count; ++k) {
    const Eigen::MatrixXd block = base_regressor(model, mapping, ds.states[k]);
    for (int i = 0; i < kNumJoints; ++i) {
      h.row(i * count + k) = block.row(i);
      gamma[i * count + k] = ds.torques[k][i];
    }
  }
  return {std::move(h), std::move(gamma)};
}

LsSolution solve_ls(const Eigen::MatrixXd& h, const Eigen::VectorXd& gamma,
                    const std::vector<std::string>& labels) {
  if (h.rows() != gamma.size()) {
    throw std::invalid_argument("solve_ls: row mismatch between H and gamma");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const int cols = static_cast<int>(h.cols());
  const double tol = 1e-10 * sv[0];
  int rank = 0;
  while (rank < cols && sv[rank] > tol) ++rank;
  if (rank < cols) {
    std::string what = "solve_ls: H is rank deficient (" + std::to_string(rank) + "/" +
                       std::to_string(cols) + "), near-null directions:";
    for (int d = rank; d < cols; ++d) {
      const Eigen::VectorXd dir = svd.matrixV().col(d);
      for (int i = 0; i < cols; ++i) {
        if (std::abs(dir[i]) < 0.3) continue;
        what += " ";
        what += i < static_cast<int>(labels.size()) ? labels[i] : "beta" + std::to_string(i);
      }
      what += ";";
    }
    throw std::runtime_error(what);
  }

  LsSolution sol;
  sol.beta = h.householderQr().solve(gamma);
  sol.rank = rank;
  sol.kappa = sv[0] / sv[cols - 1];
  sol.residual_rms = std::sqrt((gamma - h * sol.beta).squaredNorm() / h.rows());
  return sol;
}

std::vector<TorqueVector> predict_torques(const BaseParamMapping& mapping, const RobotModel& model,
                                          const Eigen::VectorXd& beta,
                                          const std::vector<JointState>& states) {
  if (beta.size() != mapping.rank) {
    throw std::invalid_argument("predict_torques: beta length does not match mapping rank");
  }
  std::vector<TorqueVector> out;
  out.reserve(states.size());
  for (const auto& s : states) {
    out.push_back(base_regressor(model, mapping, s) * beta);
  }
  return out;
}

double rsd(const Eigen::VectorXd& predicted, const Eigen::VectorXd& measured) {
  if (predicted.size() != measured.size() || predicted.size() == 0) {
    throw std::invalid_argument("rsd: series must be nonempty and aligned");
  }
  const double denom = predicted.squaredNorm();
  if (denom <= 0.0) {
    throw std::invalid_argument("rsd: zero denominator (predicted torques are all zero)");
  }
  return std::sqrt((predicted - measured).squaredNorm() / denom);
}

double rsd(const std::vector<TorqueVector>& predicted, const std::vector<TorqueVector>& measured,
           int joint) {
  if (predicted.size() != measured.size()) {
    throw std::invalid_argument("rsd: series must be aligned");
  }
  Eigen::VectorXd p(predicted.size());
  Eigen::VectorXd m(measured.size());
  for (size_t k = 0; k < predicted.size(); ++k) {
    p[k] = predicted[k][joint];
    m[k] = measured[k][joint];
  }
  return rsd(p, m);
}

IdentificationReport run_pipeline(const PipelineConfig& config) {
  IdentificationReport report;
  auto t0 = Clock::now();

  // friction identification per cylinder
  std::array<FrictionParams, kNumJoints> friction{};
  if (!config.skip_friction) {
    if (config.preidentified_friction) {
      friction = *config.preidentified_friction;
    } else {
      try {
        const double period = config.cylinder_excitation.base_period();
        CylinderSimConfig sim;
        sim.duration = config.cylinder_periods * period;
        sim.dt = 1.0 / config.cylinder_rate_hz;
        sim.noise = config.cylinder_noise;
        for (int j = 0; j < kNumJoints; ++j) {
          sim.seed = config.seed * 1000 + j;
          const CylinderParams params = default_cylinder_params(j);
          const auto sim_result = simulate_cylinder(params, config.cylinder_excitation, sim);
          const auto samples =
              build_samples(sim_result.records, params, kPistonMasses[j]);
          const BatchLsResult ls = batch_ls(samples);
          friction[j] = extract_friction(ls.theta, kPistonMasses[j]).friction;
        }
      } catch (const std::exception& e) {
        stage_fail("friction-identification", e);
      }
    }
    report.friction_applied = true;
  }
  report.friction = friction;
  report.stage_ms["friction"] = elapsed_ms(t0);

  // base reduction
  t0 = Clock::now();
  BaseParamMapping mapping;
  try {
    const Eigen::MatrixXd stacked =
        sample_regressors(config.model, config.reduction_samples, config.reduction_seed);
    mapping = compute_base_mapping(stacked, config.reduction_tol);
  } catch (const std::exception& e) {
    stage_fail("base-reduction", e);
  }
  report.stage_ms["reduction"] = elapsed_ms(t0);

  // excitation run
  t0 = Clock::now();
  IdentificationDataset ds;
  try {
    ds = simulate_arm_run(config.model, config.ground_truth, config.trajectory, config.rate_hz,
                          config.torque_noise, config.seed);
  } catch (const std::exception& e) {
    stage_fail("arm-simulation", e);
  }
  report.stage_ms["simulation"] = elapsed_ms(t0);

  // friction substitution and least squares
  t0 = Clock::now();
  LsSolution sol;
  try {
    IdentificationDataset corrected = ds;
    if (report.friction_applied) {
      for (size_t k = 0; k < corrected.torques.size(); ++k) {
        for (int i = 0; i < kNumJoints; ++i) {
          corrected.torques[k][i] -= friction_torque(friction[i], corrected.states[k].dq[i]);
        }
      }
    }
    const auto [h, gamma] = assemble_system(mapping, config.model, corrected);
    sol = solve_ls(h, gamma, mapping.labels);
  } catch (const std::exception& e) {
    stage_fail("least-squares", e);
  }
  report.stage_ms["solve"] = elapsed_ms(t0);

  // prediction and validation
  t0 = Clock::now();
  try {
    std::vector<TorqueVector> predicted =
        predict_torques(mapping, config.model, sol.beta, ds.states);
    if (report.friction_applied) {
      for (size_t k = 0; k < predicted.size(); ++k) {
        for (int i = 0; i < kNumJoints; ++i) {
          predicted[k][i] += friction_torque(friction[i], ds.states[k].dq[i]);
        }
      }
    }
    for (int i = 0; i < kNumJoints; ++i) {
      report.rsd_ratio[i] = rsd(predicted, ds.torques, i);
      double acc = 0.0;
      for (size_t k = 0; k < predicted.size(); ++k) {
        const double r = predicted[k][i] - ds.torques[k][i];
        acc += r * r;
      }
      report.residual_rms[i] = std::sqrt(acc / predicted.size());
    }
  } catch (const std::exception& e) {
    stage_fail("validation", e);
  }
  report.stage_ms["validate"] = elapsed_ms(t0);

  report.beta = sol.beta;
  report.labels = mapping.labels;
  report.kappa = sol.kappa;
  report.rank = mapping.rank;
  report.samples = static_cast<int>(ds.states.size());
  return report;
}

LinkInertialSet testbed_ground_truth() {
  struct Raw {
    double mass;
    Vec3 com;
    double ixx, iyy, izz, ixy, ixz, iyz;  // about the COM
  };
  // rod-like links, COM behind the distal origin, mild products of inertia
  const Raw raw[kNumJoints] = {
      {16.0, {-0.26, 0.040, 0.050}, 0.120, 0.450, 0.430, 0.010, -0.008, 0.006},
      {13.0, {-0.42, -0.030, 0.060}, 0.200, 0.950, 0.900, -0.015, 0.012, -0.009},
      {6.5, {-0.12, 0.020, 0.040}, 0.050, 0.070, 0.065, 0.004, -0.003, 0.002},
      {3.2, {-0.15, 0.010, 0.020}, 0.020, 0.032, 0.030, -0.002, 0.001, -0.001},
      {2.6, {-0.14, -0.015, 0.025}, 0.015, 0.026, 0.024, 0.001, -0.001, 0.001},
      {2.1, {-0.11, 0.010, 0.015}, 0.010, 0.018, 0.017, -0.001, 0.001, 0.000},
  };

  LinkInertialSet set;
  for (int i = 0; i < kNumJoints; ++i) {
    const Raw& r = raw[i];
    Mat3 inertia_com;
    inertia_com << r.ixx, r.ixy, r.ixz,
                   r.ixy, r.iyy, r.iyz,
                   r.ixz, r.iyz, r.izz;
    set.links[i] = make_link_params(r.mass, r.com, inertia_com, planted_friction(i));
  }
  return set;
}

void write_dataset_csv(const std::string& path, const IdentificationDataset& ds,
                       const std::vector<std::string>& comments) {
  std::vector<std::string> columns = {"t"};
  for (const char* prefix : {"q", "dq", "ddq", "tau"}) {
    for (int i = 1; i <= kNumJoints; ++i) {
      columns.push_back(std::string(prefix) + std::to_string(i));
    }
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(ds.states.size());
  for (size_t k = 0; k < ds.states.size(); ++k) {
    const JointState& s = ds.states[k];
    std::vector<double> row = {s.t};
    for (int i = 0; i < kNumJoints; ++i) row.push_back(s.q[i]);
    for (int i = 0; i < kNumJoints; ++i) row.push_back(s.dq[i]);
    for (int i = 0; i < kNumJoints; ++i) row.push_back(s.ddq[i]);
    for (int i = 0; i < kNumJoints; ++i) row.push_back(ds.torques[k][i]);
    rows.push_back(std::move(row));
  }
  write_csv(path, comments, columns, rows);
}

IdentificationDataset read_dataset_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.columns.size() != 1 + 4 * kNumJoints) {
    throw std::runtime_error("dataset csv: unexpected column count in " + path);
  }
  IdentificationDataset ds;
  for (const auto& row : table.rows) {
    JointState s;
    s.t = row[0];
    TorqueVector tau;
    for (int i = 0; i < kNumJoints; ++i) {
      s.q[i] = row[1 + i];
      s.dq[i] = row[1 + kNumJoints + i];
      s.ddq[i] = row[1 + 2 * kNumJoints + i];
      tau[i] = row[1 + 3 * kNumJoints + i];
    }
    ds.states.push_back(s);
    ds.torques.push_back(tau);
  }
  if (ds.states.size() >= 2) {
    const double dt = ds.states[1].t - ds.states[0].t;
    if (dt > 0.0) ds.rate_hz = 1.0 / dt;
  }
  return ds;
}

std::string report_to_json(const IdentificationReport& report) {
  nlohmann::json doc;
  auto beta = nlohmann::json::array();
  for (int r = 0; r < report.beta.size(); ++r) {
    beta.push_back({{"label", report.labels[r]}, {"value", report.beta[r]}});
  }
  doc["beta"] = std::move(beta);
  doc["rank"] = report.rank;
  doc["rsd_ratio"] = report.rsd_ratio;
  doc["residual_rms_nm"] = report.residual_rms;
  doc["condition_number"] = report.kappa;
  doc["samples"] = report.samples;
  doc["friction_applied"] = report.friction_applied;
  auto fric = nlohmann::json::array();
  for (const auto& f : report.friction) {
    fric.push_back({{"f_c", f.f_c}, {"f_v", f.f_v}, {"f_s", f.f_s}});
  }
  doc["friction"] = std::move(fric);
  return doc.dump(2);
}

}  // namespace hydrarm
