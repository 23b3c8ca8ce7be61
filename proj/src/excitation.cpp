#include "hydrarm/excitation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/SVD>

#include <json.hpp>

#include "hydrarm/csv.hpp"

namespace hydrarm {

double FourierTrajectory::period() const { return 2.0 * std::numbers::pi / omega_f; }

JointState eval_trajectory(const FourierTrajectory& traj, double t) {
  JointState s;
  s.t = t;
  for (int i = 0; i < kNumJoints; ++i) {
    const auto& series = traj.joints[i];
    double q = series.offset;
    double dq = 0.0;
    double ddq = 0.0;
    for (int l = 1; l <= traj.n_harmonics; ++l) {
      const double wl = traj.omega_f * l;
      const double a = series.a[l - 1];
      const double b = series.b[l - 1];
      const double sin_wl = std::sin(wl * t);
      const double cos_wl = std::cos(wl * t);
      q += (a * sin_wl - b * cos_wl) / wl;
      dq += a * cos_wl + b * sin_wl;
      ddq += (-a * sin_wl + b * cos_wl) * wl;
    }
    s.q[i] = q;
    s.dq[i] = dq;
    s.ddq[i] = ddq;
  }
  return s;
}

std::string to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::pos: return "pos";
    case ConstraintKind::vel: return "vel";
    case ConstraintKind::acc: return "acc";
    case ConstraintKind::boundary_pos: return "boundary_pos";
    case ConstraintKind::boundary_vel: return "boundary_vel";
    case ConstraintKind::boundary_acc: return "boundary_acc";
  }
  return "?";
}

namespace {

struct JointAmplitudes {
  double pos = 0.0, vel = 0.0, acc = 0.0;
};

JointAmplitudes analytic_amplitudes(const FourierTrajectory& traj, int joint) {
  JointAmplitudes amp;
  const auto& series = traj.joints[joint];
  for (int l = 1; l <= traj.n_harmonics; ++l) {
    const double wl = traj.omega_f * l;
    const double mag = std::hypot(series.a[l - 1], series.b[l - 1]);
    amp.pos += mag / wl;
    amp.vel += mag;
    amp.acc += mag * wl;
  }
  return amp;
}

constexpr double kBoundaryTol = 1e-6;

}  // namespace

ConstraintReport check_constraints(const FourierTrajectory& traj,
                                   const std::vector<JointLimits>& limits, double grid_dt) {
  if (!(grid_dt > 0.0)) {
    throw std::invalid_argument("check_constraints: grid_dt must be positive");
  }
  if (limits.size() != kNumJoints) {
    throw std::invalid_argument("check_constraints: expected limits for 6 joints");
  }

  ConstraintReport report;
  struct Worst {
    double pos_over = 0.0, pos_value = 0.0, pos_bound = 0.0;
    double vel = 0.0, acc = 0.0;
  };
  std::array<Worst, kNumJoints> worst{};

  const double period = traj.period();
  const int steps = static_cast<int>(std::ceil(period / grid_dt));
  for (int k = 0; k <= steps; ++k) {
    const double t = std::min(k * grid_dt, period);
    const JointState s = eval_trajectory(traj, t);
    for (int i = 0; i < kNumJoints; ++i) {
      const JointLimits& lim = limits[i];
      Worst& w = worst[i];
      if (s.q[i] > lim.q_max && s.q[i] - lim.q_max > w.pos_over) {
        w.pos_over = s.q[i] - lim.q_max;
        w.pos_value = s.q[i];
        w.pos_bound = lim.q_max;
      }
      if (s.q[i] < lim.q_min && lim.q_min - s.q[i] > w.pos_over) {
        w.pos_over = lim.q_min - s.q[i];
        w.pos_value = s.q[i];
        w.pos_bound = lim.q_min;
      }
      w.vel = std::max(w.vel, std::abs(s.dq[i]));
      w.acc = std::max(w.acc, std::abs(s.ddq[i]));
    }
  }

  for (int i = 0; i < kNumJoints; ++i) {
    const JointLimits& lim = limits[i];
    const Worst& w = worst[i];
    if (w.pos_over > 0.0) {
      report.violations.push_back({i + 1, ConstraintKind::pos, w.pos_value, w.pos_bound});
    }
    if (w.vel > lim.dq_max) {
      report.violations.push_back({i + 1, ConstraintKind::vel, w.vel, lim.dq_max});
    }
    if (w.acc > lim.ddq_max) {
      report.violations.push_back({i + 1, ConstraintKind::acc, w.acc, lim.ddq_max});
    }
  }

  for (const double t : {0.0, period}) {
    const JointState s = eval_trajectory(traj, t);
    for (int i = 0; i < kNumJoints; ++i) {
      const double offset = traj.joints[i].offset;
      const double pos_tol = kBoundaryTol * std::max(1.0, std::abs(offset));
      if (std::abs(s.q[i] - offset) > pos_tol) {
        report.violations.push_back({i + 1, ConstraintKind::boundary_pos, s.q[i], offset});
      }
      if (std::abs(s.dq[i]) > kBoundaryTol) {
        report.violations.push_back({i + 1, ConstraintKind::boundary_vel, s.dq[i], kBoundaryTol});
      }
      if (std::abs(s.ddq[i]) > kBoundaryTol) {
        report.violations.push_back({i + 1, ConstraintKind::boundary_acc, s.ddq[i], kBoundaryTol});
      }
    }
  }

  report.analytic_ok = true;
  for (int i = 0; i < kNumJoints; ++i) {
    const JointAmplitudes amp = analytic_amplitudes(traj, i);
    report.analytic_amplitude[i] = amp.pos;
    const double offset = traj.joints[i].offset;
    if (offset - amp.pos < limits[i].q_min || offset + amp.pos > limits[i].q_max) {
      report.analytic_ok = false;
    }
  }

  report.feasible = report.violations.empty();
  return report;
}

ConditionNumberResult condition_number(const RobotModel& model, const BaseParamMapping& mapping,
                                       const FourierTrajectory& traj, int n_samples) {
  if (n_samples * kNumJoints < mapping.rank) {
    throw std::invalid_argument("condition_number: too few samples for the mapping rank");
  }
  const double period = traj.period();
  Eigen::MatrixXd stacked(n_samples * kNumJoints, mapping.rank);
  for (int k = 0; k < n_samples; ++k) {
    const double t = period * k / n_samples;
    stacked.middleRows(k * kNumJoints, kNumJoints) =
        base_regressor(model, mapping, eval_trajectory(traj, t));
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(stacked);
  const auto& sv = svd.singularValues();
  ConditionNumberResult result;
  result.sigma_max = sv[0];
  result.sigma_min = sv[sv.size() - 1];
  if (result.sigma_min <= result.sigma_max * std::numeric_limits<double>::epsilon() * stacked.rows()) {
    result.kappa = std::numeric_limits<double>::infinity();
    result.diagnostic = "stacked regressor is rank deficient (sigma_min ~ 0); "
                        "the trajectory does not excite every base parameter";
  } else {
    result.kappa = result.sigma_max / result.sigma_min;
  }
  return result;
}

FourierTrajectory complete_trajectory(double omega_f, int n_harmonics,
                                      const std::array<Eigen::VectorXd, kNumJoints>& a_free,
                                      const std::array<Eigen::VectorXd, kNumJoints>& b_free,
                                      const std::array<double, kNumJoints>& offsets) {
  if (!(omega_f > 0.0) || n_harmonics < 1) {
    throw std::invalid_argument("complete_trajectory: need omega_f > 0 and n_harmonics >= 1");
  }
  FourierTrajectory traj;
  traj.omega_f = omega_f;
  traj.n_harmonics = n_harmonics;
  for (int i = 0; i < kNumJoints; ++i) {
    auto& series = traj.joints[i];
    series.a = Eigen::VectorXd::Zero(n_harmonics);
    series.b = Eigen::VectorXd::Zero(n_harmonics);
    series.offset = offsets[i];

    if (a_free[i].size() != std::max(0, n_harmonics - 1) ||
        b_free[i].size() != std::max(0, n_harmonics - 2)) {
      throw std::invalid_argument("complete_trajectory: free coefficient size mismatch");
    }
    // dq(0) = 0  ->  sum a_l = 0
    double a_sum = 0.0;
    for (int l = 0; l < n_harmonics - 1; ++l) {
      series.a[l] = a_free[i][l];
      a_sum += a_free[i][l];
    }
    series.a[n_harmonics - 1] = -a_sum;

    // ddq(0) = 0 -> sum l b_l = 0;  q(0) = offset -> sum b_l / l = 0
    double s1 = 0.0;
    double s2 = 0.0;
    for (int l = 3; l <= n_harmonics; ++l) {
      const double b = b_free[i][l - 3];
      series.b[l - 1] = b;
      s1 += l * b;
      s2 += b / l;
    }
    if (n_harmonics >= 2) {
      const double b2 = (s2 - s1) / 1.5;
      const double b1 = -s2 - 0.5 * b2;
      series.b[0] = b1;
      series.b[1] = b2;
    }
  }
  return traj;
}

namespace {

struct FreeLayout {
  int n_harmonics = 0;
  bool strict = false;
  int a_count = 0;
  int b_count = 0;
  int per_joint = 0;

  explicit FreeLayout(int n_h, bool strict_zero)
      : n_harmonics(n_h),
        strict(strict_zero),
        a_count(n_h - 1),
        b_count(std::max(0, n_h - 2)),
        per_joint(a_count + b_count + (strict_zero ? 0 : 1)) {}
};

FourierTrajectory unpack(const Eigen::VectorXd& free, const FreeLayout& layout, double omega_f) {
  std::array<Eigen::VectorXd, kNumJoints> a_free;
  std::array<Eigen::VectorXd, kNumJoints> b_free;
  std::array<double, kNumJoints> offsets{};
  for (int i = 0; i < kNumJoints; ++i) {
    const int base = i * layout.per_joint;
    a_free[i] = free.segment(base, layout.a_count);
    b_free[i] = free.segment(base + layout.a_count, layout.b_count);
    offsets[i] = layout.strict ? 0.0 : free[base + layout.a_count + layout.b_count];
  }
  return complete_trajectory(omega_f, layout.n_harmonics, a_free, b_free, offsets);
}

// relative excess over the analytic (conservative) bounds; zero means the grid
// checks cannot fail either
double analytic_violation(const FourierTrajectory& traj, const std::vector<JointLimits>& limits) {
  double total = 0.0;
  for (int i = 0; i < kNumJoints; ++i) {
    const JointAmplitudes amp = analytic_amplitudes(traj, i);
    const JointLimits& lim = limits[i];
    const double range = lim.q_max - lim.q_min;
    const double offset = traj.joints[i].offset;
    total += std::max(0.0, amp.vel - lim.dq_max) / lim.dq_max;
    total += std::max(0.0, amp.acc - lim.ddq_max) / lim.ddq_max;
    total += std::max(0.0, (offset + amp.pos) - lim.q_max) / range;
    total += std::max(0.0, lim.q_min - (offset - amp.pos)) / range;
  }
  return total;
}

}  // namespace

OptimizedTrajectory optimize_trajectory(const RobotModel& model, const BaseParamMapping& mapping,
                                        const std::vector<JointLimits>& limits,
                                        const TrajectoryOptions& options) {
  if (options.n_harmonics < 2) {
    throw std::invalid_argument(
        "optimize_trajectory: need at least two harmonics to satisfy the boundary conditions");
  }
  if (limits.size() != kNumJoints) {
    throw std::invalid_argument("optimize_trajectory: expected limits for 6 joints");
  }
  const double omega_f =
      options.omega_f > 0.0 ? options.omega_f : 0.1 * std::numbers::pi;
  const FreeLayout layout(options.n_harmonics, options.strict_zero_position);
  const int dim = layout.per_joint * kNumJoints;
  const int budget = std::max(1, options.budget);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> margin_draw(0.35, 0.9);

  // coordinate scales for the pattern refinement
  Eigen::VectorXd scales(dim);
  for (int i = 0; i < kNumJoints; ++i) {
    const int base = i * layout.per_joint;
    for (int j = 0; j < layout.a_count + layout.b_count; ++j) {
      scales[base + j] = limits[i].dq_max;
    }
    if (!layout.strict) {
      scales[base + layout.a_count + layout.b_count] = limits[i].q_max - limits[i].q_min;
    }
  }

  auto random_candidate = [&]() {
    Eigen::VectorXd free(dim);
    for (int i = 0; i < kNumJoints; ++i) {
      const int base = i * layout.per_joint;
      Eigen::VectorXd raw(layout.a_count + layout.b_count);
      for (int j = 0; j < raw.size(); ++j) raw[j] = unit(rng);
      const double margin = margin_draw(rng);
      const double offset_draw = layout.strict ? 0.0 : unit(rng);

      // complete this joint alone to measure its analytic amplitudes
      std::array<Eigen::VectorXd, kNumJoints> a_probe;
      std::array<Eigen::VectorXd, kNumJoints> b_probe;
      std::array<double, kNumJoints> off_probe{};
      for (int j = 0; j < kNumJoints; ++j) {
        a_probe[j] = Eigen::VectorXd::Zero(layout.a_count);
        b_probe[j] = Eigen::VectorXd::Zero(layout.b_count);
      }
      a_probe[i] = raw.head(layout.a_count);
      b_probe[i] = raw.tail(layout.b_count);
      const FourierTrajectory probe =
          complete_trajectory(omega_f, layout.n_harmonics, a_probe, b_probe, off_probe);
      const JointAmplitudes amp = analytic_amplitudes(probe, i);

      const JointLimits& lim = limits[i];
      const double half_range =
          layout.strict ? std::min(-lim.q_min, lim.q_max) : 0.5 * (lim.q_max - lim.q_min);
      double scale = margin * lim.dq_max / std::max(amp.vel, 1e-12);
      scale = std::min(scale, margin * lim.ddq_max / std::max(amp.acc, 1e-12));
      scale = std::min(scale, margin * half_range / std::max(amp.pos, 1e-12));

      free.segment(base, raw.size()) = raw * scale;
      if (!layout.strict) {
        const double center = 0.5 * (lim.q_min + lim.q_max);
        const double slack = half_range - amp.pos * scale;
        free[base + raw.size()] = center + offset_draw * std::max(0.0, slack) * 0.9;
      }
    }
    return free;
  };

  OptimizedTrajectory result;
  result.params_pre_elimination = kNumJoints * (2 * options.n_harmonics + 1);

  int evaluations = 0;
  double best_objective = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_free;

  auto evaluate = [&](const Eigen::VectorXd& free) {
    const FourierTrajectory traj = unpack(free, layout, omega_f);
    const double violation = analytic_violation(traj, limits);
    double objective;
    if (violation > 0.0) {
      objective = 1e9 * (1.0 + violation);
    } else {
      const ConditionNumberResult cn = condition_number(model, mapping, traj, options.n_samples);
      objective = std::isfinite(cn.kappa) ? cn.kappa : 1e8;
    }
    ++evaluations;
    if (objective < best_objective) {
      best_objective = objective;
      best_free = free;
    }
    result.best_history.push_back(best_objective);
    return objective;
  };

  const int n_starts = std::min(budget, std::max(8, budget / 10));
  for (int s = 0; s < n_starts && evaluations < budget; ++s) {
    evaluate(random_candidate());
  }

  // compass/pattern refinement around the incumbent
  double step = 0.25;
  while (evaluations < budget && step > 1e-4) {
    bool improved = false;
    for (int d = 0; d < dim && evaluations < budget; ++d) {
      for (const double dir : {1.0, -1.0}) {
        if (evaluations >= budget) break;
        Eigen::VectorXd trial = best_free;
        trial[d] += dir * step * scales[d];
        const double before = best_objective;
        evaluate(trial);
        if (best_objective < before) {
          improved = true;
          break;  // keep moving from the new incumbent
        }
      }
    }
    if (!improved) step *= 0.5;
  }

  if (!best_free.size() || best_objective >= 1e9) {
    throw std::runtime_error("optimize_trajectory: no feasible candidate found within budget");
  }

  result.trajectory = unpack(best_free, layout, omega_f);
  result.kappa = best_objective;
  result.report = check_constraints(result.trajectory, limits, 1e-3);
  result.evaluations = evaluations;
  return result;
}

std::string trajectory_to_json(const FourierTrajectory& traj) {
  nlohmann::json doc;
  doc["units"] = "rad";
  doc["omega_f"] = traj.omega_f;
  doc["n_H"] = traj.n_harmonics;
  auto joints = nlohmann::json::array();
  for (const auto& series : traj.joints) {
    nlohmann::json j;
    j["a"] = std::vector<double>(series.a.data(), series.a.data() + series.a.size());
    j["b"] = std::vector<double>(series.b.data(), series.b.data() + series.b.size());
    j["q0"] = series.offset;
    joints.push_back(std::move(j));
  }
  doc["joints"] = std::move(joints);
  return doc.dump(2);
}

FourierTrajectory trajectory_from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("trajectory: parse error: ") + e.what());
  }

  FourierTrajectory traj;
  try {
    const std::string units = doc.value("units", "rad");
    double factor = 1.0;
    if (units == "deg") {
      factor = std::numbers::pi / 180.0;
    } else if (units != "rad") {
      throw std::invalid_argument("trajectory: units must be 'rad' or 'deg'");
    }
    traj.omega_f = doc.at("omega_f").get<double>();
    traj.n_harmonics = doc.at("n_H").get<int>();
    if (!(traj.omega_f > 0.0) || traj.n_harmonics < 1) {
      throw std::invalid_argument("trajectory: need omega_f > 0 and n_H >= 1");
    }
    const auto& joints = doc.at("joints");
    if (joints.size() != kNumJoints) {
      throw std::invalid_argument("trajectory: expected 6 joint entries");
    }
    for (int i = 0; i < kNumJoints; ++i) {
      const auto& j = joints.at(i);
      const auto a = j.at("a").get<std::vector<double>>();
      const auto b = j.at("b").get<std::vector<double>>();
      if (a.size() != static_cast<size_t>(traj.n_harmonics) || b.size() != a.size()) {
        throw std::invalid_argument("trajectory: coefficient arrays must have n_H entries");
      }
      auto& series = traj.joints[i];
      series.a = factor * Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
      series.b = factor * Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
      series.offset = factor * j.at("q0").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("trajectory: ") + e.what());
  }
  return traj;
}

FourierTrajectory table3_preset() {
  // published coefficients, degree units; columns are joints 1..6
  const double a1[6] = {-8.996, 8.615, 5.486, -5.669, 4.879, -4.169};
  const double b1[6] = {8.600, 6.350, 5.941, -4.520, 7.538, -4.151};
  const double a2[6] = {-8.464, 6.524, 5.265, 7.319, -8.006, 4.731};
  const double b2[6] = {8.106, 3.476, 5.936, -4.702, 6.429, -8.877};
  const double a3[6] = {17.460, -15.138, -10.751, -1.650, 3.127, -0.562};
  const double b3[6] = {-8.270, -4.434, -5.938, 4.642, -6.798, 7.302};
  const double q0[6] = {31.500, 21.038, 22.058, -8.473, 13.507, -9.797};

  const double deg = std::numbers::pi / 180.0;
  FourierTrajectory traj;
  traj.omega_f = 0.1 * std::numbers::pi;
  traj.n_harmonics = 3;
  for (int i = 0; i < kNumJoints; ++i) {
    auto& series = traj.joints[i];
    series.a = Eigen::Vector3d(a1[i], a2[i], a3[i]) * deg;
    series.b = Eigen::Vector3d(b1[i], b2[i], b3[i]) * deg;
    series.offset = q0[i] * deg;
  }
  return traj;
}

void write_trajectory_profile_csv(const std::string& path, const FourierTrajectory& traj,
                                  double dt, const std::vector<std::string>& comments) {
  std::vector<std::string> columns = {"t"};
  for (const char* prefix : {"q", "dq", "ddq"}) {
    for (int i = 1; i <= kNumJoints; ++i) {
      columns.push_back(std::string(prefix) + std::to_string(i));
    }
  }
  std::vector<std::vector<double>> rows;
  const double period = traj.period();
  for (double t = 0.0; t <= period + 0.5 * dt; t += dt) {
    const JointState s = eval_trajectory(traj, std::min(t, period));
    std::vector<double> row = {s.t};
    for (int i = 0; i < kNumJoints; ++i) row.push_back(s.q[i]);
    for (int i = 0; i < kNumJoints; ++i) row.push_back(s.dq[i]);
    for (int i = 0; i < kNumJoints; ++i) row.push_back(s.ddq[i]);
    rows.push_back(std::move(row));
  }
  write_csv(path, comments, columns, rows);
}

}  // namespace hydrarm
