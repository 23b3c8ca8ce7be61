#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hydrarm/excitation.hpp"
#include "test_support.hpp"

using namespace hydrarm;

namespace {

FourierTrajectory zero_trajectory(double omega_f = 0.1 * std::numbers::pi, int n_h = 3) {
  FourierTrajectory traj;
  traj.omega_f = omega_f;
  traj.n_harmonics = n_h;
  for (auto& j : traj.joints) {
    j.a = Eigen::VectorXd::Zero(n_h);
    j.b = Eigen::VectorXd::Zero(n_h);
    j.offset = 0.0;
  }
  return traj;
}

FourierTrajectory random_completed(std::mt19937_64& rng, double coeff_scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<Eigen::VectorXd, kNumJoints> a_free;
  std::array<Eigen::VectorXd, kNumJoints> b_free;
  std::array<double, kNumJoints> offsets{};
  const RobotModel model = default_model();
  for (int i = 0; i < kNumJoints; ++i) {
    a_free[i] = coeff_scale * Eigen::VectorXd::NullaryExpr(2, [&](int) { return u(rng); });
    b_free[i] = coeff_scale * Eigen::VectorXd::NullaryExpr(1, [&](int) { return u(rng); });
    const auto& lim = model.limits[i];
    offsets[i] = 0.5 * (lim.q_min + lim.q_max) + 0.2 * u(rng) * (lim.q_max - lim.q_min);
  }
  return complete_trajectory(0.1 * std::numbers::pi, 3, a_free, b_free, offsets);
}

}  // namespace

TEST_CASE("trajectory evaluation basics") {
  FourierTrajectory still = zero_trajectory();
  for (int i = 0; i < kNumJoints; ++i) still.joints[i].offset = 0.1 * (i + 1);
  for (double t : {0.0, 1.7, 12.0}) {
    const JointState s = eval_trajectory(still, t);
    for (int i = 0; i < kNumJoints; ++i) {
      CHECK(s.q[i] == doctest::Approx(0.1 * (i + 1)));
      CHECK(s.dq[i] == 0.0);
      CHECK(s.ddq[i] == 0.0);
    }
  }

  FourierTrajectory single = zero_trajectory(std::numbers::pi, 3);
  single.joints[0].a[0] = 1.0;
  single.joints[0].offset = 0.25;
  const JointState s0 = eval_trajectory(single, 0.0);
  CHECK(s0.dq[0] == doctest::Approx(1.0));
  CHECK(s0.q[0] == doctest::Approx(0.25));
}

TEST_CASE("series derivatives agree with finite differences") {
  std::mt19937_64 rng(31);
  const FourierTrajectory traj = random_completed(rng, 0.05);
  const double h = 1e-6;
  for (double t = 0.0; t < traj.period(); t += traj.period() / 57.0) {
    const JointState c = eval_trajectory(traj, t);
    const JointState p = eval_trajectory(traj, t + h);
    const JointState m = eval_trajectory(traj, t - h);
    for (int i = 0; i < kNumJoints; ++i) {
      CHECK(c.dq[i] == doctest::Approx((p.q[i] - m.q[i]) / (2.0 * h)).epsilon(1e-6));
      CHECK(c.ddq[i] == doctest::Approx((p.dq[i] - m.dq[i]) / (2.0 * h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("constraint checking reports the offending joints") {
  const RobotModel model = default_model();

  FourierTrajectory still = zero_trajectory();
  for (int i = 0; i < kNumJoints; ++i) {
    const auto& lim = model.limits[i];
    still.joints[i].offset = 0.5 * (lim.q_min + lim.q_max);
  }
  const ConstraintReport ok = check_constraints(still, model.limits, 1e-2);
  CHECK(ok.feasible);
  CHECK(ok.analytic_ok);

  // joint 1 position amplitude pushed past its upper bound
  FourierTrajectory wide = still;
  std::array<Eigen::VectorXd, kNumJoints> a_free;
  std::array<Eigen::VectorXd, kNumJoints> b_free;
  std::array<double, kNumJoints> offsets{};
  for (int i = 0; i < kNumJoints; ++i) {
    a_free[i] = Eigen::VectorXd::Zero(2);
    b_free[i] = Eigen::VectorXd::Zero(1);
    offsets[i] = still.joints[i].offset;
  }
  a_free[0][0] = 0.6;  // ~0.38 rad swing at omega_f = 0.1*pi against a 1.05 rad bound
  a_free[0][1] = 1.2;
  FourierTrajectory big = complete_trajectory(0.1 * std::numbers::pi, 3, a_free, b_free, offsets);
  const ConstraintReport bad = check_constraints(big, model.limits, 1e-3);
  CHECK_FALSE(bad.feasible);
  bool pos_on_joint1 = false;
  for (const auto& v : bad.violations) {
    if (v.joint == 1 && v.kind == ConstraintKind::pos) {
      pos_on_joint1 = true;
      CHECK(std::abs(v.worst) > std::abs(v.bound));
    }
  }
  CHECK(pos_on_joint1);
}

TEST_CASE("boundary defects are caught") {
  FourierTrajectory raw = zero_trajectory();
  raw.joints[2].a[0] = 0.05;  // sum of a-coefficients nonzero: dq(0) != 0
  const ConstraintReport report = check_constraints(raw, default_model().limits, 1e-2);
  bool boundary_vel = false;
  for (const auto& v : report.violations) {
    boundary_vel |= (v.joint == 3 && v.kind == ConstraintKind::boundary_vel);
  }
  CHECK(boundary_vel);
}

TEST_CASE("the analytic bound is conservative for the grid check") {
  const RobotModel model = default_model();
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> scale(0.005, 0.2);
  int analytic_ok_count = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const FourierTrajectory traj = random_completed(rng, scale(rng));
    const ConstraintReport report = check_constraints(traj, model.limits, 5e-3);
    if (!report.analytic_ok) continue;
    ++analytic_ok_count;
    for (const auto& v : report.violations) {
      CHECK(v.kind != ConstraintKind::pos);  // bound passed => no position violation
    }
  }
  CHECK(analytic_ok_count > 5);  // the draw produces both kinds
}

TEST_CASE("boundary elimination honors all three conditions") {
  std::mt19937_64 rng(41);
  for (int n_h : {2, 3, 5}) {
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    std::array<Eigen::VectorXd, kNumJoints> a_free;
    std::array<Eigen::VectorXd, kNumJoints> b_free;
    std::array<double, kNumJoints> offsets{};
    for (int i = 0; i < kNumJoints; ++i) {
      a_free[i] = Eigen::VectorXd::NullaryExpr(n_h - 1, [&](int) { return u(rng); });
      b_free[i] = Eigen::VectorXd::NullaryExpr(std::max(0, n_h - 2), [&](int) { return u(rng); });
      offsets[i] = u(rng);
    }
    const FourierTrajectory traj = complete_trajectory(0.25, n_h, a_free, b_free, offsets);
    const JointState s0 = eval_trajectory(traj, 0.0);
    for (int i = 0; i < kNumJoints; ++i) {
      CHECK(std::abs(s0.dq[i]) < 1e-12);
      CHECK(std::abs(s0.ddq[i]) < 1e-12);
      CHECK(s0.q[i] == doctest::Approx(offsets[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("condition number flags unexcited trajectories and never dips below one") {
  const RobotModel model = default_model();
  const BaseParamMapping mapping = compute_base_mapping(sample_regressors(model, 200, 42));

  const ConditionNumberResult still = condition_number(model, mapping, zero_trajectory(), 40);
  CHECK(std::isinf(still.kappa));
  CHECK_FALSE(still.diagnostic.empty());

  std::mt19937_64 rng(43);
  const FourierTrajectory traj = random_completed(rng, 0.05);
  const ConditionNumberResult moving = condition_number(model, mapping, traj, 100);
  CHECK(std::isfinite(moving.kappa));
  CHECK(moving.kappa >= 1.0);

  CHECK_THROWS_AS(condition_number(model, mapping, traj, 2), std::invalid_argument);
}

TEST_CASE("condition number is stable under a sampling phase shift") {
  const RobotModel model = default_model();
  const BaseParamMapping mapping = compute_base_mapping(sample_regressors(model, 200, 42));
  std::mt19937_64 rng(47);
  const FourierTrajectory traj = random_completed(rng, 0.05);

  const int n = 100;
  const double period = traj.period();
  auto stacked_kappa = [&](double phase) {
    Eigen::MatrixXd stacked(n * kNumJoints, mapping.rank);
    for (int k = 0; k < n; ++k) {
      const double t = std::fmod(phase + period * k / n, period);
      stacked.middleRows(k * kNumJoints, kNumJoints) =
          base_regressor(model, mapping, eval_trajectory(traj, t));
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(stacked);
    return svd.singularValues()(0) / svd.singularValues()(mapping.rank - 1);
  };
  const double base = stacked_kappa(0.0);
  for (double phase : {0.13 * period, 0.52 * period, 0.81 * period}) {
    CHECK(stacked_kappa(phase) == doctest::Approx(base).epsilon(0.05));
  }
}

TEST_CASE("optimizer yields a feasible, reproducible, improving design") {
  const RobotModel model = default_model();
  const BaseParamMapping mapping = compute_base_mapping(sample_regressors(model, 200, 42));

  TrajectoryOptions options;
  options.seed = 42;
  options.budget = 300;
  const OptimizedTrajectory run1 = optimize_trajectory(model, mapping, model.limits, options);
  const OptimizedTrajectory run2 = optimize_trajectory(model, mapping, model.limits, options);

  CHECK(run1.report.feasible);
  CHECK(run1.params_pre_elimination == 42);
  CHECK(std::isfinite(run1.kappa));
  CHECK(run1.kappa == run2.kappa);
  for (int i = 0; i < kNumJoints; ++i) {
    CHECK((run1.trajectory.joints[i].a - run2.trajectory.joints[i].a).cwiseAbs().maxCoeff() == 0.0);
  }
  for (size_t k = 1; k < run1.best_history.size(); ++k) {
    CHECK(run1.best_history[k] <= run1.best_history[k - 1]);
  }

  const JointState s0 = eval_trajectory(run1.trajectory, 0.0);
  CHECK(s0.dq.cwiseAbs().maxCoeff() < 1e-6);
  CHECK(s0.ddq.cwiseAbs().maxCoeff() < 1e-6);

  // single-evaluation budget returns the first candidate untouched
  TrajectoryOptions first_only = options;
  first_only.budget = 1;
  const OptimizedTrajectory single = optimize_trajectory(model, mapping, model.limits, first_only);
  CHECK(single.evaluations == 1);
  CHECK(single.kappa == single.best_history.front());

  CHECK_THROWS_AS(optimize_trajectory(model, mapping, model.limits, TrajectoryOptions{.n_harmonics = 1}),
                  std::invalid_argument);
}

TEST_CASE("strict boundary variant starts from zero position") {
  const RobotModel model = default_model();
  const BaseParamMapping mapping = compute_base_mapping(sample_regressors(model, 200, 42));
  TrajectoryOptions options;
  options.seed = 5;
  options.budget = 60;
  options.strict_zero_position = true;
  const OptimizedTrajectory run = optimize_trajectory(model, mapping, model.limits, options);
  const JointState s0 = eval_trajectory(run.trajectory, 0.0);
  CHECK(s0.q.cwiseAbs().maxCoeff() < 1e-9);
  CHECK(run.report.feasible);
}

TEST_CASE("trajectory JSON round-trip and degree-unit loading") {
  std::mt19937_64 rng(53);
  const FourierTrajectory traj = random_completed(rng, 0.04);
  const FourierTrajectory back = trajectory_from_json(trajectory_to_json(traj));
  CHECK(back.omega_f == traj.omega_f);
  CHECK(back.n_harmonics == traj.n_harmonics);
  for (int i = 0; i < kNumJoints; ++i) {
    CHECK((back.joints[i].a - traj.joints[i].a).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.joints[i].b - traj.joints[i].b).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.joints[i].offset == traj.joints[i].offset);
  }

  const FourierTrajectory preset = table3_preset();
  const FourierTrajectory from_file =
      trajectory_from_json(test::read_file(test::source_path("data/table3_trajectory.json")));
  CHECK(from_file.omega_f == preset.omega_f);
  for (int i = 0; i < kNumJoints; ++i) {
    CHECK((from_file.joints[i].a - preset.joints[i].a).cwiseAbs().maxCoeff() == 0.0);
    CHECK((from_file.joints[i].b - preset.joints[i].b).cwiseAbs().maxCoeff() == 0.0);
    CHECK(from_file.joints[i].offset == preset.joints[i].offset);
  }

  // the published table violates this arm's velocity limits; report, not assert
  const ConstraintReport t3 = check_constraints(preset, default_model().limits, 1e-2);
  CHECK_FALSE(t3.feasible);

  CHECK_THROWS_AS(trajectory_from_json("{"), std::invalid_argument);
  CHECK_THROWS_AS(trajectory_from_json(R"({"units":"furlong","omega_f":1,"n_H":1,"joints":[]})"),
                  std::invalid_argument);
}

TEST_CASE("the shipped default trajectory is feasible out of the box") {
  const FourierTrajectory traj =
      trajectory_from_json(test::read_file(test::source_path("data/default_trajectory.json")));
  const ConstraintReport report = check_constraints(traj, default_model().limits, 1e-3);
  CHECK(report.feasible);
  CHECK(traj.n_harmonics == 3);
}
