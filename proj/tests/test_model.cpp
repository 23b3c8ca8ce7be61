#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hydrarm/model.hpp"
#include "test_support.hpp"

using namespace hydrarm;

TEST_CASE("default config reproduces the published geometry and limits") {
  const RobotModel model = load_model(test::read_file(test::source_path("data/model_default.json")));
  REQUIRE(model.dh_rows.size() == 7);
  REQUIRE(model.n_joints() == 6);

  CHECK(model.dh_rows[2].a == doctest::Approx(0.84246).epsilon(1e-12));
  CHECK(model.dh_rows[2].theta_offset == doctest::Approx(130.0 * std::numbers::pi / 180.0).epsilon(1e-12));
  CHECK(model.dh_rows[0].alpha == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));

  CHECK(model.limits[0].q_min == doctest::Approx(-0.0523));
  CHECK(model.limits[0].q_max == doctest::Approx(1.0472));
  CHECK(model.limits[0].dq_max == doctest::Approx(0.2));
  CHECK(model.limits[0].ddq_max == doctest::Approx(0.1));

  // the built-in model is the same description
  const RobotModel builtin = default_model();
  for (size_t i = 0; i < model.dh_rows.size(); ++i) {
    CHECK(model.dh_rows[i].d == builtin.dh_rows[i].d);
    CHECK(model.dh_rows[i].alpha == builtin.dh_rows[i].alpha);
    CHECK(model.dh_rows[i].a == builtin.dh_rows[i].a);
    CHECK(model.dh_rows[i].theta_offset == builtin.dh_rows[i].theta_offset);
  }
}

TEST_CASE("model config errors") {
  CHECK_THROWS_AS(load_model("not json"), std::invalid_argument);
  CHECK_THROWS_AS(load_model("{}"), std::invalid_argument);

  // degenerate bound
  std::string cfg = R"({"dh":[
    {"d":0,"alpha":1.5707963,"a":0,"theta":0},
    {"d":0,"alpha":0,"a":0.5,"theta":0},
    {"d":0,"alpha":0,"a":0.5,"theta":0},
    {"d":0,"alpha":0,"a":0.5,"theta":0},
    {"d":0,"alpha":0,"a":0.5,"theta":0},
    {"d":0,"alpha":0,"a":0.5,"theta":0},
    {"d":0,"alpha":0,"a":0.5,"theta":0}],
    "limits":[
    {"q_min":0.5,"q_max":0.5,"dq_max":1,"ddq_max":1},
    {"q_min":-1,"q_max":1,"dq_max":1,"ddq_max":1},
    {"q_min":-1,"q_max":1,"dq_max":1,"ddq_max":1},
    {"q_min":-1,"q_max":1,"dq_max":1,"ddq_max":1},
    {"q_min":-1,"q_max":1,"dq_max":1,"ddq_max":1},
    {"q_min":-1,"q_max":1,"dq_max":1,"ddq_max":1}]})";
  CHECK_THROWS_AS(load_model(cfg), std::invalid_argument);

  // row-count mismatch: drop one dh row
  const std::string short_cfg = R"({"dh":[{"d":0,"alpha":0,"a":0,"theta":0}],"limits":[]})";
  CHECK_THROWS_AS(load_model(short_cfg), std::invalid_argument);
}

TEST_CASE("model save/load round-trips every value exactly") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  RobotModel model = default_model();
  for (auto& row : model.dh_rows) {
    row.d = u(rng);
    row.alpha = u(rng);
    row.a = std::abs(u(rng));
    row.theta_offset = u(rng);
  }
  const RobotModel reloaded = load_model(save_model(model));
  for (size_t i = 0; i < model.dh_rows.size(); ++i) {
    CHECK(reloaded.dh_rows[i].d == model.dh_rows[i].d);
    CHECK(reloaded.dh_rows[i].alpha == model.dh_rows[i].alpha);
    CHECK(reloaded.dh_rows[i].a == model.dh_rows[i].a);
    CHECK(reloaded.dh_rows[i].theta_offset == model.dh_rows[i].theta_offset);
  }
  for (size_t i = 0; i < model.limits.size(); ++i) {
    CHECK(reloaded.limits[i].q_min == model.limits[i].q_min);
    CHECK(reloaded.limits[i].q_max == model.limits[i].q_max);
    CHECK(reloaded.limits[i].dq_max == model.limits[i].dq_max);
    CHECK(reloaded.limits[i].ddq_max == model.limits[i].ddq_max);
  }
  CHECK(reloaded.gravity == model.gravity);
}

TEST_CASE("link transform basics") {
  const DHRow identity_row{};
  CHECK((link_transform(identity_row, 0.0) - Mat4::Identity()).norm() == doctest::Approx(0.0));

  // unit link rotated a quarter turn lands on the y axis
  const DHRow row{0.0, 0.0, 1.0, 0.0};
  const Mat4 t = link_transform(row, std::numbers::pi / 2);
  CHECK(t(0, 3) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(t(1, 3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t(2, 3) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rotation blocks stay orthonormal with unit determinant") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const DHRow row{u(rng), u(rng), std::abs(u(rng)), u(rng)};
    const Mat3 r = link_transform(row, u(rng)).topLeftCorner<3, 3>();
    CHECK((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("forward kinematics matches the direct matrix product") {
  const RobotModel model = default_model();
  std::mt19937_64 rng(11);

  for (int trial = 0; trial < 51; ++trial) {
    // first pass pins the home pose, the rest sample the joint space
    const Vec6 q = trial == 0 ? Vec6::Zero().eval() : test::random_in_limit_state(model, rng).q;
    const auto frames = forward_kinematics(model, q);
    REQUIRE(frames.size() == 7);

    Mat4 direct = link_transform(model.dh_rows[0], 0.0);
    CHECK((frames[0] - direct).cwiseAbs().maxCoeff() < 1e-12);
    for (int i = 1; i <= 6; ++i) {
      direct = direct * link_transform(model.dh_rows[i], q[i - 1]);
      CHECK((frames[i] - direct).cwiseAbs().maxCoeff() < 1e-12);
      const Mat3 r = frames[i].topLeftCorner<3, 3>();
      CHECK((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-11);
    }
    if (trial == 0) {
      // the folded home pose still reaches a point within the chain's total length
      double total = 0.0;
      for (const auto& row : model.dh_rows) total += row.a;
      CHECK(frames.back().topRightCorner<3, 1>().norm() <= total + 1e-12);
    }
  }
}

TEST_CASE("zero-length chain keeps every frame at the origin") {
  RobotModel model = default_model();
  for (auto& row : model.dh_rows) {
    row.a = 0.0;
    row.d = 0.0;
  }
  const auto frames = forward_kinematics(model, Vec6::Zero());
  for (const auto& f : frames) {
    CHECK(f.topRightCorner<3, 1>().norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("state validation uses closed intervals") {
  const RobotModel model = default_model();

  JointState zero;
  CHECK(validate_state(model, zero).empty());

  JointState fast;
  fast.dq[0] = 0.3;
  const auto report = validate_state(model, fast);
  REQUIRE(report.size() == 1);
  CHECK(report[0].joint == 1);
  CHECK(report[0].quantity == "dq");
  CHECK(report[0].value == doctest::Approx(0.3));
  CHECK(report[0].bound == doctest::Approx(0.2));

  JointState at_bound;
  for (int i = 0; i < 6; ++i) {
    at_bound.q[i] = model.limits[i].q_max;
    at_bound.dq[i] = model.limits[i].dq_max;
    at_bound.ddq[i] = model.limits[i].ddq_max;
  }
  CHECK(validate_state(model, at_bound).empty());
}

TEST_CASE("parameter vector round-trip and naming") {
  std::mt19937_64 rng(5);
  const LinkInertialSet set = test::random_physical_set(rng);
  const ParamVector v = set.to_vector();
  const LinkInertialSet back = LinkInertialSet::from_vector(v);
  CHECK((back.to_vector() - v).cwiseAbs().maxCoeff() == 0.0);

  CHECK(param_name(0) == "m_1");
  CHECK(param_name(1) == "r_x1");
  CHECK(param_name(6) == "I_1zz");
  CHECK(param_name(13) == "m_2");
  CHECK(param_name(77) == "f_s6");
}
