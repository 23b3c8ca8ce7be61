#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hydrarm/friction_ident.hpp"
#include "test_support.hpp"

using namespace hydrarm;

namespace {

std::vector<CylinderRecord> noiseless_run(int joint, double periods = 3.0) {
  const ExcitationSpec exc = default_identification_excitation();
  CylinderSimConfig cfg;
  cfg.duration = periods * exc.base_period();
  cfg.noise = NoiseSpec{0.0, 0.0, 0.0, 0.0, 0.0};
  return simulate_cylinder(default_cylinder_params(joint), exc, cfg).records;
}

std::vector<CylinderRecord> noisy_run(int joint, std::uint64_t seed) {
  const ExcitationSpec exc = default_identification_excitation();
  CylinderSimConfig cfg;
  cfg.duration = 3.0 * exc.base_period();
  cfg.seed = seed;
  return simulate_cylinder(default_cylinder_params(joint), exc, cfg).records;
}

Eigen::VectorXd planted_theta(int joint) {
  Eigen::VectorXd theta(5);
  const FrictionParams f = planted_friction(joint);
  theta << kPistonMasses[joint], kDefaultStiffness, f.f_c, f.f_v, f.f_s;
  return theta;
}

}  // namespace

TEST_CASE("regression samples reproduce the planted output exactly") {
  const CylinderParams params = default_cylinder_params(3);
  const auto records = noiseless_run(3, 1.0);
  const Eigen::VectorXd theta = planted_theta(3);
  for (const auto& rec : records) {
    const RegressionSample s = build_sample(rec, params.damping, params.area_head, params.area_rod);
    CHECK(s.y == doctest::Approx(s.lambda.dot(theta)).epsilon(1e-12));
  }
}

TEST_CASE("sample structure at rest and without damping correction") {
  CylinderRecord rec;
  rec.x = 0.02;
  rec.dx = 0.0;
  rec.ddx = 0.5;
  rec.p1 = 2e5;
  rec.p2 = 1e5;
  rec.force = 3.0;
  const RegressionSample s = build_sample(rec, 2.0, 1.963e-3, 1.374e-3);
  CHECK(s.lambda[2] == 0.0);
  CHECK(s.lambda[3] == 0.0);
  CHECK(s.lambda[4] == 0.0);

  const RegressionSample no_damp = build_sample(rec, 0.0, 1.963e-3, 1.374e-3);
  CHECK(no_damp.y == doctest::Approx(rec.p1 * 1.963e-3 - rec.p2 * 1.374e-3 - rec.force));
}

TEST_CASE("rls ignores empty regressors and contracts its covariance") {
  RlsState state = RlsState::diffuse(5);
  RegressionSample null_sample;
  null_sample.y = 3.0;
  null_sample.lambda = Eigen::VectorXd::Zero(5);
  const RlsState next = rls_update(state, null_sample);
  CHECK(next.k == 1);
  CHECK((next.alpha - state.alpha).cwiseAbs().maxCoeff() == 0.0);
  CHECK((next.P - state.P).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rls converges on the noiseless stream and keeps P healthy") {
  const CylinderParams params = default_cylinder_params(0);
  const auto records = noiseless_run(0);
  const auto samples = build_samples(records, params);

  RlsState state = RlsState::diffuse(5);
  double prev_trace = state.P.trace();
  for (const auto& s : samples) {
    state = rls_update(state, s);
    CHECK((state.P - state.P.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(state.P.trace() <= prev_trace + 1e-12);
    prev_trace = state.P.trace();
  }
  const Eigen::VectorXd theta = planted_theta(0);
  CHECK((state.alpha - theta).norm() / theta.norm() < 1e-4);

  // batch and converged recursive estimates coincide on the same stream
  const BatchLsResult batch = batch_ls(samples);
  CHECK((state.alpha - batch.theta).norm() / theta.norm() < 1e-6);
}

TEST_CASE("noiseless batch recovery is exact to solver precision") {
  for (int joint : {2, 5}) {
    const auto samples = build_samples(noiseless_run(joint), default_cylinder_params(joint));
    const BatchLsResult result = batch_ls(samples);
    const Eigen::VectorXd theta = planted_theta(joint);
    CHECK((result.theta - theta).norm() / theta.norm() < 1e-9);
    CHECK(result.residual_rms < 1e-9);
  }
}

TEST_CASE("every planted cylinder recovers within 2 percent under default noise") {
  for (int joint = 0; joint < 6; ++joint) {
    const CylinderParams params = default_cylinder_params(joint);
    const auto records = noisy_run(joint, 100 + joint);
    const auto samples = build_samples(records, params, kPistonMasses[joint]);
    const FrictionParams truth = planted_friction(joint);

    const BatchLsResult batch = batch_ls(samples);
    const FrictionIdResult via_batch = extract_friction(batch.theta, kPistonMasses[joint]);

    RlsState state = RlsState::diffuse(4);
    for (const auto& s : samples) state = rls_update(state, s);
    const FrictionIdResult via_rls = extract_friction(state.alpha, kPistonMasses[joint]);

    for (const FrictionIdResult& r : {via_batch, via_rls}) {
      CHECK(std::abs(r.friction.f_c - truth.f_c) / std::abs(truth.f_c) < 0.02);
      CHECK(std::abs(r.friction.f_v - truth.f_v) / std::abs(truth.f_v) < 0.02);
      CHECK(std::abs(r.friction.f_s - truth.f_s) / std::abs(truth.f_s) < 0.02);
    }
  }
}

TEST_CASE("residual rms sits at the propagated noise level") {
  const CylinderParams params = default_cylinder_params(1);
  const auto samples = build_samples(noisy_run(1, 42), params, kPistonMasses[1]);
  const BatchLsResult result = batch_ls(samples);
  const NoiseSpec noise;  // defaults
  const double sigma_eff = std::hypot(noise.sigma_p * params.area_head,
                                      std::hypot(noise.sigma_p * params.area_rod,
                                                 params.stiffness * noise.sigma_x));
  CHECK(result.residual_rms > 0.5 * sigma_eff);
  CHECK(result.residual_rms < 2.0 * sigma_eff);
}

TEST_CASE("free-mass estimation matches the planted piston mass within 1 percent") {
  const CylinderParams params = default_cylinder_params(0);
  const auto samples = build_samples(noisy_run(0, 7), params);
  const BatchLsResult result = batch_ls(samples);
  const FrictionIdResult id = extract_friction(result.theta);
  CHECK_FALSE(id.mass_fixed);
  CHECK(std::abs(id.mass - kPistonMasses[0]) / kPistonMasses[0] < 0.01);
}

TEST_CASE("a frictionless plant identifies a null triple") {
  CylinderParams params = default_cylinder_params(0);
  params.friction = FrictionParams{0.0, 0.0, 0.0};
  const ExcitationSpec exc = default_identification_excitation();
  CylinderSimConfig cfg;
  cfg.duration = 3.0 * exc.base_period();
  cfg.seed = 3;
  const auto sim = simulate_cylinder(params, exc, cfg);
  const auto samples = build_samples(sim.records, params, kPistonMasses[0]);
  const FrictionIdResult id = extract_friction(batch_ls(samples).theta, kPistonMasses[0]);
  CHECK(std::abs(id.friction.f_c) < 0.05);
  CHECK(std::abs(id.friction.f_v) < 0.05);
  CHECK(std::abs(id.friction.f_s) < 0.05);
}

TEST_CASE("single-tone motion leaves mass and stiffness entangled") {
  // x and ddx are exactly proportional on one sinusoid
  CylinderParams params = default_cylinder_params(0);
  ExcitationSpec single;
  single.tones.push_back({0.06, 0.5, 0.0});
  CylinderSimConfig cfg;
  cfg.duration = 3.0 * single.base_period();
  cfg.noise = NoiseSpec{0.0, 0.0, 0.0, 0.0, 0.0};
  const auto sim = simulate_cylinder(params, single, cfg);
  const auto samples = build_samples(sim.records, params);
  CHECK_THROWS_WITH_AS(batch_ls(samples),
                       doctest::Contains("unidentifiable direction"), std::runtime_error);
}

TEST_CASE("constant-velocity drift is rank deficient and flagged") {
  std::vector<RegressionSample> samples;
  for (int k = 0; k < 200; ++k) {
    CylinderRecord rec;
    rec.t = 0.02 * k;
    rec.x = 0.01 * rec.t;
    rec.dx = 0.01;
    rec.ddx = 0.0;
    rec.p1 = 1e5;
    rec.p2 = 1e5;
    samples.push_back(build_sample(rec, 2.0, 1.963e-3, 1.374e-3));
  }
  CHECK_THROWS_AS(batch_ls(samples), std::runtime_error);
}

TEST_CASE("one-sided motion is reported as a warning") {
  // velocity stays positive: rich enough to solve, but sgn never flips
  std::vector<RegressionSample> samples;
  for (int k = 0; k < 400; ++k) {
    const double t = 0.02 * k;
    CylinderRecord rec;
    rec.t = t;
    rec.dx = 0.05 + 0.03 * std::sin(1.3 * t) + 0.02 * std::sin(4.1 * t);
    rec.x = 0.05 * t;  // monotone advance
    rec.ddx = 0.039 * std::cos(1.3 * t) + 0.082 * std::cos(4.1 * t);
    rec.p1 = 1.2e5 + 500.0 * std::sin(2.0 * t);
    rec.p2 = 1e5;
    samples.push_back(build_sample(rec, 2.0, 1.963e-3, 1.374e-3));
  }
  const BatchLsResult result = batch_ls(samples);
  REQUIRE(!result.warnings.empty());
  CHECK(result.warnings.front().find("never changes sign") != std::string::npos);
}

TEST_CASE("stribeck curve export") {
  const FrictionParams joint6{6.62, 3.99, -3.01};
  const std::vector<double> grid = {-1.0, -0.5, 0.0, 0.5, 1.0};
  const auto curve = stribeck_curve(joint6, grid);
  REQUIRE(curve.size() == 5);
  CHECK(curve[4].second == doctest::Approx(7.60).epsilon(1e-12));
  CHECK(curve[0].second == doctest::Approx(-curve[4].second));
  CHECK(curve[1].second == doctest::Approx(-curve[3].second));
  CHECK(curve[2].second == 0.0);

  CHECK(stribeck_curve(joint6, std::vector<double>{}).empty());
}

TEST_CASE("derivatives recovered from displacement alone") {
  const double dt = 0.02;
  std::vector<CylinderRecord> records;
  for (int k = 0; k < 500; ++k) {
    CylinderRecord rec;
    rec.t = k * dt;
    rec.x = 0.05 * std::sin(0.8 * rec.t) + 0.02 * std::sin(2.0 * rec.t);
    records.push_back(rec);
  }
  fill_derivatives(records, 5);
  for (size_t k = 20; k + 20 < records.size(); ++k) {
    const double t = records[k].t;
    const double dx_true = 0.04 * std::cos(0.8 * t) + 0.04 * std::cos(2.0 * t);
    const double ddx_true = -0.032 * std::sin(0.8 * t) - 0.08 * std::sin(2.0 * t);
    CHECK(records[k].dx == doctest::Approx(dx_true).epsilon(0.02));
    CHECK(records[k].ddx == doctest::Approx(ddx_true).epsilon(0.08));
  }

  std::vector<CylinderRecord> too_short(2);
  CHECK_THROWS_AS(fill_derivatives(too_short, 5), std::invalid_argument);
}
