#include "hydrarm/friction_ident.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace hydrarm {

namespace {

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

std::string describe_direction(const Eigen::VectorXd& v, const std::vector<std::string>& names) {
  std::string out;
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) < 0.3) continue;
    if (!out.empty()) out += ", ";
    out += names[i];
  }
  return out.empty() ? "(mixed)" : out;
}

}  // namespace

RegressionSample build_sample(const CylinderRecord& rec, double damping, double area_head,
                              double area_rod) {
  RegressionSample sample;
  sample.y = rec.p1 * area_head - rec.p2 * area_rod - rec.force - damping * rec.dx;
  sample.lambda.resize(5);
  sample.lambda << rec.ddx, rec.x, sgn(rec.dx), rec.dx, sgn(rec.dx) * std::cbrt(std::abs(rec.dx));
  return sample;
}

std::vector<RegressionSample> build_samples(std::span<const CylinderRecord> records,
                                            const CylinderParams& params,
                                            std::optional<double> fix_mass) {
  std::vector<RegressionSample> samples;
  samples.reserve(records.size());
  for (const auto& rec : records) {
    RegressionSample s = build_sample(rec, params.damping, params.area_head, params.area_rod);
    if (fix_mass) {
      s.y -= *fix_mass * s.lambda[0];
      s.lambda = s.lambda.tail(4).eval();
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<std::string> regressor_entry_names(bool mass_fixed) {
  std::vector<std::string> names = {"ddx", "x", "sgn(dx)", "dx", "cbrt(dx)"};
  if (mass_fixed) names.erase(names.begin());
  return names;
}

RlsState RlsState::diffuse(int dim, double p0) {
  RlsState state;
  state.alpha = Eigen::VectorXd::Zero(dim);
  state.P = p0 * Eigen::MatrixXd::Identity(dim, dim);
  state.k = 0;
  return state;
}

RlsState rls_update(const RlsState& state, const RegressionSample& sample, double forgetting) {
  if (sample.lambda.size() != state.alpha.size()) {
    throw std::invalid_argument("rls_update: regressor dimension mismatch");
  }
  if (!(forgetting > 0.0) || forgetting > 1.0) {
    throw std::invalid_argument("rls_update: forgetting factor must be in (0, 1]");
  }
  RlsState next = state;
  const Eigen::VectorXd& lam = sample.lambda;
  const Eigen::VectorXd p_lam = state.P * lam;
  const double denom = forgetting + lam.dot(p_lam);
  const Eigen::VectorXd gain = p_lam / denom;
  next.alpha = state.alpha + gain * (sample.y - lam.dot(state.alpha));
  Eigen::MatrixXd p = (state.P - gain * p_lam.transpose()) / forgetting;
  next.P = 0.5 * (p + p.transpose());
  next.k = state.k + 1;

  const Eigen::LLT<Eigen::MatrixXd> llt(next.P);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("rls_update: covariance lost positive definiteness at sample " +
                             std::to_string(next.k));
  }
  return next;
}

BatchLsResult batch_ls(const std::vector<RegressionSample>& samples) {
  if (samples.empty()) {
    throw std::invalid_argument("batch_ls: no samples");
  }
  const int dim = static_cast<int>(samples.front().lambda.size());
  const int count = static_cast<int>(samples.size());
  if (count < dim) {
    throw std::invalid_argument("batch_ls: fewer samples than parameters");
  }

  Eigen::MatrixXd big_lambda(count, dim);
  Eigen::VectorXd y(count);
  for (int k = 0; k < count; ++k) {
    big_lambda.row(k) = samples[k].lambda.transpose();
    y[k] = samples[k].y;
  }

  const std::vector<std::string> names = regressor_entry_names(dim == 4);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(big_lambda, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv[dim - 1] <= 1e-10 * sv[0]) {
    const Eigen::VectorXd null_dir = svd.matrixV().col(dim - 1);
    throw std::runtime_error("batch_ls: rank-deficient regressor, unidentifiable direction: " +
                             describe_direction(null_dir, names));
  }

  BatchLsResult result;
  result.theta = big_lambda.householderQr().solve(y);
  result.samples = count;
  const Eigen::VectorXd residual = y - big_lambda * result.theta;
  result.residual_rms = std::sqrt(residual.squaredNorm() / count);

  const Eigen::MatrixXd gram_inv =
      (big_lambda.transpose() * big_lambda).ldlt().solve(Eigen::MatrixXd::Identity(dim, dim));
  const double dof = std::max(1, count - dim);
  result.covariance_diag = (residual.squaredNorm() / dof) * gram_inv.diagonal();

  // a sign column that never flips behaves like an intercept and aliases f_c
  const int sgn_idx = dim == 4 ? 1 : 2;
  const double col_min = big_lambda.col(sgn_idx).minCoeff();
  const double col_max = big_lambda.col(sgn_idx).maxCoeff();
  if (col_min >= 0.0 || col_max <= 0.0) {
    result.warnings.push_back(
        "dx never changes sign; sgn(dx) is intercept-like and the Coulomb level is one-sided");
  }

  return result;
}

FrictionIdResult extract_friction(const Eigen::VectorXd& theta_hat,
                                  std::optional<double> fix_mass) {
  FrictionIdResult result;
  if (fix_mass) {
    if (theta_hat.size() != 4) {
      throw std::invalid_argument("extract_friction: expected 4 parameters with fixed mass");
    }
    result.mass = *fix_mass;
    result.mass_fixed = true;
    result.stiffness = theta_hat[0];
    result.friction = FrictionParams{theta_hat[1], theta_hat[2], theta_hat[3]};
  } else {
    if (theta_hat.size() != 5) {
      throw std::invalid_argument("extract_friction: expected 5 parameters");
    }
    result.mass = theta_hat[0];
    result.stiffness = theta_hat[1];
    result.friction = FrictionParams{theta_hat[2], theta_hat[3], theta_hat[4]};
  }
  return result;
}

std::vector<std::pair<double, double>> stribeck_curve(const FrictionParams& params,
                                                      std::span<const double> v_grid) {
  std::vector<std::pair<double, double>> curve;
  curve.reserve(v_grid.size());
  for (double v : v_grid) {
    curve.emplace_back(v, linearized_stribeck(params, v));
  }
  return curve;
}

void fill_derivatives(std::vector<CylinderRecord>& records, int smooth_window) {
  const int count = static_cast<int>(records.size());
  if (count < 3) {
    throw std::invalid_argument("fill_derivatives: need at least 3 records");
  }
  if (smooth_window < 1 || smooth_window % 2 == 0) {
    throw std::invalid_argument("fill_derivatives: smoothing window must be odd and positive");
  }
  const double dt = records[1].t - records[0].t;
  if (!(dt > 0.0)) {
    throw std::invalid_argument("fill_derivatives: records must be time-ordered");
  }

  const int half = smooth_window / 2;
  std::vector<double> smooth(count);
  for (int k = 0; k < count; ++k) {
    const int lo = std::max(0, k - half);
    const int hi = std::min(count - 1, k + half);
    double acc = 0.0;
    for (int j = lo; j <= hi; ++j) acc += records[j].x;
    smooth[k] = acc / (hi - lo + 1);
  }
  for (int k = 0; k < count; ++k) {
    const int lo = std::max(0, k - 1);
    const int hi = std::min(count - 1, k + 1);
    records[k].dx = (smooth[hi] - smooth[lo]) / ((hi - lo) * dt);
  }
  for (int k = 1; k < count - 1; ++k) {
    records[k].ddx = (smooth[k + 1] - 2.0 * smooth[k] + smooth[k - 1]) / (dt * dt);
  }
  records.front().ddx = records[1].ddx;
  records.back().ddx = records[count - 2].ddx;
}

}  // namespace hydrarm
