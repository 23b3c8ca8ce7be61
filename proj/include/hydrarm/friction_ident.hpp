#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hydrarm/hydraulic.hpp"

namespace hydrarm {

/// One least-squares row: y = p1*A1 - p2*A2 - F - c*dx against the regressor
/// [ddx, x, sgn(dx), dx, sgn(dx)*|dx|^(1/3)] (first entry dropped when the
/// piston mass is fixed).
struct RegressionSample {
  double y = 0.0;
  Eigen::VectorXd lambda;
};

RegressionSample build_sample(const CylinderRecord& rec, double damping, double area_head,
                              double area_rod);

/// Builds the sample set for one cylinder. With fix_mass, the m*ddx term moves
/// to the output side and a 4-parameter problem (K, f_c, f_v, f_s) remains.
std::vector<RegressionSample> build_samples(std::span<const CylinderRecord> records,
                                            const CylinderParams& params,
                                            std::optional<double> fix_mass = std::nullopt);

std::vector<std::string> regressor_entry_names(bool mass_fixed);

struct RlsState {
  Eigen::VectorXd alpha;  // parameter estimate
  Eigen::MatrixXd P;      // covariance-like matrix, symmetric positive definite
  long k = 0;             // samples absorbed

  static RlsState diffuse(int dim, double p0 = 1e6);
};

/// One recursive least-squares step. Throws when P loses positive definiteness.
RlsState rls_update(const RlsState& state, const RegressionSample& sample,
                    double forgetting = 1.0);

struct BatchLsResult {
  Eigen::VectorXd theta;
  double residual_rms = 0.0;
  int samples = 0;
  Eigen::VectorXd covariance_diag;  // sigma^2 * diag((L'L)^-1)
  std::vector<std::string> warnings;
};

/// QR-based batch solve. Throws on a rank-deficient regressor, naming the
/// deficient direction; a sign column that never flips is flagged as a warning.
BatchLsResult batch_ls(const std::vector<RegressionSample>& samples);

struct FrictionIdResult {
  double mass = 0.0;
  double stiffness = 0.0;
  FrictionParams friction;
  bool mass_fixed = false;
};

FrictionIdResult extract_friction(const Eigen::VectorXd& theta_hat,
                                  std::optional<double> fix_mass = std::nullopt);

std::vector<std::pair<double, double>> stribeck_curve(const FrictionParams& params,
                                                      std::span<const double> v_grid);

/// Recovers dx/ddx from displacement by central differences after a zero-phase
/// moving-average smoothing pass (for records that only carry x).
void fill_derivatives(std::vector<CylinderRecord>& records, int smooth_window = 5);

}  // namespace hydrarm
