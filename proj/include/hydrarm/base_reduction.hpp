#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hydrarm/dynamics.hpp"
#include "hydrarm/model.hpp"

namespace hydrarm {

/// Result of the numerical column regrouping: which columns of the full basis
/// are kept, and how the remaining ones fold into them. For any parameter set
/// X, Y_base(s) * recombination * vec(X) reproduces Y_full(s) * vec(X).
struct BaseParamMapping {
  int rank = 0;
  std::vector<int> independent_cols;  // ascending indices into the source basis
  Eigen::MatrixXd recombination;      // rank x total_cols
  std::vector<std::string> labels;    // readable expression per base parameter
  int total_cols = kNumParams;
  double tolerance = 0.0;
  bool rank_stable = true;   // false when the rank shifts between tol and 10*tol
  bool includes_friction = false;
};

/// Stacks regressors of `count` random in-limit states (6 rows each),
/// deterministic for a fixed seed. Throws when count*6 < kNumParams.
Eigen::MatrixXd sample_regressors(const RobotModel& model, int count, std::uint64_t seed);

/// Generic rank-revealing regrouping of an arbitrary stacked matrix. Column
/// names feed the labels; pass an empty list for "c0", "c1", ...
BaseParamMapping reduce_columns(const Eigen::MatrixXd& stacked, double tol,
                                const std::vector<std::string>& names = {});

/// Regroups the 78-column stacked regressor. Friction columns are left out of
/// the candidate set unless requested (they are trivially independent).
BaseParamMapping compute_base_mapping(const Eigen::MatrixXd& stacked, double tol = 1e-9,
                                      bool include_friction = false);

/// beta = recombination * vec(params).
Eigen::VectorXd project_params(const BaseParamMapping& mapping, const LinkInertialSet& params);

/// Columns of the full regressor at the mapping's independent indices.
Eigen::MatrixXd base_regressor(const RobotModel& model, const BaseParamMapping& mapping,
                               const JointState& s);

std::string mapping_to_json(const BaseParamMapping& mapping);
BaseParamMapping mapping_from_json(const std::string& json_text);

}  // namespace hydrarm
