#include "hydrarm/base_reduction.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/QR>

#include <json.hpp>

namespace hydrarm {

namespace {

// Rounds coefficients that sit within 1e-6 of a three-decimal value, for the
// label text only; the recombination matrix keeps full precision.
std::string format_coefficient(double c) {
  const double snapped = std::round(c * 1000.0) / 1000.0;
  char buf[64];
  if (std::abs(c - snapped) < 1e-6) {
    std::snprintf(buf, sizeof(buf), "%.3f", snapped);
    std::string s(buf);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }
  std::snprintf(buf, sizeof(buf), "%.6g", c);
  return buf;
}

std::string build_label(const std::string& pivot_name,
                        const std::vector<std::pair<std::string, double>>& terms) {
  std::string label = pivot_name;
  // group dependent parameters sharing the same coefficient, Table-style
  std::vector<std::pair<double, std::vector<std::string>>> groups;
  for (const auto& [name, coeff] : terms) {
    bool found = false;
    for (auto& [c, names] : groups) {
      if (std::abs(c - coeff) < 1e-9) {
        names.push_back(name);
        found = true;
        break;
      }
    }
    if (!found) groups.push_back({coeff, {name}});
  }
  for (const auto& [coeff, names] : groups) {
    const double mag = std::abs(coeff);
    label += coeff < 0.0 ? " - " : " + ";
    const bool unit_coeff = std::abs(mag - 1.0) < 1e-9;
    if (!unit_coeff) label += format_coefficient(mag);
    if (names.size() == 1 && unit_coeff) {
      label += names.front();
    } else {
      label += "(";
      for (size_t i = 0; i < names.size(); ++i) {
        if (i) label += " + ";
        label += names[i];
      }
      label += ")";
    }
  }
  return label;
}

}  // namespace

Eigen::MatrixXd sample_regressors(const RobotModel& model, int count, std::uint64_t seed) {
  const int min_count = (kNumParams + kNumJoints - 1) / kNumJoints;
  if (count < min_count) {
    throw std::invalid_argument("sample_regressors: need at least " + std::to_string(min_count) +
                                " states to reach numerical rank");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  Eigen::MatrixXd stacked(count * kNumJoints, kNumParams);
  for (int k = 0; k < count; ++k) {
    JointState s;
    for (int i = 0; i < model.n_joints(); ++i) {
      const JointLimits& lim = model.limits[i];
      const double u = 0.5 * (unit(rng) + 1.0);
      s.q[i] = lim.q_min + u * (lim.q_max - lim.q_min);
      s.dq[i] = unit(rng) * lim.dq_max;
      s.ddq[i] = unit(rng) * lim.ddq_max;
    }
    stacked.middleRows(k * kNumJoints, kNumJoints) = regressor(model, s);
  }
  return stacked;
}

BaseParamMapping reduce_columns(const Eigen::MatrixXd& stacked, double tol,
                                const std::vector<std::string>& names) {
  const Eigen::Index n_cols = stacked.cols();
  if (stacked.rows() < n_cols) {
    throw std::invalid_argument("reduce_columns: stacked matrix needs at least as many rows as columns");
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stacked);
  qr.setThreshold(tol);
  const int rank = static_cast<int>(qr.rank());
  if (rank == 0) {
    throw std::invalid_argument("reduce_columns: matrix is numerically zero");
  }
  qr.setThreshold(10.0 * tol);
  const int rank_coarse = static_cast<int>(qr.rank());
  qr.setThreshold(tol);

  const auto perm = qr.colsPermutation().indices();
  const Eigen::MatrixXd r_full =
      qr.matrixQR().topRows(rank).template triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r1 = r_full.leftCols(rank);
  const Eigen::MatrixXd r2 = r_full.rightCols(n_cols - rank);
  // dependent column d (in pivot order) = sum_k coeffs(k, d) * independent column k
  const Eigen::MatrixXd coeffs = r1.triangularView<Eigen::Upper>().solve(r2);

  // sort the pivot set ascending for presentation, keeping the coefficient rows aligned
  std::vector<int> order(rank);
  for (int k = 0; k < rank; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return perm[a] < perm[b]; });

  BaseParamMapping mapping;
  mapping.rank = rank;
  mapping.total_cols = static_cast<int>(n_cols);
  mapping.tolerance = tol;
  mapping.rank_stable = (rank == rank_coarse);
  mapping.recombination = Eigen::MatrixXd::Zero(rank, n_cols);

  auto name_of = [&](int col) {
    return col < static_cast<int>(names.size()) ? names[col] : "c" + std::to_string(col);
  };

  for (int r = 0; r < rank; ++r) {
    const int pivot_k = order[r];
    const int pivot_col = perm[pivot_k];
    mapping.independent_cols.push_back(pivot_col);
    mapping.recombination(r, pivot_col) = 1.0;
    std::vector<std::pair<std::string, double>> terms;
    for (Eigen::Index j = 0; j < n_cols - rank; ++j) {
      const double c = coeffs(pivot_k, j);
      if (std::abs(c) < 1e-10) continue;
      const int dep_col = perm[rank + j];
      mapping.recombination(r, dep_col) = c;
      terms.push_back({name_of(dep_col), c});
    }
    std::sort(terms.begin(), terms.end());
    mapping.labels.push_back(build_label(name_of(pivot_col), terms));
  }
  return mapping;
}

BaseParamMapping compute_base_mapping(const Eigen::MatrixXd& stacked, double tol,
                                      bool include_friction) {
  if (stacked.cols() != kNumParams) {
    throw std::invalid_argument("compute_base_mapping: expected the 78-column stacked regressor");
  }

  std::vector<int> candidates;
  for (int col = 0; col < kNumParams; ++col) {
    const int slot = col % kParamsPerLink;
    if (include_friction || slot < 10) candidates.push_back(col);
  }

  Eigen::MatrixXd sub(stacked.rows(), candidates.size());
  std::vector<std::string> names(candidates.size());
  for (size_t j = 0; j < candidates.size(); ++j) {
    sub.col(j) = stacked.col(candidates[j]);
    names[j] = param_name(candidates[j]);
  }

  BaseParamMapping reduced = reduce_columns(sub, tol, names);

  BaseParamMapping mapping = reduced;
  mapping.total_cols = kNumParams;
  mapping.includes_friction = include_friction;
  mapping.recombination = Eigen::MatrixXd::Zero(reduced.rank, kNumParams);
  for (size_t j = 0; j < candidates.size(); ++j) {
    mapping.recombination.col(candidates[j]) = reduced.recombination.col(j);
  }
  for (int r = 0; r < reduced.rank; ++r) {
    mapping.independent_cols[r] = candidates[reduced.independent_cols[r]];
  }
  return mapping;
}

Eigen::VectorXd project_params(const BaseParamMapping& mapping, const LinkInertialSet& params) {
  return mapping.recombination * params.to_vector();
}

Eigen::MatrixXd base_regressor(const RobotModel& model, const BaseParamMapping& mapping,
                               const JointState& s) {
  const RegressorBlock full = regressor(model, s);
  Eigen::MatrixXd base(kNumJoints, mapping.rank);
  for (int r = 0; r < mapping.rank; ++r) {
    base.col(r) = full.col(mapping.independent_cols[r]);
  }
  return base;
}

std::string mapping_to_json(const BaseParamMapping& mapping) {
  nlohmann::json doc;
  doc["rank"] = mapping.rank;
  doc["total_cols"] = mapping.total_cols;
  doc["tolerance"] = mapping.tolerance;
  doc["rank_stable"] = mapping.rank_stable;
  doc["includes_friction"] = mapping.includes_friction;
  doc["independent_cols"] = mapping.independent_cols;
  doc["labels"] = mapping.labels;
  auto rows = nlohmann::json::array();
  for (int r = 0; r < mapping.rank; ++r) {
    auto row = nlohmann::json::array();
    for (int c = 0; c < mapping.total_cols; ++c) row.push_back(mapping.recombination(r, c));
    rows.push_back(std::move(row));
  }
  doc["recombination"] = std::move(rows);
  return doc.dump(2);
}

BaseParamMapping mapping_from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("mapping: parse error: ") + e.what());
  }
  BaseParamMapping mapping;
  mapping.rank = doc.at("rank").get<int>();
  mapping.total_cols = doc.at("total_cols").get<int>();
  mapping.tolerance = doc.at("tolerance").get<double>();
  mapping.rank_stable = doc.at("rank_stable").get<bool>();
  mapping.includes_friction = doc.at("includes_friction").get<bool>();
  mapping.independent_cols = doc.at("independent_cols").get<std::vector<int>>();
  mapping.labels = doc.at("labels").get<std::vector<std::string>>();
  mapping.recombination = Eigen::MatrixXd::Zero(mapping.rank, mapping.total_cols);
  const auto& rows = doc.at("recombination");
  for (int r = 0; r < mapping.rank; ++r) {
    for (int c = 0; c < mapping.total_cols; ++c) {
      mapping.recombination(r, c) = rows.at(r).at(c).get<double>();
    }
  }
  return mapping;
}

}  // namespace hydrarm
