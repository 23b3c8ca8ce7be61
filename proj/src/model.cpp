#include "hydrarm/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace hydrarm {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("model config: non-finite value for ") + what);
  }
  return v;
}

}  // namespace

Mat3 LinkParams::inertia() const {
  Mat3 inertia_mat;
  inertia_mat << ixx, ixy, ixz,
                 ixy, iyy, iyz,
                 ixz, iyz, izz;
  return inertia_mat;
}

void LinkParams::set_inertia(const Mat3& inertia_origin) {
  ixx = inertia_origin(0, 0);
  iyy = inertia_origin(1, 1);
  izz = inertia_origin(2, 2);
  ixy = 0.5 * (inertia_origin(0, 1) + inertia_origin(1, 0));
  ixz = 0.5 * (inertia_origin(0, 2) + inertia_origin(2, 0));
  iyz = 0.5 * (inertia_origin(1, 2) + inertia_origin(2, 1));
}

ParamVector LinkInertialSet::to_vector() const {
  ParamVector v;
  for (int i = 0; i < kNumJoints; ++i) {
    const LinkParams& lp = links[i];
    const int base = i * kParamsPerLink;
    v[base + 0] = lp.mass;
    v[base + 1] = lp.first_moment.x();
    v[base + 2] = lp.first_moment.y();
    v[base + 3] = lp.first_moment.z();
    v[base + 4] = lp.ixx;
    v[base + 5] = lp.iyy;
    v[base + 6] = lp.izz;
    v[base + 7] = lp.ixy;
    v[base + 8] = lp.ixz;
    v[base + 9] = lp.iyz;
    v[base + 10] = lp.friction.f_c;
    v[base + 11] = lp.friction.f_v;
    v[base + 12] = lp.friction.f_s;
  }
  return v;
}

LinkInertialSet LinkInertialSet::from_vector(const ParamVector& v) {
  LinkInertialSet set;
  for (int i = 0; i < kNumJoints; ++i) {
    LinkParams& lp = set.links[i];
    const int base = i * kParamsPerLink;
    lp.mass = v[base + 0];
    lp.first_moment = Vec3(v[base + 1], v[base + 2], v[base + 3]);
    lp.ixx = v[base + 4];
    lp.iyy = v[base + 5];
    lp.izz = v[base + 6];
    lp.ixy = v[base + 7];
    lp.ixz = v[base + 8];
    lp.iyz = v[base + 9];
    lp.friction = FrictionParams{v[base + 10], v[base + 11], v[base + 12]};
  }
  return set;
}

LinkParams make_link_params(double mass, const Vec3& com, const Mat3& inertia_com,
                            const FrictionParams& friction) {
  LinkParams lp;
  lp.mass = mass;
  lp.first_moment = mass * com;
  const Mat3 shift = mass * (com.squaredNorm() * Mat3::Identity() - com * com.transpose());
  lp.set_inertia(inertia_com + shift);
  lp.friction = friction;
  return lp;
}

RobotModel default_model() {
  RobotModel model;
  // geometry rows in millimetres / degrees, converted here once
  const double rows[7][4] = {
      // d, alpha, a, theta_offset
      {0.0, 90.0, 0.0, 0.0},
      {0.0, 0.0, 511.0, 30.0},
      {0.0, 0.0, 842.46, 130.0},
      {0.0, 0.0, 245.5, -60.0},
      {0.0, 0.0, 300.0, 0.0},
      {0.0, 0.0, 300.0, 0.0},
      {0.0, 0.0, 244.5, 0.0},
  };
  for (const auto& r : rows) {
    model.dh_rows.push_back(DHRow{r[0] * 1e-3, r[1] * kDegToRad, r[2] * 1e-3, r[3] * kDegToRad});
  }
  model.limits = {
      {-0.0523, 1.0472, 0.2, 0.1},
      {-1.0472, 0.1745, 0.2, 0.1},
      {-0.8727, 1.5708, 0.2, 0.1},
      {-0.3491, 0.3491, 0.5, 0.8},
      {-0.3491, 0.3491, 0.5, 0.8},
      {-0.3491, 0.3491, 0.5, 0.8},
  };
  model.gravity = Vec3(0.0, 0.0, -9.81);
  return model;
}

RobotModel load_model(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("model config: parse error: ") + e.what());
  }

  if (!doc.contains("dh") || !doc.contains("limits")) {
    throw std::invalid_argument("model config: missing 'dh' or 'limits' section");
  }

  RobotModel model;
  try {
    for (const auto& row : doc.at("dh")) {
      DHRow dh;
      if (row.contains("d_mm")) {
        dh.d = row.at("d_mm").get<double>() * 1e-3;
        dh.alpha = row.at("alpha_deg").get<double>() * kDegToRad;
        dh.a = row.at("a_mm").get<double>() * 1e-3;
        dh.theta_offset = row.at("theta_deg").get<double>() * kDegToRad;
      } else {
        dh.d = row.at("d").get<double>();
        dh.alpha = row.at("alpha").get<double>();
        dh.a = row.at("a").get<double>();
        dh.theta_offset = row.at("theta").get<double>();
      }
      require_finite(dh.d, "d");
      require_finite(dh.alpha, "alpha");
      require_finite(dh.a, "a");
      require_finite(dh.theta_offset, "theta");
      if (dh.a < 0.0) {
        throw std::invalid_argument("model config: link length a must be >= 0");
      }
      model.dh_rows.push_back(dh);
    }
    for (const auto& lim : doc.at("limits")) {
      JointLimits jl;
      jl.q_min = lim.at("q_min").get<double>();
      jl.q_max = lim.at("q_max").get<double>();
      jl.dq_max = lim.at("dq_max").get<double>();
      jl.ddq_max = lim.at("ddq_max").get<double>();
      if (!(jl.q_min < jl.q_max)) {
        throw std::invalid_argument("model config: q_min must be strictly below q_max");
      }
      if (!(jl.dq_max > 0.0) || !(jl.ddq_max > 0.0)) {
        throw std::invalid_argument("model config: velocity/acceleration bounds must be positive");
      }
      model.limits.push_back(jl);
    }
    if (doc.contains("gravity")) {
      const auto& g = doc.at("gravity");
      if (g.size() != 3) {
        throw std::invalid_argument("model config: gravity must have 3 entries");
      }
      model.gravity = Vec3(g[0].get<double>(), g[1].get<double>(), g[2].get<double>());
      require_finite(model.gravity.norm(), "gravity");
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("model config: ") + e.what());
  }

  if (model.dh_rows.size() != static_cast<size_t>(kNumJoints) + 1) {
    throw std::invalid_argument("model config: expected 7 D-H rows (base row + 6 joints)");
  }
  if (model.limits.size() != static_cast<size_t>(kNumJoints)) {
    throw std::invalid_argument("model config: expected 6 limit entries");
  }
  return model;
}

std::string save_model(const RobotModel& model) {
  nlohmann::json doc;
  doc["dh"] = nlohmann::json::array();
  for (const auto& row : model.dh_rows) {
    doc["dh"].push_back({{"d", row.d}, {"alpha", row.alpha}, {"a", row.a}, {"theta", row.theta_offset}});
  }
  doc["limits"] = nlohmann::json::array();
  for (const auto& lim : model.limits) {
    doc["limits"].push_back({{"q_min", lim.q_min},
                             {"q_max", lim.q_max},
                             {"dq_max", lim.dq_max},
                             {"ddq_max", lim.ddq_max}});
  }
  doc["gravity"] = {model.gravity.x(), model.gravity.y(), model.gravity.z()};
  return doc.dump(2);
}

Mat4 link_transform(const DHRow& row, double q) {
  const double th = q + row.theta_offset;
  const double ct = std::cos(th);
  const double st = std::sin(th);
  const double ca = std::cos(row.alpha);
  const double sa = std::sin(row.alpha);
  Mat4 transform;
  transform << ct, -st * ca,  st * sa, row.a * ct,
               st,  ct * ca, -ct * sa, row.a * st,
              0.0,       sa,       ca,      row.d,
              0.0,      0.0,      0.0,        1.0;
  return transform;
}

std::vector<Mat4> forward_kinematics(const RobotModel& model, const Vec6& q) {
  std::vector<Mat4> frames;
  frames.reserve(model.dh_rows.size());
  Mat4 cumulative = link_transform(model.dh_rows.front(), 0.0);
  frames.push_back(cumulative);
  for (int i = 0; i < model.n_joints(); ++i) {
    cumulative = cumulative * link_transform(model.dh_rows[i + 1], q[i]);
    frames.push_back(cumulative);
  }
  return frames;
}

std::vector<LimitViolation> validate_state(const RobotModel& model, const JointState& s) {
  std::vector<LimitViolation> report;
  for (int i = 0; i < model.n_joints(); ++i) {
    const JointLimits& lim = model.limits[i];
    if (s.q[i] < lim.q_min) {
      report.push_back({i + 1, "q", s.q[i], lim.q_min});
    } else if (s.q[i] > lim.q_max) {
      report.push_back({i + 1, "q", s.q[i], lim.q_max});
    }
    if (std::abs(s.dq[i]) > lim.dq_max) {
      report.push_back({i + 1, "dq", s.dq[i], lim.dq_max});
    }
    if (std::abs(s.ddq[i]) > lim.ddq_max) {
      report.push_back({i + 1, "ddq", s.ddq[i], lim.ddq_max});
    }
  }
  return report;
}

std::string param_name(int col) {
  const int link = col / kParamsPerLink + 1;
  const int slot = col % kParamsPerLink;
  const std::string n = std::to_string(link);
  switch (slot) {
    case 0: return "m_" + n;
    case 1: return "r_x" + n;
    case 2: return "r_y" + n;
    case 3: return "r_z" + n;
    case 4: return "I_" + n + "xx";
    case 5: return "I_" + n + "yy";
    case 6: return "I_" + n + "zz";
    case 7: return "I_" + n + "xy";
    case 8: return "I_" + n + "xz";
    case 9: return "I_" + n + "yz";
    case 10: return "f_c" + n;
    case 11: return "f_v" + n;
    case 12: return "f_s" + n;
    default: return "?";
  }
}

}  // namespace hydrarm
