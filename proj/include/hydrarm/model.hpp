#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace hydrarm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

inline constexpr int kNumJoints = 6;
inline constexpr int kParamsPerLink = 13;
inline constexpr int kNumParams = kNumJoints * kParamsPerLink;  // 78

using ParamVector = Eigen::Matrix<double, kNumParams, 1>;
using TorqueVector = Vec6;

/// One standard (distal) Denavit-Hartenberg row, SI units (m, rad).
/// The transform is RotZ(q + theta_offset) * TransZ(d) * TransX(a) * RotX(alpha).
struct DHRow {
  double d = 0.0;
  double alpha = 0.0;
  double a = 0.0;
  double theta_offset = 0.0;
};

struct JointLimits {
  double q_min = 0.0;
  double q_max = 0.0;
  double dq_max = 0.0;
  double ddq_max = 0.0;
};

struct JointState {
  Vec6 q = Vec6::Zero();
  Vec6 dq = Vec6::Zero();
  Vec6 ddq = Vec6::Zero();
  double t = 0.0;
};

struct FrictionParams {
  double f_c = 0.0;  // Coulomb level
  double f_v = 0.0;  // viscous coefficient
  double f_s = 0.0;  // cube-root (linearized Stribeck) coefficient
};

/// Inertial description of one link in the linear parameterization:
/// mass, mass-weighted center of mass, and the inertia tensor taken about the
/// link frame origin (not the COM), plus the joint friction triple.
struct LinkParams {
  double mass = 0.0;
  Vec3 first_moment = Vec3::Zero();  // m * com, kg*m
  double ixx = 0.0, iyy = 0.0, izz = 0.0;
  double ixy = 0.0, ixz = 0.0, iyz = 0.0;
  FrictionParams friction;

  Mat3 inertia() const;
  void set_inertia(const Mat3& inertia_origin);
};

/// Full 78-entry parameter set for the six links. The frozen column order per
/// link is: m, m*rx, m*ry, m*rz, Ixx, Iyy, Izz, Ixy, Ixz, Iyz, f_c, f_v, f_s.
struct LinkInertialSet {
  std::array<LinkParams, kNumJoints> links;

  ParamVector to_vector() const;
  static LinkInertialSet from_vector(const ParamVector& v);
};

/// Converts CAD-style inputs (COM position, inertia about the COM) to the
/// origin-referenced storage used everywhere else.
LinkParams make_link_params(double mass, const Vec3& com, const Mat3& inertia_com,
                            const FrictionParams& friction = {});

struct RobotModel {
  std::vector<DHRow> dh_rows;       // fixed base row followed by one row per joint
  std::vector<JointLimits> limits;  // per actuated joint
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);  // base frame, m/s^2

  int n_joints() const { return static_cast<int>(limits.size()); }
};

/// Built-in description of the arm (the shipped default config holds the same values).
RobotModel default_model();

/// Parses a model config document. Geometry accepts millimetre/degree keys
/// (d_mm, alpha_deg, a_mm, theta_deg) or SI keys (d, alpha, a, theta); limits are rad-based.
/// Throws std::invalid_argument on malformed input, row-count mismatch or bad limits.
RobotModel load_model(const std::string& json_text);

/// Serializes a model to the SI-key config schema. load_model(save_model(m)) == m exactly.
std::string save_model(const RobotModel& model);

Mat4 link_transform(const DHRow& row, double q);

/// Frames 0..n: frame 0 is the fixed base row, frame i the cumulative product
/// through joint i.
std::vector<Mat4> forward_kinematics(const RobotModel& model, const Vec6& q);

struct LimitViolation {
  int joint = 0;         // 1-based
  std::string quantity;  // "q" | "dq" | "ddq"
  double value = 0.0;
  double bound = 0.0;
};

/// Closed-interval limit check; an empty report means the state is feasible.
std::vector<LimitViolation> validate_state(const RobotModel& model, const JointState& s);

/// Name of a column in the frozen 78-parameter basis, e.g. "m_1", "r_x2", "I_3zz", "f_c4".
std::string param_name(int col);

}  // namespace hydrarm
