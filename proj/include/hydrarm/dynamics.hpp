#pragma once

#include <array>

#include "hydrarm/model.hpp"

namespace hydrarm {

/// Joint-space regressor: tau = Y * vec(params) for every parameter set, with
/// the frozen 13-per-link column order of LinkInertialSet.
using RegressorBlock = Eigen::Matrix<double, kNumJoints, kNumParams>;

/// Per-link kinematic quantities expressed in the link's own frame, produced by
/// the outward recursion. Shared by inverse dynamics and the regressor so both
/// evaluate the same linear map.
struct LinkKinematics {
  Mat3 rotation;      // parent-to-link rotation block of the D-H transform
  Vec3 origin;        // link origin seen from the parent origin, link coords
  Vec3 axis;          // joint axis (parent z) in link coords
  Vec3 omega;         // angular velocity
  Vec3 domega;        // angular acceleration
  Vec3 accel;         // classical linear acceleration of the link origin
};

using KinematicsPass = std::array<LinkKinematics, kNumJoints>;

/// Outward velocity/acceleration recursion. Gravity is folded in as a base
/// acceleration, rotated through the fixed base row.
KinematicsPass propagate_kinematics(const RobotModel& model, const JointState& s);

/// Linearized Stribeck joint friction: f_c*sgn(dq) + f_v*dq + f_s*sgn(dq)*|dq|^(1/3).
double friction_torque(const FrictionParams& p, double dq);

/// Shifts an inertia tensor from the COM to a frame whose origin sits at -p
/// from the COM: I_com + m * (p'p E - p p').
Mat3 parallel_axis(const Mat3& inertia_com, double mass, const Vec3& p);

/// Recursive Newton-Euler inverse dynamics with the linearized friction term.
TorqueVector inverse_dynamics(const RobotModel& model, const LinkInertialSet& params,
                              const JointState& s);

/// Builds the 6x78 regressor by pushing unit-parameter body wrenches through
/// the inward recursion (the kinematics pass is shared across columns).
RegressorBlock regressor(const RobotModel& model, const JointState& s);

}  // namespace hydrarm
