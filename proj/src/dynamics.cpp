#include "hydrarm/dynamics.hpp"

#include <cmath>

#include <Eigen/Geometry>

namespace hydrarm {

namespace {

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

double signed_cbrt(double v) { return sgn(v) * std::cbrt(std::abs(v)); }

// Net force / moment-about-origin of one link, linear in (m, h, I_origin):
//   F = m*a + domega x h + omega x (omega x h)
//   N = I*domega + omega x (I*omega) + h x a
struct BodyWrench {
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
};

BodyWrench body_wrench(const LinkKinematics& kin, double mass, const Vec3& h, const Mat3& inertia) {
  BodyWrench w;
  w.force = mass * kin.accel + kin.domega.cross(h) + kin.omega.cross(kin.omega.cross(h));
  w.moment = inertia * kin.domega + kin.omega.cross(inertia * kin.omega) + h.cross(kin.accel);
  return w;
}

// Inertia basis matrix for parameter slot 4..9 (Ixx, Iyy, Izz, Ixy, Ixz, Iyz).
Mat3 inertia_basis(int slot) {
  Mat3 basis = Mat3::Zero();
  switch (slot) {
    case 4: basis(0, 0) = 1.0; break;
    case 5: basis(1, 1) = 1.0; break;
    case 6: basis(2, 2) = 1.0; break;
    case 7: basis(0, 1) = basis(1, 0) = 1.0; break;
    case 8: basis(0, 2) = basis(2, 0) = 1.0; break;
    case 9: basis(1, 2) = basis(2, 1) = 1.0; break;
  }
  return basis;
}

}  // namespace

KinematicsPass propagate_kinematics(const RobotModel& model, const JointState& s) {
  KinematicsPass pass;
  const Vec3 z = Vec3::UnitZ();

  const Mat3 base_rot = link_transform(model.dh_rows.front(), 0.0).topLeftCorner<3, 3>();
  Vec3 omega_prev = Vec3::Zero();
  Vec3 domega_prev = Vec3::Zero();
  Vec3 accel_prev = -(base_rot.transpose() * model.gravity);

  for (int i = 0; i < kNumJoints; ++i) {
    const Mat4 transform = link_transform(model.dh_rows[i + 1], s.q[i]);
    LinkKinematics& kin = pass[i];
    kin.rotation = transform.topLeftCorner<3, 3>();
    const Mat3 rot_t = kin.rotation.transpose();
    kin.origin = rot_t * transform.topRightCorner<3, 1>();
    kin.axis = rot_t * z;

    kin.omega = rot_t * (omega_prev + s.dq[i] * z);
    kin.domega = rot_t * (domega_prev + s.ddq[i] * z + s.dq[i] * omega_prev.cross(z));
    kin.accel = rot_t * accel_prev + kin.domega.cross(kin.origin) +
                kin.omega.cross(kin.omega.cross(kin.origin));

    omega_prev = kin.omega;
    domega_prev = kin.domega;
    accel_prev = kin.accel;
  }
  return pass;
}

double friction_torque(const FrictionParams& p, double dq) {
  return p.f_c * sgn(dq) + p.f_v * dq + p.f_s * signed_cbrt(dq);
}

Mat3 parallel_axis(const Mat3& inertia_com, double mass, const Vec3& p) {
  return inertia_com + mass * (p.squaredNorm() * Mat3::Identity() - p * p.transpose());
}

TorqueVector inverse_dynamics(const RobotModel& model, const LinkInertialSet& params,
                              const JointState& s) {
  const KinematicsPass pass = propagate_kinematics(model, s);

  TorqueVector tau = TorqueVector::Zero();
  Vec3 f = Vec3::Zero();
  Vec3 n = Vec3::Zero();
  for (int i = kNumJoints - 1; i >= 0; --i) {
    const LinkParams& lp = params.links[i];
    const BodyWrench w = body_wrench(pass[i], lp.mass, lp.first_moment, lp.inertia());
    if (i < kNumJoints - 1) {
      f = pass[i + 1].rotation * f;
      n = pass[i + 1].rotation * n;
    }
    f += w.force;
    n += w.moment + pass[i].origin.cross(f);
    tau[i] = n.dot(pass[i].axis) + friction_torque(lp.friction, s.dq[i]);
  }
  return tau;
}

RegressorBlock regressor(const RobotModel& model, const JointState& s) {
  const KinematicsPass pass = propagate_kinematics(model, s);

  RegressorBlock y = RegressorBlock::Zero();
  for (int link = 0; link < kNumJoints; ++link) {
    const LinkKinematics& kin = pass[link];
    for (int slot = 0; slot < 10; ++slot) {
      BodyWrench w;
      if (slot == 0) {
        w = body_wrench(kin, 1.0, Vec3::Zero(), Mat3::Zero());
      } else if (slot < 4) {
        w = body_wrench(kin, 0.0, Vec3::Unit(slot - 1), Mat3::Zero());
      } else {
        w = body_wrench(kin, 0.0, Vec3::Zero(), inertia_basis(slot));
      }

      const int col = link * kParamsPerLink + slot;
      Vec3 f = w.force;
      Vec3 n = w.moment + kin.origin.cross(f);
      y(link, col) = n.dot(kin.axis);
      for (int i = link - 1; i >= 0; --i) {
        f = pass[i + 1].rotation * f;
        n = pass[i + 1].rotation * n + pass[i].origin.cross(f);
        y(i, col) = n.dot(pass[i].axis);
      }
    }
    const int fcol = link * kParamsPerLink + 10;
    y(link, fcol + 0) = sgn(s.dq[link]);
    y(link, fcol + 1) = s.dq[link];
    y(link, fcol + 2) = signed_cbrt(s.dq[link]);
  }
  return y;
}

}  // namespace hydrarm
