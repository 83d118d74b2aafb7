#pragma once

// Scalar-generic kinematics and dynamics for revolute serial chains. All
// routines are templated over the scalar type so dual numbers propagate
// derivatives through them unchanged; see dual.hpp.
//
// Spatial vectors are 6-dimensional with the angular part on top, expressed
// in link-local coordinates. forward_dynamics is the O(n) articulated-body
// recursion; inverse_dynamics is the recursive Newton-Euler pass. Gravity is
// applied through the usual base-acceleration offset.

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "spectraj/dual.hpp"
#include "spectraj/robot.hpp"

namespace spectraj {

template <typename T> using Vec3 = Eigen::Matrix<T, 3, 1>;
template <typename T> using Mat3 = Eigen::Matrix<T, 3, 3>;
template <typename T> using Vec6 = Eigen::Matrix<T, 6, 1>;
template <typename T> using Mat6 = Eigen::Matrix<T, 6, 6>;
template <typename T> using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T> using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
struct FramePose {
  Mat3<T> rotation;
  Vec3<T> position;
};

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

// Rodrigues rotation about a fixed unit axis, written out componentwise so
// the angle may be a dual scalar while the axis stays plain.
template <typename T>
Mat3<T> axis_rotation(const Eigen::Vector3d& k, const T& angle) {
  using std::cos;
  using std::sin;
  const T c = cos(angle);
  const T s = sin(angle);
  const T u = 1.0 - c;
  Mat3<T> r;
  r(0, 0) = c + k.x() * k.x() * u;
  r(0, 1) = k.x() * k.y() * u - k.z() * s;
  r(0, 2) = k.x() * k.z() * u + k.y() * s;
  r(1, 0) = k.y() * k.x() * u + k.z() * s;
  r(1, 1) = c + k.y() * k.y() * u;
  r(1, 2) = k.y() * k.z() * u - k.x() * s;
  r(2, 0) = k.z() * k.x() * u - k.y() * s;
  r(2, 1) = k.z() * k.y() * u + k.x() * s;
  r(2, 2) = c + k.z() * k.z() * u;
  return r;
}

namespace detail {

// crm(v) * x for motion vectors v, x.
template <typename T>
Vec6<T> cross_motion(const Vec6<T>& v, const Vec6<T>& x) {
  const Vec3<T> w = v.template head<3>(), vl = v.template tail<3>();
  const Vec3<T> a = x.template head<3>(), b = x.template tail<3>();
  Vec6<T> out;
  out.template head<3>() = w.cross(a);
  out.template tail<3>() = vl.cross(a) + w.cross(b);
  return out;
}

// crf(v) * f for a motion vector v and force vector f.
template <typename T>
Vec6<T> cross_force(const Vec6<T>& v, const Vec6<T>& f) {
  const Vec3<T> w = v.template head<3>(), vl = v.template tail<3>();
  const Vec3<T> n = f.template head<3>(), fl = f.template tail<3>();
  Vec6<T> out;
  out.template head<3>() = w.cross(n) + vl.cross(fl);
  out.template tail<3>() = w.cross(fl);
  return out;
}

// Plucker motion transform from parent coordinates into link coordinates:
// E rotates parent axes into link axes, r is the link origin in parent
// coordinates.
template <typename T>
struct LinkTransform {
  Mat3<T> E;
  Eigen::Vector3d r;

  Vec6<T> apply(const Vec6<T>& m) const {
    const Vec3<T> w = m.template head<3>(), v = m.template tail<3>();
    Vec6<T> out;
    out.template head<3>() = E * w;
    out.template tail<3>() = E * (v - Vec3<T>(r.cast<T>()).cross(w));
    return out;
  }

  // Transpose action: carries a force expressed at the link origin back to
  // the parent origin and coordinates.
  Vec6<T> apply_transpose_force(const Vec6<T>& f) const {
    const Vec3<T> n = f.template head<3>(), fl = f.template tail<3>();
    const Vec3<T> fp = E.transpose() * fl;
    Vec6<T> out;
    out.template head<3>() = E.transpose() * n + Vec3<T>(r.cast<T>()).cross(fp);
    out.template tail<3>() = fp;
    return out;
  }

  Mat6<T> as_matrix() const {
    Mat6<T> x = Mat6<T>::Zero();
    x.template topLeftCorner<3, 3>() = E;
    x.template bottomRightCorner<3, 3>() = E;
    x.template bottomLeftCorner<3, 3>() = -E * Mat3<T>(skew(r).cast<T>());
    return x;
  }
};

template <typename T>
LinkTransform<T> joint_transform(const Link& link, const T& q) {
  return {axis_rotation<T>(link.axis, q).transpose() * Mat3<T>(link.origin_rot.transpose().cast<T>()),
          link.origin_xyz};
}

// Spatial inertia of a link about its frame origin; constant in q.
inline Eigen::Matrix<double, 6, 6> spatial_inertia(const Link& link) {
  const Eigen::Matrix3d c = skew(link.com);
  Eigen::Matrix<double, 6, 6> inertia;
  inertia.topLeftCorner<3, 3>() = link.inertia + link.mass * c * c.transpose();
  inertia.topRightCorner<3, 3>() = link.mass * c;
  inertia.bottomLeftCorner<3, 3>() = link.mass * c.transpose();
  inertia.bottomRightCorner<3, 3>() = link.mass * Eigen::Matrix3d::Identity();
  return inertia;
}

template <typename T>
Vec6<T> joint_subspace(const Link& link) {
  Vec6<T> s = Vec6<T>::Zero();
  s.template head<3>() = link.axis.cast<T>();
  return s;
}

inline void check_dim(const RobotModel& model, Eigen::Index size, const char* name) {
  if (size != model.dof())
    throw std::invalid_argument(std::string(name) + ": dimension mismatch with robot dof");
}

template <typename T>
void check_finite(const VecX<T>& v, const char* name) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(value_of(v(i))))
      throw std::invalid_argument(std::string(name) + ": non-finite input");
}

}  // namespace detail

// World pose of every link frame, base-outward composition.
template <typename T>
std::vector<FramePose<T>> forward_kinematics(const RobotModel& model, const VecX<T>& q) {
  detail::check_dim(model, q.size(), "forward_kinematics");
  std::vector<FramePose<T>> poses(model.dof());
  for (int i = 0; i < model.dof(); ++i) {
    const Link& link = model.links[i];
    Mat3<T> parent_rot = Mat3<T>::Identity();
    Vec3<T> parent_pos = Vec3<T>::Zero();
    if (link.parent >= 0) {
      parent_rot = poses[link.parent].rotation;
      parent_pos = poses[link.parent].position;
    }
    poses[i].rotation = parent_rot * Mat3<T>(link.origin_rot.cast<T>()) * axis_rotation<T>(link.axis, q(i));
    poses[i].position = parent_pos + parent_rot * Vec3<T>(link.origin_xyz.cast<T>());
  }
  return poses;
}

// Smooth joint friction: viscous plus tanh-regularized Coulomb. Odd in qd.
template <typename T>
VecX<T> friction_torque(const RobotModel& model, const VecX<T>& qd) {
  detail::check_dim(model, qd.size(), "friction_torque");
  using std::tanh;
  VecX<T> f(model.dof());
  for (int i = 0; i < model.dof(); ++i) {
    const Link& link = model.links[i];
    f(i) = link.viscous_friction * qd(i) +
           link.coulomb_friction * tanh(qd(i) / model.friction_smoothing);
  }
  return f;
}

// Recursive Newton-Euler: torques that realize the prescribed motion,
// including gravity and friction.
template <typename T>
VecX<T> inverse_dynamics(const RobotModel& model, const VecX<T>& q, const VecX<T>& qd,
                         const VecX<T>& qdd) {
  detail::check_dim(model, q.size(), "inverse_dynamics q");
  detail::check_dim(model, qd.size(), "inverse_dynamics qd");
  detail::check_dim(model, qdd.size(), "inverse_dynamics qdd");

  const int n = model.dof();
  std::vector<detail::LinkTransform<T>> xup(n);
  std::vector<Vec6<T>> vel(n), acc(n), force(n);

  for (int i = 0; i < n; ++i) {
    const Link& link = model.links[i];
    xup[i] = detail::joint_transform<T>(link, q(i));
    const Vec6<T> s = detail::joint_subspace<T>(link);

    Vec6<T> vp = Vec6<T>::Zero();
    Vec6<T> ap = Vec6<T>::Zero();
    if (link.parent >= 0) {
      vp = vel[link.parent];
      ap = acc[link.parent];
    } else {
      ap.template tail<3>() = (-model.gravity).cast<T>();
    }

    vel[i] = xup[i].apply(vp) + s * qd(i);
    acc[i] = xup[i].apply(ap) + s * qdd(i) + detail::cross_motion<T>(vel[i], Vec6<T>(s * qd(i)));

    const Eigen::Matrix<double, 6, 6> inertia = detail::spatial_inertia(link);
    force[i] = inertia * acc[i] + detail::cross_force<T>(vel[i], Vec6<T>(inertia * vel[i]));
  }

  VecX<T> tau = friction_torque(model, qd);
  for (int i = n - 1; i >= 0; --i) {
    const Link& link = model.links[i];
    tau(i) += detail::joint_subspace<T>(link).dot(force[i]);
    if (link.parent >= 0) force[link.parent] += xup[i].apply_transpose_force(force[i]);
  }
  return tau;
}

// Articulated-body forward dynamics: joint accelerations produced by the
// applied torques. Friction is subtracted from the applied torque before the
// recursion.
template <typename T>
VecX<T> forward_dynamics(const RobotModel& model, const VecX<T>& q, const VecX<T>& qd,
                         const VecX<T>& tau) {
  detail::check_dim(model, q.size(), "forward_dynamics q");
  detail::check_dim(model, qd.size(), "forward_dynamics qd");
  detail::check_dim(model, tau.size(), "forward_dynamics tau");
  detail::check_finite(q, "forward_dynamics q");
  detail::check_finite(qd, "forward_dynamics qd");
  detail::check_finite(tau, "forward_dynamics tau");

  const int n = model.dof();
  const VecX<T> tau_eff = tau - friction_torque(model, qd);

  std::vector<detail::LinkTransform<T>> xup(n);
  std::vector<Vec6<T>> vel(n), bias_c(n), bias_p(n), subspace(n), coupling(n);
  std::vector<Mat6<T>> inertia_a(n);
  std::vector<T> dinv_denom(n), gen_force(n);

  for (int i = 0; i < n; ++i) {
    const Link& link = model.links[i];
    xup[i] = detail::joint_transform<T>(link, q(i));
    subspace[i] = detail::joint_subspace<T>(link);

    Vec6<T> vp = Vec6<T>::Zero();
    if (link.parent >= 0) vp = vel[link.parent];

    const Vec6<T> vj = subspace[i] * qd(i);
    vel[i] = xup[i].apply(vp) + vj;
    bias_c[i] = detail::cross_motion<T>(vel[i], vj);

    inertia_a[i] = detail::spatial_inertia(link).cast<T>();
    bias_p[i] = detail::cross_force<T>(vel[i], Vec6<T>(inertia_a[i] * vel[i]));
  }

  for (int i = n - 1; i >= 0; --i) {
    const Link& link = model.links[i];
    coupling[i] = inertia_a[i] * subspace[i];
    dinv_denom[i] = subspace[i].dot(coupling[i]);
    gen_force[i] = tau_eff(i) - subspace[i].dot(bias_p[i]);
    if (link.parent >= 0) {
      const Mat6<T> ia =
          inertia_a[i] - coupling[i] * (coupling[i] / dinv_denom[i]).transpose();
      const Vec6<T> pa =
          bias_p[i] + ia * bias_c[i] + coupling[i] * (gen_force[i] / dinv_denom[i]);
      const Mat6<T> x = xup[i].as_matrix();
      inertia_a[link.parent] += x.transpose() * ia * x;
      bias_p[link.parent] += xup[i].apply_transpose_force(pa);
    }
  }

  VecX<T> qdd(n);
  std::vector<Vec6<T>> acc(n);
  for (int i = 0; i < n; ++i) {
    const Link& link = model.links[i];
    Vec6<T> ap = Vec6<T>::Zero();
    if (link.parent >= 0) {
      ap = acc[link.parent];
    } else {
      ap.template tail<3>() = (-model.gravity).cast<T>();
    }
    const Vec6<T> a = xup[i].apply(ap) + bias_c[i];
    qdd(i) = (gen_force[i] - coupling[i].dot(a)) / dinv_denom[i];
    acc[i] = a + subspace[i] * qdd(i);
  }
  return qdd;
}

// State-space right-hand side F(x, u) with x = [q; qd].
template <typename T>
VecX<T> state_derivative(const RobotModel& model, const VecX<T>& x, const VecX<T>& u) {
  const int n = model.dof();
  if (x.size() != 2 * n) throw std::invalid_argument("state_derivative: state must have size 2n");
  const VecX<T> q = x.head(n);
  const VecX<T> qd = x.tail(n);
  VecX<T> dx(2 * n);
  dx.head(n) = qd;
  dx.tail(n) = forward_dynamics(model, q, qd, u);
  return dx;
}

}  // namespace spectraj
