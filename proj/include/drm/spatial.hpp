// Copyright 2026 The drm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Spatial (6-D) vector algebra.
//
// Conventions, used everywhere in the library:
//
//  * 6-D ordering is (angular, linear) for motion vectors and
//    (torque, force) for force vectors.
//  * Transform<S> stores the pose of a child frame expressed in its parent
//    frame: `rotation` has the child axes as columns and `translation` is the
//    child origin in parent coordinates. transform_motion / transform_force
//    map child-frame quantities to the parent frame; the inverse_* variants
//    map parent to child without forming the inverse.
//  * Inertia<S> stores the rotational inertia about the body-frame origin.
//
// All operations are written as 3x3 block algebra. Nothing here materializes
// a 6x6 matrix.

#pragma once

#include <cmath>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace drm {

template <typename S>
using Vec3 = Eigen::Matrix<S, 3, 1>;
template <typename S>
using Mat3 = Eigen::Matrix<S, 3, 3>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <typename S>
Mat3<S> skew(const Vec3<S>& v) {
  Mat3<S> m;
  m << S(0), -v.z(), v.y(),
       v.z(), S(0), -v.x(),
       -v.y(), v.x(), S(0);
  return m;
}

template <typename S>
struct Motion {
  Vec3<S> angular = Vec3<S>::Zero();
  Vec3<S> linear = Vec3<S>::Zero();

  static Motion Zero() { return Motion{}; }
  friend Motion operator+(const Motion& a, const Motion& b) {
    return {a.angular + b.angular, a.linear + b.linear};
  }
  friend Motion operator-(const Motion& a, const Motion& b) {
    return {a.angular - b.angular, a.linear - b.linear};
  }
  friend Motion operator*(const S& s, const Motion& m) { return {m.angular * s, m.linear * s}; }
  Motion& operator+=(const Motion& o) { return *this = *this + o; }
};

template <typename S>
struct Force {
  Vec3<S> torque = Vec3<S>::Zero();
  Vec3<S> force = Vec3<S>::Zero();

  static Force Zero() { return Force{}; }
  friend Force operator+(const Force& a, const Force& b) {
    return {a.torque + b.torque, a.force + b.force};
  }
  friend Force operator-(const Force& a, const Force& b) {
    return {a.torque - b.torque, a.force - b.force};
  }
  friend Force operator*(const S& s, const Force& f) { return {f.torque * s, f.force * s}; }
  Force& operator+=(const Force& o) { return *this = *this + o; }
};

// Power pairing of a motion and a force vector.
template <typename S>
S dot(const Motion<S>& v, const Force<S>& f) {
  return v.angular.dot(f.torque) + v.linear.dot(f.force);
}

template <typename S>
struct Transform {
  Mat3<S> rotation = Mat3<S>::Identity();
  Vec3<S> translation = Vec3<S>::Zero();

  static Transform Identity() { return Transform{}; }
};

// Pose of a link frame in the base frame.
template <typename S>
using Pose = Transform<S>;

template <typename S>
struct Inertia {
  S mass = S(0);
  Vec3<S> com = Vec3<S>::Zero();
  Mat3<S> rot_inertia = Mat3<S>::Zero();  // about the frame origin
};

// General symmetric 6x6 inertia [[ang, coupling], [coupling^T, lin]].
// Arises in the articulated-body recursion, where rigid-body structure is lost.
template <typename S>
struct ArticulatedInertia {
  Mat3<S> ang = Mat3<S>::Zero();
  Mat3<S> coupling = Mat3<S>::Zero();
  Mat3<S> lin = Mat3<S>::Zero();
};

// ---------------------------------------------------------------------------
// Rotations and transforms
// ---------------------------------------------------------------------------

// R = Rz(yaw) * Ry(pitch) * Rx(roll): URDF fixed-axis convention.
template <typename S>
Mat3<S> rotation_from_rpy(const Vec3<S>& rpy) {
  using std::cos;
  using std::sin;
  const S cr = cos(rpy.x()), sr = sin(rpy.x());
  const S cp = cos(rpy.y()), sp = sin(rpy.y());
  const S cy = cos(rpy.z()), sy = sin(rpy.z());
  Mat3<S> r;
  r << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
       sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
       -sp, cp * sr, cp * cr;
  return r;
}

// Rotation by `angle` about the unit vector `axis` (Rodrigues).
template <typename S>
Mat3<S> rotation_about_axis(const Eigen::Vector3d& axis, const S& angle) {
  using std::cos;
  using std::sin;
  const Mat3<S> k = skew(Vec3<S>(axis.cast<S>()));
  const S s = sin(angle);
  const S c1 = S(1) - cos(angle);
  return Mat3<S>::Identity() + k * s + (k * k) * c1;
}

template <typename S>
Transform<S> transform_from_rpy_xyz(const Vec3<S>& rpy, const Vec3<S>& xyz) {
  return {rotation_from_rpy(rpy), xyz};
}

// Applies `inner` first, then `outer`.
template <typename S>
Transform<S> compose(const Transform<S>& outer, const Transform<S>& inner) {
  return {outer.rotation * inner.rotation, outer.rotation * inner.translation + outer.translation};
}

template <typename S>
Transform<S> inverse(const Transform<S>& x) {
  const Mat3<S> rt = x.rotation.transpose();
  return {rt, -(rt * x.translation)};
}

template <typename S>
Motion<S> transform_motion(const Transform<S>& x, const Motion<S>& v) {
  const Vec3<S> w = x.rotation * v.angular;
  return {w, x.rotation * v.linear + x.translation.cross(w)};
}

template <typename S>
Motion<S> inverse_transform_motion(const Transform<S>& x, const Motion<S>& v) {
  const Mat3<S> rt = x.rotation.transpose();
  return {rt * v.angular, rt * (v.linear - x.translation.cross(v.angular))};
}

template <typename S>
Force<S> transform_force(const Transform<S>& x, const Force<S>& f) {
  const Vec3<S> force = x.rotation * f.force;
  return {x.rotation * f.torque + x.translation.cross(force), force};
}

template <typename S>
Force<S> inverse_transform_force(const Transform<S>& x, const Force<S>& f) {
  const Mat3<S> rt = x.rotation.transpose();
  return {rt * (f.torque - x.translation.cross(f.force)), rt * f.force};
}

// ---------------------------------------------------------------------------
// Cross products
// ---------------------------------------------------------------------------

template <typename S>
Motion<S> cross_motion(const Motion<S>& v, const Motion<S>& m) {
  return {v.angular.cross(m.angular), v.angular.cross(m.linear) + v.linear.cross(m.angular)};
}

template <typename S>
Force<S> cross_force(const Motion<S>& v, const Force<S>& f) {
  return {v.angular.cross(f.torque) + v.linear.cross(f.force), v.angular.cross(f.force)};
}

// ---------------------------------------------------------------------------
// Inertias
// ---------------------------------------------------------------------------

// m * (|c|^2 I - c c^T): inertia of a point mass m at c about the origin.
template <typename S>
Mat3<S> point_mass_inertia(const S& mass, const Vec3<S>& c) {
  return (Mat3<S>::Identity() * c.squaredNorm() - c * c.transpose()) * mass;
}

template <typename S>
Inertia<S> inertia_from_com(const S& mass, const Vec3<S>& com, const Mat3<S>& inertia_at_com) {
  return {mass, com, inertia_at_com + point_mass_inertia(mass, com)};
}

template <typename S>
Mat3<S> inertia_at_com(const Inertia<S>& in) {
  return in.rot_inertia - point_mass_inertia(in.mass, in.com);
}

template <typename S>
Force<S> operator*(const Inertia<S>& in, const Motion<S>& v) {
  const Vec3<S> mc = in.com * in.mass;
  return {in.rot_inertia * v.angular + mc.cross(v.linear),
          v.linear * in.mass - mc.cross(v.angular)};
}

// Re-expresses a child-frame inertia in the parent frame.
template <typename S>
Inertia<S> transform_inertia(const Transform<S>& x, const Inertia<S>& in) {
  const Mat3<S> ic = x.rotation * inertia_at_com(in) * x.rotation.transpose();
  const Vec3<S> com = x.rotation * in.com + x.translation;
  return inertia_from_com(in.mass, com, ic);
}

template <typename S>
Inertia<S> operator+(const Inertia<S>& a, const Inertia<S>& b) {
  const S mass = a.mass + b.mass;
  Vec3<S> com = Vec3<S>::Zero();
  if (mass > S(0)) com = (a.com * a.mass + b.com * b.mass) / mass;
  return {mass, com, a.rot_inertia + b.rot_inertia};
}

template <typename S>
ArticulatedInertia<S> articulated(const Inertia<S>& in) {
  return {in.rot_inertia, skew(Vec3<S>(in.com * in.mass)), Mat3<S>::Identity() * in.mass};
}

template <typename S>
Force<S> operator*(const ArticulatedInertia<S>& ia, const Motion<S>& v) {
  return {ia.ang * v.angular + ia.coupling * v.linear,
          ia.coupling.transpose() * v.angular + ia.lin * v.linear};
}

template <typename S>
ArticulatedInertia<S> operator+(const ArticulatedInertia<S>& a, const ArticulatedInertia<S>& b) {
  return {a.ang + b.ang, a.coupling + b.coupling, a.lin + b.lin};
}

// ia - u u^T / d, with u a force vector.
template <typename S>
ArticulatedInertia<S> subtract_outer(const ArticulatedInertia<S>& ia, const Force<S>& u, const S& d) {
  return {ia.ang - u.torque * u.torque.transpose() / d,
          ia.coupling - u.torque * u.force.transpose() / d,
          ia.lin - u.force * u.force.transpose() / d};
}

// X* ia X^-1 for a child-to-parent transform X.
template <typename S>
ArticulatedInertia<S> transform_articulated(const Transform<S>& x, const ArticulatedInertia<S>& ia) {
  const Mat3<S>& r = x.rotation;
  const Mat3<S> a = r * ia.ang * r.transpose();
  const Mat3<S> b = r * ia.coupling * r.transpose();
  const Mat3<S> c = r * ia.lin * r.transpose();
  const Mat3<S> px = skew(x.translation);
  const Mat3<S> bt = b + px * c;
  return {a + px * b.transpose() - b * px - px * c * px, bt, c};
}

// ---------------------------------------------------------------------------
// Scalar conversion
// ---------------------------------------------------------------------------

template <typename T, typename S>
Transform<T> cast(const Transform<S>& x) {
  return {x.rotation.template cast<T>(), x.translation.template cast<T>()};
}

template <typename T, typename S>
Inertia<T> cast(const Inertia<S>& in) {
  return {T(in.mass), in.com.template cast<T>(), in.rot_inertia.template cast<T>()};
}

}  // namespace drm
