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

// Forward kinematics, geometric Jacobians and gradient-descent IK.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "drm/model.hpp"
#include "drm/spatial.hpp"

namespace drm {

inline void require_size(Eigen::Index actual, int expected, const char* what) {
  if (actual != expected) {
    throw Error(std::string(what) + " has length " + std::to_string(actual) + ", expected " +
                std::to_string(expected));
  }
}

// Transform from body frame to parent frame for joint position q
// (joint origin, then the joint motion itself).
template <typename S>
Transform<S> joint_transform(const Body& body, const S& q) {
  Transform<S> origin = cast<S>(body.joint_origin);
  switch (body.joint_type) {
    case JointType::kRevolute:
    case JointType::kContinuous:
      return compose(origin, Transform<S>{rotation_about_axis(body.axis, q), Vec3<S>::Zero()});
    case JointType::kPrismatic:
      return compose(origin, Transform<S>{Mat3<S>::Identity(), Vec3<S>(body.axis.cast<S>() * q)});
    case JointType::kFixed:
      break;
  }
  return origin;
}

template <typename S>
Transform<S> joint_transform(const Body& body, const VecX<S>& q) {
  return body.dof >= 0 ? joint_transform(body, q(body.dof)) : cast<S>(body.joint_origin);
}

// Motion subspace of a 1-DoF joint in the body frame. Zero for fixed joints.
template <typename S>
Motion<S> motion_subspace(const Body& body) {
  Motion<S> s;
  switch (body.joint_type) {
    case JointType::kRevolute:
    case JointType::kContinuous:
      s.angular = body.axis.cast<S>();
      break;
    case JointType::kPrismatic:
      s.linear = body.axis.cast<S>();
      break;
    case JointType::kFixed:
      break;
  }
  return s;
}

template <typename S>
S project(const Motion<S>& s, const Force<S>& f) {
  return dot(s, f);
}

// Pose of every body frame in the base frame, indexed like model.bodies().
template <typename S>
std::vector<Pose<S>> forward_kinematics(const RobotModel& model, const VecX<S>& q) {
  require_size(q.size(), model.dof_count(), "q");
  std::vector<Pose<S>> poses(static_cast<std::size_t>(model.body_count()));
  for (int i = 0; i < model.body_count(); ++i) {
    const Body& b = model.body(i);
    if (b.parent < 0) {
      poses[0] = Pose<S>::Identity();
      continue;
    }
    poses[static_cast<std::size_t>(i)] = compose(poses[static_cast<std::size_t>(b.parent)], joint_transform(b, q));
  }
  return poses;
}

// Pose of a single link. Throws UnknownLinkError.
template <typename S>
Pose<S> link_pose(const RobotModel& model, const VecX<S>& q, const std::string& link) {
  const int index = model.body_index(link);
  return forward_kinematics(model, q)[static_cast<std::size_t>(index)];
}

// Geometric Jacobian of `link`: rows 0-2 angular, rows 3-5 linear velocity of
// the link-frame origin, both in the base frame.
template <typename S>
Eigen::Matrix<S, 6, Eigen::Dynamic> link_jacobian(const RobotModel& model, const VecX<S>& q,
                                                  const std::string& link) {
  const int target = model.body_index(link);
  const std::vector<Pose<S>> poses = forward_kinematics(model, q);
  Eigen::Matrix<S, 6, Eigen::Dynamic> jac(6, model.dof_count());
  jac.setConstant(S(0));
  const Vec3<S> p_link = poses[static_cast<std::size_t>(target)].translation;
  for (int i = target; i > 0; i = model.body(i).parent) {
    const Body& b = model.body(i);
    if (b.dof < 0) continue;
    const Pose<S>& pj = poses[static_cast<std::size_t>(i)];
    const Vec3<S> axis = pj.rotation * b.axis.cast<S>();
    if (b.joint_type == JointType::kPrismatic) {
      jac.col(b.dof).template tail<3>() = axis;
    } else {
      jac.col(b.dof).template head<3>() = axis;
      jac.col(b.dof).template tail<3>() = axis.cross(Vec3<S>(p_link - pj.translation));
    }
  }
  return jac;
}

// Rotation vector (axis * angle) of a rotation matrix, angle in [0, pi].
Eigen::Vector3d rotation_log(const Eigen::Matrix3d& r);

// Unit quaternion (w, x, y, z) with w >= 0.
Eigen::Vector4d quaternion_wxyz(const Eigen::Matrix3d& r);

struct IkTarget {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
};

struct IkOptions {
  int max_iters = 500;
  double step_size = 0.1;
  double position_tolerance = 1e-5;     // m
  double orientation_tolerance = 1e-4;  // rad
  bool position_only = false;
  int max_halvings = 20;
  std::uint64_t seed = 0;  // singular-orientation perturbation
};

struct IkResult {
  Eigen::VectorXd q;
  bool converged = false;
  double residual = 0.0;  // position error (m); max with orientation error when not position_only
  double position_error = 0.0;
  double orientation_error = 0.0;
  int iterations = 0;
  std::vector<double> loss_history;  // loss after each accepted iterate, starting with q0
};

// Gradient descent with backtracking on
//   |p(q) - p*|^2 + lambda |log(R(q)^T R*)|^2,  lambda = 0 if position_only.
// q is projected onto the joint limits after each step.
IkResult inverse_kinematics(const RobotModel& model, const IkTarget& target, const std::string& link,
                            const Eigen::VectorXd& q0, const IkOptions& options = {});

}  // namespace drm
