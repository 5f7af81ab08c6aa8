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

#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "drm/errors.hpp"
#include "drm/spatial.hpp"

namespace drm {

enum class JointType { kFixed, kRevolute, kContinuous, kPrismatic };

std::string_view joint_type_name(JointType type);

inline bool is_movable(JointType type) { return type != JointType::kFixed; }

struct JointLimits {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  double effort = std::numeric_limits<double>::infinity();
  double velocity = std::numeric_limits<double>::infinity();
};

// One rigid body and the joint connecting it to its parent. The root body
// has parent == -1 and a fixed identity joint.
struct Body {
  std::string name;
  int parent = -1;
  std::string joint_name;
  JointType joint_type = JointType::kFixed;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
  Transform<double> joint_origin;  // joint frame in the parent body frame
  JointLimits limits;
  Inertia<double> inertia;  // about the body-frame origin
  bool has_inertial = false;
  int dof = -1;  // generalized-coordinate index, -1 for fixed joints
};

// Immutable kinematic tree, bodies stored parent-before-child.
class RobotModel {
 public:
  RobotModel(std::string name, std::vector<Body> bodies, bool kinematics_only);

  const std::string& name() const { return name_; }
  int dof_count() const { return dof_count_; }
  int body_count() const { return static_cast<int>(bodies_.size()); }
  const std::vector<Body>& bodies() const { return bodies_; }
  const Body& body(int i) const { return bodies_[static_cast<std::size_t>(i)]; }
  bool kinematics_only() const { return kinematics_only_; }

  // Throws UnknownLinkError.
  int body_index(std::string_view link) const;
  bool has_link(std::string_view link) const;

  // Body index owning each generalized coordinate.
  const std::vector<int>& dof_bodies() const { return dof_bodies_; }

  // Model inertias converted to scalar type S.
  template <typename S>
  std::vector<Inertia<S>> inertias() const {
    std::vector<Inertia<S>> out;
    out.reserve(bodies_.size());
    for (const Body& b : bodies_) out.push_back(cast<S>(b.inertia));
    return out;
  }

  void require_dynamics() const {
    if (kinematics_only_) throw DynamicsUnavailableError();
  }

 private:
  std::string name_;
  std::vector<Body> bodies_;
  std::vector<int> dof_bodies_;
  int dof_count_ = 0;
  bool kinematics_only_ = false;
};

}  // namespace drm
