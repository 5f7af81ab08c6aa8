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

// URDF subset reader and kinematic-tree builder.
//
// Supported joints: revolute, continuous, prismatic, fixed. Floating and
// planar joints and <mimic> are rejected. Visual, collision, material and
// gazebo elements are skipped. <dynamics> (damping/friction) is read and
// ignored with a warning.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "drm/model.hpp"

namespace drm::urdf {

struct Origin {
  Eigen::Vector3d rpy = Eigen::Vector3d::Zero();
  Eigen::Vector3d xyz = Eigen::Vector3d::Zero();
};

struct Inertial {
  double mass = 0.0;
  Origin origin;
  double ixx = 0.0, ixy = 0.0, ixz = 0.0, iyy = 0.0, iyz = 0.0, izz = 0.0;

  Eigen::Matrix3d tensor() const;
};

struct Link {
  std::string name;
  std::optional<Inertial> inertial;
};

struct Joint {
  std::string name;
  JointType type = JointType::kFixed;
  std::string parent;
  std::string child;
  Origin origin;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
  std::optional<JointLimits> limits;
  bool has_dynamics = false;  // <dynamics> present (ignored)
};

struct RobotDescription {
  std::string name;
  std::vector<Link> links;
  std::vector<Joint> joints;
};

enum class Severity { kError, kWarning };

// Stable diagnostic classes. Names are what the CLI prints.
enum class DiagnosticCode {
  kMultipleRoots,
  kNoRoot,
  kCycle,
  kMultipleParents,
  kDanglingReference,
  kNonPositiveMass,
  kMissingInertial,
  kMissingLimits,
  kInertiaNotPositive,
  kIgnoredDynamics,
};

std::string_view diagnostic_name(DiagnosticCode code);

struct Diagnostic {
  Severity severity;
  DiagnosticCode code;
  std::string message;
};

// Throws ParseError (with line number), UnsupportedFeatureError or
// ValidationError (duplicate names).
RobotDescription parse_urdf(std::string_view xml);
RobotDescription parse_urdf_file(const std::string& path);

std::vector<Diagnostic> validate(const RobotDescription& desc);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

struct BuildOptions {
  // Permit movable links without <inertial>; the model then refuses dynamics.
  bool kinematics_only = false;
};

// Throws ValidationError listing every error diagnostic.
RobotModel build_model(const RobotDescription& desc, BuildOptions options = {});

// parse_urdf_file + build_model.
RobotModel load_model(const std::string& path, BuildOptions options = {});

}  // namespace drm::urdf
