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

// Self-verification of a model: cross-algorithm oracles, finite differences
// against autodiff, and an energy-drift rollout over seeded random states.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "drm/dynamics.hpp"
#include "drm/model.hpp"

namespace drm {

// Flat inertial parameters: 10 per body (mass, com xyz, rot_inertia
// xx yy zz xy xz yz about the body origin).
inline constexpr int kParamsPerBody = 10;

Eigen::VectorXd inertial_parameters(const RobotModel& model);

template <typename S>
std::vector<Inertia<S>> inertias_from_parameters(const RobotModel& model, const VecX<S>& p) {
  require_size(p.size(), kParamsPerBody * model.body_count(), "inertial parameter vector");
  std::vector<Inertia<S>> out(static_cast<std::size_t>(model.body_count()));
  for (int i = 0; i < model.body_count(); ++i) {
    const int o = kParamsPerBody * i;
    Inertia<S>& in = out[static_cast<std::size_t>(i)];
    in.mass = p(o);
    in.com = Vec3<S>(p(o + 1), p(o + 2), p(o + 3));
    in.rot_inertia << p(o + 4), p(o + 7), p(o + 8),
                      p(o + 7), p(o + 5), p(o + 9),
                      p(o + 8), p(o + 9), p(o + 6);
  }
  return out;
}

struct CheckResult {
  std::string name;
  double value = 0.0;      // worst error, or worst margin for lower bounds
  double threshold = 0.0;
  bool lower_bound = false;  // passed iff value > threshold (else value < threshold)
  bool passed = false;
};

struct CheckReport {
  std::vector<CheckResult> checks;
  bool passed() const;
  std::vector<std::string> failures() const;
};

struct CheckOptions {
  std::uint64_t seed = 0;
  int samples = 50;
  Eigen::Vector3d gravity = kDefaultGravity;
};

// Tolerances: ABA/RNEA round trip 1e-8 (relative), CRBA columns 1e-10,
// ABA vs Cholesky 1e-9 (relative), mass matrix symmetry 1e-10, Jacobian vs
// finite differences 1e-6, autodiff vs finite differences 1e-5 (relative),
// RK4 relative energy drift 1e-8.
CheckReport run_self_check(const RobotModel& model, const CheckOptions& options = {});

}  // namespace drm
