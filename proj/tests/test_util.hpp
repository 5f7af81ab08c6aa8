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

// Shared helpers for the test binaries.

#ifndef DRM_TESTS_TEST_UTIL_HPP_
#define DRM_TESTS_TEST_UTIL_HPP_

#include <random>
#include <string>

#include <Eigen/Core>

#include "drm/model.hpp"
#include "drm/urdf.hpp"

namespace drm::testing {

inline std::string fixture(const std::string& name) { return std::string(DRM_FIXTURE_DIR) + "/" + name; }

inline RobotModel load_fixture(const std::string& name) { return urdf::load_model(fixture(name)); }

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }

  Eigen::VectorXd vec(int n, double bound) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(-bound, bound);
    return v;
  }

  // Joint positions inside the model limits, |q| <= pi.
  Eigen::VectorXd q(const RobotModel& model) {
    Eigen::VectorXd v(model.dof_count());
    for (int d = 0; d < model.dof_count(); ++d) {
      const JointLimits& lim = model.body(model.dof_bodies()[static_cast<std::size_t>(d)]).limits;
      v(d) = uniform(std::max(lim.lower, -3.14159), std::min(lim.upper, 3.14159));
    }
    return v;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace drm::testing

#endif  // DRM_TESTS_TEST_UTIL_HPP_
