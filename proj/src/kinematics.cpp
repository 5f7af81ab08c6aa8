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

#include "drm/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "drm/autodiff.hpp"

namespace drm {

namespace {

template <typename S>
Vec3<S> vee_antisymmetric(const Mat3<S>& m) {
  return Vec3<S>(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)) * S(0.5);
}

// Squared rotation angle of m, smooth at the identity.
template <typename S>
S squared_angle(const Mat3<S>& m) {
  using std::atan2;
  using std::sqrt;
  const Vec3<S> w = vee_antisymmetric(m);  // sin(theta) * axis
  const S s2 = w.squaredNorm();
  const S c = (m.trace() - S(1)) * S(0.5);  // cos(theta)
  if (s2 < 1e-16) {
    if (c > 0.0) return s2;
    return S(std::numbers::pi * std::numbers::pi);
  }
  const S theta = atan2(sqrt(s2), c);
  return theta * theta;
}

struct IkProblem {
  const RobotModel& model;
  int link;
  const IkTarget& target;
  bool position_only;

  template <typename S>
  S loss(const VecX<S>& q) const {
    const Pose<S> pose = forward_kinematics(model, q)[static_cast<std::size_t>(link)];
    const Vec3<S> dp = pose.translation - target.position.cast<S>();
    S l = dp.squaredNorm();
    if (!position_only) {
      const Mat3<S> err = pose.rotation.transpose() * target.rotation.cast<S>();
      l += squared_angle(err);
    }
    return l;
  }

  void errors(const Eigen::VectorXd& q, double& position, double& orientation) const {
    const Pose<double> pose = forward_kinematics(model, q)[static_cast<std::size_t>(link)];
    position = (pose.translation - target.position).norm();
    orientation = rotation_log(pose.rotation.transpose() * target.rotation).norm();
  }
};

Eigen::VectorXd clamp_to_limits(const RobotModel& model, Eigen::VectorXd q) {
  for (int d = 0; d < model.dof_count(); ++d) {
    const JointLimits& lim = model.body(model.dof_bodies()[static_cast<std::size_t>(d)]).limits;
    q(d) = std::clamp(q(d), lim.lower, lim.upper);
  }
  return q;
}

}  // namespace

Eigen::Vector3d rotation_log(const Eigen::Matrix3d& r) {
  const Eigen::AngleAxisd aa(r);
  return aa.axis() * aa.angle();
}

Eigen::Vector4d quaternion_wxyz(const Eigen::Matrix3d& r) {
  Eigen::Quaterniond quat(r);
  quat.normalize();
  if (quat.w() < 0.0) quat.coeffs() *= -1.0;
  return {quat.w(), quat.x(), quat.y(), quat.z()};
}

IkResult inverse_kinematics(const RobotModel& model, const IkTarget& target, const std::string& link,
                            const Eigen::VectorXd& q0, const IkOptions& options) {
  require_size(q0.size(), model.dof_count(), "q0");
  const IkProblem problem{model, model.body_index(link), target, options.position_only};
  std::mt19937_64 rng(options.seed);
  bool perturbed = false;

  auto converged = [&](double pos, double ori) {
    return pos < options.position_tolerance && (options.position_only || ori < options.orientation_tolerance);
  };

  IkResult result;
  Eigen::VectorXd q = clamp_to_limits(model, q0);
  double loss = problem.loss(q);
  result.loss_history.push_back(loss);
  problem.errors(q, result.position_error, result.orientation_error);

  // Trial step is the Barzilai-Borwein estimate (falling back to twice the last accepted step), then halves
  // until the loss decreases. The direction is always the negative gradient.
  double trial = options.step_size;
  Eigen::VectorXd prev_q, prev_grad;
  int iter = 0;
  for (; iter < options.max_iters; ++iter) {
    if (converged(result.position_error, result.orientation_error)) break;
    if (!options.position_only && !perturbed && result.orientation_error > std::numbers::pi - 1e-3) {
      std::uniform_real_distribution<double> jitter(-1e-3, 1e-3);
      for (Eigen::Index i = 0; i < q.size(); ++i) q(i) += jitter(rng);
      q = clamp_to_limits(model, q);
      loss = problem.loss(q);
      perturbed = true;
    }
    const Eigen::VectorXd grad = ad::jacobian_fwd(
        [&](const VecX<ad::Dual<>>& x) {
          VecX<ad::Dual<>> out(1);
          out(0) = problem.loss(x);
          return out;
        },
        q).row(0).transpose();
    if (prev_grad.size() > 0) {
      const Eigen::VectorXd s = q - prev_q;
      const Eigen::VectorXd y = grad - prev_grad;
      const double sy = s.dot(y);
      if (sy > 0.0 && std::isfinite(sy)) trial = s.squaredNorm() / sy;
    }
    prev_q = q;
    prev_grad = grad;

    double step = trial;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, step *= 0.5) {
      const Eigen::VectorXd candidate = clamp_to_limits(model, q - step * grad);
      const double candidate_loss = problem.loss(candidate);
      if (candidate_loss < loss) {
        q = candidate;
        loss = candidate_loss;
        accepted = true;
        trial = 2.0 * step;
        break;
      }
    }
    if (!accepted) break;
    result.loss_history.push_back(loss);
    problem.errors(q, result.position_error, result.orientation_error);
  }

  result.q = q;
  result.iterations = iter;
  result.converged = converged(result.position_error, result.orientation_error);
  result.residual = options.position_only ? result.position_error
                                          : std::max(result.position_error, result.orientation_error);
  return result;
}

}  // namespace drm
