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

#include "drm/dynamics.hpp"

namespace drm {

double kinetic_energy(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
  require_size(qd.size(), model.dof_count(), "qd");
  return 0.5 * qd.dot(mass_matrix<double>(model, q) * qd);
}

double potential_energy(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::Vector3d& gravity) {
  model.require_dynamics();
  const std::vector<Pose<double>> poses = forward_kinematics<double>(model, q);
  double u = 0.0;
  for (int i = 1; i < model.body_count(); ++i) {
    const Body& b = model.body(i);
    const Pose<double>& pose = poses[static_cast<std::size_t>(i)];
    const Eigen::Vector3d com = pose.rotation * b.inertia.com + pose.translation;
    u -= b.inertia.mass * gravity.dot(com);
  }
  return u;
}

std::vector<TrajectoryPoint> simulate(const RobotModel& model, const Eigen::VectorXd& q0,
                                      const Eigen::VectorXd& qd0, const TorqueFunction& torque, double dt,
                                      int steps, const Eigen::Vector3d& gravity, Integrator integrator) {
  if (!(dt > 0.0)) throw Error("simulate: dt must be positive");
  if (steps < 1) throw Error("simulate: steps must be at least 1");
  const int n = model.dof_count();
  require_size(q0.size(), n, "q0");
  require_size(qd0.size(), n, "qd0");

  auto accel = [&](double t, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) -> Eigen::VectorXd {
    const Eigen::VectorXd tau = torque ? torque(t, q, qd) : Eigen::VectorXd::Zero(n);
    return aba<double>(model, q, qd, tau, gravity);
  };

  std::vector<TrajectoryPoint> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  Eigen::VectorXd q = q0;
  Eigen::VectorXd qd = qd0;
  double t = 0.0;
  out.push_back({t, q, qd, accel(t, q, qd)});

  for (int k = 1; k <= steps; ++k) {
    if (integrator == Integrator::kRk4) {
      const Eigen::VectorXd k1q = qd;
      const Eigen::VectorXd k1v = out.back().qdd;
      const Eigen::VectorXd k2q = qd + 0.5 * dt * k1v;
      const Eigen::VectorXd k2v = accel(t + 0.5 * dt, q + 0.5 * dt * k1q, k2q);
      const Eigen::VectorXd k3q = qd + 0.5 * dt * k2v;
      const Eigen::VectorXd k3v = accel(t + 0.5 * dt, q + 0.5 * dt * k2q, k3q);
      const Eigen::VectorXd k4q = qd + dt * k3v;
      const Eigen::VectorXd k4v = accel(t + dt, q + dt * k3q, k4q);
      q += (dt / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
      qd += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    } else {
      qd += dt * out.back().qdd;
      q += dt * qd;
    }
    t = k * dt;
    if (!q.allFinite() || !qd.allFinite()) {
      throw NumericalError("non-finite state at step " + std::to_string(k));
    }
    Eigen::VectorXd qdd = accel(t, q, qd);
    if (!qdd.allFinite()) throw NumericalError("non-finite acceleration at step " + std::to_string(k));
    out.push_back({t, q, qd, std::move(qdd)});
  }
  return out;
}

}  // namespace drm
