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

// Rigid-body dynamics over a fixed-base kinematic tree: RNEA, CRBA, ABA.
//
// Every algorithm has two entry points: one reading the inertias stored in
// the model and one taking an explicit per-body inertia list (indexed like
// model.bodies()). The latter is how learnable parameters enter.
//
// Gravity is folded in as a fictitious base acceleration of -g.

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "drm/kinematics.hpp"
#include "drm/model.hpp"
#include "drm/spatial.hpp"

namespace drm {

inline const Eigen::Vector3d kDefaultGravity(0.0, 0.0, -9.81);

namespace detail {

template <typename S>
Motion<S> base_acceleration(const Eigen::Vector3d& gravity) {
  return {Vec3<S>::Zero(), Vec3<S>((-gravity).cast<S>())};
}

inline void check_inertias(const RobotModel& model, std::size_t count) {
  if (count != static_cast<std::size_t>(model.body_count())) {
    throw Error("inertia list has " + std::to_string(count) + " entries, model has " +
                std::to_string(model.body_count()) + " bodies");
  }
}

}  // namespace detail

template <typename S>
VecX<S> rnea(const RobotModel& model, const VecX<S>& q, const VecX<S>& qd, const VecX<S>& qdd,
             const Eigen::Vector3d& gravity, std::span<const Inertia<S>> inertias) {
  model.require_dynamics();
  const int n = model.dof_count();
  require_size(q.size(), n, "q");
  require_size(qd.size(), n, "qd");
  require_size(qdd.size(), n, "qdd");
  detail::check_inertias(model, inertias.size());

  const auto nb = static_cast<std::size_t>(model.body_count());
  std::vector<Transform<S>> xup(nb);
  std::vector<Motion<S>> v(nb), a(nb);
  std::vector<Force<S>> f(nb);
  a[0] = detail::base_acceleration<S>(gravity);

  for (std::size_t i = 1; i < nb; ++i) {
    const Body& b = model.body(static_cast<int>(i));
    const auto p = static_cast<std::size_t>(b.parent);
    xup[i] = joint_transform(b, q);
    v[i] = inverse_transform_motion(xup[i], v[p]);
    a[i] = inverse_transform_motion(xup[i], a[p]);
    if (b.dof >= 0) {
      const Motion<S> s = motion_subspace<S>(b);
      const Motion<S> vj = qd(b.dof) * s;
      v[i] += vj;
      a[i] += qdd(b.dof) * s + cross_motion(v[i], vj);
    }
    f[i] = inertias[i] * a[i] + cross_force(v[i], Force<S>(inertias[i] * v[i]));
  }

  VecX<S> tau(n);
  for (std::size_t i = nb - 1; i >= 1; --i) {
    const Body& b = model.body(static_cast<int>(i));
    if (b.dof >= 0) tau(b.dof) = project(motion_subspace<S>(b), f[i]);
    if (b.parent > 0) f[static_cast<std::size_t>(b.parent)] += transform_force(xup[i], f[i]);
  }
  return tau;
}

template <typename S>
VecX<S> rnea(const RobotModel& model, const VecX<S>& q, const VecX<S>& qd, const VecX<S>& qdd,
             const Eigen::Vector3d& gravity = kDefaultGravity) {
  const std::vector<Inertia<S>> inertias = model.inertias<S>();
  return rnea<S>(model, q, qd, qdd, gravity, inertias);
}

// Joint-space inertia matrix via the composite-rigid-body recursion.
template <typename S>
MatX<S> mass_matrix(const RobotModel& model, const VecX<S>& q, std::span<const Inertia<S>> inertias) {
  model.require_dynamics();
  const int n = model.dof_count();
  require_size(q.size(), n, "q");
  detail::check_inertias(model, inertias.size());

  const auto nb = static_cast<std::size_t>(model.body_count());
  std::vector<Transform<S>> xup(nb);
  std::vector<Inertia<S>> composite(inertias.begin(), inertias.end());
  for (std::size_t i = 1; i < nb; ++i) xup[i] = joint_transform(model.body(static_cast<int>(i)), q);
  for (std::size_t i = nb - 1; i >= 1; --i) {
    const int p = model.body(static_cast<int>(i)).parent;
    if (p > 0) {
      composite[static_cast<std::size_t>(p)] =
          composite[static_cast<std::size_t>(p)] + transform_inertia(xup[i], composite[i]);
    }
  }

  MatX<S> h(n, n);
  h.setConstant(S(0));
  for (std::size_t i = 1; i < nb; ++i) {
    const Body& bi = model.body(static_cast<int>(i));
    if (bi.dof < 0) continue;
    Force<S> fi = composite[i] * motion_subspace<S>(bi);
    h(bi.dof, bi.dof) = project(motion_subspace<S>(bi), fi);
    int j = static_cast<int>(i);
    while (model.body(j).parent > 0) {
      fi = transform_force(xup[static_cast<std::size_t>(j)], fi);
      j = model.body(j).parent;
      const Body& bj = model.body(j);
      if (bj.dof < 0) continue;
      h(bi.dof, bj.dof) = project(motion_subspace<S>(bj), fi);
      h(bj.dof, bi.dof) = h(bi.dof, bj.dof);
    }
  }
  return h;
}

template <typename S>
MatX<S> mass_matrix(const RobotModel& model, const VecX<S>& q) {
  const std::vector<Inertia<S>> inertias = model.inertias<S>();
  return mass_matrix<S>(model, q, inertias);
}

// Forward dynamics via the articulated-body recursion. Throws NumericalError
// naming the joint when an articulated projection is not positive.
template <typename S>
VecX<S> aba(const RobotModel& model, const VecX<S>& q, const VecX<S>& qd, const VecX<S>& tau,
            const Eigen::Vector3d& gravity, std::span<const Inertia<S>> inertias) {
  model.require_dynamics();
  const int n = model.dof_count();
  require_size(q.size(), n, "q");
  require_size(qd.size(), n, "qd");
  require_size(tau.size(), n, "tau");
  detail::check_inertias(model, inertias.size());

  const auto nb = static_cast<std::size_t>(model.body_count());
  std::vector<Transform<S>> xup(nb);
  std::vector<Motion<S>> v(nb), c(nb), a(nb), s(nb);
  std::vector<ArticulatedInertia<S>> ia(nb);
  std::vector<Force<S>> pa(nb), u(nb);
  std::vector<S> d(nb), uu(nb);

  for (std::size_t i = 1; i < nb; ++i) {
    const Body& b = model.body(static_cast<int>(i));
    const auto p = static_cast<std::size_t>(b.parent);
    xup[i] = joint_transform(b, q);
    s[i] = motion_subspace<S>(b);
    v[i] = inverse_transform_motion(xup[i], v[p]);
    if (b.dof >= 0) {
      const Motion<S> vj = qd(b.dof) * s[i];
      v[i] += vj;
      c[i] = cross_motion(v[i], vj);
    }
    ia[i] = articulated(inertias[i]);
    pa[i] = cross_force(v[i], Force<S>(inertias[i] * v[i]));
  }

  for (std::size_t i = nb - 1; i >= 1; --i) {
    const Body& b = model.body(static_cast<int>(i));
    ArticulatedInertia<S> ia_child = ia[i];
    Force<S> pa_child = pa[i];
    if (b.dof >= 0) {
      u[i] = ia[i] * s[i];
      d[i] = project(s[i], u[i]);
      if (!(d[i] > 1e-12)) {
        throw NumericalError("singular articulated inertia at joint '" + b.joint_name + "'");
      }
      uu[i] = tau(b.dof) - project(s[i], pa[i]);
      ia_child = subtract_outer(ia[i], u[i], d[i]);
      pa_child = pa[i] + ia_child * c[i] + (uu[i] / d[i]) * u[i];
    }
    if (b.parent > 0) {
      const auto p = static_cast<std::size_t>(b.parent);
      ia[p] = ia[p] + transform_articulated(xup[i], ia_child);
      pa[p] += transform_force(xup[i], pa_child);
    }
  }

  VecX<S> qdd(n);
  a[0] = detail::base_acceleration<S>(gravity);
  for (std::size_t i = 1; i < nb; ++i) {
    const Body& b = model.body(static_cast<int>(i));
    a[i] = inverse_transform_motion(xup[i], a[static_cast<std::size_t>(b.parent)]) + c[i];
    if (b.dof >= 0) {
      qdd(b.dof) = (uu[i] - project(a[i], u[i])) / d[i];
      a[i] += qdd(b.dof) * s[i];
    }
  }
  return qdd;
}

template <typename S>
VecX<S> aba(const RobotModel& model, const VecX<S>& q, const VecX<S>& qd, const VecX<S>& tau,
            const Eigen::Vector3d& gravity = kDefaultGravity) {
  const std::vector<Inertia<S>> inertias = model.inertias<S>();
  return aba<S>(model, q, qd, tau, gravity, inertias);
}

template <typename S>
VecX<S> gravity_term(const RobotModel& model, const VecX<S>& q, const Eigen::Vector3d& gravity = kDefaultGravity) {
  const VecX<S> zero = VecX<S>::Constant(q.size(), S(0));
  return rnea<S>(model, q, zero, zero, gravity);
}

// h(q, qd): Coriolis, centripetal and gravity forces.
template <typename S>
VecX<S> bias_force(const RobotModel& model, const VecX<S>& q, const VecX<S>& qd,
                   const Eigen::Vector3d& gravity, std::span<const Inertia<S>> inertias) {
  const VecX<S> zero = VecX<S>::Constant(q.size(), S(0));
  return rnea<S>(model, q, qd, zero, gravity, inertias);
}

template <typename S>
VecX<S> bias_force(const RobotModel& model, const VecX<S>& q, const VecX<S>& qd,
                   const Eigen::Vector3d& gravity = kDefaultGravity) {
  const std::vector<Inertia<S>> inertias = model.inertias<S>();
  return bias_force<S>(model, q, qd, gravity, inertias);
}

// qdd = M(q)^-1 (tau - h(q, qd)) through a Cholesky factorization.
template <typename S>
VecX<S> forward_dynamics_cholesky(const RobotModel& model, const VecX<S>& q, const VecX<S>& qd,
                                  const VecX<S>& tau, const Eigen::Vector3d& gravity,
                                  std::span<const Inertia<S>> inertias) {
  require_size(tau.size(), model.dof_count(), "tau");
  const MatX<S> m = mass_matrix<S>(model, q, inertias);
  const VecX<S> rhs = tau - bias_force<S>(model, q, qd, gravity, inertias);
  const Eigen::LLT<MatX<S>> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("mass matrix is not positive definite; check link inertias");
  }
  return llt.solve(rhs);
}

template <typename S>
VecX<S> forward_dynamics_cholesky(const RobotModel& model, const VecX<S>& q, const VecX<S>& qd,
                                  const VecX<S>& tau, const Eigen::Vector3d& gravity = kDefaultGravity) {
  const std::vector<Inertia<S>> inertias = model.inertias<S>();
  return forward_dynamics_cholesky<S>(model, q, qd, tau, gravity, inertias);
}

// ---------------------------------------------------------------------------
// Energy and a check integrator. simulate() is a verification tool (no
// contact, no constraints), not a production simulator.
// ---------------------------------------------------------------------------

double kinetic_energy(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd);

// -sum_i m_i g . c_i with c_i the world-frame center of mass.
double potential_energy(const RobotModel& model, const Eigen::VectorXd& q,
                        const Eigen::Vector3d& gravity = kDefaultGravity);

enum class Integrator { kRk4, kSemiImplicitEuler };

struct TrajectoryPoint {
  double t;
  Eigen::VectorXd q, qd, qdd;
};

using TorqueFunction =
    std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& q, const Eigen::VectorXd& qd)>;

// `steps` fixed steps of size dt; returns steps + 1 points starting at t = 0.
// A null torque function means zero torque. Throws NumericalError with the
// step index on a non-finite state.
std::vector<TrajectoryPoint> simulate(const RobotModel& model, const Eigen::VectorXd& q0,
                                      const Eigen::VectorXd& qd0, const TorqueFunction& torque, double dt,
                                      int steps, const Eigen::Vector3d& gravity = kDefaultGravity,
                                      Integrator integrator = Integrator::kRk4);

}  // namespace drm
