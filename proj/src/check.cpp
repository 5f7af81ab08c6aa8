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

#include "drm/check.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "drm/autodiff.hpp"
#include "drm/kinematics.hpp"

namespace drm {

namespace {

constexpr double kFdStep = 1e-6;

struct StateSampler {
  const RobotModel& model;
  std::mt19937_64 rng;

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

  Eigen::VectorXd q() {
    Eigen::VectorXd out(model.dof_count());
    for (int d = 0; d < model.dof_count(); ++d) {
      const JointLimits& lim = model.body(model.dof_bodies()[static_cast<std::size_t>(d)]).limits;
      out(d) = uniform(std::max(lim.lower, -M_PI), std::min(lim.upper, M_PI));
    }
    return out;
  }
  Eigen::VectorXd vec(double bound) {
    Eigen::VectorXd out(model.dof_count());
    for (int d = 0; d < model.dof_count(); ++d) out(d) = uniform(-bound, bound);
    return out;
  }
};

double rel(double ad, double fd) { return std::abs(ad - fd) / std::max(1.0, std::abs(ad)); }

// Max relative error between the forward-mode Jacobian of f and central
// differences.
template <typename F>
double ad_vs_fd(F&& f, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd jac = ad::jacobian_fwd(f, x);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp(j) += kFdStep;
    xm(j) -= kFdStep;
    const Eigen::VectorXd fd = (f(xp) - f(xm)) / (2.0 * kFdStep);
    for (Eigen::Index i = 0; i < fd.size(); ++i) worst = std::max(worst, rel(jac(i, j), fd(i)));
  }
  return worst;
}

}  // namespace

Eigen::VectorXd inertial_parameters(const RobotModel& model) {
  Eigen::VectorXd p(kParamsPerBody * model.body_count());
  for (int i = 0; i < model.body_count(); ++i) {
    const Inertia<double>& in = model.body(i).inertia;
    const Eigen::Matrix3d& r = in.rot_inertia;
    p.segment<kParamsPerBody>(kParamsPerBody * i) << in.mass, in.com, r(0, 0), r(1, 1), r(2, 2), r(0, 1), r(0, 2),
        r(1, 2);
  }
  return p;
}

bool CheckReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<std::string> CheckReport::failures() const {
  std::vector<std::string> out;
  for (const CheckResult& c : checks) {
    if (!c.passed) out.push_back(c.name);
  }
  return out;
}

CheckReport run_self_check(const RobotModel& model, const CheckOptions& options) {
  model.require_dynamics();
  const int n = model.dof_count();
  const int np = kParamsPerBody * model.body_count();
  const Eigen::Vector3d& g = options.gravity;
  StateSampler sampler{model, std::mt19937_64(options.seed)};

  double roundtrip = 0.0, crba = 0.0, cholesky = 0.0, symmetry = 0.0, jac_fd = 0.0, fk_ad = 0.0, dyn_ad = 0.0;
  double min_eig = std::numeric_limits<double>::infinity();
  bool factorization_failed = false;

  const Eigen::VectorXd params = inertial_parameters(model);
  auto dynamics_outputs = [&](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    const VecX<S> q = x.segment(0, n), qd = x.segment(n, n), qdd = x.segment(2 * n, n), tau = x.segment(3 * n, n);
    const std::vector<Inertia<S>> in = inertias_from_parameters<S>(model, VecX<S>(x.tail(np)));
    const MatX<S> m = mass_matrix<S>(model, q, in);
    VecX<S> out(2 * n + n * n);
    out << rnea<S>(model, q, qd, qdd, g, in), aba<S>(model, q, qd, tau, g, in),
        Eigen::Map<const VecX<S>>(m.data(), n * n);
    return out;
  };

  for (int k = 0; k < options.samples; ++k) {
    const Eigen::VectorXd q = sampler.q();
    const Eigen::VectorXd qd = sampler.vec(1.0);
    const Eigen::VectorXd tau = sampler.vec(5.0);
    const Eigen::VectorXd qdd = sampler.vec(2.0);

    const Eigen::VectorXd acc = aba<double>(model, q, qd, tau, g);
    const Eigen::VectorXd back = rnea<double>(model, q, qd, acc, g);
    roundtrip = std::max(roundtrip, (back - tau).lpNorm<Eigen::Infinity>() / std::max(1.0, tau.lpNorm<Eigen::Infinity>()));

    const Eigen::MatrixXd m = mass_matrix<double>(model, q);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
      const Eigen::VectorXd col = rnea<double>(model, q, zero, Eigen::VectorXd::Unit(n, j), Eigen::Vector3d::Zero());
      crba = std::max(crba, (m.col(j) - col).lpNorm<Eigen::Infinity>());
    }
    symmetry = std::max(symmetry, (m - m.transpose()).lpNorm<Eigen::Infinity>());
    if (n > 0) {
      min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff());
    }

    try {
      const Eigen::VectorXd chol = forward_dynamics_cholesky<double>(model, q, qd, tau, g);
      cholesky = std::max(cholesky, (chol - acc).lpNorm<Eigen::Infinity>() / std::max(1.0, acc.lpNorm<Eigen::Infinity>()));
    } catch (const NumericalError&) {
      factorization_failed = true;
    }

    // Geometric Jacobian of every link against differences of FK.
    for (int b = 1; b < model.body_count(); ++b) {
      const auto jac = link_jacobian<double>(model, q, model.body(b).name);
      for (int j = 0; j < n; ++j) {
        Eigen::VectorXd qp = q, qm = q;
        qp(j) += kFdStep;
        qm(j) -= kFdStep;
        const Pose<double> pp = forward_kinematics<double>(model, qp)[static_cast<std::size_t>(b)];
        const Pose<double> pm = forward_kinematics<double>(model, qm)[static_cast<std::size_t>(b)];
        const Eigen::Vector3d lin = (pp.translation - pm.translation) / (2.0 * kFdStep);
        const Eigen::Vector3d ang = rotation_log(pp.rotation * pm.rotation.transpose()) / (2.0 * kFdStep);
        jac_fd = std::max(jac_fd, (jac.col(j).tail<3>() - lin).lpNorm<Eigen::Infinity>());
        jac_fd = std::max(jac_fd, (jac.col(j).head<3>() - ang).lpNorm<Eigen::Infinity>());
      }
    }

    if (n > 0) {
      fk_ad = std::max(fk_ad, ad_vs_fd(
                                  [&](const auto& x) {
                                    using S = typename std::decay_t<decltype(x)>::Scalar;
                                    const std::vector<Pose<S>> p = forward_kinematics<S>(model, VecX<S>(x));
                                    VecX<S> out(12 * (model.body_count() - 1));
                                    for (int b = 1; b < model.body_count(); ++b) {
                                      out.template segment<3>(12 * (b - 1)) = p[static_cast<std::size_t>(b)].translation;
                                      out.template segment<9>(12 * (b - 1) + 3) =
                                          Eigen::Map<const VecX<S>>(p[static_cast<std::size_t>(b)].rotation.data(), 9);
                                    }
                                    return out;
                                  },
                                  q));
      Eigen::VectorXd x(4 * n + np);
      x << q, qd, qdd, tau, params;
      dyn_ad = std::max(dyn_ad, ad_vs_fd(dynamics_outputs, x));
    }
  }

  double inertia_margin = std::numeric_limits<double>::infinity();
  for (int b = 1; b < model.body_count(); ++b) {
    const Inertia<double>& in = model.body(b).inertia;
    const Eigen::Matrix3d ic = inertia_at_com(in);
    const double e = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(0.5 * (ic + ic.transpose())).eigenvalues().minCoeff();
    // Fixed-joint dummies may be massless; movable bodies may not.
    const double mass_margin = is_movable(model.body(b).joint_type) ? in.mass : in.mass + 1e-12;
    inertia_margin = std::min({inertia_margin, e + 1e-12, mass_margin});
  }

  // Energy drift: zero gravity, zero torque, RK4 at dt = 1e-3 over 1000 steps.
  double drift = 0.0;
  if (n > 0) {
    const Eigen::VectorXd q0 = sampler.q();
    const Eigen::VectorXd qd0 = sampler.vec(1.0);
    const auto traj = simulate(model, q0, qd0, nullptr, 1e-3, 1000, Eigen::Vector3d::Zero(), Integrator::kRk4);
    const double e0 = kinetic_energy(model, q0, qd0);
    for (const TrajectoryPoint& p : traj) {
      drift = std::max(drift, std::abs(kinetic_energy(model, p.q, p.qd) - e0) / std::max(e0, 1e-300));
    }
  }

  CheckReport report;
  auto upper = [&](std::string name, double value, double threshold) {
    report.checks.push_back({std::move(name), value, threshold, false, value < threshold});
  };
  auto lower = [&](std::string name, double value, double threshold) {
    report.checks.push_back({std::move(name), value, threshold, true, value > threshold});
  };
  upper("aba_rnea_roundtrip", roundtrip, 1e-8);
  upper("crba_rnea_columns", crba, 1e-10);
  upper("aba_vs_cholesky", factorization_failed ? std::numeric_limits<double>::infinity() : cholesky, 1e-9);
  upper("mass_matrix_symmetry", symmetry, 1e-10);
  lower("mass_matrix_min_eigenvalue", n > 0 ? min_eig : 1.0, 0.0);
  lower("inertia_physical_margin", model.body_count() > 1 ? inertia_margin : 1.0, 0.0);
  upper("jacobian_vs_fd", jac_fd, 1e-6);
  upper("fk_autodiff_vs_fd", fk_ad, 1e-5);
  upper("dynamics_autodiff_vs_fd", dyn_ad, 1e-5);
  upper("rk4_energy_drift", drift, 1e-8);
  return report;
}

}  // namespace drm
