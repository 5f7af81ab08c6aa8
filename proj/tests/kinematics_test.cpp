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

// Tests for kinematics.hpp.

#include "drm/kinematics.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "drm/autodiff.hpp"
#include "test_util.hpp"

namespace drm {
namespace {

using testing::load_fixture;

// Closed-form planar chain with unit links.
Eigen::Vector3d planar_tip(const Eigen::VectorXd& q) {
  return {std::cos(q(0)) + std::cos(q(0) + q(1)), std::sin(q(0)) + std::sin(q(0) + q(1)), 0.0};
}

// Pendulum swinging about z with its bob 1 m along x.
RobotModel z_pendulum() {
  return urdf::build_model(urdf::parse_urdf(R"(
<robot name="zp">
  <link name="base"/>
  <link name="arm">
    <inertial><mass value="1"/><inertia ixx="0.1" ixy="0" ixz="0" iyy="0.1" iyz="0" izz="0.1"/></inertial>
  </link>
  <link name="bob"/>
  <joint name="hinge" type="continuous">
    <parent link="base"/><child link="arm"/><axis xyz="0 0 1"/>
  </joint>
  <joint name="rod" type="fixed">
    <parent link="arm"/><child link="bob"/><origin xyz="1 0 0"/>
  </joint>
</robot>)"));
}

TEST(ForwardKinematicsTest, PendulumAtZeroIsJointOrigin) {
  const RobotModel model = load_fixture("pendulum.urdf");
  const Pose<double> pose = link_pose<double>(model, Eigen::VectorXd::Zero(1), "bob");
  EXPECT_EQ(pose.translation, model.body(1).joint_origin.translation);
  EXPECT_EQ(pose.rotation, model.body(1).joint_origin.rotation);
}

TEST(ForwardKinematicsTest, PlanarChainExamples) {
  const RobotModel model = load_fixture("two_link_planar.urdf");
  EXPECT_LT((link_pose<double>(model, Eigen::Vector2d(0, 0), "tip").translation - Eigen::Vector3d(2, 0, 0)).norm(),
            1e-15);
  EXPECT_LT((link_pose<double>(model, Eigen::Vector2d(M_PI / 2, -M_PI / 2), "tip").translation -
             Eigen::Vector3d(1, 1, 0))
                .norm(),
            1e-15);
}

TEST(ForwardKinematicsTest, PlanarChainClosedForm) {
  const RobotModel model = load_fixture("two_link_planar.urdf");
  testing::Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd q = rng.vec(2, M_PI);
    EXPECT_LT((link_pose<double>(model, q, "tip").translation - planar_tip(q)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ForwardKinematicsTest, FrameComposition) {
  const RobotModel model = load_fixture("six_dof_arm.urdf");
  testing::Rng rng(2);
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd q = rng.q(model);
    const std::vector<Pose<double>> poses = forward_kinematics<double>(model, q);
    for (int i = 1; i < model.body_count(); ++i) {
      const Body& b = model.body(i);
      const Pose<double> expected =
          compose(poses[static_cast<std::size_t>(b.parent)], joint_transform<double>(b, q));
      const Pose<double>& pose = poses[static_cast<std::size_t>(i)];
      EXPECT_LT((pose.rotation - expected.rotation).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((pose.translation - expected.translation).cwiseAbs().maxCoeff(), 1e-12);
      if (b.joint_type == JointType::kFixed) {
        const Pose<double> rel = compose(inverse(poses[static_cast<std::size_t>(b.parent)]), pose);
        EXPECT_LT((rel.rotation - b.joint_origin.rotation).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((rel.translation - b.joint_origin.translation).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
  }
}

TEST(ForwardKinematicsTest, Errors) {
  const RobotModel model = load_fixture("two_link_planar.urdf");
  EXPECT_THROW(link_pose<double>(model, Eigen::Vector2d::Zero(), "nope"), UnknownLinkError);
  EXPECT_THROW(forward_kinematics<double>(model, Eigen::Vector3d::Zero()), Error);
}

TEST(JacobianTest, PendulumColumn) {
  const RobotModel model = z_pendulum();
  const auto jac = link_jacobian<double>(model, Eigen::VectorXd::Zero(1), "bob");
  Eigen::Matrix<double, 6, 1> expected;
  expected << 0, 0, 1, 0, 1, 0;
  EXPECT_LT((jac.col(0) - expected).norm(), 1e-15);
}

TEST(JacobianTest, OffPathColumnsAreZero) {
  const RobotModel model = load_fixture("six_dof_arm.urdf");
  testing::Rng rng(3);
  const Eigen::VectorXd q = rng.q(model);
  const auto jac = link_jacobian<double>(model, q, "upper_arm");
  EXPECT_GT(jac.leftCols(2).norm(), 0.0);
  EXPECT_EQ(jac.rightCols(4).norm(), 0.0);
  EXPECT_EQ(link_jacobian<double>(model, q, "base_link").norm(), 0.0);
}

TEST(JacobianTest, GeometricDefinition) {
  // Revolute: (z, z x (p - p_j)); prismatic: (0, z).
  const RobotModel model = load_fixture("six_dof_arm.urdf");
  testing::Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd q = rng.q(model);
    const std::vector<Pose<double>> poses = forward_kinematics<double>(model, q);
    const int link = model.body_index("tool_flange");
    const auto jac = link_jacobian<double>(model, q, "tool_flange");
    const Eigen::Vector3d p = poses[static_cast<std::size_t>(link)].translation;
    for (int d = 0; d < model.dof_count(); ++d) {
      const int b = model.dof_bodies()[static_cast<std::size_t>(d)];
      const Pose<double>& frame = poses[static_cast<std::size_t>(b)];
      const Eigen::Vector3d z = frame.rotation * model.body(b).axis;
      Eigen::Matrix<double, 6, 1> expected;
      if (model.body(b).joint_type == JointType::kPrismatic) {
        expected << Eigen::Vector3d::Zero(), z;
      } else {
        expected << z, z.cross(p - frame.translation);
      }
      EXPECT_LT((jac.col(d) - expected).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(JacobianTest, MatchesFiniteDifferences) {
  const RobotModel model = load_fixture("two_link_planar.urdf");
  testing::Rng rng(5);
  for (int k = 0; k < 50; ++k) {
    const Eigen::VectorXd q = rng.vec(2, M_PI);
    const auto jac = link_jacobian<double>(model, q, "tip");
    for (int j = 0; j < 2; ++j) {
      Eigen::VectorXd qp = q, qm = q;
      qp(j) += 1e-6;
      qm(j) -= 1e-6;
      const Pose<double> pp = link_pose<double>(model, qp, "tip");
      const Pose<double> pm = link_pose<double>(model, qm, "tip");
      const Eigen::Vector3d lin = (pp.translation - pm.translation) / 2e-6;
      const Eigen::Vector3d ang = rotation_log(pp.rotation * pm.rotation.transpose()) / 2e-6;
      EXPECT_LT((jac.col(j).tail<3>() - lin).cwiseAbs().maxCoeff(), 1e-6);
      EXPECT_LT((jac.col(j).head<3>() - ang).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(JacobianTest, AgreesWithAutodiffOfPosition) {
  const RobotModel model = load_fixture("six_dof_arm.urdf");
  testing::Rng rng(6);
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd q = rng.q(model);
    const Eigen::MatrixXd ad = ad::jacobian_fwd(
        [&](const auto& x) {
          using S = typename std::decay_t<decltype(x)>::Scalar;
          return Vec3<S>(link_pose<S>(model, VecX<S>(x), "tool_flange").translation);
        },
        q);
    const auto jac = link_jacobian<double>(model, q, "tool_flange");
    EXPECT_LT((ad - jac.bottomRows<3>()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(RotationTest, LogAndQuaternion) {
  testing::Rng rng(7);
  for (int k = 0; k < 100; ++k) {
    const Eigen::Vector3d axis = rng.vec(3, 1.0).normalized();
    const double angle = rng.uniform(0.0, M_PI - 1e-3);
    const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    EXPECT_LT((rotation_log(r) - angle * axis).norm(), 1e-10);
    const Eigen::Vector4d quat = quaternion_wxyz(r);
    EXPECT_GE(quat(0), 0.0);
    EXPECT_NEAR(quat.norm(), 1.0, 1e-12);
    const Eigen::Quaterniond qe(quat(0), quat(1), quat(2), quat(3));
    EXPECT_LT((qe.toRotationMatrix() - r).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_EQ(rotation_log(Eigen::Matrix3d::Identity()).norm(), 0.0);
}

TEST(InverseKinematicsTest, FixedPoint) {
  const RobotModel model = load_fixture("six_dof_arm.urdf");
  testing::Rng rng(8);
  const Eigen::VectorXd q0 = rng.q(model);
  const Pose<double> pose = link_pose<double>(model, q0, "tool_flange");
  const IkResult res = inverse_kinematics(model, {pose.translation, pose.rotation}, "tool_flange", q0);
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.iterations, 0);
  EXPECT_EQ(res.q, q0);
  EXPECT_LT(res.residual, 1e-12);
}

TEST(InverseKinematicsTest, PlanarReachableTarget) {
  const RobotModel model = load_fixture("two_link_planar.urdf");
  IkOptions opts;
  opts.position_only = true;
  const IkResult res = inverse_kinematics(model, {Eigen::Vector3d(1, 1, 0), {}}, "tip", Eigen::Vector2d(0.1, 0.1), opts);
  EXPECT_TRUE(res.converged);
  EXPECT_LT((planar_tip(res.q) - Eigen::Vector3d(1, 1, 0)).norm(), 1e-4);
}

TEST(InverseKinematicsTest, UnreachableTarget) {
  const RobotModel model = load_fixture("two_link_planar.urdf");
  IkOptions opts;
  opts.position_only = true;
  const IkResult res = inverse_kinematics(model, {Eigen::Vector3d(3, 0, 0), {}}, "tip", Eigen::Vector2d(0.3, -0.2), opts);
  EXPECT_FALSE(res.converged);
  EXPECT_NEAR(res.residual, 1.0, 1e-3);
}

TEST(InverseKinematicsTest, LossIsNonIncreasing) {
  const RobotModel model = load_fixture("six_dof_arm.urdf");
  testing::Rng rng(9);
  for (int k = 0; k < 5; ++k) {
    const Pose<double> goal = link_pose<double>(model, rng.q(model), "tool_flange");
    const IkResult res =
        inverse_kinematics(model, {goal.translation, goal.rotation}, "tool_flange", rng.q(model), {});
    ASSERT_GE(res.loss_history.size(), 1u);
    for (std::size_t i = 1; i < res.loss_history.size(); ++i) {
      EXPECT_LE(res.loss_history[i], res.loss_history[i - 1]);
    }
  }
}

TEST(InverseKinematicsTest, RespectsJointLimits) {
  const RobotModel model = load_fixture("six_dof_arm.urdf");
  testing::Rng rng(10);
  IkOptions opts;
  opts.position_only = true;
  opts.max_iters = 100;
  // Far target drives joints into their limits.
  const IkResult res = inverse_kinematics(model, {Eigen::Vector3d(0, 0, -3), {}}, "tool_flange", rng.q(model), opts);
  for (int d = 0; d < model.dof_count(); ++d) {
    const JointLimits& lim = model.body(model.dof_bodies()[static_cast<std::size_t>(d)]).limits;
    EXPECT_GE(res.q(d), lim.lower);
    EXPECT_LE(res.q(d), lim.upper);
  }
}

TEST(InverseKinematicsTest, FullPoseOnArm) {
  const RobotModel model = load_fixture("six_dof_arm.urdf");
  testing::Rng rng(11);
  int converged = 0;
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd truth = rng.q(model);
    const Pose<double> goal = link_pose<double>(model, truth, "tool_flange");
    const Eigen::VectorXd q0 = truth + rng.vec(model.dof_count(), 0.3);
    IkOptions opts;
    opts.max_iters = 2000;
    const IkResult res = inverse_kinematics(model, {goal.translation, goal.rotation}, "tool_flange", q0, opts);
    if (res.converged) {
      ++converged;
      EXPECT_LT(res.position_error, 1e-5);
      EXPECT_LT(res.orientation_error, 1e-4);
    }
  }
  EXPECT_GE(converged, 8);
}

TEST(InverseKinematicsTest, OrientationOppositeDoesNotStall) {
  // Target rotated by pi about z: the log map is singular at the start.
  const RobotModel model = z_pendulum();
  const Eigen::Matrix3d flip = Eigen::AngleAxisd(M_PI, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  const IkResult res =
      inverse_kinematics(model, {Eigen::Vector3d(-1, 0, 0), flip}, "bob", Eigen::VectorXd::Zero(1), {});
  EXPECT_TRUE(res.converged);
  EXPECT_NEAR(std::abs(std::remainder(res.q(0), 2 * M_PI)), M_PI, 1e-4);
}

TEST(InverseKinematicsTest, Errors) {
  const RobotModel model = load_fixture("two_link_planar.urdf");
  EXPECT_THROW(inverse_kinematics(model, {}, "nope", Eigen::Vector2d::Zero()), UnknownLinkError);
  EXPECT_THROW(inverse_kinematics(model, {}, "tip", Eigen::Vector3d::Zero()), Error);
}

}  // namespace
}  // namespace drm
