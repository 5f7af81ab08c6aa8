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

// Tests for urdf.hpp and the model built from it.

#include "drm/urdf.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "drm/errors.hpp"
#include "drm/spatial.hpp"
#include "test_util.hpp"

namespace drm::urdf {
namespace {

using ::testing::HasSubstr;

constexpr char kTwoLink[] = R"(<?xml version="1.0"?>
<robot name="mini">
  <link name="base"/>
  <link name="arm">
    <inertial>
      <mass value="1.0"/>
      <inertia ixx="0.1" ixy="0" ixz="0" iyy="0.1" iyz="0" izz="0.1"/>
    </inertial>
    <visual><geometry><box size="1 1 1"/></geometry></visual>
    <collision><geometry><box size="1 1 1"/></geometry></collision>
  </link>
  <joint name="j" type="revolute">
    <parent link="base"/>
    <child link="arm"/>
    <axis xyz="0 0 1"/>
    <limit lower="-1" upper="1" effort="1" velocity="1"/>
  </joint>
  <gazebo reference="arm"><material>Gazebo/Red</material></gazebo>
</robot>
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const std::size_t at = s.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  if (at != std::string::npos) s.replace(at, from.size(), to);
  return s;
}

std::vector<DiagnosticCode> error_codes(const std::vector<Diagnostic>& diagnostics) {
  std::vector<DiagnosticCode> out;
  for (const Diagnostic& d : diagnostics) {
    if (d.severity == Severity::kError) out.push_back(d.code);
  }
  return out;
}

bool has_warning(const std::vector<Diagnostic>& diagnostics, DiagnosticCode code) {
  for (const Diagnostic& d : diagnostics) {
    if (d.severity == Severity::kWarning && d.code == code) return true;
  }
  return false;
}

TEST(ParseTest, MinimalChain) {
  const RobotDescription desc = parse_urdf(kTwoLink);
  EXPECT_EQ(desc.name, "mini");
  ASSERT_EQ(desc.links.size(), 2u);
  ASSERT_EQ(desc.joints.size(), 1u);
  EXPECT_EQ(desc.joints[0].type, JointType::kRevolute);
  EXPECT_EQ(desc.joints[0].parent, "base");
  EXPECT_EQ(desc.joints[0].child, "arm");
  ASSERT_TRUE(desc.joints[0].limits.has_value());
  EXPECT_EQ(desc.joints[0].limits->lower, -1.0);
  EXPECT_TRUE(validate(desc).empty());
}

TEST(ParseTest, FloatingJointIsUnsupported) {
  const std::string xml = replace(kTwoLink, R"(type="revolute")", R"(type="floating")");
  try {
    parse_urdf(xml);
    FAIL() << "expected UnsupportedFeatureError";
  } catch (const UnsupportedFeatureError& e) {
    EXPECT_THAT(e.what(), HasSubstr("'j'"));
  }
  EXPECT_THROW(parse_urdf(replace(kTwoLink, R"(type="revolute")", R"(type="planar")")), UnsupportedFeatureError);
}

TEST(ParseTest, MimicIsUnsupported) {
  const std::string xml = replace(kTwoLink, "<axis xyz=\"0 0 1\"/>", R"(<axis xyz="0 0 1"/><mimic joint="k"/>)");
  EXPECT_THROW(parse_urdf(xml), UnsupportedFeatureError);
}

TEST(ParseTest, AxisDefaultsToX) {
  const RobotDescription desc = parse_urdf(replace(kTwoLink, "<axis xyz=\"0 0 1\"/>", ""));
  EXPECT_EQ(desc.joints[0].axis, Eigen::Vector3d::UnitX());
}

TEST(ParseTest, AxisIsNormalized) {
  const RobotDescription desc = parse_urdf(replace(kTwoLink, "<axis xyz=\"0 0 1\"/>", "<axis xyz=\"0 3 4\"/>"));
  EXPECT_LT((desc.joints[0].axis - Eigen::Vector3d(0, 0.6, 0.8)).norm(), 1e-15);
  EXPECT_THROW(parse_urdf(replace(kTwoLink, "<axis xyz=\"0 0 1\"/>", "<axis xyz=\"0 0 0\"/>")), ValidationError);
}

TEST(ParseTest, DuplicateNames) {
  EXPECT_THROW(parse_urdf(replace(kTwoLink, R"(<link name="arm">)", R"(<link name="base">)")), ValidationError);
  const std::string twice = replace(kTwoLink, "<gazebo", R"(<joint name="j" type="fixed"><parent link="base"/><child link="arm"/></joint><gazebo)");
  EXPECT_THROW(parse_urdf(twice), ValidationError);
}

TEST(ParseTest, MalformedXmlReportsLine) {
  const std::string xml = replace(kTwoLink, "<mass value=\"1.0\"/>", "<mass value=\"1.0\">");
  try {
    parse_urdf(xml);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_GT(e.line(), 1);
  }
}

TEST(ParseTest, BadNumberReportsParseError) {
  EXPECT_THROW(parse_urdf(replace(kTwoLink, "<mass value=\"1.0\"/>", "<mass value=\"heavy\"/>")), ParseError);
  EXPECT_THROW(parse_urdf(replace(kTwoLink, "<axis xyz=\"0 0 1\"/>", "<axis xyz=\"0 1\"/>")), ParseError);
}

TEST(ParseTest, ScientificNotation) {
  const RobotDescription desc = parse_urdf(replace(kTwoLink, "<mass value=\"1.0\"/>", "<mass value=\"2.5e-1\"/>"));
  EXPECT_EQ(desc.links[1].inertial->mass, 0.25);
}

TEST(ParseTest, ContinuousHasInfiniteLimits) {
  const RobotDescription desc = parse_urdf(replace(kTwoLink, R"(type="revolute")", R"(type="continuous")"));
  const RobotModel model = build_model(desc);
  EXPECT_EQ(model.body(1).limits.lower, -std::numeric_limits<double>::infinity());
  EXPECT_EQ(model.body(1).limits.upper, std::numeric_limits<double>::infinity());
}

TEST(ValidateTest, MultipleRoots) {
  const std::string xml = replace(kTwoLink, R"(<link name="base"/>)", R"(<link name="base"/><link name="lonely"/>)");
  EXPECT_THAT(error_codes(validate(parse_urdf(xml))), ::testing::ElementsAre(DiagnosticCode::kMultipleRoots));
}

TEST(ValidateTest, NegativeMass) {
  const std::string xml = replace(kTwoLink, "<mass value=\"1.0\"/>", "<mass value=\"-1\"/>");
  EXPECT_THAT(error_codes(validate(parse_urdf(xml))), ::testing::ElementsAre(DiagnosticCode::kNonPositiveMass));
  const std::string zero = replace(kTwoLink, "<mass value=\"1.0\"/>", "<mass value=\"0\"/>");
  EXPECT_THAT(error_codes(validate(parse_urdf(zero))), ::testing::ElementsAre(DiagnosticCode::kNonPositiveMass));
}

TEST(ValidateTest, DanglingReference) {
  const std::string xml = replace(kTwoLink, R"(<parent link="base"/>)", R"(<parent link="ghost"/>)");
  EXPECT_THAT(error_codes(validate(parse_urdf(xml))), ::testing::Contains(DiagnosticCode::kDanglingReference));
}

TEST(ValidateTest, Warnings) {
  const std::string no_limits = replace(kTwoLink, R"(<limit lower="-1" upper="1" effort="1" velocity="1"/>)", "");
  const auto d1 = validate(parse_urdf(no_limits));
  EXPECT_FALSE(has_errors(d1));
  EXPECT_TRUE(has_warning(d1, DiagnosticCode::kMissingLimits));

  const std::string bad_tensor = replace(kTwoLink, R"(ixx="0.1")", R"(ixx="-0.1")");
  EXPECT_TRUE(has_warning(validate(parse_urdf(bad_tensor)), DiagnosticCode::kInertiaNotPositive));

  const std::string damped = replace(kTwoLink, "<axis xyz=\"0 0 1\"/>", R"(<axis xyz="0 0 1"/><dynamics damping="0.5"/>)");
  EXPECT_TRUE(has_warning(validate(parse_urdf(damped)), DiagnosticCode::kIgnoredDynamics));

  std::string bare = kTwoLink;
  bare = replace(bare, "<inertial>", "<!--");
  bare = replace(bare, "</inertial>", "-->");
  const auto d2 = validate(parse_urdf(bare));
  EXPECT_FALSE(has_errors(d2));
  EXPECT_TRUE(has_warning(d2, DiagnosticCode::kMissingInertial));
  EXPECT_THROW(build_model(parse_urdf(bare)), ValidationError);
  const RobotModel kin = build_model(parse_urdf(bare), {.kinematics_only = true});
  EXPECT_EQ(kin.dof_count(), 1);
  EXPECT_THROW(kin.require_dynamics(), DynamicsUnavailableError);
}

TEST(BuildTest, Counts) {
  const RobotModel model = build_model(parse_urdf(kTwoLink));
  EXPECT_EQ(model.dof_count(), 1);
  EXPECT_EQ(model.body_count(), 2);

  const std::string with_fixed = replace(
      kTwoLink, "<gazebo",
      R"(<link name="tool"/><joint name="t" type="fixed"><parent link="arm"/><child link="tool"/><origin xyz="0 0 1"/></joint><gazebo)");
  const RobotModel fixed = build_model(parse_urdf(with_fixed));
  EXPECT_EQ(fixed.dof_count(), 1);
  EXPECT_EQ(fixed.body_count(), 3);
  EXPECT_EQ(fixed.body(fixed.body_index("tool")).dof, -1);
  EXPECT_THROW(fixed.body_index("nope"), UnknownLinkError);
}

TEST(BuildTest, PointMassParallelAxis) {
  const Eigen::Vector3d c(0.3, -0.4, 1.2);
  const std::string xml = replace(replace(kTwoLink, R"(ixx="0.1" ixy="0" ixz="0" iyy="0.1" iyz="0" izz="0.1")",
                                          R"(ixx="0" ixy="0" ixz="0" iyy="0" iyz="0" izz="0")"),
                                  "<mass value=\"1.0\"/>", "<origin xyz=\"0.3 -0.4 1.2\" rpy=\"0.5 0.1 -0.3\"/><mass value=\"2.0\"/>");
  const RobotModel model = build_model(parse_urdf(xml));
  const Inertia<double>& in = model.body(1).inertia;
  const Eigen::Matrix3d expected = 2.0 * (c.dot(c) * Eigen::Matrix3d::Identity() - c * c.transpose());
  EXPECT_LT((in.rot_inertia - expected).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((in.com - c).norm(), 1e-15);
  EXPECT_EQ(in.mass, 2.0);
}

TEST(BuildTest, ParallelAxisKineticEnergy) {
  // Energy of a spinning, translating link: origin-referenced inertia vs.
  // CoM inertia plus the point-mass term, evaluated at the CoM velocity.
  drm::testing::Rng rng(5);
  for (int k = 0; k < 50; ++k) {
    const double m = rng.uniform(0.1, 3.0);
    const Eigen::Vector3d xyz = rng.vec(3, 1.0);
    const Eigen::Vector3d rpy = rng.vec(3, 3.0);
    const Eigen::Vector3d d = rng.vec(3, 1.0).cwiseAbs() + Eigen::Vector3d::Constant(0.05);
    std::ostringstream xml;
    xml.precision(17);
    xml << R"(<robot name="r"><link name="base"/><link name="arm"><inertial>)"
        << "<origin xyz=\"" << xyz.transpose() << "\" rpy=\"" << rpy.transpose() << "\"/>"
        << "<mass value=\"" << m << "\"/>"
        << "<inertia ixx=\"" << d(0) << "\" ixy=\"0\" ixz=\"0\" iyy=\"" << d(1) << "\" iyz=\"0\" izz=\"" << d(2) << "\"/>"
        << R"(</inertial></link><joint name="j" type="continuous"><parent link="base"/><child link="arm"/></joint></robot>)";
    const RobotModel model = build_model(parse_urdf(xml.str()));
    const Inertia<double>& in = model.body(1).inertia;

    const Eigen::Vector3d w = rng.vec(3, 2.0);
    const Eigen::Vector3d v = rng.vec(3, 2.0);  // velocity of the link origin
    const Eigen::Matrix3d r = rotation_from_rpy<double>(rpy);
    const Eigen::Matrix3d ic = r * d.asDiagonal() * r.transpose();
    const Eigen::Vector3d vc = v + w.cross(xyz);
    const double expected = 0.5 * w.dot(ic * w) + 0.5 * m * vc.squaredNorm();
    const Motion<double> twist{w, v};
    EXPECT_NEAR(0.5 * dot(twist, in * twist), expected, 1e-10);
  }
}

// Every fixture parses, validates and builds, or fails exactly as MANIFEST says.
TEST(FixtureCorpusTest, MatchesManifest) {
  std::ifstream manifest(drm::testing::fixture("MANIFEST"));
  ASSERT_TRUE(manifest.good());
  std::string line;
  int count = 0;
  while (std::getline(manifest, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string file, outcome, code;
    fields >> file >> outcome >> code;
    SCOPED_TRACE(file);
    ++count;
    const std::string path = drm::testing::fixture(file);
    if (outcome == "unsupported_feature") {
      EXPECT_THROW(parse_urdf_file(path), UnsupportedFeatureError);
      continue;
    }
    const RobotDescription desc = parse_urdf_file(path);
    const std::vector<Diagnostic> diagnostics = validate(desc);
    if (outcome == "validation_error") {
      const std::vector<DiagnosticCode> codes = error_codes(diagnostics);
      ASSERT_EQ(codes.size(), 1u);
      EXPECT_EQ(diagnostic_name(codes[0]), code);
      EXPECT_THROW(build_model(desc), ValidationError);
    } else {
      // "valid" and "check_failure" both build; the latter is rejected by
      // the self-check.
      EXPECT_FALSE(has_errors(diagnostics));
      EXPECT_NO_THROW(build_model(desc));
    }
  }
  EXPECT_EQ(count, 9);
}

TEST(ModelTest, StructuralProperties) {
  for (const char* name : {"pendulum.urdf", "two_link_planar.urdf", "six_dof_arm.urdf"}) {
    SCOPED_TRACE(name);
    const RobotDescription desc = parse_urdf_file(drm::testing::fixture(name));
    const RobotModel model = build_model(desc);
    int movable = 0;
    for (const Joint& j : desc.joints) movable += is_movable(j.type) ? 1 : 0;
    EXPECT_EQ(model.dof_count(), movable);
    EXPECT_EQ(model.body_count(), static_cast<int>(desc.links.size()));
    EXPECT_EQ(model.body(0).parent, -1);
    for (int i = 1; i < model.body_count(); ++i) EXPECT_LT(model.body(i).parent, i);
    for (int d = 0; d < model.dof_count(); ++d) {
      EXPECT_EQ(model.body(model.dof_bodies()[static_cast<std::size_t>(d)]).dof, d);
    }
  }
  const RobotModel arm = drm::testing::load_fixture("six_dof_arm.urdf");
  EXPECT_EQ(arm.dof_count(), 6);
  EXPECT_EQ(arm.body(arm.body_index("slider")).joint_type, JointType::kPrismatic);
}

}  // namespace
}  // namespace drm::urdf
