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

#include "drm/urdf.hpp"

#include <charconv>
#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace drm {

std::string_view joint_type_name(JointType type) {
  switch (type) {
    case JointType::kFixed: return "fixed";
    case JointType::kRevolute: return "revolute";
    case JointType::kContinuous: return "continuous";
    case JointType::kPrismatic: return "prismatic";
  }
  return "unknown";
}

RobotModel::RobotModel(std::string name, std::vector<Body> bodies, bool kinematics_only)
    : name_(std::move(name)), bodies_(std::move(bodies)), kinematics_only_(kinematics_only) {
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    Body& b = bodies_[i];
    if (b.parent >= static_cast<int>(i)) {
      throw ValidationError("body '" + b.name + "' stored before its parent");
    }
    if (i > 0 && b.parent < 0) throw ValidationError("body '" + b.name + "' has no parent");
    if (is_movable(b.joint_type)) {
      b.dof = dof_count_++;
      dof_bodies_.push_back(static_cast<int>(i));
    } else {
      b.dof = -1;
    }
  }
}

int RobotModel::body_index(std::string_view link) const {
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    if (bodies_[i].name == link) return static_cast<int>(i);
  }
  throw UnknownLinkError(std::string(link));
}

bool RobotModel::has_link(std::string_view link) const {
  for (const Body& b : bodies_) {
    if (b.name == link) return true;
  }
  return false;
}

}  // namespace drm

namespace drm::urdf {

namespace pt = boost::property_tree;

namespace {

double parse_real(std::string_view text, std::string_view what) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("invalid number '" + std::string(text) + "' in " + std::string(what), 0);
  }
  return value;
}

std::vector<double> parse_reals(const std::string& text, std::string_view what) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string token;
  while (in >> token) out.push_back(parse_real(token, what));
  return out;
}

Eigen::Vector3d parse_triple(const std::string& text, std::string_view what) {
  const std::vector<double> v = parse_reals(text, what);
  if (v.size() != 3) {
    throw ParseError("expected 3 numbers in " + std::string(what) + ", got '" + text + "'", 0);
  }
  return {v[0], v[1], v[2]};
}

std::optional<std::string> attr(const pt::ptree& node, const std::string& name) {
  if (auto a = node.get_child_optional("<xmlattr>." + name)) return a->data();
  return std::nullopt;
}

std::string required_attr(const pt::ptree& node, const std::string& name, std::string_view where) {
  if (auto a = attr(node, name)) return *a;
  throw ParseError("missing attribute '" + name + "' on " + std::string(where), 0);
}

Origin parse_origin(const pt::ptree& parent, std::string_view where) {
  Origin o;
  if (auto node = parent.get_child_optional("origin")) {
    if (auto xyz = attr(*node, "xyz")) o.xyz = parse_triple(*xyz, std::string(where) + " origin xyz");
    if (auto rpy = attr(*node, "rpy")) o.rpy = parse_triple(*rpy, std::string(where) + " origin rpy");
  }
  return o;
}

Link parse_link(const pt::ptree& node) {
  Link link;
  link.name = required_attr(node, "name", "link");
  if (link.name.empty()) throw ParseError("link with empty name", 0);
  if (auto in = node.get_child_optional("inertial")) {
    const std::string where = "link '" + link.name + "' inertial";
    Inertial inertial;
    inertial.origin = parse_origin(*in, where);
    if (auto mass = in->get_child_optional("mass")) {
      inertial.mass = parse_real(required_attr(*mass, "value", where + " mass"), where + " mass");
    } else {
      throw ParseError(where + ": missing <mass>", 0);
    }
    if (auto t = in->get_child_optional("inertia")) {
      auto get = [&](const char* key) {
        auto a = attr(*t, key);
        return a ? parse_real(*a, where + " inertia " + key) : 0.0;
      };
      inertial.ixx = get("ixx");
      inertial.ixy = get("ixy");
      inertial.ixz = get("ixz");
      inertial.iyy = get("iyy");
      inertial.iyz = get("iyz");
      inertial.izz = get("izz");
    }
    link.inertial = inertial;
  }
  return link;
}

Joint parse_joint(const pt::ptree& node) {
  Joint joint;
  joint.name = required_attr(node, "name", "joint");
  if (joint.name.empty()) throw ParseError("joint with empty name", 0);
  const std::string where = "joint '" + joint.name + "'";
  const std::string type = required_attr(node, "type", where);
  if (type == "revolute") {
    joint.type = JointType::kRevolute;
  } else if (type == "continuous") {
    joint.type = JointType::kContinuous;
  } else if (type == "prismatic") {
    joint.type = JointType::kPrismatic;
  } else if (type == "fixed") {
    joint.type = JointType::kFixed;
  } else {
    throw UnsupportedFeatureError("unsupported joint type '" + type + "' on " + where);
  }
  if (node.get_child_optional("mimic")) {
    throw UnsupportedFeatureError("unsupported <mimic> element on " + where);
  }
  if (auto p = node.get_child_optional("parent")) joint.parent = required_attr(*p, "link", where + " parent");
  else throw ParseError(where + ": missing <parent>", 0);
  if (auto c = node.get_child_optional("child")) joint.child = required_attr(*c, "link", where + " child");
  else throw ParseError(where + ": missing <child>", 0);

  joint.origin = parse_origin(node, where);
  if (auto a = node.get_child_optional("axis")) {
    if (auto xyz = attr(*a, "xyz")) joint.axis = parse_triple(*xyz, where + " axis");
  }
  const double norm = joint.axis.norm();
  if (!(norm > 1e-12)) throw ValidationError(where + ": joint axis has zero length");
  joint.axis /= norm;

  if (auto l = node.get_child_optional("limit")) {
    JointLimits lim;
    auto get = [&](const char* key, double fallback) {
      auto v = attr(*l, key);
      return v ? parse_real(*v, where + " limit " + key) : fallback;
    };
    lim.lower = get("lower", 0.0);
    lim.upper = get("upper", 0.0);
    lim.effort = get("effort", lim.effort);
    lim.velocity = get("velocity", lim.velocity);
    joint.limits = lim;
  }
  if (joint.type == JointType::kContinuous) {
    JointLimits lim = joint.limits.value_or(JointLimits{});
    lim.lower = -std::numeric_limits<double>::infinity();
    lim.upper = std::numeric_limits<double>::infinity();
    joint.limits = lim;
  }
  joint.has_dynamics = node.get_child_optional("dynamics").has_value();
  return joint;
}

}  // namespace

Eigen::Matrix3d Inertial::tensor() const {
  Eigen::Matrix3d t;
  t << ixx, ixy, ixz,
       ixy, iyy, iyz,
       ixz, iyz, izz;
  return t;
}

std::string_view diagnostic_name(DiagnosticCode code) {
  switch (code) {
    case DiagnosticCode::kMultipleRoots: return "multiple_roots";
    case DiagnosticCode::kNoRoot: return "no_root";
    case DiagnosticCode::kCycle: return "cycle";
    case DiagnosticCode::kMultipleParents: return "multiple_parents";
    case DiagnosticCode::kDanglingReference: return "dangling_reference";
    case DiagnosticCode::kNonPositiveMass: return "non_positive_mass";
    case DiagnosticCode::kMissingInertial: return "missing_inertial";
    case DiagnosticCode::kMissingLimits: return "missing_limits";
    case DiagnosticCode::kInertiaNotPositive: return "inertia_not_positive";
    case DiagnosticCode::kIgnoredDynamics: return "ignored_dynamics";
  }
  return "unknown";
}

RobotDescription parse_urdf(std::string_view xml) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError("malformed XML: " + e.message(), static_cast<int>(e.line()));
  }
  const auto robot = tree.get_child_optional("robot");
  if (!robot) throw ParseError("missing <robot> root element", 0);

  RobotDescription desc;
  desc.name = attr(*robot, "name").value_or("");
  std::set<std::string> link_names;
  std::set<std::string> joint_names;
  for (const auto& [tag, node] : *robot) {
    if (tag == "link") {
      Link link = parse_link(node);
      if (!link_names.insert(link.name).second) {
        throw ValidationError("duplicate link name '" + link.name + "'");
      }
      desc.links.push_back(std::move(link));
    } else if (tag == "joint") {
      Joint joint = parse_joint(node);
      if (!joint_names.insert(joint.name).second) {
        throw ValidationError("duplicate joint name '" + joint.name + "'");
      }
      desc.joints.push_back(std::move(joint));
    }
  }
  return desc;
}

RobotDescription parse_urdf_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_urdf(buffer.str());
}

std::vector<Diagnostic> validate(const RobotDescription& desc) {
  std::vector<Diagnostic> out;
  auto error = [&](DiagnosticCode c, std::string m) { out.push_back({Severity::kError, c, std::move(m)}); };
  auto warning = [&](DiagnosticCode c, std::string m) { out.push_back({Severity::kWarning, c, std::move(m)}); };

  std::map<std::string, const Link*> links;
  for (const Link& l : desc.links) links[l.name] = &l;

  std::map<std::string, const Joint*> parent_joint;
  for (const Joint& j : desc.joints) {
    if (!links.count(j.parent)) {
      error(DiagnosticCode::kDanglingReference, "joint '" + j.name + "' references unknown parent link '" + j.parent + "'");
    }
    if (!links.count(j.child)) {
      error(DiagnosticCode::kDanglingReference, "joint '" + j.name + "' references unknown child link '" + j.child + "'");
    }
    if (!parent_joint.emplace(j.child, &j).second) {
      error(DiagnosticCode::kMultipleParents, "link '" + j.child + "' is the child of more than one joint");
    }
  }

  std::vector<std::string> roots;
  for (const Link& l : desc.links) {
    if (!parent_joint.count(l.name)) roots.push_back(l.name);
  }

  // Follow parent chains; any chain that revisits a link is a cycle.
  std::set<std::string> in_cycle;
  for (const Link& l : desc.links) {
    std::vector<std::string> chain;
    std::set<std::string> seen;
    std::string cur = l.name;
    while (true) {
      if (seen.count(cur)) {
        if (!in_cycle.count(cur)) {
          std::string members;
          auto start = std::find(chain.begin(), chain.end(), cur);
          for (auto it = start; it != chain.end(); ++it) {
            in_cycle.insert(*it);
            members += (members.empty() ? "" : " -> ") + *it;
          }
          error(DiagnosticCode::kCycle, "kinematic cycle: " + members);
        }
        break;
      }
      seen.insert(cur);
      chain.push_back(cur);
      auto it = parent_joint.find(cur);
      if (it == parent_joint.end() || !links.count(it->second->parent)) break;
      cur = it->second->parent;
    }
  }

  if (roots.size() > 1) {
    std::string names;
    for (const auto& r : roots) names += (names.empty() ? "" : ", ") + r;
    error(DiagnosticCode::kMultipleRoots, "multiple roots: " + names);
  } else if (roots.empty() && !desc.links.empty() && in_cycle.empty()) {
    error(DiagnosticCode::kNoRoot, "no root link");
  }

  for (const Link& l : desc.links) {
    auto pj = parent_joint.find(l.name);
    const bool movable = pj != parent_joint.end() && is_movable(pj->second->type);
    if (!l.inertial) {
      if (movable) {
        warning(DiagnosticCode::kMissingInertial, "link '" + l.name + "' has no <inertial> but is moved by joint '" +
                                                      pj->second->name + "'");
      }
      continue;
    }
    const Inertial& in = *l.inertial;
    if (in.mass < 0.0 || (in.mass == 0.0 && movable) || !std::isfinite(in.mass)) {
      error(DiagnosticCode::kNonPositiveMass, "link '" + l.name + "' has non-positive mass " + std::to_string(in.mass));
    }
    const Eigen::Matrix3d t = in.tensor();
    const Eigen::Vector3d eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(t, Eigen::EigenvaluesOnly).eigenvalues();
    const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
    if (eig.minCoeff() < -1e-12 * scale) {
      warning(DiagnosticCode::kInertiaNotPositive,
              "link '" + l.name + "' rotational inertia about the CoM has a negative eigenvalue " + std::to_string(eig.minCoeff()));
    }
  }

  for (const Joint& j : desc.joints) {
    if ((j.type == JointType::kRevolute || j.type == JointType::kPrismatic) && !j.limits) {
      warning(DiagnosticCode::kMissingLimits, "joint '" + j.name + "' has no <limit>");
    }
    if (j.has_dynamics) {
      warning(DiagnosticCode::kIgnoredDynamics, "joint '" + j.name + "' <dynamics> (damping/friction) is ignored");
    }
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::kError; });
}

RobotModel build_model(const RobotDescription& desc, BuildOptions options) {
  const std::vector<Diagnostic> diagnostics = validate(desc);
  std::string errors;
  for (const Diagnostic& d : diagnostics) {
    if (d.severity == Severity::kError) {
      errors += (errors.empty() ? "" : "; ") + std::string(diagnostic_name(d.code)) + ": " + d.message;
    }
  }
  if (!errors.empty()) throw ValidationError(errors);

  std::map<std::string, const Link*> links;
  for (const Link& l : desc.links) links[l.name] = &l;
  std::map<std::string, std::vector<const Joint*>> children;
  std::set<std::string> is_child;
  for (const Joint& j : desc.joints) {
    children[j.parent].push_back(&j);
    is_child.insert(j.child);
  }
  const Link* root = nullptr;
  for (const Link& l : desc.links) {
    if (!is_child.count(l.name)) root = &l;
  }
  if (root == nullptr) throw ValidationError("no root link");

  auto make_inertia = [](const Link& link, Body& body) {
    if (!link.inertial) return;
    const Inertial& in = *link.inertial;
    const Eigen::Matrix3d r = rotation_from_rpy<double>(in.origin.rpy);
    body.inertia = inertia_from_com<double>(in.mass, in.origin.xyz, r * in.tensor() * r.transpose());
    body.has_inertial = true;
  };

  std::vector<Body> bodies;
  Body base;
  base.name = root->name;
  make_inertia(*root, base);
  bodies.push_back(base);

  // Depth-first pre-order, siblings in document order.
  std::function<void(const std::string&, int)> visit = [&](const std::string& name, int index) {
    auto it = children.find(name);
    if (it == children.end()) return;
    for (const Joint* jp : it->second) {
      const Joint& j = *jp;
      Body b;
      b.name = j.child;
      b.parent = index;
      b.joint_name = j.name;
      b.joint_type = j.type;
      b.axis = j.axis;
      b.joint_origin = transform_from_rpy_xyz<double>(j.origin.rpy, j.origin.xyz);
      if (j.limits) b.limits = *j.limits;
      make_inertia(*links.at(j.child), b);
      if (is_movable(j.type) && !b.has_inertial && !options.kinematics_only) {
        throw ValidationError("link '" + b.name + "' is moved by joint '" + j.name +
                              "' but has no <inertial>; build with kinematics_only for kinematics use");
      }
      bodies.push_back(std::move(b));
      visit(j.child, static_cast<int>(bodies.size()) - 1);
    }
  };
  visit(root->name, 0);
  return RobotModel(desc.name, std::move(bodies), options.kinematics_only);
}

RobotModel load_model(const std::string& path, BuildOptions options) {
  return build_model(parse_urdf_file(path), options);
}

}  // namespace drm::urdf
