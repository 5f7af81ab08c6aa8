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

// robot: command-line front end.
//
//   robot <info|fk|jac|id|fd|ik|gen-data|sysid|check> <urdf-path> [flags]
//
// Exit codes: 0 success, 1 runtime/numerical failure, 2 usage/validation
// failure. With --format json a single JSON document goes to stdout;
// diagnostics always go to stderr.

#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "drm/check.hpp"
#include "drm/dataset_io.hpp"
#include "drm/dynamics.hpp"
#include "drm/kinematics.hpp"
#include "drm/learn.hpp"
#include "drm/urdf.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string command;
  std::string urdf;
  std::string q, qd, qdd, tau, target, q0;
  std::string link;
  std::string gravity = "0,0,-9.81";
  std::string format = "text";
  std::uint64_t seed = 0;
  std::string out, data, learn;
  int n = 100;
  int epochs = 1000;
  double lr = 0.01;
  std::string optimizer = "adam";
  int batch = 0;
  int samples = 50;
  int max_iters = 500;
  double noise = 0.0;

  bool json_output() const { return format == "json"; }
};

Eigen::VectorXd parse_vector(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  if (!text.empty()) {
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = text.find(',', start);
      const std::string token = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      std::string_view sv(token);
      if (!sv.empty() && sv.front() == '+') sv.remove_prefix(1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
      if (sv.empty() || ec != std::errc() || ptr != sv.data() + sv.size() || !std::isfinite(v)) {
        throw UsageError("--" + flag + ": invalid number '" + token + "'");
      }
      values.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

// Parses a joint-space flag; an omitted flag means zeros.
Eigen::VectorXd joint_vector(const std::string& text, const std::string& flag, int n) {
  if (text.empty()) return Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v = parse_vector(text, flag);
  if (v.size() != n) {
    throw UsageError("--" + flag + " has " + std::to_string(v.size()) + " values, model has " + std::to_string(n) +
                     " degrees of freedom");
  }
  return v;
}

Eigen::Vector3d gravity_of(const Config& c) {
  const Eigen::VectorXd g = parse_vector(c.gravity, "gravity");
  if (g.size() != 3) throw UsageError("--gravity needs 3 values");
  return g;
}

json to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string vec_text(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os << std::setprecision(10);
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? " " : "") << v(i);
  return os.str();
}

void emit(const Config& c, const json& doc, const std::string& text) {
  if (c.json_output()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << text;
  }
}

drm::RobotModel load(const Config& c, bool kinematics_only = false) {
  const drm::urdf::RobotDescription desc = drm::urdf::parse_urdf_file(c.urdf);
  for (const auto& d : drm::urdf::validate(desc)) {
    if (d.severity == drm::urdf::Severity::kWarning) {
      std::cerr << "warning [" << drm::urdf::diagnostic_name(d.code) << "]: " << d.message << '\n';
    }
  }
  return drm::urdf::build_model(desc, {kinematics_only});
}

std::string default_link(const drm::RobotModel& model, const std::string& link) {
  if (!link.empty()) {
    model.body_index(link);
    return link;
  }
  return model.body(model.body_count() - 1).name;
}

// ---------------------------------------------------------------------------

int cmd_info(const Config& c) {
  const drm::urdf::RobotDescription desc = drm::urdf::parse_urdf_file(c.urdf);
  const auto diagnostics = drm::urdf::validate(desc);
  json diag = json::array();
  for (const auto& d : diagnostics) {
    diag.push_back({{"severity", d.severity == drm::urdf::Severity::kError ? "error" : "warning"},
                    {"code", drm::urdf::diagnostic_name(d.code)},
                    {"message", d.message}});
    std::cerr << (d.severity == drm::urdf::Severity::kError ? "error" : "warning") << " ["
              << drm::urdf::diagnostic_name(d.code) << "]: " << d.message << '\n';
  }
  const bool ok = !drm::urdf::has_errors(diagnostics);
  int dof = 0;
  for (const auto& j : desc.joints) dof += drm::is_movable(j.type) ? 1 : 0;

  json links = json::array();
  std::ostringstream text;
  text << "robot: " << desc.name << "\nDoF: " << dof << "\nlinks (" << desc.links.size() << "):\n";
  for (const auto& l : desc.links) {
    links.push_back({{"name", l.name}, {"mass", l.inertial ? json(l.inertial->mass) : json(nullptr)}});
    text << "  " << l.name << "  mass=" << (l.inertial ? std::to_string(l.inertial->mass) : std::string("-")) << '\n';
  }
  json joints = json::array();
  text << "joints (" << desc.joints.size() << "):\n";
  for (const auto& j : desc.joints) {
    json entry = {{"name", j.name},         {"type", drm::joint_type_name(j.type)},
                  {"parent", j.parent},     {"child", j.child},
                  {"axis", to_json(j.axis)}};
    if (j.limits) {
      entry["limits"] = {{"lower", finite_or_null(j.limits->lower)},
                         {"upper", finite_or_null(j.limits->upper)},
                         {"effort", finite_or_null(j.limits->effort)},
                         {"velocity", finite_or_null(j.limits->velocity)}};
    } else {
      entry["limits"] = nullptr;
    }
    joints.push_back(entry);
    text << "  " << j.name << "  " << drm::joint_type_name(j.type) << "  " << j.parent << " -> " << j.child
         << "  axis=(" << vec_text(j.axis) << ")";
    if (j.limits) text << "  limits=[" << j.limits->lower << ", " << j.limits->upper << "]";
    text << '\n';
  }
  json doc = {{"name", desc.name}, {"dof", dof},           {"links", links},
              {"joints", joints},  {"diagnostics", diag}, {"valid", ok}};
  emit(c, doc, text.str());
  return ok ? kExitOk : kExitUsage;
}

int cmd_fk(const Config& c) {
  const drm::RobotModel model = load(c, true);
  const std::string link = default_link(model, c.link);
  const Eigen::VectorXd q = joint_vector(c.q, "q", model.dof_count());
  const drm::Pose<double> pose = drm::link_pose<double>(model, q, link);
  Eigen::Matrix<double, 3, 3, Eigen::RowMajor> r = pose.rotation;
  const Eigen::VectorXd rot = Eigen::Map<const Eigen::VectorXd>(r.data(), 9);
  const Eigen::VectorXd quat = drm::quaternion_wxyz(pose.rotation);
  json doc = {{"link", link},
              {"position", to_json(pose.translation)},
              {"rotation_matrix", to_json(rot)},
              {"quaternion_wxyz", to_json(quat)}};
  emit(c, doc, "link: " + link + "\nposition: " + vec_text(pose.translation) + "\nrotation_matrix: " + vec_text(rot) +
                   "\nquaternion_wxyz: " + vec_text(quat) + "\n");
  return kExitOk;
}

int cmd_jac(const Config& c) {
  const drm::RobotModel model = load(c, true);
  const std::string link = default_link(model, c.link);
  const Eigen::VectorXd q = joint_vector(c.q, "q", model.dof_count());
  const Eigen::Matrix<double, 6, Eigen::Dynamic, Eigen::RowMajor> jac = drm::link_jacobian<double>(model, q, link);
  const Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(jac.data(), jac.size());
  json doc = {{"link", link}, {"rows", 6}, {"cols", model.dof_count()}, {"jacobian", to_json(flat)}};
  std::ostringstream text;
  text << "link: " << link << "\njacobian (rows: angular xyz, linear xyz):\n";
  for (int r = 0; r < 6; ++r) text << "  " << vec_text(jac.row(r).transpose()) << '\n';
  emit(c, doc, text.str());
  return kExitOk;
}

int cmd_id(const Config& c) {
  const drm::RobotModel model = load(c);
  const int n = model.dof_count();
  const Eigen::VectorXd tau = drm::rnea<double>(model, joint_vector(c.q, "q", n), joint_vector(c.qd, "qd", n),
                                                joint_vector(c.qdd, "qdd", n), gravity_of(c));
  emit(c, json{{"tau", to_json(tau)}}, "tau: " + vec_text(tau) + "\n");
  return kExitOk;
}

int cmd_fd(const Config& c) {
  const drm::RobotModel model = load(c);
  const int n = model.dof_count();
  const Eigen::VectorXd qdd = drm::aba<double>(model, joint_vector(c.q, "q", n), joint_vector(c.qd, "qd", n),
                                               joint_vector(c.tau, "tau", n), gravity_of(c));
  emit(c, json{{"qdd", to_json(qdd)}}, "qdd: " + vec_text(qdd) + "\n");
  return kExitOk;
}

int cmd_ik(const Config& c) {
  const drm::RobotModel model = load(c, true);
  const std::string link = default_link(model, c.link);
  const int n = model.dof_count();
  const Eigen::VectorXd target = parse_vector(c.target, "target");
  drm::IkTarget goal;
  drm::IkOptions opts;
  opts.seed = c.seed;
  opts.max_iters = c.max_iters;
  if (target.size() == 3) {
    goal.position = target;
    opts.position_only = true;
  } else if (target.size() == 6) {
    goal.position = target.head<3>();
    goal.rotation = drm::rotation_from_rpy<double>(target.tail<3>());
  } else {
    throw UsageError("--target needs 3 values (x,y,z) or 6 values (x,y,z,roll,pitch,yaw)");
  }
  const drm::IkResult res = drm::inverse_kinematics(model, goal, link, joint_vector(c.q0, "q0", n), opts);
  json doc = {{"link", link},
              {"q", to_json(res.q)},
              {"converged", res.converged},
              {"residual", res.residual},
              {"iterations", res.iterations}};
  std::ostringstream text;
  text << "link: " << link << "\nq: " << vec_text(res.q) << "\nconverged: " << (res.converged ? "true" : "false")
       << "\nresidual: " << res.residual << "\niterations: " << res.iterations << '\n';
  emit(c, doc, text.str());
  return kExitOk;
}

int cmd_gen_data(const Config& c) {
  if (c.n < 1) throw UsageError("--n must be at least 1");
  if (c.out.empty()) throw UsageError("--out is required");
  if (c.noise < 0.0) throw UsageError("--noise must be non-negative");
  const drm::RobotModel model = load(c);
  const drm::learn::TrajectoryDataset data =
      drm::learn::generate_dataset(model, c.n, {}, gravity_of(c), c.seed, c.noise);
  drm::learn::write_dataset_jsonl(c.out, data);
  emit(c, json{{"records", data.size()}, {"out", c.out}},
       "wrote " + std::to_string(data.size()) + " records to " + c.out + "\n");
  return kExitOk;
}

struct LearnSpec {
  std::string link;
  drm::learn::Field field;
  drm::learn::ParamKind kind;
};

std::vector<LearnSpec> parse_learn(const std::string& text) {
  std::vector<LearnSpec> out;
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    const std::size_t a = item.find(':');
    const std::size_t b = a == std::string::npos ? a : item.find(':', a + 1);
    if (a == std::string::npos || b == std::string::npos || item.find(':', b + 1) != std::string::npos) {
      throw UsageError("malformed --learn entry '" + item + "' (expected link:field:kind)");
    }
    try {
      out.push_back({item.substr(0, a), drm::learn::parse_field(item.substr(a + 1, b - a - 1)),
                     drm::learn::parse_param_kind(item.substr(b + 1))});
    } catch (const drm::Error& e) {
      throw UsageError(std::string("--learn: ") + e.what());
    }
  }
  if (out.empty()) throw UsageError("--learn is required (link:field:kind,...)");
  return out;
}

int cmd_sysid(const Config& c) {
  if (c.data.empty()) throw UsageError("--data is required");
  const std::vector<LearnSpec> specs = parse_learn(c.learn);
  if (c.epochs < 1) throw UsageError("--epochs must be at least 1");
  if (!(c.lr > 0.0)) throw UsageError("--lr must be positive");
  drm::learn::FitOptions opts;
  if (c.optimizer == "gd") {
    opts.optimizer = drm::learn::Optimizer::kGradientDescent;
  } else if (c.optimizer == "adam") {
    opts.optimizer = drm::learn::Optimizer::kAdam;
  } else {
    throw UsageError("--optimizer must be gd or adam");
  }
  opts.learning_rate = c.lr;
  opts.epochs = c.epochs;
  opts.batch_size = c.batch;
  opts.gravity = gravity_of(c);

  const drm::RobotModel model = load(c);
  drm::learn::TrajectoryDataset data;
  try {
    data = drm::learn::read_dataset_jsonl(c.data);
  } catch (const drm::Error& e) {
    throw UsageError(std::string("--data: ") + e.what());
  }
  if (data.size() == 0) throw UsageError("--data: dataset is empty");
  try {
    drm::learn::check_dataset(data, model.dof_count());
  } catch (const drm::Error& e) {
    throw UsageError(std::string("--data: ") + e.what());
  }

  drm::learn::ParamStore store(model);
  for (const LearnSpec& s : specs) {
    if (!model.has_link(s.link)) throw UsageError("--learn: unknown link '" + s.link + "'");
    try {
      store.make_learnable(s.link, s.field, s.kind);
    } catch (const drm::NumericalError&) {
      throw;
    } catch (const drm::Error& e) {
      throw UsageError(std::string("--learn: ") + e.what());
    }
  }
  const drm::learn::TrainReport report = drm::learn::fit(store, data, opts);

  json params = json::object();
  std::ostringstream text;
  for (const auto& [key, value] : report.final_params) {
    params[key] = value.size() == 1 ? json(value(0)) : to_json(value);
    text << key << ": " << vec_text(value) << '\n';
  }
  json doc = {{"loss_curve", report.loss_curve},
              {"final_loss", report.final_loss},
              {"final_params", params},
              {"epochs", report.epochs},
              {"converged", report.converged}};
  std::ostringstream head;
  head << "epochs: " << report.epochs << "\nfinal_loss: " << report.final_loss
       << "\nconverged: " << (report.converged ? "true" : "false") << '\n';
  emit(c, doc, head.str() + text.str());
  return kExitOk;
}

int cmd_check(const Config& c) {
  const drm::RobotModel model = load(c);
  drm::CheckOptions opts;
  opts.seed = c.seed;
  opts.samples = c.samples;
  opts.gravity = gravity_of(c);
  const drm::CheckReport report = drm::run_self_check(model, opts);
  json checks = json::object();
  std::ostringstream text;
  for (const auto& r : report.checks) {
    checks[r.name] = {{"value", r.value},
                      {"threshold", r.threshold},
                      {"bound", r.lower_bound ? "lower" : "upper"},
                      {"passed", r.passed}};
    text << (r.passed ? "PASS " : "FAIL ") << r.name << "  value=" << r.value
         << (r.lower_bound ? "  min=" : "  max=") << r.threshold << '\n';
  }
  emit(c, json{{"robot", model.name()}, {"passed", report.passed()}, {"checks", checks}}, text.str());
  if (!report.passed()) {
    std::cerr << "failing checks:";
    for (const auto& f : report.failures()) std::cerr << ' ' << f;
    std::cerr << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentiable rigid-body kinematics and dynamics from URDF.\n"
               "Vectors are comma-separated decimals without spaces; SI units (rad, m, s, kg, N, N*m)."};
  app.require_subcommand(1);
  Config c;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("urdf", c.urdf, "URDF file")->required();
    sub->add_option("--gravity", c.gravity, "gravity x,y,z (default 0,0,-9.81)");
    sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--seed", c.seed, "random seed (default 0)");
  };

  auto* info = app.add_subcommand("info", "print model summary and validation diagnostics");
  add_common(info);

  auto* fk = app.add_subcommand("fk", "pose of a link in the base frame");
  auto* jac = app.add_subcommand("jac", "geometric Jacobian of a link (base frame, link origin)");
  for (auto* sub : {fk, jac}) {
    add_common(sub);
    sub->add_option("--q", c.q, "joint positions");
    sub->add_option("--link", c.link, "link name (default: last link)");
  }

  auto* id = app.add_subcommand("id", "inverse dynamics (RNEA)");
  add_common(id);
  id->add_option("--q", c.q, "joint positions");
  id->add_option("--qd", c.qd, "joint velocities");
  id->add_option("--qdd", c.qdd, "joint accelerations");

  auto* fd = app.add_subcommand("fd", "forward dynamics (ABA)");
  add_common(fd);
  fd->add_option("--q", c.q, "joint positions");
  fd->add_option("--qd", c.qd, "joint velocities");
  fd->add_option("--tau", c.tau, "joint torques/forces");

  auto* ik = app.add_subcommand("ik", "gradient-descent inverse kinematics");
  add_common(ik);
  ik->add_option("--link", c.link, "link name (default: last link)");
  ik->add_option("--target", c.target, "x,y,z or x,y,z,roll,pitch,yaw")->required();
  ik->add_option("--q0", c.q0, "initial joint positions (default zeros)");
  ik->add_option("--max-iters", c.max_iters, "iteration limit (default 500)");

  auto* gen = app.add_subcommand("gen-data", "write a seeded random inverse-dynamics dataset (JSONL)");
  add_common(gen);
  gen->add_option("--n", c.n, "number of records (default 100)");
  gen->add_option("--out", c.out, "output path")->required();
  gen->add_option("--noise", c.noise, "std of additive Gaussian torque noise (default 0)");

  auto* sysid = app.add_subcommand("sysid", "identify inertial parameters from a JSONL dataset");
  add_common(sysid);
  sysid->add_option("--data", c.data, "JSONL dataset")->required();
  sysid->add_option("--learn", c.learn, "link:field:kind,... (field: mass|com|rot_inertia)")->required();
  sysid->add_option("--epochs", c.epochs, "epochs (default 1000)");
  sysid->add_option("--lr", c.lr, "learning rate (default 0.01)");
  sysid->add_option("--optimizer", c.optimizer, "gd or adam (default adam)");
  sysid->add_option("--batch", c.batch, "batch size (default full)");

  auto* check = app.add_subcommand("check", "run the self-verification suite on a model");
  add_common(check);
  check->add_option("--samples", c.samples, "random states (default 50)");

  // "--q -0.5,1" would otherwise read -0.5,1 as a short option.
  std::vector<std::string> args(argv, argv + argc);
  for (std::size_t i = 1; i + 1 < args.size(); ++i) {
    static const std::set<std::string> kVectorFlags = {"--q", "--qd", "--qdd", "--tau", "--target", "--q0", "--gravity"};
    const std::string& next = args[i + 1];
    if (kVectorFlags.count(args[i]) && next.size() > 1 && next[0] == '-' &&
        (std::isdigit(static_cast<unsigned char>(next[1])) || next[1] == '.')) {
      args[i] += "=" + next;
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    }
  }
  std::vector<char*> merged;
  for (std::string& a : args) merged.push_back(a.data());

  try {
    app.parse(static_cast<int>(merged.size()), merged.data());
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (!std::filesystem::is_regular_file(c.urdf)) throw UsageError("cannot read URDF file: " + c.urdf);
    gravity_of(c);
    if (command == "info") return cmd_info(c);
    if (command == "fk") return cmd_fk(c);
    if (command == "jac") return cmd_jac(c);
    if (command == "id") return cmd_id(c);
    if (command == "fd") return cmd_fd(c);
    if (command == "ik") return cmd_ik(c);
    if (command == "gen-data") return cmd_gen_data(c);
    if (command == "sysid") return cmd_sysid(c);
    if (command == "check") return cmd_check(c);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const drm::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const drm::UnsupportedFeatureError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const drm::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const drm::UnknownLinkError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const drm::DynamicsUnavailableError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
