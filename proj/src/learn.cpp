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

#include "drm/learn.hpp"

#include <algorithm>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace drm::learn {

double positive_scalar_init(double target) {
  if (!(target > 0.0) || !std::isfinite(target)) {
    throw Error("positive_scalar_init: target must be positive and finite, got " + std::to_string(target));
  }
  if (target > 30.0) return target;
  // log(exp(t) - 1), written to stay accurate for small t.
  return std::log(-std::expm1(-target)) + target;
}

Eigen::VectorXd spd_init(const Eigen::Matrix3d& target) {
  const Eigen::Matrix3d sym = 0.5 * (target + target.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(sym);
  const Eigen::Vector3d clamped = eig.eigenvalues().cwiseMax(1e-8);
  Eigen::Matrix3d m = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
  m.diagonal().array() -= kSpdFloor;
  const Eigen::LLT<Eigen::Matrix3d> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalError("spd_init: Cholesky factorization failed");
  const Eigen::Matrix3d l = llt.matrixL();
  Eigen::VectorXd raw(6);
  raw << positive_scalar_init(l(0, 0)), positive_scalar_init(l(1, 1)), positive_scalar_init(l(2, 2)), l(1, 0),
      l(2, 0), l(2, 1);
  return raw;
}

std::string_view field_name(Field field) {
  switch (field) {
    case Field::kMass: return "mass";
    case Field::kCom: return "com";
    case Field::kRotInertia: return "rot_inertia";
  }
  return "unknown";
}

std::string_view param_kind_name(ParamKind kind) {
  switch (kind) {
    case ParamKind::kPositiveScalar: return "positive_scalar";
    case ParamKind::kFreeVector3: return "free_vector3";
    case ParamKind::kSpdMatrix3: return "spd_matrix3";
    case ParamKind::kFixed: return "fixed";
  }
  return "unknown";
}

Field parse_field(std::string_view name) {
  for (Field f : {Field::kMass, Field::kCom, Field::kRotInertia}) {
    if (field_name(f) == name) return f;
  }
  throw Error("unknown field '" + std::string(name) + "' (expected mass, com or rot_inertia)");
}

ParamKind parse_param_kind(std::string_view name) {
  for (ParamKind k : {ParamKind::kPositiveScalar, ParamKind::kFreeVector3, ParamKind::kSpdMatrix3, ParamKind::kFixed}) {
    if (param_kind_name(k) == name) return k;
  }
  throw Error("unknown parametrization '" + std::string(name) + "'");
}

ParamStore::ParamStore(const RobotModel& model) : model_(&model), raw_(0) {}

void ParamStore::check_new(int body, Field field) const {
  model_->require_dynamics();
  const Body& b = model_->body(body);
  if (!b.has_inertial) throw Error("link '" + b.name + "' has no inertial data to learn");
  for (const Entry& e : entries_) {
    if (e.body == body && e.field == field) {
      throw Error("field '" + std::string(field_name(field)) + "' of link '" + b.name + "' is already learnable");
    }
  }
}

void ParamStore::make_learnable(const std::string& link, Field field, ParamKind kind) {
  const int body = model_->body_index(link);
  check_new(body, field);
  const Inertia<double>& in = model_->body(body).inertia;
  std::shared_ptr<const Parametrization> param;
  Eigen::VectorXd raw;
  Eigen::VectorXd current;
  switch (field) {
    case Field::kMass: current = Eigen::VectorXd::Constant(1, in.mass); break;
    case Field::kCom: current = in.com; break;
    case Field::kRotInertia: current = Eigen::Map<const Eigen::VectorXd>(in.rot_inertia.data(), 9); break;
  }
  const int expected = static_cast<int>(current.size());
  switch (kind) {
    case ParamKind::kPositiveScalar:
      param = std::make_shared<PositiveScalar>();
      raw = Eigen::VectorXd::Constant(1, positive_scalar_init(current(0)));
      break;
    case ParamKind::kFreeVector3:
      param = std::make_shared<FreeVector3>();
      raw = current;
      break;
    case ParamKind::kSpdMatrix3:
      param = std::make_shared<SpdMatrix3>();
      raw = spd_init(in.rot_inertia);
      break;
    case ParamKind::kFixed:
      param = std::make_shared<FixedValue>(current);
      raw.resize(0);
      break;
  }
  if (param->value_size() != expected) {
    throw Error("parametrization '" + param->kind_name() + "' cannot represent field '" +
                std::string(field_name(field)) + "'");
  }
  make_learnable(link, field, std::move(param), raw);
}

void ParamStore::make_learnable(const std::string& link, Field field, std::shared_ptr<const Parametrization> param,
                                const Eigen::VectorXd& initial_raw) {
  const int body = model_->body_index(link);
  check_new(body, field);
  const int expected = field == Field::kMass ? 1 : (field == Field::kCom ? 3 : 9);
  if (param->value_size() != expected) {
    throw Error("parametrization '" + param->kind_name() + "' cannot represent field '" +
                std::string(field_name(field)) + "'");
  }
  require_size(initial_raw.size(), param->raw_size(), "initial raw vector");
  const int offset = raw_size();
  Eigen::VectorXd raw(raw_.size() + initial_raw.size());
  raw << raw_, initial_raw;
  raw_ = std::move(raw);
  entries_.push_back({body, field, std::move(param), offset});
}

void ParamStore::set_raw(const Eigen::VectorXd& raw) {
  require_size(raw.size(), raw_size(), "raw parameter vector");
  raw_ = raw;
}

std::map<std::string, Eigen::VectorXd> ParamStore::physical_values() const {
  std::map<std::string, Eigen::VectorXd> out;
  for (const Entry& e : entries_) {
    out[model_->body(e.body).name + "." + std::string(field_name(e.field))] =
        e.param->map(Eigen::VectorXd(raw_.segment(e.offset, e.param->raw_size())));
  }
  return out;
}

void check_dataset(const TrajectoryDataset& data, int n) {
  for (int k = 0; k < data.size(); ++k) {
    const Sample& s = data.samples[static_cast<std::size_t>(k)];
    for (const auto* v : {&s.q, &s.qd, &s.qdd, &s.tau}) {
      if (v->size() != n) {
        throw Error("record " + std::to_string(k) + " has a vector of length " + std::to_string(v->size()) +
                    ", expected " + std::to_string(n));
      }
      if (!v->allFinite()) throw Error("record " + std::to_string(k) + " contains a non-finite value");
    }
  }
}

TrajectoryDataset generate_dataset(const RobotModel& model, int n, const StateBounds& bounds,
                                   const Eigen::Vector3d& gravity, std::uint64_t seed, double noise_std) {
  if (n < 1) throw Error("generate_dataset: N must be at least 1");
  const int dof = model.dof_count();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, noise_std > 0.0 ? noise_std : 1.0);

  std::vector<double> lo(static_cast<std::size_t>(dof)), hi(static_cast<std::size_t>(dof));
  for (int d = 0; d < dof; ++d) {
    const JointLimits& lim = model.body(model.dof_bodies()[static_cast<std::size_t>(d)]).limits;
    lo[static_cast<std::size_t>(d)] = std::max(-bounds.q, lim.lower);
    hi[static_cast<std::size_t>(d)] = std::min(bounds.q, lim.upper);
  }

  TrajectoryDataset data;
  data.samples.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    Sample s{Eigen::VectorXd(dof), Eigen::VectorXd(dof), Eigen::VectorXd(dof), Eigen::VectorXd()};
    for (int d = 0; d < dof; ++d) {
      const double a = lo[static_cast<std::size_t>(d)];
      const double b = hi[static_cast<std::size_t>(d)];
      s.q(d) = a + (b - a) * 0.5 * (unit(rng) + 1.0);
    }
    for (int d = 0; d < dof; ++d) s.qd(d) = bounds.qd * unit(rng);
    for (int d = 0; d < dof; ++d) s.qdd(d) = bounds.qdd * unit(rng);
    s.tau = rnea<double>(model, s.q, s.qd, s.qdd, gravity);
    if (noise_std > 0.0) {
      for (int d = 0; d < dof; ++d) s.tau(d) += noise(rng);
    }
    data.samples.push_back(std::move(s));
  }
  return data;
}

double inverse_dynamics_loss(const ParamStore& store, const TrajectoryDataset& data, const Eigen::Vector3d& gravity) {
  return inverse_dynamics_loss<double>(store, data, store.raw(), gravity);
}

double inverse_dynamics_loss_gradient(const ParamStore& store, const TrajectoryDataset& data,
                                      const Eigen::VectorXd& raw, const Eigen::Vector3d& gravity,
                                      Eigen::VectorXd& grad, int begin, int end) {
  double value = 0.0;
  grad = ad::gradient(
      [&](const VecX<ad::Var>& x) { return inverse_dynamics_loss<ad::Var>(store, data, x, gravity, begin, end); },
      raw, &value);
  return value;
}

TrainReport fit(ParamStore& store, const TrajectoryDataset& data, const FitOptions& options) {
  if (store.raw_size() == 0) throw Error("fit: no learnable parameters");
  if (data.size() == 0) throw Error("fit: empty dataset");
  check_dataset(data, store.model().dof_count());
  if (!(options.learning_rate > 0.0)) throw Error("fit: learning rate must be positive");

  const int batch = options.batch_size > 0 ? std::min(options.batch_size, data.size()) : data.size();
  Eigen::VectorXd raw = store.raw();
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(raw.size());
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(raw.size());
  long step = 0;

  TrainReport report;
  auto full_loss = [&](const Eigen::VectorXd& r) {
    return inverse_dynamics_loss<double>(store, data, r, options.gravity);
  };
  auto check = [&](int epoch, double loss) {
    if (!std::isfinite(loss) || loss > 1e12) throw DivergenceError(epoch, loss);
  };

  int epoch = 0;
  for (; epoch < options.epochs; ++epoch) {
    const double loss = full_loss(raw);
    check(epoch, loss);
    report.loss_curve.push_back(loss);
    if (loss < options.tolerance) {
      report.converged = true;
      break;
    }
    const std::size_t k = report.loss_curve.size();
    if (k > static_cast<std::size_t>(options.patience)) {
      const double past = report.loss_curve[k - 1 - static_cast<std::size_t>(options.patience)];
      if ((past - loss) / std::max(past, 1e-300) < options.min_relative_improvement) {
        report.converged = true;
        break;
      }
    }

    for (int begin = 0; begin < data.size(); begin += batch) {
      const int end = std::min(begin + batch, data.size());
      Eigen::VectorXd grad;
      double batch_loss = 0.0;
      try {
        batch_loss = inverse_dynamics_loss_gradient(store, data, raw, options.gravity, grad, begin, end);
      } catch (const NumericalError&) {
        throw DivergenceError(epoch, std::numeric_limits<double>::quiet_NaN());
      }
      check(epoch, batch_loss);
      ++step;
      if (options.optimizer == Optimizer::kGradientDescent) {
        raw -= options.learning_rate * grad;
      } else {
        m1 = options.beta1 * m1 + (1.0 - options.beta1) * grad;
        m2 = options.beta2 * m2 + (1.0 - options.beta2) * grad.cwiseAbs2();
        const double c1 = 1.0 - std::pow(options.beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(options.beta2, static_cast<double>(step));
        raw.array() -= options.learning_rate * (m1.array() / c1) / ((m2.array() / c2).sqrt() + options.epsilon);
      }
    }
  }

  store.set_raw(raw);
  report.epochs = epoch;
  report.final_loss = full_loss(raw);
  check(epoch, report.final_loss);
  if (!report.converged) report.loss_curve.push_back(report.final_loss);
  if (report.final_loss < options.tolerance) report.converged = true;
  report.final_params = store.physical_values();
  return report;
}

}  // namespace drm::learn
